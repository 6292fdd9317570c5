#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "edrlab/grid.hpp"
#include "edrlab/process.hpp"

namespace edrlab {

enum class ModelKind { kVonNeumann, kSwap, kIdentity, kHaar, kCustom };

std::string_view model_kind_name(ModelKind kind);
/// Accepts "vonneumann"/"von_neumann", "swap", "identity", "haar", "custom".
ModelKind parse_model_kind(std::string_view name);

struct GaussianParams {
  double x0 = 0.0;
  double p0 = 0.0;
  double sigma = 1.0;
};

struct ModelSpec {
  ModelKind kind = ModelKind::kVonNeumann;
  GridSpec grid_obj;
  GridSpec grid_probe;
  double coupling = 1.0;
  GaussianParams probe;
  std::uint64_t seed = 0;  // haar only
  std::filesystem::path custom_path;
};

/// U = exp(-i lambda (x (x) P) / hbar), meter X = probe position, Gaussian
/// probe. Exponentiated in the eigenbasis of the generator.
MeasurementProcess von_neumann(const ModelSpec& spec);

/// U = SWAP; requires equal object and probe grid sizes.
MeasurementProcess swap(const ModelSpec& spec);

/// U = 1.
MeasurementProcess identity(const ModelSpec& spec);

/// Haar-random U and probe state on the two grids, deterministic in seed.
MeasurementProcess haar(const ModelSpec& spec);

MeasurementProcess build_model(const ModelSpec& spec);

/// exp(-i theta A (x) B) from the eigendecompositions of A and B. Returns the
/// object-controlled form when A is diagonal.
UnitaryOp exp_product_generator(const Observable& a, const Observable& b,
                                double theta, const Tolerances& tol = {});

}  // namespace edrlab
