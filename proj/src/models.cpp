#include "edrlab/models.hpp"

#include <cmath>

#include "edrlab/model_io.hpp"
#include "edrlab/random.hpp"

namespace edrlab {

namespace {

double shared_hbar(const ModelSpec& spec) {
  spec.grid_obj.validate();
  spec.grid_probe.validate();
  if (spec.grid_obj.hbar != spec.grid_probe.hbar) {
    throw Error(ErrorCode::kConfig, "object and probe grids disagree on hbar");
  }
  return spec.grid_obj.hbar;
}

QState probe_state(const ModelSpec& spec) {
  return gaussian_state(spec.grid_probe, spec.probe.x0, spec.probe.p0, spec.probe.sigma);
}

CompositeDims dims_of(const ModelSpec& spec) { return {spec.grid_obj.n, spec.grid_probe.n}; }

bool is_diagonal(const CMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
  return true;
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kVonNeumann:
      return "vonneumann";
    case ModelKind::kSwap:
      return "swap";
    case ModelKind::kIdentity:
      return "identity";
    case ModelKind::kHaar:
      return "haar";
    case ModelKind::kCustom:
      return "custom";
  }
  return "custom";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "vonneumann" || name == "von_neumann") return ModelKind::kVonNeumann;
  if (name == "swap") return ModelKind::kSwap;
  if (name == "identity") return ModelKind::kIdentity;
  if (name == "haar") return ModelKind::kHaar;
  if (name == "custom") return ModelKind::kCustom;
  throw Error(ErrorCode::kConfig, "unknown model kind '" + std::string(name) + "'");
}

UnitaryOp exp_product_generator(const Observable& a, const Observable& b, double theta, const Tolerances& tol) {
  if (!std::isfinite(theta)) throw Error(ErrorCode::kConfig, "coupling must be finite");
  const auto sb = b.spectrum(tol);
  const CMatrix& qb = sb.eigenvectors;
  const RVector& eb = sb.eigenvalues;
  const CompositeDims dims{a.dim(), b.dim()};

  if (is_diagonal(a.matrix())) {
    std::vector<CMatrix> blocks;
    blocks.reserve(static_cast<std::size_t>(dims.object));
    for (Index i = 0; i < dims.object; ++i) {
      const double ai = a.matrix()(i, i).real();
      CVector phases(dims.probe);
      for (Index j = 0; j < dims.probe; ++j) phases[j] = std::polar(1.0, -theta * ai * eb[j]);
      blocks.push_back(qb * phases.asDiagonal() * qb.adjoint());
    }
    return UnitaryOp(dims, std::move(blocks), tol);
  }

  const auto sa = a.spectrum(tol);
  const CMatrix q = kron(sa.eigenvectors, qb);
  CVector phases(dims.total());
  for (Index i = 0; i < dims.object; ++i)
    for (Index j = 0; j < dims.probe; ++j)
      phases[i * dims.probe + j] = std::polar(1.0, -theta * sa.eigenvalues[i] * eb[j]);
  return UnitaryOp(CMatrix(q * phases.asDiagonal() * q.adjoint()), tol);
}

MeasurementProcess von_neumann(const ModelSpec& spec) {
  const double hbar = shared_hbar(spec);
  const Observable x = position_op(spec.grid_obj);
  const Observable big_p = momentum_op(spec.grid_probe);
  UnitaryOp u = exp_product_generator(x, big_p, spec.coupling / hbar);
  return MeasurementProcess(dims_of(spec), probe_state(spec), std::move(u), position_op(spec.grid_probe), x,
                            momentum_op(spec.grid_obj), hbar);
}

MeasurementProcess swap(const ModelSpec& spec) {
  const double hbar = shared_hbar(spec);
  if (spec.grid_obj.n != spec.grid_probe.n) {
    throw Error(ErrorCode::kDimMismatch, "swap model needs equal object and probe grid sizes");
  }
  return MeasurementProcess(dims_of(spec), probe_state(spec), UnitaryOp::swap(spec.grid_obj.n),
                            position_op(spec.grid_probe), position_op(spec.grid_obj), momentum_op(spec.grid_obj),
                            hbar);
}

MeasurementProcess identity(const ModelSpec& spec) {
  const double hbar = shared_hbar(spec);
  const auto dims = dims_of(spec);
  return MeasurementProcess(dims, probe_state(spec), UnitaryOp::identity(dims.total()), position_op(spec.grid_probe),
                            position_op(spec.grid_obj), momentum_op(spec.grid_obj), hbar);
}

MeasurementProcess haar(const ModelSpec& spec) {
  const double hbar = shared_hbar(spec);
  const auto dims = dims_of(spec);
  Rng rng(spec.seed);
  CMatrix u = haar_unitary(dims.total(), rng);
  QState xi = haar_state(dims.probe, rng);
  return MeasurementProcess(dims, std::move(xi), UnitaryOp(std::move(u)), position_op(spec.grid_probe),
                            position_op(spec.grid_obj), momentum_op(spec.grid_obj), hbar);
}

MeasurementProcess build_model(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::kVonNeumann:
      return von_neumann(spec);
    case ModelKind::kSwap:
      return swap(spec);
    case ModelKind::kIdentity:
      return identity(spec);
    case ModelKind::kHaar:
      return haar(spec);
    case ModelKind::kCustom:
      return load_custom(spec.custom_path);
  }
  throw Error(ErrorCode::kConfig, "unknown model kind");
}

}  // namespace edrlab
