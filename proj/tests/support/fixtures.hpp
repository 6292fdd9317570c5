#pragma once

// Model configurations shared by unit and acceptance tests.

#include <edrlab/models.hpp>

namespace fixture {

using namespace edrlab;

/// Minimal-uncertainty von Neumann setup resolved well on both grids: probe
/// spacing sigma_x / 2.5, object spacing obj_dx, 64 points on each side by
/// default.
inline ModelSpec von_neumann_spec(double sigma_x, double obj_dx, Index n = 64, double lambda = 1.0,
                                  double offset = 0.0, double hbar = 1.0) {
  ModelSpec spec;
  spec.kind = ModelKind::kVonNeumann;
  spec.grid_probe = GridSpec{n, sigma_x / 2.5, hbar};
  spec.grid_obj = GridSpec{n, obj_dx, hbar};
  spec.coupling = lambda;
  spec.probe = GaussianParams{offset, 0.0, sigma_x};
  return spec;
}

/// Centered Gaussian object state with sigma = object window / 16.
inline QState centered_object_state(const ModelSpec& spec) {
  return gaussian_state(spec.grid_obj, 0.0, 0.0, spec.grid_obj.window() / 16.0);
}

inline ModelSpec small_grid_spec(ModelKind kind, Index n, double dx = 1.0, double sigma = 1.0, double x0 = 0.0) {
  ModelSpec spec;
  spec.kind = kind;
  spec.grid_obj = GridSpec{n, dx, 1.0};
  spec.grid_probe = GridSpec{n, dx, 1.0};
  spec.probe = GaussianParams{x0, 0.0, sigma};
  return spec;
}

/// Process with the probe state replaced.
inline MeasurementProcess with_probe_state(const MeasurementProcess& proc, QState xi) {
  return MeasurementProcess(proc.dims(), std::move(xi), proc.interaction(), proc.meter(), proc.measured(),
                            proc.disturbed(), proc.hbar(), proc.tolerances());
}

inline double mean(const QState& s, const Observable& o) { return expectation(s, o); }

}  // namespace fixture
