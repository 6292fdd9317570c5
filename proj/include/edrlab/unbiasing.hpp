#pragma once

// Meter post-processing f(X) as a linear unknown. For a tabulated f the
// unbiasedness deficit is sum_k f_k Pi_k - <xi|x(t)|xi>, so whether some
// function of the meter can make the process unbiased is an operator least
// squares problem over the real vector (f_k).

#include <optional>
#include <vector>

#include "edrlab/process.hpp"

namespace edrlab {

struct DeficitComponents {
  std::vector<double> cluster_values;
  std::vector<Observable> basis;  // POVM elements, one per cluster
  Observable target;              // <xi| x(t) |xi>
};

struct UnbiasingSolution {
  MeterFunction f_star;
  std::vector<double> images;
  double residual = 0.0;  // Frobenius norm of the deficit at f_star
  Observable deficit_op;
  bool feasible = false;  // residual <= feasibility_rel * diameter(x)
};

/// delta_f^2 = f^T G f - 2 h^T f + c for the tabulated f in one state.
struct DeltaQuadratic {
  RMatrix gram;
  RVector linear;
  double constant = 0.0;

  double value(const RVector& f) const;
  RVector gradient(const RVector& f) const;
};

struct DeltaOptimum {
  MeterFunction f_star;
  std::vector<double> images;
  double delta_min = 0.0;
};

DeficitComponents deficit_components(const MeasurementProcess& proc);

/// Real columns [Re vec(Pi_k); Im vec(Pi_k)] and right-hand side built from
/// the target, so that ||A f - b|| is the Frobenius deficit.
void deficit_least_squares_system(const DeficitComponents& comps, RMatrix& a,
                                  RVector& b);

/// Minimum-norm solution of min ||A x - b|| with singular values below
/// rel_cutoff * sigma_max discarded.
RVector minimum_norm_solve(const RMatrix& a, const RVector& b,
                           double rel_cutoff);

UnbiasingSolution solve_unbiased_f(const MeasurementProcess& proc);

DeltaQuadratic delta_quadratic(const MeasurementProcess& proc,
                               const QState& psi);

DeltaOptimum min_delta_f(const MeasurementProcess& proc, const QState& psi);

/// Minimum of delta over all f satisfying the unbiasedness condition; empty
/// when no such f exists at the feasibility tolerance.
std::optional<DeltaOptimum> min_delta_unbiased(const MeasurementProcess& proc,
                                               const QState& psi);

}  // namespace edrlab
