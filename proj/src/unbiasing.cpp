#include "edrlab/unbiasing.hpp"

#include <algorithm>
#include <cmath>

#include "edrlab/povm.hpp"

namespace edrlab {

namespace {

double feasibility_threshold(const MeasurementProcess& proc) {
  const auto& tol = proc.tolerances();
  const auto spec = proc.measured().spectrum(tol);
  double scale = spec.diameter;
  if (scale <= 0.0) scale = std::max(proc.measured().operator_norm(), 1.0);
  return tol.feasibility_rel * scale;
}

CMatrix combine(const DeficitComponents& comps, const RVector& f) {
  CMatrix sum = -comps.target.matrix();
  for (std::size_t k = 0; k < comps.basis.size(); ++k) sum += f[static_cast<Index>(k)] * comps.basis[k].matrix();
  return sum;
}

std::vector<double> to_vector(const RVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

DeficitComponents deficit_components(const MeasurementProcess& proc) {
  PovmSet povm = extract_povm(proc);
  DeficitComponents out{.cluster_values = {},
                        .basis = {},
                        .target = Observable(CMatrix::Identity(1, 1), Units::kLength)};
  out.cluster_values.reserve(povm.outcomes.size());
  out.basis.reserve(povm.outcomes.size());
  for (auto& o : povm.outcomes) {
    out.cluster_values.push_back(o.value);
    out.basis.push_back(std::move(o.element));
  }
  const CMatrix& v = proc.isometry();
  out.target = Observable(v.adjoint() * apply_object(proc.measured().matrix(), v, proc.dims()), Units::kLength,
                          proc.tolerances());
  return out;
}

void deficit_least_squares_system(const DeficitComponents& comps, RMatrix& a, RVector& b) {
  const Index n = comps.target.dim();
  const Index entries = n * n;
  a.resize(2 * entries, static_cast<Index>(comps.basis.size()));
  for (std::size_t k = 0; k < comps.basis.size(); ++k) {
    const auto& m = comps.basis[k].matrix();
    const Eigen::Map<const CVector> flat(m.data(), entries);
    a.col(static_cast<Index>(k)).head(entries) = flat.real();
    a.col(static_cast<Index>(k)).tail(entries) = flat.imag();
  }
  const auto& t = comps.target.matrix();
  const Eigen::Map<const CVector> flat(t.data(), entries);
  b.resize(2 * entries);
  b.head(entries) = flat.real();
  b.tail(entries) = flat.imag();
}

RVector minimum_norm_solve(const RMatrix& a, const RVector& b, double rel_cutoff) {
  Eigen::BDCSVD<RMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(rel_cutoff);
  return svd.solve(b);
}

UnbiasingSolution solve_unbiased_f(const MeasurementProcess& proc) {
  const auto comps = deficit_components(proc);
  RMatrix a;
  RVector b;
  deficit_least_squares_system(comps, a, b);
  const RVector f = minimum_norm_solve(a, b, proc.tolerances().pinv_cutoff_rel);

  CMatrix residual_op = combine(comps, f);
  UnbiasingSolution out{.f_star = MeterFunction::tabulated(comps.cluster_values, to_vector(f)),
                        .images = to_vector(f),
                        .residual = residual_op.norm(),
                        .deficit_op = Observable(residual_op, Units::kLength, proc.tolerances()),
                        .feasible = false};
  out.feasible = out.residual <= feasibility_threshold(proc);
  return out;
}

double DeltaQuadratic::value(const RVector& f) const { return f.dot(gram * f) - 2.0 * linear.dot(f) + constant; }

RVector DeltaQuadratic::gradient(const RVector& f) const { return 2.0 * (gram * f - linear); }

DeltaQuadratic delta_quadratic(const MeasurementProcess& proc, const QState& psi) {
  if (psi.dim() != proc.dims().object) throw Error(ErrorCode::kDimMismatch, "object state dimension mismatch");
  const auto dims = proc.dims();
  const auto spec = proc.meter().spectrum(proc.tolerances());
  const CMatrix q_adj = spec.eigenvectors.adjoint();

  const CVector out = proc.isometry() * psi.amplitudes();
  const CVector x_out = apply_object(proc.measured().matrix(), out, dims);
  const CVector w = apply_probe(q_adj, out, dims);
  const CVector u = apply_probe(q_adj, x_out, dims);

  const Index clusters = static_cast<Index>(spec.clusters.size());
  DeltaQuadratic qf;
  qf.gram = RMatrix::Zero(clusters, clusters);
  qf.linear = RVector::Zero(clusters);
  for (Index k = 0; k < clusters; ++k) {
    const auto& c = spec.clusters[static_cast<std::size_t>(k)];
    double g = 0.0;
    double h = 0.0;
    for (Index a = 0; a < dims.object; ++a) {
      const auto ws = w.segment(a * dims.probe + c.first, c.count);
      const auto us = u.segment(a * dims.probe + c.first, c.count);
      g += ws.squaredNorm();
      h += ws.dot(us).real();
    }
    // Meter projectors are mutually orthogonal, so off-diagonal terms vanish.
    qf.gram(k, k) = g;
    qf.linear[k] = h;
  }
  qf.constant = x_out.squaredNorm();
  return qf;
}

DeltaOptimum min_delta_f(const MeasurementProcess& proc, const QState& psi) {
  const auto qf = delta_quadratic(proc, psi);
  const auto spec = proc.meter().spectrum(proc.tolerances());
  const RVector f = minimum_norm_solve(qf.gram, qf.linear, proc.tolerances().pinv_cutoff_rel);
  const double value = qf.value(f);
  if (value < -proc.tolerances().moment_radicand) {
    throw Error(ErrorCode::kNumericalInconsistency, "minimized mean square is negative");
  }
  return DeltaOptimum{MeterFunction::tabulated(spec.cluster_values(), to_vector(f)), to_vector(f),
                      std::sqrt(std::max(0.0, value))};
}

std::optional<DeltaOptimum> min_delta_unbiased(const MeasurementProcess& proc, const QState& psi) {
  const auto& tol = proc.tolerances();
  const auto comps = deficit_components(proc);
  RMatrix a;
  RVector b;
  deficit_least_squares_system(comps, a, b);
  const RVector f0 = minimum_norm_solve(a, b, tol.pinv_cutoff_rel);
  if ((a * f0 - b).norm() > feasibility_threshold(proc)) return std::nullopt;

  // Null space of the deficit map: right singular vectors below the cutoff.
  Eigen::BDCSVD<RMatrix> svd(a, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  const double cut = sv.size() > 0 ? tol.pinv_cutoff_rel * sv[0] : 0.0;
  Index rank = 0;
  while (rank < sv.size() && sv[rank] > cut) ++rank;
  const RMatrix null_basis = svd.matrixV().rightCols(a.cols() - rank);

  const auto qf = delta_quadratic(proc, psi);
  RVector f = f0;
  if (null_basis.cols() > 0) {
    const RMatrix reduced = null_basis.transpose() * qf.gram * null_basis;
    const RVector rhs = null_basis.transpose() * (qf.linear - qf.gram * f0);
    f += null_basis * minimum_norm_solve(reduced, rhs, tol.pinv_cutoff_rel);
  }
  const double value = qf.value(f);
  return DeltaOptimum{MeterFunction::tabulated(comps.cluster_values, to_vector(f)), to_vector(f),
                      std::sqrt(std::max(0.0, value))};
}

}  // namespace edrlab
