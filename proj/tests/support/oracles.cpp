#include "support/oracles.hpp"

#include <Eigen/Eigenvalues>

namespace oracle {

CMatrix kron_loops(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      for (Index k = 0; k < b.rows(); ++k)
        for (Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

CMatrix partial_inner_loops(const CVector& xi, const CMatrix& o, CompositeDims dims) {
  CMatrix m = CMatrix::Zero(dims.object, dims.object);
  for (Index a = 0; a < dims.object; ++a)
    for (Index b = 0; b < dims.object; ++b)
      for (Index j = 0; j < dims.probe; ++j)
        for (Index k = 0; k < dims.probe; ++k)
          m(a, b) += std::conj(xi[j]) * o(a * dims.probe + j, b * dims.probe + k) * xi[k];
  return m;
}

Complex quadratic_form(const CVector& s, const CMatrix& o) {
  Complex acc = 0.0;
  for (Index i = 0; i < o.rows(); ++i)
    for (Index j = 0; j < o.cols(); ++j) acc += std::conj(s[i]) * o(i, j) * s[j];
  return acc;
}

CMatrix function_of(const CMatrix& h, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  RVector mapped = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * mapped.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

MeanSquares brute_force_mean_squares(const MeasurementProcess& proc, const QState& psi,
                                     const std::function<double(double)>& f) {
  const auto dims = proc.dims();
  const CMatrix u = proc.interaction().dense();
  const CMatrix i_obj = CMatrix::Identity(dims.object, dims.object);
  const CMatrix i_probe = CMatrix::Identity(dims.probe, dims.probe);
  const CMatrix meter_t = u.adjoint() * kron_loops(i_obj, proc.meter().matrix()) * u;
  const CMatrix f_meter_t = u.adjoint() * kron_loops(i_obj, function_of(proc.meter().matrix(), f)) * u;
  const CMatrix x0 = kron_loops(proc.measured().matrix(), i_probe);
  const CMatrix p0 = kron_loops(proc.disturbed().matrix(), i_probe);
  const CMatrix xt = u.adjoint() * x0 * u;
  const CMatrix pt = u.adjoint() * p0 * u;
  const CVector state = kron(psi.amplitudes(), proc.probe_state().amplitudes());

  const CMatrix a_eps = meter_t - x0;
  const CMatrix a_delta = f_meter_t - xt;
  const CMatrix a_eta = pt - p0;
  return {quadratic_form(state, a_eps * a_eps).real(), quadratic_form(state, a_delta * a_delta).real(),
          quadratic_form(state, a_eta * a_eta).real()};
}

std::vector<CMatrix> brute_force_povm(const MeasurementProcess& proc) {
  const auto dims = proc.dims();
  const CMatrix u = proc.interaction().dense();
  const auto spec = proc.meter().spectrum(proc.tolerances());
  std::vector<CMatrix> out;
  for (std::size_t k = 0; k < spec.clusters.size(); ++k) {
    const CMatrix e = spec.projector(k);
    const CMatrix evolved = u.adjoint() * kron_loops(CMatrix::Identity(dims.object, dims.object), e) * u;
    out.push_back(partial_inner_loops(proc.probe_state().amplitudes(), evolved, dims));
  }
  return out;
}

NormalEquations unbiasing_normal_equations(const MeasurementProcess& proc) {
  const auto dims = proc.dims();
  const auto povm = brute_force_povm(proc);
  const CMatrix u = proc.interaction().dense();
  const CMatrix xt = u.adjoint() * kron_loops(proc.measured().matrix(), CMatrix::Identity(dims.probe, dims.probe)) * u;
  const CMatrix target = partial_inner_loops(proc.probe_state().amplitudes(), xt, dims);

  const auto n = static_cast<Index>(povm.size());
  RMatrix g(n, n);
  RVector h(n);
  for (Index j = 0; j < n; ++j) {
    h[j] = (povm[static_cast<std::size_t>(j)] * target).trace().real();
    for (Index k = 0; k < n; ++k)
      g(j, k) = (povm[static_cast<std::size_t>(j)] * povm[static_cast<std::size_t>(k)]).trace().real();
  }
  // Pseudo-inverse through the symmetric eigendecomposition of G; the
  // residual does not depend on which least-squares solution is taken.
  Eigen::SelfAdjointEigenSolver<RMatrix> es(g);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  RVector inv(n);
  for (Index i = 0; i < n; ++i) {
    const double ev = es.eigenvalues()[i];
    inv[i] = std::abs(ev) > 1e-13 * top ? 1.0 / ev : 0.0;
  }
  NormalEquations out;
  out.f = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose() * h;
  CMatrix deficit = -target;
  for (Index k = 0; k < n; ++k) deficit += out.f[k] * povm[static_cast<std::size_t>(k)];
  out.residual = deficit.norm();
  return out;
}

DeltaOracle brute_force_min_delta(const MeasurementProcess& proc, const QState& psi) {
  const auto dims = proc.dims();
  const CMatrix u = proc.interaction().dense();
  const CMatrix i_obj = CMatrix::Identity(dims.object, dims.object);
  const CMatrix xt = u.adjoint() * kron_loops(proc.measured().matrix(), CMatrix::Identity(dims.probe, dims.probe)) * u;
  const CVector state = kron(psi.amplitudes(), proc.probe_state().amplitudes());
  const auto spec = proc.meter().spectrum(proc.tolerances());
  const auto n = static_cast<Index>(spec.clusters.size());
  std::vector<CMatrix> et;
  for (std::size_t k = 0; k < spec.clusters.size(); ++k)
    et.push_back(u.adjoint() * kron_loops(i_obj, spec.projector(k)) * u);

  DeltaOracle out;
  out.gram.resize(n, n);
  out.linear.resize(n);
  for (Index j = 0; j < n; ++j) {
    const CMatrix& ej = et[static_cast<std::size_t>(j)];
    out.linear[j] = quadratic_form(state, 0.5 * (ej * xt + xt * ej)).real();
    for (Index k = 0; k < n; ++k) out.gram(j, k) = quadratic_form(state, ej * et[static_cast<std::size_t>(k)]).real();
  }
  out.constant = quadratic_form(state, xt * xt).real();
  Eigen::SelfAdjointEigenSolver<RMatrix> es(out.gram);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  RVector inv(n);
  for (Index i = 0; i < n; ++i) {
    const double ev = es.eigenvalues()[i];
    inv[i] = std::abs(ev) > 1e-13 * top ? 1.0 / ev : 0.0;
  }
  out.f = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose() * out.linear;
  const double m = out.f.dot(out.gram * out.f) - 2.0 * out.linear.dot(out.f) + out.constant;
  out.delta_min = std::sqrt(std::max(0.0, m));
  return out;
}

MeasurementProcess random_process(Index n_obj, Index n_probe, Rng& rng) {
  const CompositeDims dims{n_obj, n_probe};
  CMatrix u = haar_unitary(dims.total(), rng);
  QState xi = haar_state(n_probe, rng);
  Observable meter(random_hermitian(n_probe, rng), Units::kLength);
  Observable x(random_hermitian(n_obj, rng), Units::kLength);
  Observable p(random_hermitian(n_obj, rng), Units::kMomentum);
  return MeasurementProcess(dims, std::move(xi), UnitaryOp(std::move(u)), std::move(meter), std::move(x),
                            std::move(p), 1.0);
}

MeasurementProcess random_process_integer_meter(Index n_obj, Index n_probe, Rng& rng) {
  const CompositeDims dims{n_obj, n_probe};
  CMatrix u = haar_unitary(dims.total(), rng);
  QState xi = haar_state(n_probe, rng);
  const CMatrix basis = haar_unitary(n_probe, rng);
  RVector levels = RVector::LinSpaced(n_probe, 0.0, static_cast<double>(n_probe - 1));
  CMatrix m = basis * levels.cast<Complex>().asDiagonal() * basis.adjoint();
  Observable meter(m, Units::kLength);
  Observable x(random_hermitian(n_obj, rng), Units::kLength);
  Observable p(random_hermitian(n_obj, rng), Units::kMomentum);
  return MeasurementProcess(dims, std::move(xi), UnitaryOp(std::move(u)), std::move(meter), std::move(x),
                            std::move(p), 1.0);
}

}  // namespace oracle
