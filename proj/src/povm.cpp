#include "edrlab/povm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace edrlab {

namespace {

double hermitian_norm(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

double PovmSet::min_eigenvalue() const {
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& o : outcomes) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(o.element.matrix(), Eigen::EigenvaluesOnly);
    lowest = std::min(lowest, es.eigenvalues()(0));
  }
  return lowest;
}

double PovmSet::completeness_defect() const {
  if (outcomes.empty()) return std::numeric_limits<double>::infinity();
  const Index n = outcomes.front().element.dim();
  CMatrix sum = -CMatrix::Identity(n, n);
  for (const auto& o : outcomes) sum += o.element.matrix();
  return hermitian_norm(sum);
}

std::vector<double> PovmSet::probabilities(const QState& psi) const {
  std::vector<double> out;
  out.reserve(outcomes.size());
  for (const auto& o : outcomes) out.push_back(expectation(psi, o.element));
  return out;
}

PovmSet extract_povm(const MeasurementProcess& proc) {
  const auto& tol = proc.tolerances();
  const auto dims = proc.dims();
  const auto spec = proc.meter().spectrum(tol);

  // Rows of (1 (x) Q^dag) V, grouped by meter eigenvector: the block of rows
  // belonging to cluster k, stacked over the object index, is R_k and
  // Pi_k = R_k^dag R_k.
  const CMatrix rotated = apply_probe(spec.eigenvectors.adjoint(), proc.isometry(), dims);

  PovmSet povm;
  povm.clustering_tol = spec.cluster_tol;
  povm.outcomes.reserve(spec.clusters.size());
  for (const auto& c : spec.clusters) {
    CMatrix rows(dims.object * c.count, dims.object);
    for (Index a = 0; a < dims.object; ++a) {
      rows.middleRows(a * c.count, c.count) = rotated.middleRows(a * dims.probe + c.first, c.count);
    }
    povm.outcomes.push_back(PovmOutcome{c.value, Observable(rows.adjoint() * rows, Units::kDimensionless, tol)});
  }

  const double lowest = povm.min_eigenvalue();
  if (lowest < -tol.povm_positivity) {
    std::ostringstream os;
    os << "POVM element with eigenvalue " << lowest;
    throw Error(ErrorCode::kNumericalInconsistency, os.str());
  }
  const double defect = povm.completeness_defect();
  if (defect > tol.povm_completeness) {
    std::ostringstream os;
    os << "POVM completeness defect " << defect;
    throw Error(ErrorCode::kNumericalInconsistency, os.str());
  }
  return povm;
}

MomentOperators moment_operators(const PovmSet& povm) {
  if (povm.outcomes.empty()) throw Error(ErrorCode::kDimMismatch, "empty POVM");
  const Index n = povm.outcomes.front().element.dim();
  CMatrix first = CMatrix::Zero(n, n);
  CMatrix second = CMatrix::Zero(n, n);
  for (const auto& o : povm.outcomes) {
    first += o.value * o.element.matrix();
    second += (o.value * o.value) * o.element.matrix();
  }
  return MomentOperators{Observable(std::move(first), Units::kLength),
                         Observable(std::move(second), Units::kLength)};
}

double epsilon_from_moments(const QState& psi, const Observable& x, const MomentOperators& moments,
                            const Tolerances& tol) {
  if (x.dim() != psi.dim() || moments.first.dim() != psi.dim() || moments.second.dim() != psi.dim()) {
    throw Error(ErrorCode::kDimMismatch, "moment operators and state disagree in dimension");
  }
  const CVector& s = psi.amplitudes();
  const CVector xs = x.matrix() * s;
  const double second = expectation(psi, moments.second, tol);
  const double cross = 2.0 * s.dot(moments.first.matrix() * xs).real();
  const double radicand = second - cross + xs.squaredNorm();
  // The three terms cancel when the error is small; anything within their
  // combined rounding is indistinguishable from zero.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                       (std::abs(second) + std::abs(cross) + xs.squaredNorm());
  if (std::abs(radicand) <= floor) return 0.0;
  if (radicand < -tol.moment_radicand) {
    std::ostringstream os;
    os << "moment operators give negative mean square " << radicand;
    throw Error(ErrorCode::kNumericalInconsistency, os.str());
  }
  return std::sqrt(std::max(0.0, radicand));
}

BornCheck born_check(const MeasurementProcess& proc) {
  const auto& tol = proc.tolerances();
  const PovmSet povm = extract_povm(proc);
  const auto xspec = proc.measured().spectrum(tol);

  double scale = 1.0;
  for (const auto& o : povm.outcomes) scale = std::max(scale, std::abs(o.value));
  const double match = std::max({povm.clustering_tol, xspec.cluster_tol, 1e-12 * scale});

  std::vector<bool> x_taken(xspec.clusters.size(), false);
  double worst = 0.0;
  for (const auto& o : povm.outcomes) {
    std::optional<std::size_t> nearest;
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < xspec.clusters.size(); ++j) {
      const double d = std::abs(xspec.clusters[j].value - o.value);
      if (d < d1) {
        d2 = d1;
        d1 = d;
        nearest = j;
      } else if (d < d2) {
        d2 = d;
      }
    }
    const bool paired = nearest && d1 <= match && (d2 - d1) >= match && !x_taken[*nearest];
    if (paired) {
      x_taken[*nearest] = true;
      worst = std::max(worst, hermitian_norm(o.element.matrix() - xspec.projector(*nearest)));
    } else {
      worst = std::max(worst, hermitian_norm(o.element.matrix()));
    }
  }
  for (std::size_t j = 0; j < xspec.clusters.size(); ++j) {
    if (!x_taken[j]) worst = std::max(worst, 1.0);  // ||E_j|| of an unmatched projector
  }
  return BornCheck{worst, worst <= tol.born};
}

double perfect_correlation_residual(const MeasurementProcess& proc, const QState& psi) {
  if (psi.dim() != proc.dims().object) throw Error(ErrorCode::kDimMismatch, "object state dimension mismatch");
  // Evaluated in the unrotated frame: X(t)|psi,xi> = U^dag (1 (x) X) U |psi,xi>.
  const auto dims = proc.dims();
  const CVector joint = kron(psi.amplitudes(), proc.probe_state().amplitudes());
  const CVector evolved = proc.interaction().apply(joint);
  const CVector meter_t = proc.interaction().apply_adjoint(apply_probe(proc.meter().matrix(), evolved, dims));
  const CVector residual = meter_t - apply_object(proc.measured().matrix(), joint, dims);
  return residual.norm();
}

}  // namespace edrlab
