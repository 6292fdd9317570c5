#include "edrlab/process.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "edrlab/grid.hpp"

namespace edrlab {

namespace {

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

void require_state(const MeasurementProcess& proc, const QState& psi) {
  require(psi.dim() == proc.dims().object, ErrorCode::kDimMismatch,
          "object state dimension does not match the process");
}

Quantity from_residual(const CVector& r) {
  Quantity q;
  q.mean_square = r.squaredNorm();
  q.value = std::sqrt(q.mean_square);
  return q;
}

}  // namespace

MeasurementProcess::MeasurementProcess(CompositeDims dims, QState probe_state, UnitaryOp u,
                                       Observable meter, Observable measured,
                                       Observable disturbed, double hbar, Tolerances tol)
    : dims_(dims),
      xi_(std::move(probe_state)),
      u_(std::move(u)),
      meter_(std::move(meter)),
      measured_(std::move(measured)),
      disturbed_(std::move(disturbed)),
      hbar_(hbar),
      tol_(tol) {
  require(dims_.object > 0 && dims_.probe > 0, ErrorCode::kDimMismatch, "empty subsystem");
  require(xi_.dim() == dims_.probe, ErrorCode::kDimMismatch, "probe state dimension mismatch");
  require(u_.dim() == dims_.total(), ErrorCode::kDimMismatch, "interaction dimension mismatch");
  require(meter_.dim() == dims_.probe, ErrorCode::kDimMismatch, "meter dimension mismatch");
  require(measured_.dim() == dims_.object, ErrorCode::kDimMismatch, "measured observable dimension mismatch");
  require(disturbed_.dim() == dims_.object, ErrorCode::kDimMismatch, "disturbed observable dimension mismatch");
  require(meter_.units() == Units::kLength, ErrorCode::kConfig, "meter must carry length units");
  require(measured_.units() == Units::kLength, ErrorCode::kConfig, "measured observable must carry length units");
  require(disturbed_.units() == Units::kMomentum, ErrorCode::kConfig, "disturbed observable must carry momentum units");
  require(hbar_ > 0.0 && std::isfinite(hbar_), ErrorCode::kConfig, "hbar must be positive");

  CMatrix inputs = CMatrix::Zero(dims_.total(), dims_.object);
  for (Index a = 0; a < dims_.object; ++a) inputs.col(a).segment(a * dims_.probe, dims_.probe) = xi_.amplitudes();
  isometry_ = u_.apply(inputs);
}

MeasurementProcess MeasurementProcess::with_post_probe_unitary(const CMatrix& post) const {
  return MeasurementProcess(dims_, xi_, u_.then_probe(post, dims_, tol_), meter_, measured_, disturbed_,
                            hbar_, tol_);
}

CMatrix MeasurementProcess::meter_function_matrix(const MeterFunction& f) const {
  if (f.is_identity()) return meter_.matrix();
  return apply_function(meter_, f, tol_).matrix();
}

Observable meter_evolved(const MeasurementProcess& proc, const MeterFunction& f) {
  const auto dims = proc.dims();
  const auto& tol = proc.tolerances();
  const Observable probe_side(proc.meter_function_matrix(f), Units::kLength, tol);
  Observable evolved = conjugate(proc.interaction(), embed(probe_side, Slot::kProbe, dims), tol);

  if (static_cast<double>(dims.total()) <= tol.spectral_check_max_dim) {
    // f(U^dag X U) must agree with U^dag f(X) U.
    const Observable plain = conjugate(proc.interaction(), embed(proc.meter(), Slot::kProbe, dims), tol);
    const Observable mapped = apply_function(plain, f, tol);
    const double gap = (mapped.matrix() - evolved.matrix()).cwiseAbs().maxCoeff();
    if (gap > tol.spectral_check) {
      std::ostringstream os;
      os << "spectral calculus does not commute with conjugation (gap " << gap << ")";
      throw Error(ErrorCode::kNumericalInconsistency, os.str());
    }
  }
  return evolved;
}

Observable object_evolved(const MeasurementProcess& proc, const Observable& a) {
  return conjugate(proc.interaction(), embed(a, Slot::kObject, proc.dims()), proc.tolerances());
}

Quantity epsilon(const MeasurementProcess& proc, const QState& psi) {
  require_state(proc, psi);
  // U (X(t) - x(0)) |psi,xi> = (1 (x) X) V psi - V x psi
  const CMatrix& v = proc.isometry();
  const CVector out = v * psi.amplitudes();
  const CVector r = apply_probe(proc.meter().matrix(), out, proc.dims()) -
                    v * (proc.measured().matrix() * psi.amplitudes());
  return from_residual(r);
}

Quantity delta(const MeasurementProcess& proc, const QState& psi, const MeterFunction& f) {
  require_state(proc, psi);
  // U (f(X)(t) - x(t)) |psi,xi> = ((1 (x) f(X)) - (x (x) 1)) V psi
  const CVector out = proc.isometry() * psi.amplitudes();
  const CVector r = apply_probe(proc.meter_function_matrix(f), out, proc.dims()) -
                    apply_object(proc.measured().matrix(), out, proc.dims());
  return from_residual(r);
}

Quantity eta(const MeasurementProcess& proc, const QState& psi) {
  require_state(proc, psi);
  const CMatrix& v = proc.isometry();
  const CVector out = v * psi.amplitudes();
  const CVector r = apply_object(proc.disturbed().matrix(), out, proc.dims()) -
                    v * (proc.disturbed().matrix() * psi.amplitudes());
  return from_residual(r);
}

Deficit unbiasedness_deficit(const MeasurementProcess& proc, const MeterFunction& f) {
  const CMatrix& v = proc.isometry();
  const auto& tol = proc.tolerances();
  // Each compression is checked against its own scale; the two cancel when unbiased.
  const Observable meter_part(v.adjoint() * apply_probe(proc.meter_function_matrix(f), v, proc.dims()),
                              Units::kLength, tol);
  const Observable object_part(v.adjoint() * apply_object(proc.measured().matrix(), v, proc.dims()),
                               Units::kLength, tol);
  Observable op(meter_part.matrix() - object_part.matrix(), Units::kLength, tol);
  const double norm = op.operator_norm();
  return Deficit{norm, std::move(op)};
}

EDRReport edr_report(const MeasurementProcess& proc, const QState& psi, const MeterFunction& f) {
  const auto& tol = proc.tolerances();
  const Quantity e = epsilon(proc, psi);
  const Quantity d = delta(proc, psi, f);
  const Quantity n = eta(proc, psi);

  EDRReport r;
  r.epsilon = e.value;
  r.epsilon_sq = e.mean_square;
  r.delta = d.value;
  r.delta_sq = d.mean_square;
  r.eta = n.value;
  r.eta_sq = n.mean_square;
  r.sigma_x = spread(psi, proc.measured(), tol);
  r.sigma_p = spread(psi, proc.disturbed(), tol);
  r.prod_eps_eta = r.epsilon * r.eta;
  r.prod_delta_eta = r.delta * r.eta;
  r.unbiasedness_deficit = unbiasedness_deficit(proc, f).norm;
  r.hbar_half = 0.5 * proc.hbar();
  r.h = 2.0 * std::numbers::pi * proc.hbar();
  return r;
}

}  // namespace edrlab
