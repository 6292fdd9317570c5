#pragma once

// A measuring process: object and probe couple through U, the outcome is the
// meter X read after the interaction. Error, resolution and disturbance are
// root-mean-square Heisenberg-picture differences evaluated in |psi, xi>:
//
//   epsilon^2 = <psi,xi| (X(t) - x(0))^2 |psi,xi>
//   delta^2   = <psi,xi| (f(X)(t) - x(t))^2 |psi,xi>
//   eta^2     = <psi,xi| (p(t) - p(0))^2 |psi,xi>
//
// All of these depend on U only through the isometry V|psi> = U|psi, xi>,
// which is cached at construction.

#include "edrlab/hilbert.hpp"
#include "edrlab/meter_function.hpp"

namespace edrlab {

class MeasurementProcess {
 public:
  /// Validates dimensions (kDimMismatch), probe state normalization, and unit
  /// tags: meter and measured are lengths, disturbed is a momentum.
  MeasurementProcess(CompositeDims dims, QState probe_state, UnitaryOp u,
                     Observable meter, Observable measured,
                     Observable disturbed, double hbar,
                     Tolerances tol = {});

  CompositeDims dims() const { return dims_; }
  const QState& probe_state() const { return xi_; }
  const UnitaryOp& interaction() const { return u_; }
  const Observable& meter() const { return meter_; }
  const Observable& measured() const { return measured_; }
  const Observable& disturbed() const { return disturbed_; }
  double hbar() const { return hbar_; }
  const Tolerances& tolerances() const { return tol_; }

  /// Columns V e_a = U (e_a (x) xi); shape (n_obj * n_probe) x n_obj.
  const CMatrix& isometry() const { return isometry_; }

  /// Process with (1 (x) post) appended after the interaction.
  MeasurementProcess with_post_probe_unitary(const CMatrix& post) const;

  /// f(X) on the probe space.
  CMatrix meter_function_matrix(const MeterFunction& f) const;

 private:
  CompositeDims dims_;
  QState xi_;
  UnitaryOp u_;
  Observable meter_;
  Observable measured_;
  Observable disturbed_;
  double hbar_;
  Tolerances tol_;
  CMatrix isometry_;
};

/// Root-mean-square quantity with the literal mean square alongside.
struct Quantity {
  double value = 0.0;
  double mean_square = 0.0;
};

struct Deficit {
  double norm = 0.0;
  Observable op;
};

struct EDRReport {
  double epsilon = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double epsilon_sq = 0.0;
  double delta_sq = 0.0;
  double eta_sq = 0.0;
  double sigma_x = 0.0;
  double sigma_p = 0.0;
  double prod_eps_eta = 0.0;
  double prod_delta_eta = 0.0;
  double unbiasedness_deficit = 0.0;
  double hbar_half = 0.0;
  double h = 0.0;
};

/// U^dag (1 (x) f(X)) U as a dense composite observable.
Observable meter_evolved(const MeasurementProcess& proc,
                         const MeterFunction& f = MeterFunction::identity());
/// U^dag (A (x) 1) U as a dense composite observable.
Observable object_evolved(const MeasurementProcess& proc, const Observable& a);

Quantity epsilon(const MeasurementProcess& proc, const QState& psi);
Quantity delta(const MeasurementProcess& proc, const QState& psi,
               const MeterFunction& f = MeterFunction::identity());
Quantity eta(const MeasurementProcess& proc, const QState& psi);

/// Object-space operator <xi| f(X)(t) - x(t) |xi> and its operator norm.
Deficit unbiasedness_deficit(const MeasurementProcess& proc,
                             const MeterFunction& f = MeterFunction::identity());

EDRReport edr_report(const MeasurementProcess& proc, const QState& psi,
                     const MeterFunction& f = MeterFunction::identity());

}  // namespace edrlab
