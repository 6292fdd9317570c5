#pragma once

#include <vector>

#include "edrlab/process.hpp"

namespace edrlab {

struct PovmOutcome {
  double value = 0.0;
  Observable element;
};

/// Outcome distribution of a process as positive object-space operators
/// Pi_k = <xi| U^dag (1 (x) E_k) U |xi>, one per meter eigenvalue cluster.
struct PovmSet {
  std::vector<PovmOutcome> outcomes;
  double clustering_tol = 0.0;

  double min_eigenvalue() const;
  double completeness_defect() const;
  std::vector<double> probabilities(const QState& psi) const;
};

struct MomentOperators {
  Observable first;
  Observable second;
};

struct BornCheck {
  double max_deviation = 0.0;
  bool is_born = false;
};

/// Throws Error(kNumericalInconsistency) if positivity or completeness fails
/// the configured tolerances.
PovmSet extract_povm(const MeasurementProcess& proc);

/// sum_k m_k Pi_k and sum_k m_k^2 Pi_k.
MomentOperators moment_operators(const PovmSet& povm);

/// Measurement error computed from the first two moment operators alone.
/// Radicands below -moment_radicand raise kNumericalInconsistency; smaller
/// negatives clamp to zero.
double epsilon_from_moments(const QState& psi, const Observable& x,
                            const MomentOperators& moments,
                            const Tolerances& tol = {});

/// Largest operator-norm distance between POVM elements and the spectral
/// projectors of the measured observable at equal values. Values present on
/// one side only are compared with the zero operator.
BornCheck born_check(const MeasurementProcess& proc);

/// ||(X(t) - x (x) 1)|psi, xi>||.
double perfect_correlation_residual(const MeasurementProcess& proc,
                                    const QState& psi);

}  // namespace edrlab
