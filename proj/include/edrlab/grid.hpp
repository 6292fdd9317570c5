#pragma once

// Uniform periodic grid: positions x_j = (j - n/2) dx, momenta from the
// unitary DFT with centered frequencies k_j' = 2 pi j' / (n dx),
// j' in {-n/2, ..., n/2 - 1}.

#include "edrlab/hilbert.hpp"

namespace edrlab {

struct GridSpec {
  Index n = 64;
  double dx = 1.0;
  double hbar = 1.0;

  /// Throws Error(kConfig) unless n >= 4, dx > 0, hbar > 0.
  void validate() const;

  double position(Index j) const;
  double window() const { return static_cast<double>(n) * dx; }
  double nyquist_momentum() const;
};

RVector grid_positions(const GridSpec& g);
/// hbar * k for each DFT column, in column order.
RVector grid_momenta(const GridSpec& g);
/// Unitary DFT whose column j' is the plane wave exp(i k_j' x) / sqrt(n).
CMatrix dft_matrix(const GridSpec& g);

Observable position_op(const GridSpec& g);
Observable momentum_op(const GridSpec& g);

/// Normalized samples of exp(-(x - x0)^2 / (4 sigma^2)) exp(i p0 x / hbar).
/// Throws Error(kConfig) if x0 is outside the grid, 4 sigma >= n dx, or
/// hbar / (2 sigma) is not below the Nyquist momentum.
QState gaussian_state(const GridSpec& g, double x0, double p0, double sigma);

/// Momentum eigenstate for centered frequency index j' in [-n/2, n/2).
QState plane_wave_state(const GridSpec& g, Index frequency);

/// Standard deviation of o in s.
double spread(const QState& s, const Observable& o, const Tolerances& tol = {});

}  // namespace edrlab
