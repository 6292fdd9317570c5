#include "edrlab/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace edrlab {

void GridSpec::validate() const {
  if (n < 4) throw Error(ErrorCode::kConfig, "grid needs at least 4 points");
  if (!(dx > 0.0) || !std::isfinite(dx)) throw Error(ErrorCode::kConfig, "grid spacing must be positive");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw Error(ErrorCode::kConfig, "hbar must be positive");
}

double GridSpec::position(Index j) const { return static_cast<double>(j - n / 2) * dx; }

double GridSpec::nyquist_momentum() const { return std::numbers::pi * hbar / dx; }

RVector grid_positions(const GridSpec& g) {
  g.validate();
  RVector x(g.n);
  for (Index j = 0; j < g.n; ++j) x[j] = g.position(j);
  return x;
}

RVector grid_momenta(const GridSpec& g) {
  g.validate();
  RVector p(g.n);
  const double unit = 2.0 * std::numbers::pi / g.window();
  for (Index j = 0; j < g.n; ++j) p[j] = g.hbar * unit * static_cast<double>(j - g.n / 2);
  return p;
}

CMatrix dft_matrix(const GridSpec& g) {
  g.validate();
  const double norm = 1.0 / std::sqrt(static_cast<double>(g.n));
  CMatrix f(g.n, g.n);
  // k x = 2 pi j' (j - n/2) / n; reduce the integer product mod n before
  // scaling so large grids keep full phase accuracy.
  for (Index j = 0; j < g.n; ++j) {
    for (Index c = 0; c < g.n; ++c) {
      const long long prod = static_cast<long long>(j - g.n / 2) * static_cast<long long>(c - g.n / 2);
      const long long r = ((prod % g.n) + g.n) % g.n;
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(g.n);
      f(j, c) = std::polar(norm, phase);
    }
  }
  return f;
}

Observable position_op(const GridSpec& g) {
  return Observable(grid_positions(g).cast<Complex>().asDiagonal().toDenseMatrix(), Units::kLength);
}

Observable momentum_op(const GridSpec& g) {
  const CMatrix f = dft_matrix(g);
  const RVector p = grid_momenta(g);
  CMatrix m = f * p.cast<Complex>().asDiagonal() * f.adjoint();
  return Observable(std::move(m), Units::kMomentum);
}

QState gaussian_state(const GridSpec& g, double x0, double p0, double sigma) {
  g.validate();
  const RVector x = grid_positions(g);
  if (x0 < x[0] || x0 > x[g.n - 1]) {
    std::ostringstream os;
    os << "Gaussian center " << x0 << " outside grid [" << x[0] << ", " << x[g.n - 1] << "]";
    throw Error(ErrorCode::kConfig, os.str());
  }
  if (!(sigma > 0.0) || !(4.0 * sigma < g.window())) {
    std::ostringstream os;
    os << "Gaussian width " << sigma << " does not fit the grid window " << g.window();
    throw Error(ErrorCode::kConfig, os.str());
  }
  if (!(g.hbar / (2.0 * sigma) < g.nyquist_momentum())) {
    std::ostringstream os;
    os << "Gaussian width " << sigma << " aliases: momentum spread " << g.hbar / (2.0 * sigma)
       << " is not below the Nyquist momentum " << g.nyquist_momentum();
    throw Error(ErrorCode::kConfig, os.str());
  }
  CVector a(g.n);
  for (Index j = 0; j < g.n; ++j) {
    const double d = x[j] - x0;
    a[j] = std::polar(std::exp(-d * d / (4.0 * sigma * sigma)), p0 * x[j] / g.hbar);
  }
  return QState::normalized(std::move(a));
}

QState plane_wave_state(const GridSpec& g, Index frequency) {
  g.validate();
  if (frequency < -g.n / 2 || frequency >= g.n - g.n / 2) {
    throw Error(ErrorCode::kConfig, "plane-wave frequency index out of range");
  }
  return QState::normalized(dft_matrix(g).col(frequency + g.n / 2));
}

double spread(const QState& s, const Observable& o, const Tolerances& tol) {
  const double mean = expectation(s, o, tol);
  const CVector v = o.matrix() * s.amplitudes();
  const double second = v.squaredNorm();
  return std::sqrt(std::max(0.0, second - mean * mean));
}

}  // namespace edrlab
