#include "edrlab/random.hpp"

#include <cmath>

namespace edrlab {

namespace {

CMatrix ginibre(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(normal(rng), normal(rng));
  return m;
}

}  // namespace

CMatrix haar_unitary(Index dim, Rng& rng) {
  const CMatrix z = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

QState haar_state(Index dim, Rng& rng) { return QState::normalized(ginibre(dim, 1, rng).col(0)); }

CMatrix random_hermitian(Index dim, Rng& rng) {
  const CMatrix z = ginibre(dim, dim, rng);
  return 0.5 * (z + z.adjoint());
}

}  // namespace edrlab
