#pragma once

#include <random>

#include "edrlab/hilbert.hpp"

namespace edrlab {

using Rng = std::mt19937_64;

/// Haar-distributed unitary (QR of a complex Ginibre matrix, phases fixed).
CMatrix haar_unitary(Index dim, Rng& rng);
/// Haar-distributed pure state.
QState haar_state(Index dim, Rng& rng);
/// GUE-like Hermitian matrix with unit-variance entries.
CMatrix random_hermitian(Index dim, Rng& rng);

}  // namespace edrlab
