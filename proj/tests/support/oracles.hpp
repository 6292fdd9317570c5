#pragma once

// Independent dense reference computations. Everything here forms full
// composite matrices with explicit Kronecker products and loops, so it only
// suits small dimensions.

#include <edrlab/grid.hpp>
#include <edrlab/models.hpp>
#include <edrlab/povm.hpp>
#include <edrlab/random.hpp>
#include <edrlab/unbiasing.hpp>

namespace oracle {

using namespace edrlab;

CMatrix kron_loops(const CMatrix& a, const CMatrix& b);

/// M[a,b] = sum_{j,k} conj(xi_j) O[(a,j),(b,k)] xi_k.
CMatrix partial_inner_loops(const CVector& xi, const CMatrix& o, CompositeDims dims);

/// sum_{i,j} conj(s_i) O_ij s_j.
Complex quadratic_form(const CVector& s, const CMatrix& o);

/// f applied through an explicit eigen-decomposition of a Hermitian matrix.
CMatrix function_of(const CMatrix& h, const std::function<double(double)>& f);

struct MeanSquares {
  double epsilon_sq = 0.0;
  double delta_sq = 0.0;
  double eta_sq = 0.0;
};

/// <psi,xi| A^2 |psi,xi> with A built from dense embedded and evolved operators.
MeanSquares brute_force_mean_squares(const MeasurementProcess& proc, const QState& psi,
                                     const std::function<double(double)>& f = [](double m) { return m; });

/// POVM elements from dense U^dag (1 (x) E_k) U and the loop partial inner product.
std::vector<CMatrix> brute_force_povm(const MeasurementProcess& proc);

/// Least squares over real f_k for || sum f_k Pi_k - T ||_F via the normal
/// equations G f = h with G_jk = Re tr(Pi_j Pi_k), h_k = Re tr(Pi_k T).
struct NormalEquations {
  RVector f;
  double residual = 0.0;
};
NormalEquations unbiasing_normal_equations(const MeasurementProcess& proc);

/// min over tabulated f of delta_f^2 from dense evolved projectors:
/// G_jk = Re <E_j(t) E_k(t)>, h_k = Re <E_k(t) x(t)>, c = <x(t)^2>.
struct DeltaOracle {
  RVector f;
  double delta_min = 0.0;
  RMatrix gram;
  RVector linear;
  double constant = 0.0;
};
DeltaOracle brute_force_min_delta(const MeasurementProcess& proc, const QState& psi);

/// Random process with dense Haar U, Haar probe state and random Hermitian
/// meter, measured and disturbed observables.
MeasurementProcess random_process(Index n_obj, Index n_probe, Rng& rng);

/// Meter with an integer spectrum {0, .., n-1} in a random basis; used where
/// clean, well separated outcome clusters matter.
MeasurementProcess random_process_integer_meter(Index n_obj, Index n_probe, Rng& rng);

}  // namespace oracle
