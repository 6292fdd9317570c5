#pragma once

// Complex linear-algebra kernel: states, Hermitian observables, unitaries,
// tensor products, the partial inner product over a probe state, and
// spectral calculus.
//
// Tensor index convention: for a composite object (x) probe space with
// dimensions (n_obj, n_probe), basis vector |a, j> sits at index
// a * n_probe + j. The object index is the slow one everywhere.

#include <complex>
#include <cstdint>
#include <functional>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "edrlab/errors.hpp"
#include "edrlab/tolerances.hpp"

namespace edrlab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

class MeterFunction;

enum class Units { kLength, kMomentum, kDimensionless };

std::string_view units_name(Units units);
Units parse_units(std::string_view name);

struct CompositeDims {
  Index object = 0;
  Index probe = 0;

  Index total() const { return object * probe; }
  bool operator==(const CompositeDims&) const = default;
};

enum class Slot { kObject, kProbe };

/// Normalized state vector.
class QState {
 public:
  /// Throws Error(kUnnormalized) unless | ||amplitudes|| - 1 | <= tol.
  explicit QState(CVector amplitudes, double tol = Tolerances{}.state_norm);

  /// Rescales a nonzero vector to unit norm.
  static QState normalized(CVector amplitudes);
  static QState basis(Index dim, Index index);

  Index dim() const { return amplitudes_.size(); }
  const CVector& amplitudes() const { return amplitudes_; }

 private:
  CVector amplitudes_;
};

/// Sorted eigen-decomposition with eigenvalues grouped into clusters.
/// Cluster k owns the eigenvector columns [first, first + count).
struct SpectralDecomposition {
  struct Cluster {
    double value = 0.0;
    Index first = 0;
    Index count = 0;
  };

  RVector eigenvalues;
  CMatrix eigenvectors;
  std::vector<Cluster> clusters;
  double diameter = 0.0;
  double cluster_tol = 0.0;

  CMatrix projector(std::size_t k) const;
  std::vector<double> cluster_values() const;
};

/// Hermitian operator tagged with physical units.
class Observable {
 public:
  /// Throws Error(kNonHermitian) if max |M - M^dag| exceeds
  /// hermiticity_rel times an operator-norm bound of M.
  Observable(CMatrix matrix, Units units, const Tolerances& tol = {});

  Index dim() const { return matrix_.rows(); }
  const CMatrix& matrix() const { return matrix_; }
  Units units() const { return units_; }

  /// Deterministic decomposition; eigenvalues closer than
  /// tol.cluster_rel * diameter are merged into one cluster.
  SpectralDecomposition spectrum(const Tolerances& tol = {}) const;

  /// Largest |eigenvalue|.
  double operator_norm() const;

 private:
  CMatrix matrix_;
  Units units_;
};

/// Unitary on a composite space. Three exact representations are kept so that
/// structured interactions scale past what a dense matrix allows:
///   dense       the full matrix
///   controlled  block diagonal in the object basis, sum_a |a><a| (x) W_a
///   permutation U e_i = e_{perm[i]}
class UnitaryOp {
 public:
  struct Dense {
    CMatrix matrix;
  };
  struct Controlled {
    CompositeDims dims;
    std::vector<CMatrix> blocks;
  };
  struct Permutation {
    std::vector<Index> image;
  };
  using Representation = std::variant<Dense, Controlled, Permutation>;

  explicit UnitaryOp(CMatrix matrix, const Tolerances& tol = {});
  UnitaryOp(CompositeDims dims, std::vector<CMatrix> blocks,
            const Tolerances& tol = {});
  explicit UnitaryOp(std::vector<Index> permutation);

  static UnitaryOp identity(Index dim);
  static UnitaryOp swap(Index n);

  Index dim() const { return dim_; }
  const Representation& representation() const { return rep_; }

  CMatrix dense() const;
  CMatrix apply(const CMatrix& columns) const;
  CMatrix apply_adjoint(const CMatrix& columns) const;

  /// (1 (x) post) * this. Stays block diagonal for controlled unitaries.
  UnitaryOp then_probe(const CMatrix& post, CompositeDims dims,
                       const Tolerances& tol = {}) const;
  /// after * this, dense.
  UnitaryOp then(const UnitaryOp& after, const Tolerances& tol = {}) const;

  /// ||U U^dag - I|| in operator norm (exact zero for permutations).
  double unitarity_defect() const;

 private:
  Index dim_ = 0;
  Representation rep_;
};

// --- tensor structure -------------------------------------------------------

QState tensor_state(const QState& a, const QState& b);
CVector kron(const CVector& a, const CVector& b);
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// op (x) 1 or 1 (x) op on the composite space.
Observable embed(const Observable& op, Slot slot, CompositeDims dims);

/// (A (x) 1) applied to each column, without forming the Kronecker product.
CMatrix apply_object(const CMatrix& a, const CMatrix& columns,
                     CompositeDims dims);
/// (1 (x) B) applied to each column.
CMatrix apply_probe(const CMatrix& b, const CMatrix& columns,
                    CompositeDims dims);

// --- evolution and contraction ----------------------------------------------

/// U^dag O U.
Observable conjugate(const UnitaryOp& u, const Observable& o,
                     const Tolerances& tol = {});

/// Object-space operator M with <phi|M|psi> = <phi, xi|O|psi, xi>.
Observable partial_inner(const QState& xi, const Observable& o,
                         CompositeDims dims, const Tolerances& tol = {});

/// Re <s|O|s>. Throws Error(kNonHermitian) if the imaginary part exceeds
/// imaginary_rel * ||O||.
double expectation(const QState& s, const Observable& o,
                   const Tolerances& tol = {});

/// Spectral calculus: f applied to every eigenvalue cluster of O.
/// Throws Error(kUndefinedFunction) when f is undefined on some cluster.
Observable apply_function(const Observable& o, const MeterFunction& f,
                          const Tolerances& tol = {});
Observable apply_function(const Observable& o,
                          const std::function<double(double)>& f,
                          const Tolerances& tol = {});

/// Largest singular value of a general matrix.
double spectral_norm(const CMatrix& m);
/// Infinity-norm bound on the spectral norm (max absolute row sum).
double row_sum_norm(const CMatrix& m);

}  // namespace edrlab
