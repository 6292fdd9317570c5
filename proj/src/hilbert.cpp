#include "edrlab/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "edrlab/meter_function.hpp"

namespace edrlab {

namespace {

using RowMajorCMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::string dim_message(std::string_view what, Index expected, Index got) {
  std::ostringstream os;
  os << what << ": expected dimension " << expected << ", got " << got;
  return os.str();
}

void require_dim(std::string_view what, Index expected, Index got) {
  if (expected != got) throw Error(ErrorCode::kDimMismatch, dim_message(what, expected, got));
}

double hermitian_norm(const CMatrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Smallest tolerance used to match a function's tabulated values against a
// spectrum computed from a different (but equal up to rounding) matrix.
double match_tolerance(const SpectralDecomposition& spec) {
  double scale = 1.0;
  if (spec.eigenvalues.size() > 0) scale = std::max(scale, spec.eigenvalues.cwiseAbs().maxCoeff());
  return std::max(spec.cluster_tol, 1e-12 * scale);
}

Observable reassemble(const Observable& o, const SpectralDecomposition& spec,
                      const std::vector<double>& images, const Tolerances& tol) {
  RVector mapped(spec.eigenvalues.size());
  for (std::size_t k = 0; k < spec.clusters.size(); ++k) {
    const auto& c = spec.clusters[k];
    mapped.segment(c.first, c.count).setConstant(images[k]);
  }
  CMatrix out = spec.eigenvectors * mapped.asDiagonal() * spec.eigenvectors.adjoint();
  return Observable(std::move(out), o.units(), tol);
}

}  // namespace

std::string_view units_name(Units units) {
  switch (units) {
    case Units::kLength:
      return "length";
    case Units::kMomentum:
      return "momentum";
    case Units::kDimensionless:
      return "dimensionless";
  }
  return "dimensionless";
}

Units parse_units(std::string_view name) {
  if (name == "length") return Units::kLength;
  if (name == "momentum") return Units::kMomentum;
  if (name == "dimensionless") return Units::kDimensionless;
  throw Error(ErrorCode::kParse, "unknown units '" + std::string(name) + "'");
}

// --- QState -----------------------------------------------------------------

QState::QState(CVector amplitudes, double tol) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw Error(ErrorCode::kDimMismatch, "empty state");
  const double norm = amplitudes_.norm();
  if (!(std::abs(norm - 1.0) <= tol)) {
    std::ostringstream os;
    os << "state norm " << norm << " differs from 1 by more than " << tol;
    throw Error(ErrorCode::kUnnormalized, os.str());
  }
}

QState QState::normalized(CVector amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::kUnnormalized, "cannot normalize a zero or non-finite vector");
  }
  amplitudes /= norm;
  return QState(std::move(amplitudes));
}

QState QState::basis(Index dim, Index index) {
  if (index < 0 || index >= dim) throw Error(ErrorCode::kDimMismatch, "basis index out of range");
  CVector v = CVector::Zero(dim);
  v[index] = 1.0;
  return QState(std::move(v));
}

// --- spectra ----------------------------------------------------------------

CMatrix SpectralDecomposition::projector(std::size_t k) const {
  const auto& c = clusters.at(k);
  const auto q = eigenvectors.middleCols(c.first, c.count);
  return q * q.adjoint();
}

std::vector<double> SpectralDecomposition::cluster_values() const {
  std::vector<double> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters) out.push_back(c.value);
  return out;
}

Observable::Observable(CMatrix matrix, Units units, const Tolerances& tol)
    : matrix_(std::move(matrix)), units_(units) {
  if (matrix_.rows() != matrix_.cols()) {
    throw Error(ErrorCode::kDimMismatch, "observable matrix is not square");
  }
  if (matrix_.rows() == 0) throw Error(ErrorCode::kDimMismatch, "empty observable");
  const double deviation = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  const double scale = row_sum_norm(matrix_);
  if (!(deviation <= tol.hermiticity_rel * scale)) {
    std::ostringstream os;
    os << "max |M - M^dag| = " << deviation << " exceeds " << tol.hermiticity_rel
       << " * ||M|| (" << scale << ")";
    throw Error(ErrorCode::kNonHermitian, os.str());
  }
  // Exact Hermitian storage; changes entries by at most the checked deviation.
  matrix_ = (0.5 * (matrix_ + matrix_.adjoint())).eval();
}

SpectralDecomposition Observable::spectrum(const Tolerances& tol) const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix_);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumericalInconsistency, "Hermitian eigensolver did not converge");
  }
  SpectralDecomposition out;
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  const Index n = out.eigenvalues.size();
  out.diameter = out.eigenvalues[n - 1] - out.eigenvalues[0];
  out.cluster_tol = tol.cluster_rel * out.diameter;

  Index start = 0;
  for (Index i = 1; i <= n; ++i) {
    if (i == n || out.eigenvalues[i] - out.eigenvalues[i - 1] > out.cluster_tol) {
      SpectralDecomposition::Cluster c;
      c.first = start;
      c.count = i - start;
      c.value = out.eigenvalues.segment(start, c.count).mean();
      out.clusters.push_back(c);
      start = i;
    }
  }
  return out;
}

double Observable::operator_norm() const { return hermitian_norm(matrix_); }

// --- UnitaryOp --------------------------------------------------------------

UnitaryOp::UnitaryOp(CMatrix matrix, const Tolerances& tol)
    : dim_(matrix.rows()), rep_(Dense{std::move(matrix)}) {
  const auto& m = std::get<Dense>(rep_).matrix;
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::kDimMismatch, "unitary matrix is not square");
  }
  const double defect = unitarity_defect();
  if (!(defect <= tol.unitarity)) {
    std::ostringstream os;
    os << "||U U^dag - I|| = " << defect << " exceeds " << tol.unitarity;
    throw Error(ErrorCode::kNonUnitary, os.str());
  }
}

UnitaryOp::UnitaryOp(CompositeDims dims, std::vector<CMatrix> blocks, const Tolerances& tol)
    : dim_(dims.total()), rep_(Controlled{dims, std::move(blocks)}) {
  const auto& c = std::get<Controlled>(rep_);
  require_dim("controlled unitary block count", dims.object, static_cast<Index>(c.blocks.size()));
  for (const auto& b : c.blocks) {
    require_dim("controlled unitary block rows", dims.probe, b.rows());
    require_dim("controlled unitary block cols", dims.probe, b.cols());
  }
  const double defect = unitarity_defect();
  if (!(defect <= tol.unitarity)) {
    std::ostringstream os;
    os << "controlled block with ||W W^dag - I|| = " << defect << " exceeds " << tol.unitarity;
    throw Error(ErrorCode::kNonUnitary, os.str());
  }
}

UnitaryOp::UnitaryOp(std::vector<Index> permutation)
    : dim_(static_cast<Index>(permutation.size())), rep_(Permutation{std::move(permutation)}) {
  const auto& image = std::get<Permutation>(rep_).image;
  if (image.empty()) throw Error(ErrorCode::kDimMismatch, "empty permutation");
  std::vector<bool> seen(image.size(), false);
  for (Index i : image) {
    if (i < 0 || i >= dim_ || seen[static_cast<std::size_t>(i)]) {
      throw Error(ErrorCode::kNonUnitary, "permutation table is not a bijection");
    }
    seen[static_cast<std::size_t>(i)] = true;
  }
}

UnitaryOp UnitaryOp::identity(Index dim) {
  std::vector<Index> image(static_cast<std::size_t>(dim));
  std::iota(image.begin(), image.end(), Index{0});
  return UnitaryOp(std::move(image));
}

UnitaryOp UnitaryOp::swap(Index n) {
  std::vector<Index> image(static_cast<std::size_t>(n * n));
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) image[static_cast<std::size_t>(a * n + b)] = b * n + a;
  return UnitaryOp(std::move(image));
}

CMatrix UnitaryOp::dense() const {
  if (const auto* d = std::get_if<Dense>(&rep_)) return d->matrix;
  return apply(CMatrix::Identity(dim_, dim_));
}

CMatrix UnitaryOp::apply(const CMatrix& columns) const {
  require_dim("unitary apply", dim_, columns.rows());
  return std::visit(
      [&](const auto& r) -> CMatrix {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, Dense>) {
          return r.matrix * columns;
        } else if constexpr (std::is_same_v<R, Controlled>) {
          CMatrix out(columns.rows(), columns.cols());
          const Index np = r.dims.probe;
          for (Index a = 0; a < r.dims.object; ++a) {
            out.middleRows(a * np, np).noalias() =
                r.blocks[static_cast<std::size_t>(a)] * columns.middleRows(a * np, np);
          }
          return out;
        } else {
          CMatrix out(columns.rows(), columns.cols());
          for (Index i = 0; i < dim_; ++i) out.row(r.image[static_cast<std::size_t>(i)]) = columns.row(i);
          return out;
        }
      },
      rep_);
}

CMatrix UnitaryOp::apply_adjoint(const CMatrix& columns) const {
  require_dim("unitary apply_adjoint", dim_, columns.rows());
  return std::visit(
      [&](const auto& r) -> CMatrix {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, Dense>) {
          return r.matrix.adjoint() * columns;
        } else if constexpr (std::is_same_v<R, Controlled>) {
          CMatrix out(columns.rows(), columns.cols());
          const Index np = r.dims.probe;
          for (Index a = 0; a < r.dims.object; ++a) {
            out.middleRows(a * np, np).noalias() =
                r.blocks[static_cast<std::size_t>(a)].adjoint() * columns.middleRows(a * np, np);
          }
          return out;
        } else {
          CMatrix out(columns.rows(), columns.cols());
          for (Index i = 0; i < dim_; ++i) out.row(i) = columns.row(r.image[static_cast<std::size_t>(i)]);
          return out;
        }
      },
      rep_);
}

UnitaryOp UnitaryOp::then_probe(const CMatrix& post, CompositeDims dims, const Tolerances& tol) const {
  require_dim("composite dimension", dim_, dims.total());
  require_dim("post-interaction probe unitary", dims.probe, post.rows());
  if (const auto* c = std::get_if<Controlled>(&rep_); c && c->dims == dims) {
    std::vector<CMatrix> blocks;
    blocks.reserve(c->blocks.size());
    for (const auto& b : c->blocks) blocks.push_back(post * b);
    return UnitaryOp(dims, std::move(blocks), tol);
  }
  return UnitaryOp(apply_probe(post, dense(), dims), tol);
}

UnitaryOp UnitaryOp::then(const UnitaryOp& after, const Tolerances& tol) const {
  require_dim("unitary composition", dim_, after.dim());
  return UnitaryOp(after.apply(dense()), tol);
}

double UnitaryOp::unitarity_defect() const {
  return std::visit(
      [&](const auto& r) -> double {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, Dense>) {
          const CMatrix gram = r.matrix * r.matrix.adjoint() - CMatrix::Identity(dim_, dim_);
          // Frobenius bounds the operator norm from above; refine when cheap.
          const double fro = gram.norm();
          if (dim_ > 512) return fro;
          return hermitian_norm(gram);
        } else if constexpr (std::is_same_v<R, Controlled>) {
          double worst = 0.0;
          for (const auto& b : r.blocks) {
            const CMatrix gram = b * b.adjoint() - CMatrix::Identity(b.rows(), b.rows());
            worst = std::max(worst, hermitian_norm(gram));
          }
          return worst;
        } else {
          return 0.0;
        }
      },
      rep_);
}

// --- tensor structure -------------------------------------------------------

CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

QState tensor_state(const QState& a, const QState& b) {
  return QState(kron(a.amplitudes(), b.amplitudes()));
}

Observable embed(const Observable& op, Slot slot, CompositeDims dims) {
  if (slot == Slot::kObject) {
    require_dim("embed (object slot)", dims.object, op.dim());
    return Observable(kron(op.matrix(), CMatrix::Identity(dims.probe, dims.probe)), op.units());
  }
  require_dim("embed (probe slot)", dims.probe, op.dim());
  return Observable(kron(CMatrix::Identity(dims.object, dims.object), op.matrix()), op.units());
}

CMatrix apply_object(const CMatrix& a, const CMatrix& columns, CompositeDims dims) {
  require_dim("apply_object rows", dims.total(), columns.rows());
  require_dim("apply_object operator", dims.object, a.rows());
  CMatrix out(columns.rows(), columns.cols());
  for (Index c = 0; c < columns.cols(); ++c) {
    Eigen::Map<const RowMajorCMatrix> in(columns.col(c).data(), dims.object, dims.probe);
    Eigen::Map<RowMajorCMatrix> res(out.col(c).data(), dims.object, dims.probe);
    res.noalias() = a * in;
  }
  return out;
}

CMatrix apply_probe(const CMatrix& b, const CMatrix& columns, CompositeDims dims) {
  require_dim("apply_probe rows", dims.total(), columns.rows());
  require_dim("apply_probe operator", dims.probe, b.rows());
  CMatrix out(columns.rows(), columns.cols());
  for (Index c = 0; c < columns.cols(); ++c) {
    Eigen::Map<const RowMajorCMatrix> in(columns.col(c).data(), dims.object, dims.probe);
    Eigen::Map<RowMajorCMatrix> res(out.col(c).data(), dims.object, dims.probe);
    res.noalias() = in * b.transpose();
  }
  return out;
}

// --- evolution and contraction ----------------------------------------------

Observable conjugate(const UnitaryOp& u, const Observable& o, const Tolerances& tol) {
  require_dim("conjugate", u.dim(), o.dim());
  // U^dag O U = U^dag (U^dag O)^dag for Hermitian O.
  const CMatrix left = u.apply_adjoint(o.matrix());
  CMatrix out = u.apply_adjoint(left.adjoint());
  return Observable(std::move(out), o.units(), tol);
}

Observable partial_inner(const QState& xi, const Observable& o, CompositeDims dims,
                         const Tolerances& tol) {
  require_dim("partial_inner probe state", dims.probe, xi.dim());
  require_dim("partial_inner operator", dims.total(), o.dim());
  const CVector& v = xi.amplitudes();
  const Index np = dims.probe;
  CMatrix out(dims.object, dims.object);
  for (Index a = 0; a < dims.object; ++a)
    for (Index b = 0; b < dims.object; ++b)
      out(a, b) = v.dot(o.matrix().block(a * np, b * np, np, np) * v);
  return Observable(std::move(out), o.units(), tol);
}

double expectation(const QState& s, const Observable& o, const Tolerances& tol) {
  require_dim("expectation", o.dim(), s.dim());
  const Complex value = s.amplitudes().dot(o.matrix() * s.amplitudes());
  const double scale = row_sum_norm(o.matrix());
  if (std::abs(value.imag()) > tol.imaginary_rel * std::max(scale, 1e-300)) {
    std::ostringstream os;
    os << "expectation has imaginary part " << value.imag();
    throw Error(ErrorCode::kNonHermitian, os.str());
  }
  return value.real();
}

Observable apply_function(const Observable& o, const MeterFunction& f, const Tolerances& tol) {
  const auto spec = o.spectrum(tol);
  const double match = match_tolerance(spec);
  std::vector<double> images;
  images.reserve(spec.clusters.size());
  for (const auto& c : spec.clusters) {
    const auto image = f.evaluate(c.value, match);
    if (!image) {
      std::ostringstream os;
      os << "meter function " << f.describe() << " undefined at eigenvalue " << c.value;
      throw Error(ErrorCode::kUndefinedFunction, os.str());
    }
    images.push_back(*image);
  }
  return reassemble(o, spec, images, tol);
}

Observable apply_function(const Observable& o, const std::function<double(double)>& f,
                          const Tolerances& tol) {
  const auto spec = o.spectrum(tol);
  std::vector<double> images;
  images.reserve(spec.clusters.size());
  for (const auto& c : spec.clusters) images.push_back(f(c.value));
  return reassemble(o, spec, images, tol);
}

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double row_sum_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace edrlab
