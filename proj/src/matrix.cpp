#include "moilab/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "moilab/errors.hpp"

namespace moilab {

HermitianMatrix::HermitianMatrix(const ComplexMatrix& entries) {
  if (entries.rows() < 1 || entries.rows() != entries.cols()) {
    std::ostringstream msg;
    msg << "expected a nonempty square matrix, got " << entries.rows() << "x" << entries.cols();
    detail::throw_precondition("HermitianMatrix", msg.str());
  }
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  const double asym = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym <= kHermitianTolerance * scale)) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian (max |a_ij - conj(a_ji)| = " << asym << ")";
    detail::throw_precondition("HermitianMatrix", msg.str());
  }
  entries_ = 0.5 * (entries + entries.adjoint());
}

HermitianMatrix HermitianMatrix::identity(Index dim) {
  return HermitianMatrix(ComplexMatrix::Identity(dim, dim));
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(values.size()), static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Index>(i), static_cast<Index>(i)) = values[i];
  return HermitianMatrix(m);
}

HermitianMatrix HermitianMatrix::diagonal(std::initializer_list<double> values) {
  return diagonal(std::span<const double>(values.begin(), values.size()));
}

HermitianMatrix HermitianMatrix::shifted(double delta) const {
  ComplexMatrix m = entries_;
  m.diagonal().array() += delta;
  return HermitianMatrix(m);
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
  return apply([](double t) { return Complex(t, 0.0); });
}

ComplexMatrix SpectralDecomposition::apply(const std::function<Complex(double)>& f) const {
  const Index d = dim();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  Index col = 0;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const Index m = multiplicities[i];
    const auto block = eigenvectors.middleCols(col, m);
    out.noalias() += f(eigenvalues[i]) * (block * block.adjoint());
    col += m;
  }
  return out;
}

ComplexMatrix SpectralDecomposition::projection_where(const std::function<bool(double)>& pred) const {
  return apply([&](double t) { return pred(t) ? Complex(1.0, 0.0) : Complex(0.0, 0.0); });
}

bool SpectralDecomposition::has_zero_eigenvalue() const {
  return std::any_of(eigenvalues.begin(), eigenvalues.end(), [](double t) { return t == 0.0; });
}

double SpectralDecomposition::spectral_radius() const {
  double r = 0.0;
  for (double t : eigenvalues) r = std::max(r, std::abs(t));
  return r;
}

SpectralDecomposition eig(const HermitianMatrix& a) {
  const Index d = a.dim();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigensolver failed for a " << d << "x" << d << " matrix (Frobenius norm "
        << a.matrix().norm() << ", max |entry| " << a.matrix().cwiseAbs().maxCoeff() << ")";
    throw NumericalError(msg.str());
  }
  const Eigen::VectorXd& values = solver.eigenvalues();  // increasing
  const ComplexMatrix& vectors = solver.eigenvectors();

  double radius = 0.0;
  for (Index i = 0; i < d; ++i) radius = std::max(radius, std::abs(values(i)));

  SpectralDecomposition out;
  out.cluster_tolerance = kClusterTolerance * std::max(1.0, radius);
  out.eigenvectors = vectors;
  out.cluster_of.assign(static_cast<std::size_t>(d), 0);

  // Chain clustering on the sorted spectrum: a gap below tolerance joins the
  // current cluster.
  Index start = 0;
  for (Index i = 1; i <= d; ++i) {
    if (i < d && values(i) - values(i - 1) < out.cluster_tolerance) continue;
    double mean = 0.0;
    for (Index j = start; j < i; ++j) mean += values(j);
    mean /= static_cast<double>(i - start);
    if (std::abs(mean) < out.cluster_tolerance) mean = 0.0;
    const int cluster = static_cast<int>(out.eigenvalues.size());
    for (Index j = start; j < i; ++j) out.cluster_of[static_cast<std::size_t>(j)] = cluster;
    out.eigenvalues.push_back(mean);
    out.multiplicities.push_back(static_cast<int>(i - start));
    start = i;
  }

  out.projections.reserve(out.eigenvalues.size());
  Index col = 0;
  for (int m : out.multiplicities) {
    const auto block = vectors.middleCols(col, m);
    out.projections.emplace_back(block * block.adjoint());
    col += m;
  }
  return out;
}

SingularValueList singular_values(const ComplexMatrix& x) {
  SingularValueList out;
  if (x.size() == 0) return out;
  Eigen::BDCSVD<ComplexMatrix> svd(x);
  const Eigen::VectorXd& s = svd.singularValues();
  out.values.assign(s.data(), s.data() + s.size());
  for (double& v : out.values) v = std::max(v, 0.0);
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

double schatten_norm(const SingularValueList& mu, double p) {
  if (!(p >= 1.0)) {
    std::ostringstream msg;
    msg << "Schatten index must lie in [1, inf], got " << p;
    detail::throw_domain("schatten_norm", msg.str());
  }
  if (mu.values.empty()) return 0.0;
  const double top = mu.values.front();
  if (std::isinf(p) || top == 0.0) return top;
  // Scale by mu_0 to keep large p from overflowing.
  double sum = 0.0;
  for (double v : mu.values) sum += std::pow(v / top, p);
  return top * std::pow(sum, 1.0 / p);
}

double schatten_norm(const ComplexMatrix& x, double p) { return schatten_norm(singular_values(x), p); }

double weak_norm(const SingularValueList& mu) {
  double best = 0.0;
  for (std::size_t k = 0; k < mu.values.size(); ++k) {
    best = std::max(best, static_cast<double>(k + 1) * mu.values[k]);
  }
  return best;
}

double weak_norm(const ComplexMatrix& x) { return weak_norm(singular_values(x)); }

NormTarget parse_norm_target(std::string_view name) {
  if (name == "weak") return NormTarget::weak;
  if (name == "s1") return NormTarget::s1;
  if (name == "s2") return NormTarget::s2;
  detail::throw_domain("parse_norm_target", "unknown target '" + std::string(name) + "' (weak|s1|s2)");
}

std::string_view to_string(NormTarget target) {
  switch (target) {
    case NormTarget::weak: return "weak";
    case NormTarget::s1: return "s1";
    case NormTarget::s2: return "s2";
  }
  return "?";
}

double target_norm(const ComplexMatrix& x, NormTarget target) {
  switch (target) {
    case NormTarget::weak: return weak_norm(x);
    case NormTarget::s1: return schatten_norm(x, 1.0);
    case NormTarget::s2: return x.norm();
  }
  return 0.0;
}

ComplexMatrix kron(const ComplexMatrix& e, const ComplexMatrix& x) {
  ComplexMatrix out(e.rows() * x.rows(), e.cols() * x.cols());
  for (Index i = 0; i < e.rows(); ++i) {
    for (Index j = 0; j < e.cols(); ++j) {
      out.block(i * x.rows(), j * x.cols(), x.rows(), x.cols()) = e(i, j) * x;
    }
  }
  return out;
}

ComplexMatrix matrix_unit(Index size, Index i, Index j) {
  if (size < 1 || i < 0 || j < 0 || i >= size || j >= size) {
    std::ostringstream msg;
    msg << "index (" << i << ", " << j << ") out of range for size " << size;
    detail::throw_precondition("matrix_unit", msg.str());
  }
  ComplexMatrix e = ComplexMatrix::Zero(size, size);
  e(i, j) = 1.0;
  return e;
}

double relative_residual(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols()) return kInfinity;
  return (lhs - rhs).norm() / std::max(1.0, rhs.norm());
}

double relative_residual(double lhs, double rhs) {
  return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

}  // namespace moilab
