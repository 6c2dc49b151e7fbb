#pragma once

// Dense Hermitian linear algebra on the finite-dimensional stand-ins for
// B(H)_sa: spectral decompositions grouped by distinct eigenvalue, singular
// values, Schatten norms, the weak trace-class quasi-norm and Kronecker
// constructions.

#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace moilab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Entrywise tolerance for |a_ij - conj(a_ji)|, scaled by max(1, max|a_ij|).
inline constexpr double kHermitianTolerance = 1e-12;

/// Eigenvalues closer than kClusterTolerance * max(1, spectral radius) share
/// one spectral projection.
inline constexpr double kClusterTolerance = 1e-9;

/// Square complex matrix equal to its adjoint. The stored entries are exactly
/// Hermitian: the constructor validates within kHermitianTolerance and then
/// replaces the input by (M + M*) / 2.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const ComplexMatrix& entries);

  static HermitianMatrix identity(Index dim);
  static HermitianMatrix diagonal(std::span<const double> values);
  static HermitianMatrix diagonal(std::initializer_list<double> values);

  Index dim() const { return entries_.rows(); }
  const ComplexMatrix& matrix() const { return entries_; }

  /// A + delta * I.
  HermitianMatrix shifted(double delta) const;

 private:
  ComplexMatrix entries_;
};

/// Distinct eigenvalues in increasing order with their eigenprojections.
///
/// `eigenvectors` holds an orthonormal eigenbasis whose columns are grouped by
/// cluster in the same order as `eigenvalues`; `cluster_of[c]` is the cluster
/// index of column c. Eigenvalues within the cluster tolerance of zero are
/// stored as exactly 0.0 so that indicator symbols of {0} see them.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  std::vector<int> multiplicities;
  std::vector<HermitianMatrix> projections;
  ComplexMatrix eigenvectors;
  std::vector<int> cluster_of;
  double cluster_tolerance = 0.0;

  Index dim() const { return eigenvectors.rows(); }
  std::size_t size() const { return eigenvalues.size(); }

  /// Sum_i eigenvalues[i] * projections[i].
  ComplexMatrix reconstruct() const;

  /// f(A) = Sum_i f(eigenvalues[i]) projections[i].
  ComplexMatrix apply(const std::function<Complex(double)>& f) const;

  /// Spectral projection chi_S(A) for S = {lambda : pred(lambda)}.
  ComplexMatrix projection_where(const std::function<bool(double)>& pred) const;

  bool has_zero_eigenvalue() const;
  double spectral_radius() const;
};

/// Eigendecomposition into spectral projections; throws NumericalError when
/// the eigensolver fails.
SpectralDecomposition eig(const HermitianMatrix& a);

/// Nonincreasing singular values mu_0 >= mu_1 >= ... >= 0, min(rows, cols) of them.
struct SingularValueList {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t k) const { return values[k]; }
};

SingularValueList singular_values(const ComplexMatrix& x);

/// (Sum mu_k^p)^(1/p) for p in [1, inf); mu_0 for p = kInfinity.
double schatten_norm(const SingularValueList& mu, double p);
double schatten_norm(const ComplexMatrix& x, double p);

/// max_k (k + 1) mu_k.
double weak_norm(const SingularValueList& mu);
double weak_norm(const ComplexMatrix& x);

enum class NormTarget { weak, s1, s2 };

NormTarget parse_norm_target(std::string_view name);
std::string_view to_string(NormTarget target);
double target_norm(const ComplexMatrix& x, NormTarget target);

ComplexMatrix kron(const ComplexMatrix& e, const ComplexMatrix& x);

/// E_{i,j} in M_size(C).
ComplexMatrix matrix_unit(Index size, Index i, Index j);

/// ||lhs - rhs||_F / max(1, ||rhs||_F).
double relative_residual(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

/// |lhs - rhs| / max(1, |lhs|, |rhs|).
double relative_residual(double lhs, double rhs);

}  // namespace moilab
