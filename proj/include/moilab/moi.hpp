#pragma once

// Multiple operator integrals on finite Hermitian tuples
//
//   T_phi^{(A_0..A_n)}(x_1..x_n) = sum phi(l_{i0}..l_{in}) P_{i0} x_1 P_{i1} ... x_n P_{in}
//
// and the structural identities around them (indicator truncation,
// translation, the zero indicator, amplification).

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "moilab/matrix.hpp"
#include "moilab/symbol.hpp"

namespace moilab {

/// (A_0, ..., A_n) of a shared dimension with cached spectral data.
class OperatorTuple {
 public:
  explicit OperatorTuple(std::vector<HermitianMatrix> operators);

  /// (A, ..., A) with `count` entries; the decomposition is computed once.
  static OperatorTuple uniform(const HermitianMatrix& a, std::size_t count);

  std::size_t size() const { return operators_.size(); }
  Index dim() const { return operators_.front().dim(); }
  const HermitianMatrix& matrix(std::size_t i) const { return operators_[i]; }
  const SpectralDecomposition& spectrum(std::size_t i) const { return *spectra_[i]; }

 private:
  OperatorTuple(std::vector<HermitianMatrix> operators, std::vector<std::shared_ptr<const SpectralDecomposition>> spectra);

  std::vector<HermitianMatrix> operators_;
  std::vector<std::shared_ptr<const SpectralDecomposition>> spectra_;
};

enum class Execution { serial, parallel };

/// T_phi^A with phi tabulated on the spectrum grid. Construction evaluates the
/// symbol (and propagates its DomainError); application is exception free and
/// gives bit-identical results for both execution modes.
class MoiOperator {
 public:
  MoiOperator(MoiSymbol phi, OperatorTuple operators);

  /// Number of arguments n.
  std::size_t degree() const { return operators_.size() - 1; }
  Index dim() const { return operators_.dim(); }
  const MoiSymbol& symbol() const { return phi_; }
  const OperatorTuple& operators() const { return operators_; }

  ComplexMatrix apply(std::span<const ComplexMatrix> xs, Execution exec = Execution::parallel) const;

  /// G with Re Tr(W* T(x_1, .., y, .., x_n)) = Re Tr(G* y) for y in slot
  /// `slot` (1-based); the other arguments are taken from xs.
  ComplexMatrix adjoint_slot(std::span<const ComplexMatrix> xs, std::size_t slot, const ComplexMatrix& w,
                             Execution exec = Execution::parallel) const;

  /// max |phi| over the grid.
  double grid_sup() const;
  /// Cluster indices (one per operator) of a grid point attaining grid_sup().
  std::vector<int> grid_argmax() const;

 private:
  void check_arguments(std::span<const ComplexMatrix> xs, const char* where) const;
  std::vector<ComplexMatrix> rotated_arguments(std::span<const ComplexMatrix> xs) const;

  MoiSymbol phi_;
  OperatorTuple operators_;
  std::vector<double> grid_;
  std::vector<std::size_t> strides_;
};

/// Eigenbasis kernel.
ComplexMatrix apply_moi(const MoiSymbol& phi, const OperatorTuple& a, std::span<const ComplexMatrix> xs,
                        Execution exec = Execution::parallel);

/// Literal projection sum; serial and slow, kept as a reference.
ComplexMatrix apply_moi_reference(const MoiSymbol& phi, const OperatorTuple& a, std::span<const ComplexMatrix> xs);

/// max |phi| over the spectrum grid: the norm of T_phi^A on S_2 x ... x S_2.
double moi_s2_bound(const MoiSymbol& phi, const OperatorTuple& a);

/// Rank-one arguments x_l = v_{l-1} v_l* built from unit eigenvectors of a
/// maximizing grid point; ||T(xs)||_2 equals the bound.
struct SharpnessWitness {
  std::vector<ComplexMatrix> xs;
  double bound = 0.0;
  double achieved = 0.0;
};
SharpnessWitness sharpness_witness(const MoiSymbol& phi, const OperatorTuple& a);

/// x_1 x_2 ... x_n.
ComplexMatrix ordered_product(std::span<const ComplexMatrix> xs);

/// q x_1 q x_2 q ... x_n q.
ComplexMatrix compressed_product(const ComplexMatrix& q, std::span<const ComplexMatrix> xs);

/// phi * chi_s.
MoiSymbol truncate_orthant(const MoiSymbol& phi, Sign s);

/// Residual of T_phi^{(A..A)}(xs) = T_{phi chi_s}^{(A..A)}(xs). Throws
/// PreconditionError unless s * A >= 0.
double check_indicator_truncation(const MoiSymbol& phi, const HermitianMatrix& a, std::span<const ComplexMatrix> xs,
                                  Sign s);

/// tau_delta(phi)(t) = phi(t_0 + delta, ..., t_n + delta); delta = 0 returns phi.
MoiSymbol translate_symbol(const MoiSymbol& phi, double delta);

/// Residual of T_{tau_delta phi}^{(A..A)}(xs) = T_phi^{(A+delta..A+delta)}(xs).
double check_translation(const MoiSymbol& phi, const HermitianMatrix& a, double delta,
                         std::span<const ComplexMatrix> xs);

/// Residual of T_{c chi_0}^{(A..A)}(xs) = c Q x_1 Q ... x_n Q with Q = chi_{0}(A).
double check_zero_indicator(double c, const HermitianMatrix& a, std::span<const ComplexMatrix> xs);

/// Residual of T_phi^{(A_0..A_n)}(xs) = phi_0(A_0) x_1 phi_1(A_1) ... x_n phi_n(A_n)
/// for an elementary tensor given by its factors.
double check_elementary_tensor(const std::vector<std::function<double(double)>>& factors, const OperatorTuple& a,
                               std::span<const ComplexMatrix> xs);

struct Amplification {
  HermitianMatrix block_operator;  // sum_l E_{l,l} (x) A_l
  std::vector<ComplexMatrix> zs;   // z_l = E_{l-1,l} (x) x_l
};
Amplification amplify(const OperatorTuple& a, std::span<const ComplexMatrix> xs);

/// Residual of T_phi^{(B..B)}(zs) = E_{0,n} (x) T_phi^A(xs) for (B, zs) = amplify(A, xs).
double check_amplification(const MoiSymbol& phi, const OperatorTuple& a, std::span<const ComplexMatrix> xs);

/// Residual of T_{h_1}^{(A..A)}(xs) = T_{h_2}^{(A..A)}(x_1..x_k, T_{h_3}^{(A,A)}(x_{k+1}), x_{k+2}..x_n)
/// with h_1(t) = h_3(t_k, t_{k+1}) h_2(t); k is 0-based, 0 <= k < n.
double check_lift_composition(const MoiSymbol& h2, const BivariateSymbol& h3, std::size_t k, const HermitianMatrix& a,
                              std::span<const ComplexMatrix> xs);

/// Residual of T_h^{(A..A)}(x_1..x_n) = T_{h'}^{(A..A)}(.., x_d x_{d+1}, ..) when
/// h(t_0..t_n) = h'(t_0..t_{d-1}, t_{d+1}..t_n) does not depend on t_d. At the
/// ends the free argument multiplies from the left (d = 0) or right (d = n).
double check_variable_elimination(const MoiSymbol& h_reduced, std::size_t d, const HermitianMatrix& a,
                                  std::span<const ComplexMatrix> xs);

struct ShiftPolicy {
  double delta = 1e-3;
};

struct InvertibleShift {
  HermitianMatrix matrix;
  double delta = 0.0;
};

/// A - delta I with 0 outside the spectrum; A itself (delta = 0) when 0 is
/// not an eigenvalue.
InvertibleShift ensure_invertible(const HermitianMatrix& a, const ShiftPolicy& policy = {});

}  // namespace moilab
