#pragma once

// Reduction identities for divided differences, the sign-block decomposition
// of MOI arguments and the rho/psi block reduction, plus consummations of
// Hoelder exponent tuples.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "moilab/functions.hpp"
#include "moilab/matrix.hpp"
#include "moilab/moi.hpp"

namespace moilab {

/// Tolerance on |sum 1/p_l - 1|.
inline constexpr double kExponentTolerance = 1e-12;

/// (p_1, ..., p_n) with p_l in [1, inf) and sum 1/p_l = 1.
class ExponentTuple {
 public:
  /// Throws DomainError on an invalid tuple.
  explicit ExponentTuple(std::vector<double> p);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& values() const { return p_; }
  /// "p_1;p_2;..." with shortest round-trip formatting.
  std::string to_string() const;

 private:
  std::vector<double> p_;
};

/// Residual of f^{[n]}(0, t_1..t_n) = g^{[n-1]}(t_1..t_n), g = f_chain(f, 1);
/// t holds the n nodes t_1..t_n.
double check_precrucial(const ScalarFunction& f, std::span<const double> t);

/// Residual of f^{[n]}(t) = t_i/(t_i - t_j) g^{[n-1]}(t without t_j) - t_j/(t_i - t_j) g^{[n-1]}(t without t_i).
/// Throws DomainError unless i != j, t_i != t_j and t_i, t_j != 0.
double check_crucial(const ScalarFunction& f, std::span<const double> t, std::size_t i, std::size_t j);

/// Residual of f^{[n]}(t_0..t_{n-l}, 0..0) = f_l^{[n-l]}(t_0..t_{n-l}); t has n - l + 1 nodes.
double check_postcrucial(const ScalarFunction& f, int l, std::span<const double> t);

/// Bit k of `mask` set means k belongs to the subset of {0..n}.
struct SignBlock {
  unsigned mask = 0;
  std::vector<ComplexMatrix> xs;
};

inline bool in_block(unsigned mask, std::size_t k) { return ((mask >> k) & 1U) != 0; }

/// All 2^{n+1} compressed tuples x_k^mask = P_{s(k-1)} x_k P_{s(k)} with
/// P_+ = chi_{(0,inf)}(A), P_- = chi_{(-inf,0)}(A), ordered by mask. Throws
/// PreconditionError when 0 is an eigenvalue of A.
std::vector<SignBlock> sign_blocks(const HermitianMatrix& a, std::span<const ComplexMatrix> xs);

/// Smallest k in [0, n) with a sign change between k and k + 1, if any.
std::optional<std::size_t> first_sign_change(unsigned mask, std::size_t n);

struct BlockReduction {
  std::size_t k = 0;
  ComplexMatrix rho_term;
  ComplexMatrix psi_term;
  ComplexMatrix direct;  // T_{f^[n]}(block xs)
  double residual = 0.0;
};

/// Splits T_{f^[n]}^{(A..A)}(block xs) into the rho and psi terms at the sign
/// change (k, k+1) using f_1^{[n-1]}. Requires n >= 2, 0 not an eigenvalue of
/// A, and a sign change of `mask` at k (PreconditionError otherwise).
BlockReduction reduce_block(const ScalarFunction& f, const HermitianMatrix& a, const SignBlock& block,
                            std::optional<std::size_t> k = std::nullopt);

/// Sum over all blocks of T_{f^[n]}(block xs).
ComplexMatrix block_sum_direct(const ScalarFunction& f, const HermitianMatrix& a, std::span<const ComplexMatrix> xs);

/// Same sum with the empty and full blocks evaluated through the orthant
/// truncations f^[n] chi_- and f^[n] chi_+, all others through reduce_block.
ComplexMatrix block_sum_routed(const ScalarFunction& f, const HermitianMatrix& a, std::span<const ComplexMatrix> xs);

/// T_rho^{A,A}(x) and T_psi^{A,A}(x).
ComplexMatrix double_oi_rho(const HermitianMatrix& a, const ComplexMatrix& x);
ComplexMatrix double_oi_psi(const HermitianMatrix& a, const ComplexMatrix& x);

/// All 2^{n-1} coarsenings by merging consecutive indices harmonically. Entry
/// m merges positions i and i + 1 whenever bit i of m is set.
std::vector<ExponentTuple> consummations(const ExponentTuple& p);

}  // namespace moilab
