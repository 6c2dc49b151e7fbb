#include "moilab/reduction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "moilab/errors.hpp"

namespace moilab {
namespace {

std::vector<double> without(std::span<const double> t, std::size_t skip) {
  std::vector<double> out;
  out.reserve(t.size() - 1);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i != skip) out.push_back(t[i]);
  }
  return out;
}

void require_spectrum_off_zero(const SpectralDecomposition& spec, const char* where) {
  if (spec.has_zero_eigenvalue()) {
    detail::throw_precondition(where, "0 is an eigenvalue; shift the operator with ensure_invertible first");
  }
}

ComplexMatrix double_oi(const BivariateSymbol& s, const HermitianMatrix& a, const ComplexMatrix& x) {
  const ComplexMatrix args[] = {x};
  return apply_moi(MoiSymbol::bivariate_lift(s, 2, 0, 1), OperatorTuple::uniform(a, 2), args);
}

}  // namespace

ExponentTuple::ExponentTuple(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) detail::throw_domain("ExponentTuple", "empty exponent tuple");
  double sum = 0.0;
  for (double v : p_) {
    if (!(v >= 1.0) || std::isinf(v)) {
      std::ostringstream msg;
      msg << "exponent " << v << " outside [1, inf)";
      detail::throw_domain("ExponentTuple", msg.str());
    }
    sum += 1.0 / v;
  }
  if (!(std::abs(sum - 1.0) <= kExponentTolerance)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "sum of reciprocals is " << sum << ", expected 1";
    detail::throw_domain("ExponentTuple", msg.str());
  }
}

std::string ExponentTuple::to_string() const {
  std::ostringstream out;
  out.precision(15);
  for (std::size_t i = 0; i < p_.size(); ++i) out << (i ? ";" : "") << p_[i];
  return out.str();
}

double check_precrucial(const ScalarFunction& f, std::span<const double> t) {
  const int n = f.order();
  if (n < 2 || t.size() != static_cast<std::size_t>(n)) {
    detail::throw_precondition("check_precrucial", "expected n >= 2 and n nodes t_1..t_n");
  }
  std::vector<double> padded{0.0};
  padded.insert(padded.end(), t.begin(), t.end());
  const double lhs = divided_difference(f, padded);
  const double rhs = divided_difference(f_chain(f, 1), t);
  return relative_residual(lhs, rhs);
}

double check_crucial(const ScalarFunction& f, std::span<const double> t, std::size_t i, std::size_t j) {
  const int n = f.order();
  if (n < 2 || t.size() != static_cast<std::size_t>(n) + 1) {
    detail::throw_precondition("check_crucial", "expected n >= 2 and n + 1 nodes");
  }
  if (i == j || i >= t.size() || j >= t.size()) detail::throw_domain("check_crucial", "need distinct indices in range");
  const double ti = t[i];
  const double tj = t[j];
  if (ti == tj || ti == 0.0 || tj == 0.0) {
    detail::throw_domain("check_crucial", "requires t_i != t_j and t_i, t_j nonzero");
  }
  const ScalarFunction g = f_chain(f, 1);
  const double lhs = divided_difference(f, t);
  const double rhs = ti / (ti - tj) * divided_difference(g, without(t, j)) -
                     tj / (ti - tj) * divided_difference(g, without(t, i));
  return relative_residual(lhs, rhs);
}

double check_postcrucial(const ScalarFunction& f, int l, std::span<const double> t) {
  const int n = f.order();
  if (l < 0 || l >= n) detail::throw_domain("check_postcrucial", "l must satisfy 0 <= l <= n - 1");
  if (t.size() != static_cast<std::size_t>(n - l) + 1) {
    detail::throw_precondition("check_postcrucial", "expected n - l + 1 nodes");
  }
  std::vector<double> padded(t.begin(), t.end());
  padded.resize(static_cast<std::size_t>(n) + 1, 0.0);
  const double lhs = divided_difference(f, padded);
  const double rhs = divided_difference(f_chain(f, l), t);
  return relative_residual(lhs, rhs);
}

std::vector<SignBlock> sign_blocks(const HermitianMatrix& a, std::span<const ComplexMatrix> xs) {
  const std::size_t n = xs.size();
  if (n < 1 || n + 1 >= 8 * sizeof(unsigned)) detail::throw_precondition("sign_blocks", "unsupported argument count");
  const auto spec = eig(a);
  require_spectrum_off_zero(spec, "sign_blocks");
  const ComplexMatrix plus = spec.projection_where([](double t) { return t > 0.0; });
  const ComplexMatrix minus = spec.projection_where([](double t) { return t < 0.0; });

  // Precompute the four compressions of each argument.
  std::vector<std::array<ComplexMatrix, 4>> parts(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (int left = 0; left < 2; ++left) {
      for (int right = 0; right < 2; ++right) {
        parts[k][static_cast<std::size_t>(2 * left + right)] =
            (left ? plus : minus) * xs[k] * (right ? plus : minus);
      }
    }
  }
  const unsigned count = 1U << (n + 1);
  std::vector<SignBlock> out(count);
  for (unsigned mask = 0; mask < count; ++mask) {
    out[mask].mask = mask;
    for (std::size_t k = 1; k <= n; ++k) {
      const int left = in_block(mask, k - 1) ? 1 : 0;
      const int right = in_block(mask, k) ? 1 : 0;
      out[mask].xs.push_back(parts[k - 1][static_cast<std::size_t>(2 * left + right)]);
    }
  }
  return out;
}

std::optional<std::size_t> first_sign_change(unsigned mask, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    if (in_block(mask, k) != in_block(mask, k + 1)) return k;
  }
  return std::nullopt;
}

BlockReduction reduce_block(const ScalarFunction& f, const HermitianMatrix& a, const SignBlock& block,
                            std::optional<std::size_t> k_opt) {
  const std::size_t n = block.xs.size();
  if (n < 2 || static_cast<std::size_t>(f.order()) != n) {
    detail::throw_precondition("reduce_block", "requires n >= 2 arguments and f of order n");
  }
  const std::size_t k = k_opt ? *k_opt : first_sign_change(block.mask, n).value_or(n);
  if (k >= n || in_block(block.mask, k) == in_block(block.mask, k + 1)) {
    std::ostringstream msg;
    msg << "block mask " << block.mask << " has no sign change at (" << k << ", " << k + 1 << ")";
    detail::throw_precondition("reduce_block", msg.str());
  }
  const auto full = OperatorTuple::uniform(a, n + 1);
  require_spectrum_off_zero(full.spectrum(0), "reduce_block");
  const auto reduced = OperatorTuple::uniform(a, n);
  const MoiSymbol big = MoiSymbol::divided_difference(f);
  const MoiOperator g_op(MoiSymbol::divided_difference(f_chain(f, 1)), reduced);
  const std::span<const ComplexMatrix> x = block.xs;

  BlockReduction out;
  out.k = k;
  out.direct = apply_moi(big, full, x);

  // 0-based argument indices: x[k] is x_{k+1} in the displayed formulas.
  const ComplexMatrix t_rho = double_oi_rho(a, x[k]);
  const ComplexMatrix t_psi = double_oi_psi(a, x[k]);
  std::vector<ComplexMatrix> args;
  if (k + 1 == n) {
    out.rho_term = g_op.apply(x.first(n - 1)) * t_rho;
  } else {
    args.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k));
    args.push_back(t_rho * x[k + 1]);
    args.insert(args.end(), x.begin() + static_cast<std::ptrdiff_t>(k + 2), x.end());
    out.rho_term = g_op.apply(args);
  }
  if (k == 0) {
    out.psi_term = t_psi * g_op.apply(x.subspan(1));
  } else {
    args.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k - 1));
    args.push_back(x[k - 1] * t_psi);
    args.insert(args.end(), x.begin() + static_cast<std::ptrdiff_t>(k + 1), x.end());
    out.psi_term = g_op.apply(args);
  }
  out.residual = relative_residual(ComplexMatrix(out.rho_term + out.psi_term), out.direct);
  return out;
}

ComplexMatrix block_sum_direct(const ScalarFunction& f, const HermitianMatrix& a, std::span<const ComplexMatrix> xs) {
  const MoiOperator op(MoiSymbol::divided_difference(f), OperatorTuple::uniform(a, xs.size() + 1));
  ComplexMatrix sum = ComplexMatrix::Zero(a.dim(), a.dim());
  for (const auto& block : sign_blocks(a, xs)) sum += op.apply(block.xs);
  return sum;
}

ComplexMatrix block_sum_routed(const ScalarFunction& f, const HermitianMatrix& a, std::span<const ComplexMatrix> xs) {
  const std::size_t n = xs.size();
  const auto tuple = OperatorTuple::uniform(a, n + 1);
  const MoiSymbol phi = MoiSymbol::divided_difference(f);
  const MoiOperator negative(truncate_orthant(phi, Sign::negative), tuple);
  const MoiOperator positive(truncate_orthant(phi, Sign::positive), tuple);
  const unsigned full_mask = (1U << (n + 1)) - 1;
  ComplexMatrix sum = ComplexMatrix::Zero(a.dim(), a.dim());
  for (const auto& block : sign_blocks(a, xs)) {
    if (block.mask == 0) {
      sum += negative.apply(block.xs);
    } else if (block.mask == full_mask) {
      sum += positive.apply(block.xs);
    } else {
      const auto r = reduce_block(f, a, block);
      sum += r.rho_term + r.psi_term;
    }
  }
  return sum;
}

ComplexMatrix double_oi_rho(const HermitianMatrix& a, const ComplexMatrix& x) { return double_oi(rho(), a, x); }

ComplexMatrix double_oi_psi(const HermitianMatrix& a, const ComplexMatrix& x) { return double_oi(psi(), a, x); }

std::vector<ExponentTuple> consummations(const ExponentTuple& p) {
  const std::size_t n = p.size();
  std::vector<ExponentTuple> out;
  const unsigned count = 1U << (n - 1);
  out.reserve(count);
  for (unsigned m = 0; m < count; ++m) {
    std::vector<double> q;
    double acc = 1.0 / p[0];
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (in_block(m, i)) {
        acc += 1.0 / p[i + 1];
      } else {
        q.push_back(std::max(1.0, 1.0 / acc));
        acc = 1.0 / p[i + 1];
      }
    }
    q.push_back(std::max(1.0, 1.0 / acc));
    out.emplace_back(std::move(q));
  }
  return out;
}

}  // namespace moilab
