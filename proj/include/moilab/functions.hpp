#pragma once

// Scalar functions of the class "C^{n-1} on R, C^n off the origin" with
// derivative access, their divided differences, the reduction chain
// f_l(t) = f_{l-1}^{[1]}(t, 0) and the bivariate weights rho and psi.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace moilab {

/// Value of the top-order divided difference at the origin. `modified` sets
/// f^{[n]}(0, ..., 0) = 0; `classical` uses f^{(n)}(0) / n! and requires the
/// function to be C^n at 0.
enum class ZeroConvention { modified, classical };

/// Type-erased scalar function with a fixed order n.
///
/// deriv(k, t) is available for 0 <= k <= n when t != 0, for k <= n - 1 at
/// t = 0, and for k = n at t = 0 only when smooth_at_zero(). Requests outside
/// that range throw DomainError.
class ScalarFunction {
 public:
  class Impl {
   public:
    virtual ~Impl() = default;
    virtual int order() const = 0;
    virtual bool smooth_at_zero() const = 0;
    /// Highest derivative order evaluable away from 0 (at least order()).
    virtual int max_derivative() const { return order(); }
    /// k-th derivative; called only inside the documented range.
    virtual double derivative(int k, double t) const = 0;
    virtual std::string name() const = 0;
    /// Closed-form divided difference over sorted, not all equal nodes, if
    /// one is available there.
    virtual std::optional<double> exact_divided_difference(std::span<const double>) const { return std::nullopt; }
  };

  explicit ScalarFunction(std::shared_ptr<const Impl> impl);

  int order() const { return impl_->order(); }
  bool smooth_at_zero() const { return impl_->smooth_at_zero(); }
  int max_derivative() const { return impl_->max_derivative(); }
  std::string name() const { return impl_->name(); }
  const Impl& impl() const { return *impl_; }

  double value(double t) const { return impl_->derivative(0, t); }
  double operator()(double t) const { return value(t); }
  double deriv(int k, double t) const;
  double deriv_at_zero(int k) const;

 private:
  std::shared_ptr<const Impl> impl_;
};

/// a(t) = |t| t^{n-1}.
ScalarFunction builtin_a(int n);

/// b(t) = t^n.
ScalarFunction builtin_b(int n);

/// Polynomial sum_j coeffs[j] t^j viewed as a function of order n.
ScalarFunction builtin_polynomial(std::vector<double> coeffs, int n);

struct SmoothingSpec {
  /// The bridge polynomial replaces a on [-radius, radius].
  double radius = 1.0;
};

/// Coefficients (increasing degree) of the degree 2n+3 polynomial matching
/// a and its first n+1 derivatives at +-radius. Throws NumericalError when the
/// boundary-matching system cannot be solved.
std::vector<double> smoothing_bridge(int n, const SmoothingSpec& spec = {});

/// C^{n+1} function equal to a outside [-radius, radius].
ScalarFunction builtin_smoothed(int n, const SmoothingSpec& spec = {});

/// "a", "b", "smoothed" or "poly:c0,c1,..." (increasing degree).
ScalarFunction parse_function(std::string_view spec, int n);

/// f_l with f_0 = f and f_l(t) = f_{l-1}^{[1]}(t, 0); order drops to n - l.
/// Requires 0 <= l < f.order().
ScalarFunction f_chain(const ScalarFunction& f, int l);

/// f^{[k]}(t_0, ..., t_k) for k + 1 = nodes.size() <= f.order() + 1 via a
/// confluent Newton table on the sorted nodes. Exactly equal nodes are
/// confluent; the result is invariant under permutations of `nodes`.
double divided_difference(const ScalarFunction& f, std::span<const double> nodes,
                          ZeroConvention convention = ZeroConvention::modified);
double divided_difference(const ScalarFunction& f, std::initializer_list<double> nodes,
                          ZeroConvention convention = ZeroConvention::modified);

/// The defining top-down recursion (first two nodes distinct: difference
/// quotient; otherwise swap in a distinct node; all equal: derivative).
/// Exponential in the node count; kept as a reference for tests.
double divided_difference_recursive(const ScalarFunction& f, std::span<const double> nodes,
                                    ZeroConvention convention = ZeroConvention::modified);

/// Real function of two real variables.
class BivariateSymbol {
 public:
  BivariateSymbol(std::string name, std::function<double(double, double)> eval)
      : name_(std::move(name)), eval_(std::move(eval)) {}

  double operator()(double s0, double s1) const { return eval_(s0, s1); }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::function<double(double, double)> eval_;
};

/// |s0| / (|s0| + |s1|), zero at the origin.
BivariateSymbol rho();

/// |s1| / (|s0| + |s1|), zero at the origin.
BivariateSymbol psi();

}  // namespace moilab
