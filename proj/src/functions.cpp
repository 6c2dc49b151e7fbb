#include "moilab/functions.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <Eigen/Dense>

#include "moilab/errors.hpp"

namespace moilab {
namespace {

double factorial(int k) {
  double out = 1.0;
  for (int i = 2; i <= k; ++i) out *= i;
  return out;
}

/// m (m-1) ... (m-k+1).
double falling(int m, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= m - i;
  return out;
}

/// sum_m c_m h_{m-k}(t_0, ..., t_k), the divided difference of a polynomial
/// in terms of complete homogeneous polynomials h_j.
double polynomial_dd(std::span<const double> coeffs, std::span<const double> t) {
  const int k = static_cast<int>(t.size()) - 1;
  const int top = static_cast<int>(coeffs.size()) - 1 - k;
  if (top < 0) return 0.0;
  std::vector<double> h(static_cast<std::size_t>(top) + 1, 0.0);
  h[0] = 1.0;
  for (double x : t) {
    for (std::size_t j = 1; j < h.size(); ++j) h[j] += x * h[j - 1];
  }
  double acc = 0.0;
  for (int j = top; j >= 0; --j) acc += coeffs[static_cast<std::size_t>(j + k)] * h[static_cast<std::size_t>(j)];
  return acc;
}

/// a on one closed half-line is +-t^n.
std::optional<double> abs_power_dd(int n, std::span<const double> t) {
  if (t.front() < 0.0 && t.back() > 0.0) return std::nullopt;
  std::vector<double> mono(static_cast<std::size_t>(n) + 1, 0.0);
  mono.back() = t.back() > 0.0 ? 1.0 : -1.0;
  return polynomial_dd(mono, t);
}

double sign(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

/// k-th derivative of |t| t^{n-1} = sign(t) t^n for any k, t != 0 (or k < n).
double abs_power_derivative(int n, int k, double t) {
  if (k > n) return 0.0;
  if (t == 0.0) return 0.0;
  return sign(t) * falling(n, k) * std::pow(t, n - k);
}

class AbsPower final : public ScalarFunction::Impl {
 public:
  explicit AbsPower(int n) : n_(n) {}
  int order() const override { return n_; }
  bool smooth_at_zero() const override { return false; }
  int max_derivative() const override { return n_ + 1; }
  double derivative(int k, double t) const override { return abs_power_derivative(n_, k, t); }
  std::string name() const override { return "a"; }
  std::optional<double> exact_divided_difference(std::span<const double> t) const override {
    return abs_power_dd(n_, t);
  }

 private:
  int n_;
};

class Polynomial final : public ScalarFunction::Impl {
 public:
  Polynomial(std::vector<double> coeffs, int n, std::string name)
      : coeffs_(std::move(coeffs)), n_(n), name_(std::move(name)) {}
  int order() const override { return n_; }
  bool smooth_at_zero() const override { return true; }
  int max_derivative() const override { return std::max<int>(n_, static_cast<int>(coeffs_.size())); }
  std::string name() const override { return name_; }

  double derivative(int k, double t) const override {
    const int deg = static_cast<int>(coeffs_.size()) - 1;
    double acc = 0.0;
    for (int j = deg; j >= k; --j) acc = acc * t + coeffs_[static_cast<std::size_t>(j)] * falling(j, k);
    return acc;
  }

  std::optional<double> exact_divided_difference(std::span<const double> t) const override {
    return polynomial_dd(coeffs_, t);
  }

 private:
  std::vector<double> coeffs_;
  int n_;
  std::string name_;
};

class Smoothed final : public ScalarFunction::Impl {
 public:
  Smoothed(int n, double radius, std::vector<double> bridge)
      : n_(n), radius_(radius), bridge_(std::move(bridge), n, "bridge") {}
  int order() const override { return n_; }
  bool smooth_at_zero() const override { return true; }
  int max_derivative() const override { return n_ + 1; }
  std::string name() const override { return "smoothed"; }

  double derivative(int k, double t) const override {
    if (std::abs(t) > radius_) return abs_power_derivative(n_, k, t);
    return bridge_.derivative(k, t);
  }

  std::optional<double> exact_divided_difference(std::span<const double> t) const override {
    if (t.front() > radius_ || t.back() < -radius_) return abs_power_dd(n_, t);
    if (t.front() >= -radius_ && t.back() <= radius_) return bridge_.exact_divided_difference(t);
    return std::nullopt;
  }

 private:
  int n_;
  double radius_;
  Polynomial bridge_;
};

/// f_1 for a parent f: f_1(t) = f^{[1]}(t, 0) and
/// f_1^{(k)}(t) = k! f^{[k+1]}(t, ..., t, 0) with t repeated k + 1 times.
class Chain final : public ScalarFunction::Impl {
 public:
  explicit Chain(ScalarFunction parent) : parent_(std::move(parent)) {}
  int order() const override { return parent_.order() - 1; }
  bool smooth_at_zero() const override { return parent_.smooth_at_zero(); }
  std::string name() const override { return parent_.name() + "'"; }

  double derivative(int k, double t) const override {
    std::vector<double> nodes(static_cast<std::size_t>(k) + 2, t);
    nodes.back() = 0.0;
    return factorial(k) * divided_difference(parent_, nodes, ZeroConvention::classical);
  }

 private:
  ScalarFunction parent_;
};

void require_order(int n, const char* where) {
  if (n < 1) detail::throw_domain(where, "order n must be at least 1, got " + std::to_string(n));
}

double derivative_at_node(const ScalarFunction& f, int k, double t) {
  if (t == 0.0 && k > f.order() - 1 && !f.smooth_at_zero()) {
    std::ostringstream msg;
    msg << "confluent zero node beyond regularity (derivative of order " << k << " at 0 for "
        << f.name() << " of order " << f.order() << ")";
    detail::throw_domain("divided_difference", msg.str());
  }
  return f.deriv(k, t);
}

void check_node_count(const ScalarFunction& f, std::size_t count, const char* where) {
  if (count < 1 || count > static_cast<std::size_t>(f.order()) + 1) {
    std::ostringstream msg;
    msg << "expected between 1 and " << f.order() + 1 << " nodes for " << f.name() << ", got " << count;
    detail::throw_precondition(where, msg.str());
  }
}

/// Value on all-equal nodes t, ..., t (k + 1 of them).
double confluent_value(const ScalarFunction& f, int k, double t, ZeroConvention convention) {
  if (t == 0.0 && k == f.order() && convention == ZeroConvention::modified) return 0.0;
  return derivative_at_node(f, k, t) / factorial(k);
}

double recursive_impl(const ScalarFunction& f, std::vector<double> t, ZeroConvention convention) {
  const int k = static_cast<int>(t.size()) - 1;
  if (k == 0) return f.value(t[0]);
  if (t[0] == t[1]) {
    const auto distinct = std::find_if(t.begin() + 2, t.end(), [&](double s) { return s != t[0]; });
    if (distinct == t.end()) return confluent_value(f, k, t[0], convention);
    std::iter_swap(t.begin() + 1, distinct);
  }
  std::vector<double> first(t.begin() + 1, t.end());
  first[0] = t[0];
  std::vector<double> second(t.begin() + 1, t.end());
  const double num = recursive_impl(f, std::move(first), convention) - recursive_impl(f, std::move(second), convention);
  return num / (t[0] - t[1]);
}

}  // namespace

ScalarFunction::ScalarFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {
  if (!impl_) throw std::invalid_argument("ScalarFunction: null implementation");
}

double ScalarFunction::deriv(int k, double t) const {
  if (k < 0 || k > max_derivative()) {
    std::ostringstream msg;
    msg << "derivative order " << k << " outside [0, " << max_derivative() << "] for " << name();
    detail::throw_domain("ScalarFunction::deriv", msg.str());
  }
  if (t == 0.0 && k > order() - 1 && !smooth_at_zero()) {
    std::ostringstream msg;
    msg << name() << " is only C^" << order() - 1 << " at 0; derivative of order " << k << " requested";
    detail::throw_domain("ScalarFunction::deriv", msg.str());
  }
  return impl_->derivative(k, t);
}

double ScalarFunction::deriv_at_zero(int k) const { return deriv(k, 0.0); }

ScalarFunction builtin_a(int n) {
  require_order(n, "builtin_a");
  return ScalarFunction(std::make_shared<AbsPower>(n));
}

ScalarFunction builtin_b(int n) {
  require_order(n, "builtin_b");
  std::vector<double> coeffs(static_cast<std::size_t>(n) + 1, 0.0);
  coeffs.back() = 1.0;
  return ScalarFunction(std::make_shared<Polynomial>(std::move(coeffs), n, "b"));
}

ScalarFunction builtin_polynomial(std::vector<double> coeffs, int n) {
  require_order(n, "builtin_polynomial");
  if (coeffs.empty()) coeffs.push_back(0.0);
  return ScalarFunction(std::make_shared<Polynomial>(std::move(coeffs), n, "poly"));
}

std::vector<double> smoothing_bridge(int n, const SmoothingSpec& spec) {
  require_order(n, "smoothing_bridge");
  const double r = spec.radius;
  if (!(r > 0.0) || !std::isfinite(r)) {
    std::ostringstream msg;
    msg << "construction error: radius must be positive and finite, got " << r;
    throw NumericalError(msg.str());
  }
  const int conditions = n + 2;  // derivatives 0..n+1 at each endpoint
  const int unknowns = 2 * conditions;
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(unknowns, unknowns);
  Eigen::VectorXd rhs(unknowns);
  int row = 0;
  for (double t : {-r, r}) {
    for (int k = 0; k < conditions; ++k, ++row) {
      for (int j = k; j < unknowns; ++j) system(row, j) = falling(j, k) * std::pow(t, j - k);
      rhs(row) = abs_power_derivative(n, k, t);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) throw NumericalError("construction error: boundary-matching system is singular");
  const Eigen::VectorXd c = lu.solve(rhs);
  const double residual = (system * c - rhs).norm() / std::max(1.0, rhs.norm());
  if (!(residual < 1e-9)) {
    std::ostringstream msg;
    msg << "construction error: boundary-matching residual " << residual;
    throw NumericalError(msg.str());
  }
  return {c.data(), c.data() + c.size()};
}

ScalarFunction builtin_smoothed(int n, const SmoothingSpec& spec) {
  return ScalarFunction(std::make_shared<Smoothed>(n, spec.radius, smoothing_bridge(n, spec)));
}

ScalarFunction parse_function(std::string_view spec, int n) {
  if (spec == "a") return builtin_a(n);
  if (spec == "b") return builtin_b(n);
  if (spec == "smoothed") return builtin_smoothed(n);
  constexpr std::string_view prefix = "poly:";
  if (spec.substr(0, prefix.size()) == prefix) {
    std::vector<double> coeffs;
    std::string rest(spec.substr(prefix.size()));
    std::stringstream in(rest);
    std::string item;
    while (std::getline(in, item, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != item.size()) {
        detail::throw_domain("parse_function", "bad polynomial coefficient '" + item + "'");
      }
      coeffs.push_back(v);
    }
    if (coeffs.empty()) detail::throw_domain("parse_function", "polynomial needs at least one coefficient");
    return builtin_polynomial(std::move(coeffs), n);
  }
  detail::throw_domain("parse_function", "unknown function '" + std::string(spec) + "' (a|b|smoothed|poly:c0,c1,..)");
}

ScalarFunction f_chain(const ScalarFunction& f, int l) {
  if (l < 0 || l >= f.order()) {
    std::ostringstream msg;
    msg << "chain index l = " << l << " must satisfy 0 <= l < n = " << f.order();
    detail::throw_domain("f_chain", msg.str());
  }
  ScalarFunction out = f;
  for (int i = 0; i < l; ++i) out = ScalarFunction(std::make_shared<Chain>(out));
  return out;
}

double divided_difference(const ScalarFunction& f, std::span<const double> nodes, ZeroConvention convention) {
  check_node_count(f, nodes.size(), "divided_difference");
  const int k = static_cast<int>(nodes.size()) - 1;

  // Small fixed buffers: the node count is bounded by order + 1.
  std::vector<double> z(nodes.begin(), nodes.end());
  std::sort(z.begin(), z.end());
  if (z.front() == z.back()) return confluent_value(f, k, z.front(), convention);
  if (const auto exact = f.impl().exact_divided_difference(z)) return *exact;

  std::vector<double> c(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) c[i] = f.value(z[i]);
  for (int j = 1; j <= k; ++j) {
    const double inv_fact = 1.0 / factorial(j);
    for (int i = k; i >= j; --i) {
      const auto iu = static_cast<std::size_t>(i);
      const auto il = static_cast<std::size_t>(i - j);
      if (z[iu] == z[il]) {
        c[iu] = derivative_at_node(f, j, z[iu]) * inv_fact;
      } else {
        c[iu] = (c[iu] - c[iu - 1]) / (z[iu] - z[il]);
      }
    }
  }
  return c[static_cast<std::size_t>(k)];
}

double divided_difference(const ScalarFunction& f, std::initializer_list<double> nodes, ZeroConvention convention) {
  return divided_difference(f, std::span<const double>(nodes.begin(), nodes.size()), convention);
}

double divided_difference_recursive(const ScalarFunction& f, std::span<const double> nodes,
                                    ZeroConvention convention) {
  check_node_count(f, nodes.size(), "divided_difference_recursive");
  return recursive_impl(f, std::vector<double>(nodes.begin(), nodes.end()), convention);
}

BivariateSymbol rho() {
  return BivariateSymbol("rho", [](double s0, double s1) {
    const double den = std::abs(s0) + std::abs(s1);
    return den == 0.0 ? 0.0 : std::abs(s0) / den;
  });
}

BivariateSymbol psi() {
  return BivariateSymbol("psi", [](double s0, double s1) {
    const double den = std::abs(s0) + std::abs(s1);
    return den == 0.0 ? 0.0 : std::abs(s1) / den;
  });
}

}  // namespace moilab
