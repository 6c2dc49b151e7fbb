#pragma once

// Symbols phi : R^{n+1} -> R of multiple operator integrals. A symbol is an
// immutable expression tree; evaluation is pure and thread-safe.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "moilab/functions.hpp"

namespace moilab {

enum class Sign : int { negative = -1, positive = 1 };

inline double sign_value(Sign s) { return static_cast<double>(static_cast<int>(s)); }

/// Upper bound on symbol arity; keeps evaluation free of heap traffic.
inline constexpr std::size_t kMaxArity = 16;

class MoiSymbol {
 public:
  enum class Kind {
    divided_difference,
    indicator_orthant,
    indicator_zero,
    elementary_tensor,
    translate,
    product,
    bivariate_lift,
    constant,
    select,
  };

  class Node {
   public:
    virtual ~Node() = default;
    virtual double eval(std::span<const double> t) const = 0;
    virtual std::string describe() const = 0;
  };

  std::size_t arity() const { return arity_; }
  Kind kind() const { return kind_; }
  std::string describe() const { return node_->describe(); }

  /// Requires t.size() == arity().
  double operator()(std::span<const double> t) const;
  double operator()(std::initializer_list<double> t) const {
    return (*this)(std::span<const double>(t.begin(), t.size()));
  }

  /// f^{[n]} with n = f.order(); arity n + 1.
  static MoiSymbol divided_difference(ScalarFunction f, ZeroConvention convention = ZeroConvention::modified);

  /// Indicator of the closed orthant s * R_{>=0}^{arity} (the origin included).
  static MoiSymbol indicator_orthant(Sign s, std::size_t arity);

  /// Indicator of the origin of R^{arity}.
  static MoiSymbol indicator_zero(std::size_t arity);

  /// phi_0(t_0) phi_1(t_1) ... phi_n(t_n).
  static MoiSymbol elementary_tensor(std::vector<std::function<double(double)>> factors);

  /// inner(t_0 + delta, ..., t_n + delta).
  static MoiSymbol translate(double delta, MoiSymbol inner);

  /// Pointwise product of symbols of equal arity.
  static MoiSymbol product(std::vector<MoiSymbol> factors);

  /// s(t_i, t_j) as a symbol of the given arity.
  static MoiSymbol bivariate_lift(BivariateSymbol s, std::size_t arity, std::size_t i, std::size_t j);

  static MoiSymbol constant(double c, std::size_t arity);

  /// inner(t_{indices[0]}, ..., t_{indices[m-1]}) as a symbol of the given
  /// arity; used to drop or reorder variables.
  static MoiSymbol select(MoiSymbol inner, std::size_t arity, std::vector<std::size_t> indices);

 private:
  MoiSymbol(Kind kind, std::size_t arity, std::shared_ptr<const Node> node);

  Kind kind_;
  std::size_t arity_;
  std::shared_ptr<const Node> node_;
};

}  // namespace moilab
