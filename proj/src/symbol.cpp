#include "moilab/symbol.hpp"

#include <array>
#include <sstream>

#include "moilab/errors.hpp"

namespace moilab {
namespace {

using Node = MoiSymbol::Node;

void check_arity(std::size_t arity, const char* where) {
  if (arity < 1 || arity > kMaxArity) {
    std::ostringstream msg;
    msg << "arity must lie in [1, " << kMaxArity << "], got " << arity;
    detail::throw_precondition(where, msg.str());
  }
}

class DividedDifferenceNode final : public Node {
 public:
  DividedDifferenceNode(ScalarFunction f, ZeroConvention convention) : f_(std::move(f)), convention_(convention) {}
  double eval(std::span<const double> t) const override { return divided_difference(f_, t, convention_); }
  std::string describe() const override {
    return f_.name() + "^[" + std::to_string(f_.order()) + "]" +
           (convention_ == ZeroConvention::classical ? "(classical)" : "");
  }

 private:
  ScalarFunction f_;
  ZeroConvention convention_;
};

class OrthantNode final : public Node {
 public:
  explicit OrthantNode(Sign s) : s_(s) {}
  double eval(std::span<const double> t) const override {
    for (double v : t) {
      if (s_ == Sign::positive ? v < 0.0 : v > 0.0) return 0.0;
    }
    return 1.0;
  }
  std::string describe() const override { return s_ == Sign::positive ? "chi_+" : "chi_-"; }

 private:
  Sign s_;
};

class ZeroNode final : public Node {
 public:
  double eval(std::span<const double> t) const override {
    for (double v : t) {
      if (v != 0.0) return 0.0;
    }
    return 1.0;
  }
  std::string describe() const override { return "chi_0"; }
};

class TensorNode final : public Node {
 public:
  explicit TensorNode(std::vector<std::function<double(double)>> factors) : factors_(std::move(factors)) {}
  double eval(std::span<const double> t) const override {
    double out = 1.0;
    for (std::size_t i = 0; i < factors_.size(); ++i) out *= factors_[i](t[i]);
    return out;
  }
  std::string describe() const override { return "tensor(" + std::to_string(factors_.size()) + ")"; }

 private:
  std::vector<std::function<double(double)>> factors_;
};

class TranslateNode final : public Node {
 public:
  TranslateNode(double delta, MoiSymbol inner) : delta_(delta), inner_(std::move(inner)) {}
  double eval(std::span<const double> t) const override {
    std::array<double, kMaxArity> shifted{};
    for (std::size_t i = 0; i < t.size(); ++i) shifted[i] = t[i] + delta_;
    return inner_(std::span<const double>(shifted.data(), t.size()));
  }
  std::string describe() const override {
    std::ostringstream out;
    out << "tau(" << delta_ << ", " << inner_.describe() << ")";
    return out.str();
  }

 private:
  double delta_;
  MoiSymbol inner_;
};

class ProductNode final : public Node {
 public:
  explicit ProductNode(std::vector<MoiSymbol> factors) : factors_(std::move(factors)) {}
  double eval(std::span<const double> t) const override {
    double out = 1.0;
    for (const auto& f : factors_) {
      out *= f(t);
      if (out == 0.0) break;
    }
    return out;
  }
  std::string describe() const override {
    std::string out;
    for (const auto& f : factors_) out += (out.empty() ? "" : " * ") + f.describe();
    return out;
  }

 private:
  std::vector<MoiSymbol> factors_;
};

class LiftNode final : public Node {
 public:
  LiftNode(BivariateSymbol s, std::size_t i, std::size_t j) : s_(std::move(s)), i_(i), j_(j) {}
  double eval(std::span<const double> t) const override { return s_(t[i_], t[j_]); }
  std::string describe() const override {
    return s_.name() + "(t" + std::to_string(i_) + ", t" + std::to_string(j_) + ")";
  }

 private:
  BivariateSymbol s_;
  std::size_t i_;
  std::size_t j_;
};

class ConstantNode final : public Node {
 public:
  explicit ConstantNode(double c) : c_(c) {}
  double eval(std::span<const double>) const override { return c_; }
  std::string describe() const override {
    std::ostringstream out;
    out << c_;
    return out.str();
  }

 private:
  double c_;
};

class SelectNode final : public Node {
 public:
  SelectNode(MoiSymbol inner, std::vector<std::size_t> indices) : inner_(std::move(inner)), indices_(std::move(indices)) {}
  double eval(std::span<const double> t) const override {
    std::array<double, kMaxArity> picked{};
    for (std::size_t i = 0; i < indices_.size(); ++i) picked[i] = t[indices_[i]];
    return inner_(std::span<const double>(picked.data(), indices_.size()));
  }
  std::string describe() const override { return "select(" + inner_.describe() + ")"; }

 private:
  MoiSymbol inner_;
  std::vector<std::size_t> indices_;
};

}  // namespace

MoiSymbol::MoiSymbol(Kind kind, std::size_t arity, std::shared_ptr<const Node> node)
    : kind_(kind), arity_(arity), node_(std::move(node)) {}

double MoiSymbol::operator()(std::span<const double> t) const {
  if (t.size() != arity_) {
    std::ostringstream msg;
    msg << "symbol " << describe() << " of arity " << arity_ << " evaluated at " << t.size() << " points";
    detail::throw_precondition("MoiSymbol", msg.str());
  }
  return node_->eval(t);
}

MoiSymbol MoiSymbol::divided_difference(ScalarFunction f, ZeroConvention convention) {
  const auto arity = static_cast<std::size_t>(f.order()) + 1;
  check_arity(arity, "MoiSymbol::divided_difference");
  return {Kind::divided_difference, arity, std::make_shared<DividedDifferenceNode>(std::move(f), convention)};
}

MoiSymbol MoiSymbol::indicator_orthant(Sign s, std::size_t arity) {
  check_arity(arity, "MoiSymbol::indicator_orthant");
  return {Kind::indicator_orthant, arity, std::make_shared<OrthantNode>(s)};
}

MoiSymbol MoiSymbol::indicator_zero(std::size_t arity) {
  check_arity(arity, "MoiSymbol::indicator_zero");
  return {Kind::indicator_zero, arity, std::make_shared<ZeroNode>()};
}

MoiSymbol MoiSymbol::elementary_tensor(std::vector<std::function<double(double)>> factors) {
  const std::size_t arity = factors.size();
  check_arity(arity, "MoiSymbol::elementary_tensor");
  return {Kind::elementary_tensor, arity, std::make_shared<TensorNode>(std::move(factors))};
}

MoiSymbol MoiSymbol::translate(double delta, MoiSymbol inner) {
  const std::size_t arity = inner.arity();
  return {Kind::translate, arity, std::make_shared<TranslateNode>(delta, std::move(inner))};
}

MoiSymbol MoiSymbol::product(std::vector<MoiSymbol> factors) {
  if (factors.empty()) detail::throw_precondition("MoiSymbol::product", "no factors");
  const std::size_t arity = factors.front().arity();
  for (const auto& f : factors) {
    if (f.arity() != arity) detail::throw_precondition("MoiSymbol::product", "factors have different arities");
  }
  return {Kind::product, arity, std::make_shared<ProductNode>(std::move(factors))};
}

MoiSymbol MoiSymbol::bivariate_lift(BivariateSymbol s, std::size_t arity, std::size_t i, std::size_t j) {
  check_arity(arity, "MoiSymbol::bivariate_lift");
  if (i >= arity || j >= arity) detail::throw_precondition("MoiSymbol::bivariate_lift", "variable index out of range");
  return {Kind::bivariate_lift, arity, std::make_shared<LiftNode>(std::move(s), i, j)};
}

MoiSymbol MoiSymbol::constant(double c, std::size_t arity) {
  check_arity(arity, "MoiSymbol::constant");
  return {Kind::constant, arity, std::make_shared<ConstantNode>(c)};
}

MoiSymbol MoiSymbol::select(MoiSymbol inner, std::size_t arity, std::vector<std::size_t> indices) {
  check_arity(arity, "MoiSymbol::select");
  if (indices.size() != inner.arity()) {
    detail::throw_precondition("MoiSymbol::select", "index list length must match the inner arity");
  }
  for (std::size_t i : indices) {
    if (i >= arity) detail::throw_precondition("MoiSymbol::select", "variable index out of range");
  }
  return {Kind::select, arity, std::make_shared<SelectNode>(std::move(inner), std::move(indices))};
}

}  // namespace moilab
