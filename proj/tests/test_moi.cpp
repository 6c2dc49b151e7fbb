#include <doctest.h>

#include <cmath>
#include <vector>

#include "moilab/errors.hpp"
#include "moilab/functions.hpp"
#include "moilab/moi.hpp"
#include "moilab/symbol.hpp"
#include "support.hpp"

using namespace moilab;
using namespace moilab::test;

namespace {

std::function<double(std::span<const double>)> as_fn(const MoiSymbol& phi) {
  return [phi](std::span<const double> t) { return phi(t); };
}

ScalarFunction pick(int which, int n) {
  switch (which % 3) {
    case 0: return builtin_a(n);
    case 1: return builtin_b(n);
    default: return builtin_smoothed(n);
  }
}

ComplexMatrix matrix_function(const HermitianMatrix& a, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix());
  Eigen::VectorXcd v(a.dim());
  for (Index i = 0; i < a.dim(); ++i) v(i) = f(es.eigenvalues()(i));
  return es.eigenvectors() * v.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TEST_CASE("Schur multiplier of t^2 on diag(1,2)") {
  const HermitianMatrix a = HermitianMatrix::diagonal({1.0, 2.0});
  const MoiSymbol phi = MoiSymbol::divided_difference(builtin_polynomial({0.0, 0.0, 1.0}, 1));
  const std::vector<ComplexMatrix> xs = {ComplexMatrix::Ones(2, 2)};
  ComplexMatrix expected(2, 2);
  expected << 2.0, 3.0, 3.0, 4.0;
  CHECK(rel(apply_moi(phi, OperatorTuple::uniform(a, 2), xs), expected) < 1e-14);
  CHECK(rel(apply_moi_reference(phi, OperatorTuple::uniform(a, 2), xs), expected) < 1e-14);
}

TEST_CASE("constant symbols collapse to products") {
  Gen g = gen(20);
  const HermitianMatrix a = random_hermitian(g, 4);
  const auto xs = random_args(g, 2, 4);
  CHECK(rel(apply_moi(MoiSymbol::constant(1.0, 3), OperatorTuple::uniform(a, 3), xs), ordered_product(xs)) < 1e-12);
  CHECK(moi_s2_bound(MoiSymbol::constant(-2.5, 3), OperatorTuple::uniform(a, 3)) == 2.5);
}

TEST_CASE("degree zero applies the symbol as a matrix function") {
  Gen g = gen(21);
  const HermitianMatrix a = random_hermitian(g, 3);
  const MoiSymbol phi = MoiSymbol::elementary_tensor({[](double t) { return std::exp(t); }});
  const ComplexMatrix got = apply_moi(phi, OperatorTuple::uniform(a, 1), {});
  CHECK(rel(got, matrix_function(a, [](double t) { return std::exp(t); })) < 1e-12);
}

TEST_CASE("elementary tensors match products of matrix functions") {
  Gen g = gen(22);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 3;
    const Index d = 2 + trial % 4;
    std::vector<std::function<double(double)>> factors = {
        [](double t) { return std::cos(t); }, [](double t) { return t * t - 1.0; },
        [](double t) { return std::exp(-t); }, [](double t) { return std::abs(t); }};
    factors.resize(static_cast<std::size_t>(n) + 1);
    std::vector<HermitianMatrix> ops;
    for (int l = 0; l <= n; ++l) ops.push_back(trial % 2 ? random_hermitian(g, d) : degenerate_hermitian(g, d));
    const auto xs = random_args(g, static_cast<std::size_t>(n), d);
    ComplexMatrix expected = matrix_function(ops[0], factors[0]);
    for (int l = 1; l <= n; ++l) {
      expected = expected * xs[static_cast<std::size_t>(l) - 1] *
                 matrix_function(ops[static_cast<std::size_t>(l)], factors[static_cast<std::size_t>(l)]);
    }
    const OperatorTuple tuple(ops);
    CHECK(rel(apply_moi(MoiSymbol::elementary_tensor(factors), tuple, xs), expected) < 1e-11);
    CHECK(check_elementary_tensor(factors, tuple, xs) < 1e-11);
  }
}

TEST_CASE("kernel agrees with the eigenvector-level oracle") {
  Gen g = gen(23);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 1 + trial % 3;
    const Index d = 2 + (trial / 3) % 4;
    std::vector<HermitianMatrix> ops;
    for (int l = 0; l <= n; ++l) ops.push_back(trial % 4 == 0 ? degenerate_hermitian(g, d) : random_hermitian(g, d));
    const auto xs = random_args(g, static_cast<std::size_t>(n), d);
    const MoiSymbol phi = MoiSymbol::divided_difference(pick(trial / 12, n));
    const OperatorTuple tuple(ops);
    const ComplexMatrix oracle = brute_force_moi(as_fn(phi), ops, xs);
    CHECK(rel(apply_moi(phi, tuple, xs, Execution::serial), oracle) < 1e-11);
    CHECK(rel(apply_moi(phi, tuple, xs, Execution::parallel), oracle) < 1e-11);
    CHECK(rel(apply_moi_reference(phi, tuple, xs), oracle) < 1e-11);
  }
}

TEST_CASE("serial and parallel kernels are bit-identical") {
  Gen g = gen(24);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const Index d = 8 + 4 * (trial % 3);
    const HermitianMatrix a = random_hermitian(g, d);
    const auto xs = random_args(g, static_cast<std::size_t>(n), d);
    const MoiOperator op(MoiSymbol::divided_difference(pick(trial, n)),
                         OperatorTuple::uniform(a, static_cast<std::size_t>(n) + 1));
    CHECK(op.apply(xs, Execution::serial) == op.apply(xs, Execution::parallel));
    const ComplexMatrix w = random_matrix(g, d);
    for (std::size_t slot = 1; slot <= static_cast<std::size_t>(n); ++slot) {
      CHECK(op.adjoint_slot(xs, slot, w, Execution::serial) == op.adjoint_slot(xs, slot, w, Execution::parallel));
    }
  }
}

TEST_CASE("adjoint_slot represents the trace pairing") {
  Gen g = gen(25);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 3;
    const Index d = 2 + trial % 5;
    std::vector<HermitianMatrix> ops;
    for (int l = 0; l <= n; ++l) ops.push_back(random_hermitian(g, d));
    const MoiOperator op(MoiSymbol::divided_difference(pick(trial, n)), OperatorTuple(ops));
    auto xs = random_args(g, static_cast<std::size_t>(n), d);
    const ComplexMatrix w = random_matrix(g, d);
    const ComplexMatrix y = random_matrix(g, d);
    const std::size_t slot = 1 + static_cast<std::size_t>(trial) % static_cast<std::size_t>(n);
    const ComplexMatrix gm = op.adjoint_slot(xs, slot, w);
    xs[slot - 1] = y;
    const Complex lhs = (w.adjoint() * op.apply(xs)).trace();
    const Complex rhs = (gm.adjoint() * y).trace();
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("multilinearity") {
  Gen g = gen(26);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 3;
    const Index d = 2 + trial % 4;
    const HermitianMatrix a = random_hermitian(g, d);
    const MoiOperator op(MoiSymbol::divided_difference(pick(trial, n)),
                         OperatorTuple::uniform(a, static_cast<std::size_t>(n) + 1));
    auto xs = random_args(g, static_cast<std::size_t>(n), d);
    const std::size_t k = static_cast<std::size_t>(trial) % static_cast<std::size_t>(n);
    const ComplexMatrix u = random_matrix(g, d);
    const ComplexMatrix v = random_matrix(g, d);
    const Complex alpha(uniform(g, -2, 2), uniform(g, -2, 2));
    xs[k] = u;
    const ComplexMatrix tu = op.apply(xs);
    xs[k] = v;
    const ComplexMatrix tv = op.apply(xs);
    xs[k] = alpha * u + v;
    CHECK(rel(op.apply(xs), ComplexMatrix(alpha * tu + tv)) < 1e-11);
  }
}

TEST_CASE("S2 bound and sharpness witness") {
  Gen g = gen(27);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 3;
    const Index d = 2 + trial % 5;
    std::vector<HermitianMatrix> ops;
    for (int l = 0; l <= n; ++l) ops.push_back(trial % 3 == 0 ? degenerate_hermitian(g, d) : random_hermitian(g, d));
    const MoiSymbol phi = MoiSymbol::divided_difference(pick(trial, n));
    const OperatorTuple tuple(ops);
    const double bound = moi_s2_bound(phi, tuple);
    const auto xs = random_args(g, static_cast<std::size_t>(n), d);
    double denom = 1.0;
    for (const auto& x : xs) denom *= x.norm();
    CHECK(apply_moi(phi, tuple, xs).norm() <= bound * denom * (1.0 + 1e-12));

    const SharpnessWitness w = sharpness_witness(phi, tuple);
    double wden = 1.0;
    for (const auto& x : w.xs) wden *= x.norm();
    CHECK(std::abs(wden - 1.0) < 1e-12);
    CHECK(std::abs(apply_moi(phi, tuple, w.xs).norm() - bound) < 1e-10 * std::max(1.0, bound));
    CHECK(w.bound == bound);
  }
}

TEST_CASE("S2 bound of a^[2] on a positive operator") {
  Gen g = gen(28);
  const HermitianMatrix a = hermitian_with(g, {0.5, 1.0, 2.0});
  const double bound = moi_s2_bound(MoiSymbol::divided_difference(builtin_a(2)), OperatorTuple::uniform(a, 3));
  CHECK(bound == doctest::Approx(1.0));
}

TEST_CASE("orthant indicator on a positive operator is the plain product") {
  Gen g = gen(29);
  const HermitianMatrix a = hermitian_with(g, {0.5, 1.0, 2.0, 3.0});
  const auto xs = random_args(g, 3, 4);
  const ComplexMatrix got = apply_moi(MoiSymbol::indicator_orthant(Sign::positive, 4), OperatorTuple::uniform(a, 4), xs);
  CHECK(rel(got, ordered_product(xs)) < 1e-12);
  const ComplexMatrix none = apply_moi(MoiSymbol::indicator_orthant(Sign::negative, 4), OperatorTuple::uniform(a, 4), xs);
  CHECK(none.norm() == 0.0);
}

TEST_CASE("indicator truncation, translation and amplification sweeps") {
  Gen g = gen(30);
  for (int n = 1; n <= 3; ++n) {
    for (Index d = 2; d <= 4; ++d) {
      for (int trial = 0; trial < 200 / 9 + 1; ++trial) {
        const MoiSymbol phi = MoiSymbol::divided_difference(pick(trial, n));
        const auto xs = random_args(g, static_cast<std::size_t>(n), d);
        const HermitianMatrix pos = hermitian_with(g, separated_values(g, static_cast<std::size_t>(d), 0.0, 2.0, 0.05));
        const HermitianMatrix neg = hermitian_with(g, separated_values(g, static_cast<std::size_t>(d), -2.0, 0.0, 0.05));
        CHECK(check_indicator_truncation(phi, pos, xs, Sign::positive) < 1e-11);
        CHECK(check_indicator_truncation(phi, neg, xs, Sign::negative) < 1e-11);
        const double delta = uniform(g, -1.0, 1.0);
        CHECK(check_translation(phi, random_hermitian(g, d), delta, xs) < 1e-11);

        const auto values = separated_values(g, static_cast<std::size_t>(d) * static_cast<std::size_t>(n + 1), -4.0, 4.0, 0.02);
        std::vector<HermitianMatrix> ops;
        for (int l = 0; l <= n; ++l) {
          const auto first = values.begin() + l * d;
          ops.push_back(hermitian_with(g, std::vector<double>(first, first + d)));
        }
        CHECK(check_amplification(phi, OperatorTuple(ops), xs) < 1e-11);
      }
    }
  }
}

TEST_CASE("amplification of a 1x1 example") {
  const OperatorTuple tuple({HermitianMatrix::diagonal({1.0}), HermitianMatrix::diagonal({2.0})});
  const std::vector<ComplexMatrix> xs = {ComplexMatrix::Ones(1, 1)};
  const Amplification amp = amplify(tuple, xs);
  CHECK(rel(amp.block_operator.matrix(), HermitianMatrix::diagonal({1.0, 2.0}).matrix()) == 0.0);
  REQUIRE(amp.zs.size() == 1);
  CHECK(amp.zs[0] == matrix_unit(2, 0, 1));
  const MoiSymbol phi = MoiSymbol::divided_difference(builtin_polynomial({0.0, 0.0, 1.0}, 1));
  const ComplexMatrix big = apply_moi(phi, OperatorTuple::uniform(amp.block_operator, 2), amp.zs);
  CHECK(std::abs(big(0, 1) - Complex(3.0)) < 1e-14);
  CHECK(check_amplification(phi, tuple, xs) < 1e-14);
}

TEST_CASE("indicator truncation rejects indefinite operators") {
  const MoiSymbol phi = MoiSymbol::divided_difference(builtin_a(1));
  const std::vector<ComplexMatrix> xs = {ComplexMatrix::Identity(2, 2)};
  CHECK_THROWS_AS(check_indicator_truncation(phi, HermitianMatrix::diagonal({-1.0, 1.0}), xs, Sign::positive),
                  PreconditionError);
}

TEST_CASE("translation examples") {
  const MoiSymbol phi = MoiSymbol::divided_difference(builtin_a(2));
  const MoiSymbol same = translate_symbol(phi, 0.0);
  CHECK(same.describe() == phi.describe());
  Gen g = gen(31);
  const auto xs = random_args(g, 2, 2);
  CHECK(check_translation(phi, HermitianMatrix::diagonal({0.0, 1.0}), 0.5, xs) < 1e-11);
  const MoiSymbol shifted = translate_symbol(phi, 0.5);
  CHECK(shifted({-0.5, 0.5, 1.5}) == phi({0.0, 1.0, 2.0}));
}

TEST_CASE("zero indicator and lift identities") {
  Gen g = gen(32);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 3;
    const Index d = 3 + trial % 4;
    std::vector<double> values = separated_values(g, static_cast<std::size_t>(d), -2.0, 2.0, 0.1);
    values[0] = 0.0;
    if (d > 3) values[1] = 0.0;
    const HermitianMatrix a = hermitian_with(g, values);
    const auto xs = random_args(g, static_cast<std::size_t>(n), d);
    CHECK(check_zero_indicator(uniform(g, -2.0, 2.0), a, xs) < 1e-11);

    const HermitianMatrix b = random_hermitian(g, d);
    const MoiSymbol h2 = MoiSymbol::divided_difference(pick(trial, n));
    const std::size_t k = static_cast<std::size_t>(trial) % static_cast<std::size_t>(n);
    CHECK(check_lift_composition(h2, rho(), k, b, xs) < 1e-11);
    CHECK(check_lift_composition(h2, psi(), k, b, xs) < 1e-11);

    if (n >= 2) {
      const MoiSymbol reduced = MoiSymbol::divided_difference(pick(trial, n - 1));
      for (std::size_t dd = 0; dd <= static_cast<std::size_t>(n); ++dd) {
        CHECK(check_variable_elimination(reduced, dd, b, xs) < 1e-11);
      }
    }
  }
}

TEST_CASE("symbol evaluation") {
  const MoiSymbol chi = MoiSymbol::indicator_orthant(Sign::positive, 3);
  CHECK(chi({0.0, 1.0, 2.0}) == 1.0);
  CHECK(chi({0.0, 0.0, 0.0}) == 1.0);
  CHECK(chi({-0.1, 1.0, 2.0}) == 0.0);
  CHECK(MoiSymbol::indicator_orthant(Sign::negative, 2)({-1.0, 0.0}) == 1.0);
  CHECK(MoiSymbol::indicator_zero(2)({0.0, 0.0}) == 1.0);
  CHECK(MoiSymbol::indicator_zero(2)({0.0, 1e-300}) == 0.0);
  const MoiSymbol lift = MoiSymbol::bivariate_lift(rho(), 3, 1, 2);
  CHECK(lift({5.0, 1.0, 3.0}) == 0.25);
  const MoiSymbol sel = MoiSymbol::select(MoiSymbol::divided_difference(builtin_b(1)), 3, {2, 0});
  CHECK(sel({1.0, 100.0, 3.0}) == doctest::Approx(1.0));
  const MoiSymbol prod = MoiSymbol::product({chi, MoiSymbol::constant(3.0, 3)});
  CHECK(prod({1.0, 1.0, 1.0}) == 3.0);
  CHECK_THROWS_AS(chi({1.0, 2.0}), PreconditionError);
  CHECK_THROWS_AS(MoiSymbol::product({chi, MoiSymbol::constant(1.0, 2)}), PreconditionError);
}

TEST_CASE("argument validation") {
  const HermitianMatrix a = HermitianMatrix::diagonal({1.0, 2.0});
  const MoiSymbol phi = MoiSymbol::divided_difference(builtin_a(2));
  const std::vector<ComplexMatrix> one = {ComplexMatrix::Identity(2, 2)};
  CHECK_THROWS_AS(apply_moi(phi, OperatorTuple::uniform(a, 3), one), PreconditionError);
  const std::vector<ComplexMatrix> wrong = {ComplexMatrix::Identity(3, 3), ComplexMatrix::Identity(3, 3)};
  CHECK_THROWS_AS(apply_moi(phi, OperatorTuple::uniform(a, 3), wrong), PreconditionError);
  CHECK_THROWS_AS(apply_moi(phi, OperatorTuple::uniform(a, 2), one), PreconditionError);
  CHECK_THROWS_AS(OperatorTuple({a, HermitianMatrix::identity(3)}), PreconditionError);
}

TEST_CASE("classical convention propagates the domain error") {
  const MoiSymbol phi = MoiSymbol::divided_difference(builtin_a(2), ZeroConvention::classical);
  CHECK_THROWS_AS(MoiOperator(phi, OperatorTuple::uniform(HermitianMatrix::diagonal({0.0, 1.0}), 3)), DomainError);
  CHECK_NOTHROW(MoiOperator(phi, OperatorTuple::uniform(HermitianMatrix::diagonal({-1.0, 1.0}), 3)));
}

TEST_CASE("ensure_invertible") {
  const InvertibleShift same = ensure_invertible(HermitianMatrix::diagonal({1.0, 2.0}));
  CHECK(same.delta == 0.0);
  CHECK(same.matrix.matrix() == HermitianMatrix::diagonal({1.0, 2.0}).matrix());

  const InvertibleShift shifted = ensure_invertible(HermitianMatrix::diagonal({0.0, 1.0}), ShiftPolicy{0.1});
  CHECK(shifted.delta == doctest::Approx(0.1));
  CHECK(rel(shifted.matrix.matrix(), HermitianMatrix::diagonal({-0.1, 0.9}).matrix()) < 1e-15);

  const InvertibleShift zero = ensure_invertible(HermitianMatrix(ComplexMatrix::Zero(2, 2)), ShiftPolicy{0.25});
  CHECK(zero.delta == 0.25);

  Gen g = gen(33);
  for (int trial = 0; trial < 50; ++trial) {
    const Index d = 2 + trial % 6;
    std::vector<double> values = separated_values(g, static_cast<std::size_t>(d), -2.0, 2.0, 1e-3);
    values[static_cast<std::size_t>(trial) % values.size()] = 0.0;
    const InvertibleShift s = ensure_invertible(hermitian_with(g, values));
    const auto spec = eig(s.matrix);
    CHECK_FALSE(spec.has_zero_eigenvalue());
    for (double l : spec.eigenvalues) CHECK(std::abs(l) > 1e-6);
  }
}
