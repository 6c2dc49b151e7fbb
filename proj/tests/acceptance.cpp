// Acceptance suite: one PASS/FAIL line per criterion, INFO lines for
// supplementary measurements. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "moilab/experiments.hpp"
#include "moilab/functions.hpp"
#include "moilab/matrix.hpp"
#include "moilab/moi.hpp"
#include "moilab/reduction.hpp"
#include "moilab/symbol.hpp"
#include "support.hpp"

using namespace moilab;
using namespace moilab::test;

namespace {

// pinned tolerances and budgets
constexpr double kAnchorTol = 1e-9;
constexpr double kIdentityTol = 1e-8;
constexpr double kMoiTol = 1e-10;
constexpr double kBlockTol = 1e-9;
constexpr double kWitnessTol = 1e-10;
constexpr double kReplayTol = 1e-9;
constexpr double kProductTol = 1e-10;

int failures = 0;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void verdict(int id, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void info(int id, const std::string& what) {
  std::printf("INFO criterion %d: %s\n", id, what.c_str());
  std::fflush(stdout);
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

ScalarFunction pick(int which, int n) {
  switch (which % 3) {
    case 0: return builtin_a(n);
    case 1: return builtin_b(n);
    default: return builtin_smoothed(n);
  }
}

std::vector<double> nodes_in(Gen& g, std::size_t count, double lo, double hi) {
  std::vector<double> t(count);
  for (double& x : t) x = uniform(g, lo, hi);
  return t;
}

double product_norm(const std::vector<ComplexMatrix>& xs, const std::vector<double>& p) {
  double r = 1.0;
  for (std::size_t l = 0; l < xs.size(); ++l) r *= schatten_norm(xs[l], p[l]);
  return r;
}

// 1 ------------------------------------------------------------------------

void criterion_anchors() {
  Stopwatch clock;
  Gen g = gen(101);
  double worst_b = 0.0;
  double worst_a = 0.0;
  double worst_b_unit = 0.0;
  double worst_a_unit = 0.0;
  for (int n = 1; n <= 5; ++n) {
    const ScalarFunction b = builtin_b(n);
    const ScalarFunction a = builtin_a(n);
    for (int trial = 0; trial < 1000; ++trial) {
      const auto t = nodes_in(g, static_cast<std::size_t>(n) + 1, -3.0, 3.0);
      const double vb = divided_difference(b, t);
      worst_b = std::max(worst_b, rel(vb, factorial(n)));
      worst_b_unit = std::max(worst_b_unit, rel(vb, 1.0));

      const double eps = trial % 2 == 0 ? 1.0 : -1.0;
      const auto s = nodes_in(g, static_cast<std::size_t>(n) + 1, 0.0, 3.0);
      std::vector<double> orth(s.size());
      std::transform(s.begin(), s.end(), orth.begin(), [&](double x) { return eps * x; });
      const double va = divided_difference(a, orth);
      worst_a = std::max(worst_a, rel(va, eps * factorial(n)));
      worst_a_unit = std::max(worst_a_unit, rel(va, eps));
    }
  }
  const double secs = clock.seconds();
  verdict(1, worst_b < kAnchorTol && worst_a < kAnchorTol && secs < 5.0,
          "b^[n] = n!, a^[n] = eps n! for n=1..5, 1000 tuples each: max rel dev b " + num(worst_b) + ", a " +
              num(worst_a) + " (tol " + num(kAnchorTol) + "), " + num(secs) + " s");
  info(1, "same tuples against b^[n] = 1, a^[n] = eps: max rel dev b " + num(worst_b_unit) + ", a " +
              num(worst_a_unit));
}

// 2 ------------------------------------------------------------------------

void criterion_identities() {
  Stopwatch clock;
  Gen g = gen(102);
  double perm = 0.0;
  double pre = 0.0;
  double cru = 0.0;
  double post = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 3;
    const ScalarFunction f = pick(trial / 3, n);
    const auto count = static_cast<std::size_t>(n) + 1;

    auto t = nodes_in(g, count, -3.0, 3.0);
    if (trial % 5 == 0) t[0] = 0.0;
    if (trial % 7 == 0) t[1] = t[2 % count];
    const double base = divided_difference(f, t);
    std::shuffle(t.begin(), t.end(), g);
    perm = std::max(perm, rel(divided_difference(f, t), base));

    auto u = separated_values(g, static_cast<std::size_t>(n), -3.0, 3.0, 0.05);
    if (trial % 4 == 0) u[1] = u[0];
    pre = std::max(pre, check_precrucial(f, u));

    auto s = separated_values(g, count, -3.0, 3.0, 0.05);
    const auto i = static_cast<std::size_t>(uniform_int(g, 0, n));
    auto j = static_cast<std::size_t>(uniform_int(g, 0, n - 1));
    if (j >= i) ++j;
    cru = std::max(cru, check_crucial(f, s, i, j));

    const int l = uniform_int(g, 0, n - 1);
    const auto v = separated_values(g, static_cast<std::size_t>(n - l) + 1, -3.0, 3.0, 0.05);
    post = std::max(post, check_postcrucial(f, l, v));
  }
  const double secs = clock.seconds();
  const double worst = std::max({perm, pre, cru, post});
  verdict(2, worst < kIdentityTol && secs < 30.0,
          "permutation " + num(perm) + ", zero-node reduction " + num(pre) + ", two-node splitting " + num(cru) +
              ", trailing zeros " + num(post) + " over 1000 cases each (tol " + num(kIdentityTol) + "), " +
              num(secs) + " s");
}

// 3 ------------------------------------------------------------------------

void criterion_moi() {
  Stopwatch clock;
  Gen g = gen(103);
  double amp = 0.0;
  double ind = 0.0;
  double tr = 0.0;
  double tensor = 0.0;
  double comp = 0.0;
  const std::vector<std::function<double(double)>> pool = {
      [](double t) { return std::cos(t); }, [](double t) { return t * t - 1.0; },
      [](double t) { return std::exp(-t); }, [](double t) { return std::abs(t); }};
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 3;
    const Index d = 2 + (trial / 3) % 7;
    const auto m = static_cast<std::size_t>(n) + 1;
    const MoiSymbol phi = MoiSymbol::divided_difference(pick(trial / 21, n));
    const auto xs = random_args(g, static_cast<std::size_t>(n), d);

    {
      const Index da = 2 + (trial / 3) % 3;
      const auto xa = random_args(g, static_cast<std::size_t>(n), da);
      const auto values = separated_values(g, static_cast<std::size_t>(da) * m, -4.0, 4.0, 0.02);
      std::vector<HermitianMatrix> ops;
      for (std::size_t l = 0; l < m; ++l) {
        const auto first = values.begin() + static_cast<std::ptrdiff_t>(l) * da;
        ops.push_back(hermitian_with(g, std::vector<double>(first, first + da)));
      }
      amp = std::max(amp, check_amplification(phi, OperatorTuple(ops), xa));
    }

    const Sign s = trial % 2 == 0 ? Sign::positive : Sign::negative;
    const double lo = s == Sign::positive ? 0.0 : -2.0;
    const HermitianMatrix def = hermitian_with(g, separated_values(g, static_cast<std::size_t>(d), lo, lo + 2.0, 0.02));
    ind = std::max(ind, check_indicator_truncation(phi, def, xs, s));

    tr = std::max(tr, check_translation(phi, random_hermitian(g, d), uniform(g, -1.0, 1.0), xs));

    std::vector<HermitianMatrix> ops;
    for (std::size_t l = 0; l < m; ++l) ops.push_back(trial % 2 ? random_hermitian(g, d) : degenerate_hermitian(g, d));
    std::vector<std::function<double(double)>> factors(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
    tensor = std::max(tensor, check_elementary_tensor(factors, OperatorTuple(ops), xs));

    const HermitianMatrix b = random_hermitian(g, d);
    const std::size_t k = static_cast<std::size_t>(trial) % static_cast<std::size_t>(n);
    comp = std::max(comp, check_lift_composition(phi, trial % 2 ? rho() : psi(), k, b, xs));
    if (n >= 2) {
      const MoiSymbol reduced = MoiSymbol::divided_difference(pick(trial, n - 1));
      comp = std::max(comp, check_variable_elimination(reduced, static_cast<std::size_t>(trial) % m, b, xs));
    }
  }
  const double secs = clock.seconds();
  const double worst = std::max({amp, ind, tr, tensor, comp});
  verdict(3, worst < kMoiTol && secs < 60.0,
          "amplification " + num(amp) + ", indicator truncation " + num(ind) + ", translation " + num(tr) +
              ", elementary tensor " + num(tensor) + ", composition " + num(comp) + " over 200 cases (tol " +
              num(kMoiTol) + "), " + num(secs) + " s");
}

// 4 ------------------------------------------------------------------------

void criterion_blocks() {
  Stopwatch clock;
  Gen g = gen(104);
  const Index dims[] = {4, 6, 8};
  double sum_res = 0.0;
  double red_res = 0.0;
  std::size_t edge_first = 0;
  std::size_t edge_last = 0;
  std::size_t interior = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 2;
    const Index d = dims[(trial / 2) % 3];
    const ScalarFunction f = pick(trial / 6, n);
    const HermitianMatrix a = random_hermitian(g, d);
    const auto xs = random_args(g, static_cast<std::size_t>(n), d);
    const MoiSymbol phi = MoiSymbol::divided_difference(f);
    const ComplexMatrix full = brute_force_moi([&](std::span<const double> t) { return phi(t); }, a,
                                               static_cast<std::size_t>(n), xs);
    sum_res = std::max({sum_res, rel(block_sum_direct(f, a, xs), full), rel(block_sum_routed(f, a, xs), full)});
    for (const auto& block : sign_blocks(a, xs)) {
      for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
        if (in_block(block.mask, k) == in_block(block.mask, k + 1)) continue;
        red_res = std::max(red_res, reduce_block(f, a, block, k).residual);
        if (k == 0) {
          ++edge_first;
        } else if (k + 1 == static_cast<std::size_t>(n)) {
          ++edge_last;
        } else {
          ++interior;
        }
      }
    }
  }
  const double secs = clock.seconds();
  verdict(4, std::max(sum_res, red_res) < kBlockTol && edge_first > 0 && edge_last > 0 && secs < 120.0,
          "block sum " + num(sum_res) + ", block reduction " + num(red_res) + " (k=0: " + std::to_string(edge_first) +
              ", k=n-1: " + std::to_string(edge_last) + ", interior: " + std::to_string(interior) +
              " reductions) over 200 cases (tol " + num(kBlockTol) + "), " + num(secs) + " s");
}

// 5 ------------------------------------------------------------------------

void criterion_norms() {
  Stopwatch clock;
  Gen g = gen(105);
  double s2_excess = 0.0;
  double sharp = 0.0;
  double contraction_excess = 0.0;
  double quasi_excess = 0.0;
  double weak_excess = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 3;
    const Index d = 2 + (trial / 3) % 6;
    const auto m = static_cast<std::size_t>(n) + 1;
    std::vector<HermitianMatrix> ops;
    for (std::size_t l = 0; l < m; ++l) ops.push_back(trial % 4 ? random_hermitian(g, d) : degenerate_hermitian(g, d));
    const OperatorTuple tuple(ops);
    const MoiSymbol phi = MoiSymbol::divided_difference(pick(trial / 3, n));
    const auto xs = random_args(g, static_cast<std::size_t>(n), d);
    const double bound = moi_s2_bound(phi, tuple);
    const double lhs = apply_moi(phi, tuple, xs).norm();
    s2_excess = std::max(s2_excess, lhs / (bound * product_norm(xs, std::vector<double>(xs.size(), 2.0))) - 1.0);
    const SharpnessWitness w = sharpness_witness(phi, tuple);
    sharp = std::max(sharp, std::abs(apply_moi(phi, tuple, w.xs).norm() - bound) / std::max(1.0, bound));

    std::vector<double> p(static_cast<std::size_t>(n));
    {
      std::vector<double> wts(p.size());
      double sum = 0.0;
      for (double& v : wts) sum += (v = uniform(g, 0.05, 1.0));
      for (std::size_t l = 0; l < p.size(); ++l) p[l] = sum / wts[l];
    }
    const HermitianMatrix a = random_hermitian(g, d);
    const Sign s = trial % 2 ? Sign::positive : Sign::negative;
    const ComplexMatrix y = apply_moi(MoiSymbol::indicator_orthant(s, m), OperatorTuple::uniform(a, m), xs);
    contraction_excess = std::max(contraction_excess, schatten_norm(y, 1.0) / product_norm(xs, p) - 1.0);

    const ComplexMatrix u = random_matrix(g, d);
    const ComplexMatrix v = trial % 3 == 0 ? ComplexMatrix(-u + 1e-3 * random_matrix(g, d)) : random_matrix(g, d);
    quasi_excess = std::max(quasi_excess, weak_norm(u + v) / (2.0 * weak_norm(u) + 2.0 * weak_norm(v)) - 1.0);
    weak_excess = std::max(weak_excess, weak_norm(u) / schatten_norm(u, 1.0) - 1.0);
  }
  const double secs = clock.seconds();
  const double slack = 1e-12;
  const bool ok = s2_excess <= slack && sharp < kWitnessTol && contraction_excess <= slack && quasi_excess <= slack &&
                  weak_excess <= slack && secs < 30.0;
  verdict(5, ok,
          "max relative excess: S2 bound " + num(s2_excess) + ", S1 contraction " + num(contraction_excess) +
              ", weak quasi-triangle " + num(quasi_excess) + ", weak vs S1 " + num(weak_excess) +
              "; witness gap " + num(sharp) + " over 500 cases, " + num(secs) + " s");
}

// 6 ------------------------------------------------------------------------

std::string csv_of(const ExperimentReport& r) {
  std::ostringstream out;
  write_report_csv(out, r);
  return out.str();
}

void criterion_reproducibility() {
  Stopwatch clock;
  ExperimentConfig c;
  c.function = "a";
  c.n = 2;
  c.p = {2.0, 2.0};
  c.targets = {NormTarget::weak};
  c.dims = {4, 8, 16, 32};
  c.samples = 50;
  c.seed = 2024;
  const ExperimentReport first = run_experiment(c);
  const ExperimentReport second = run_experiment(c);
  const bool identical = csv_of(first) == csv_of(second);
  const double replay = max_witness_discrepancy(witnesses_to_json(first));

  ExperimentConfig psd = c;
  psd.constraint = SpectrumConstraint::psd;
  const ExperimentReport definite = run_experiment(psd);
  double factorial_res = 0.0;
  double unit_res = 0.0;
  for (const auto& s : definite.samples) {
    factorial_res = std::max(factorial_res, s.product_residual_factorial.value_or(kInfinity));
    unit_res = std::max(unit_res, s.product_residual_unit.value_or(kInfinity));
  }
  const double secs = clock.seconds();
  verdict(6, identical && replay < kReplayTol && factorial_res < kProductTol && secs < 300.0,
          std::string("reference config rerun ") + (identical ? "bit-identical" : "DIFFERENT") +
              ", witness replay " + num(replay) + " (tol " + num(kReplayTol) + "), psd samples vs n! * product " +
              num(factorial_res) + " (tol " + num(kProductTol) + "), " + num(secs) + " s");
  info(6, "psd samples vs 1 * product: max residual " + num(unit_res) + " over " +
              std::to_string(definite.samples.size()) + " samples");
}

// 7 ------------------------------------------------------------------------

void criterion_sweep(const std::filesystem::path& out_path) {
  ExperimentConfig c;
  c.function = "a";
  c.n = 2;
  c.p = {2.0, 2.0};
  c.targets = {NormTarget::weak, NormTarget::s1};
  c.dims = {4, 8, 12, 16, 24, 32};
  c.samples = 10;
  c.seed = 7;
  const ExperimentReport r = run_experiment(c);
  const std::string csv = csv_of(r);
  {
    std::ofstream f(out_path);
    f << csv;
  }
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  bool ok = line == kReportHeader;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    ok = ok && cells.size() == 8 && (cells[3] == "weak" || cells[3] == "s1") && std::isfinite(std::stod(cells[6])) &&
         (cells[7] == "0" || cells[7] == "1");
  }
  ok = ok && rows == c.dims.size() * c.targets.size() * static_cast<std::size_t>(c.samples);
  std::string maxima;
  for (const auto& s : r.samples) {
    if (s.is_witness) maxima += " d" + std::to_string(s.dim) + "/" + std::string(to_string(s.target)) + "=" + num(s.ratio);
  }
  verdict(7, ok, "dimension sweep " + out_path.filename().string() + ": " + std::to_string(rows) +
                     " rows, schema valid and finite: " + (ok ? "yes" : "no"));
  info(7, "max ratios:" + maxima);
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path sweep = argc > 1 ? argv[1] : "dimension_sweep.csv";
  criterion_anchors();
  criterion_identities();
  criterion_moi();
  criterion_blocks();
  criterion_norms();
  criterion_reproducibility();
  criterion_sweep(sweep);
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
