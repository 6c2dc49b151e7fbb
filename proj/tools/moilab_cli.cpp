// moilab: divided differences, multiple operator integrals, identity checks
// and bound experiments from the command line.
//
// Exit codes: 0 pass, 1 identity failure, 2 usage error, 3 numerical or
// domain error.

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "moilab/errors.hpp"
#include "moilab/experiments.hpp"
#include "moilab/functions.hpp"
#include "moilab/matrix.hpp"
#include "moilab/matrix_io.hpp"
#include "moilab/moi.hpp"
#include "moilab/reduction.hpp"
#include "moilab/sampling.hpp"
#include "moilab/symbol.hpp"

#ifndef MOILAB_VERSION
#define MOILAB_VERSION "0.0.0"
#endif

namespace {

using namespace moilab;
using json = nlohmann::json;

enum Exit : int { kPass = 0, kIdentityFailure = 1, kUsage = 2, kNumerical = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct Output {
  std::string format = "text";
  bool json() const { return format == "json"; }
};

void add_format(CLI::App* cmd, Output& out) {
  cmd->add_option("--format", out.format, "Output format")->check(CLI::IsMember({"text", "json"}));
}

// ---------------------------------------------------------------- ddiff

struct DdiffArgs {
  std::string function = "a";
  int n = 0;
  std::vector<double> nodes;
  bool classical = false;
  std::string batch;
  Output out;
};

int run_ddiff(const DdiffArgs& a) {
  if (a.n < 1) throw UsageError("--n is required and must be at least 1");
  const ScalarFunction f = parse_function(a.function, a.n);
  const ZeroConvention conv = a.classical ? ZeroConvention::classical : ZeroConvention::modified;
  std::vector<std::vector<double>> sets;
  if (!a.batch.empty()) {
    std::ifstream in(a.batch);
    if (!in) throw DomainError("cannot open batch file " + a.batch);
    json j;
    in >> j;
    const json& list = j.is_object() ? j.at("nodes") : j;
    for (const auto& item : list) sets.push_back(item.get<std::vector<double>>());
  } else {
    if (a.nodes.empty()) throw UsageError("--nodes or --batch is required");
    sets.push_back(a.nodes);
  }
  std::vector<double> values;
  for (const auto& s : sets) values.push_back(divided_difference(f, s, conv));
  if (a.out.json()) {
    json j = {{"function", a.function}, {"n", a.n}, {"classical_zero", a.classical}};
    if (a.batch.empty()) {
      j["nodes"] = sets.front();
      j["value"] = values.front();
    } else {
      j["nodes"] = sets;
      j["values"] = values;
    }
    std::cout << j.dump() << '\n';
  } else {
    for (double v : values) std::cout << fmt(v) << '\n';
  }
  return kPass;
}

// ---------------------------------------------------------------- moi apply

std::size_t parse_count(const std::string& s) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw UsageError("bad integer '" + s + "'");
  return v;
}

/// ddiff:<function>:<n>, chi+:<arity>, chi-:<arity>, chi0:<arity>, const:<c>:<arity>.
MoiSymbol parse_symbol(const std::string& spec, bool classical) {
  const auto head = spec.substr(0, spec.find(':'));
  const auto last = spec.rfind(':');
  if (last == std::string::npos) throw UsageError("bad symbol '" + spec + "'");
  const std::string tail = spec.substr(last + 1);
  if (head == "ddiff") {
    const std::string fn = spec.substr(head.size() + 1, last - head.size() - 1);
    const int n = static_cast<int>(parse_count(tail));
    return MoiSymbol::divided_difference(parse_function(fn, n),
                                         classical ? ZeroConvention::classical : ZeroConvention::modified);
  }
  if (head == "chi+") return MoiSymbol::indicator_orthant(Sign::positive, parse_count(tail));
  if (head == "chi-") return MoiSymbol::indicator_orthant(Sign::negative, parse_count(tail));
  if (head == "chi0") return MoiSymbol::indicator_zero(parse_count(tail));
  if (head == "const") {
    const std::string c = spec.substr(head.size() + 1, last - head.size() - 1);
    return MoiSymbol::constant(std::stod(c), parse_count(tail));
  }
  throw UsageError("unknown symbol '" + spec + "' (ddiff|chi+|chi-|chi0|const)");
}

struct MoiApplyArgs {
  std::string symbol;
  std::vector<std::string> a_files;
  std::vector<std::string> x_files;
  std::string out_file;
  std::string execution = "parallel";
  bool classical = false;
  Output out;
};

int run_moi_apply(const MoiApplyArgs& a) {
  const MoiSymbol phi = parse_symbol(a.symbol, a.classical);
  std::vector<HermitianMatrix> ops;
  for (const auto& f : a.a_files) ops.push_back(read_hermitian(f));
  if (ops.size() == 1 && phi.arity() > 1) ops.assign(phi.arity(), ops.front());
  if (ops.size() != phi.arity()) throw UsageError("--A must list 1 or " + std::to_string(phi.arity()) + " files");
  std::vector<ComplexMatrix> xs;
  for (const auto& f : a.x_files) xs.push_back(read_matrix(f));
  const OperatorTuple tuple(std::move(ops));
  ComplexMatrix result;
  if (a.execution == "reference") {
    result = apply_moi_reference(phi, tuple, xs);
  } else {
    result = apply_moi(phi, tuple, xs, a.execution == "serial" ? Execution::serial : Execution::parallel);
  }
  if (!a.out_file.empty()) write_matrix(a.out_file, result);
  if (a.out.json()) {
    json j = {{"symbol", phi.describe()}, {"frobenius_norm", result.norm()}};
    if (a.out_file.empty()) {
      j["result"] = matrix_to_json(result);
    } else {
      j["out"] = a.out_file;
    }
    std::cout << j.dump() << '\n';
  } else if (a.out_file.empty()) {
    std::cout << matrix_to_json(result).dump() << '\n';
  } else {
    std::cout << "wrote " << a.out_file << " (frobenius norm " << fmt(result.norm()) << ")\n";
  }
  return kPass;
}

// ---------------------------------------------------------------- verification helpers

struct Sweep {
  std::string name;
  double tolerance = 0.0;
  std::vector<double> residuals;

  double max() const {
    double m = 0.0;
    for (double r : residuals) m = std::max(m, std::isnan(r) ? kInfinity : r);
    return m;
  }
  bool passed() const { return max() <= tolerance; }
};

int report_sweep(const Sweep& s, const Output& out, bool csv, const std::string& csv_file) {
  if (csv) {
    std::ostringstream buf;
    buf << "trial,residual\n";
    for (std::size_t i = 0; i < s.residuals.size(); ++i) buf << i << ',' << fmt(s.residuals[i]) << '\n';
    if (!csv_file.empty()) {
      std::ofstream f(csv_file);
      if (!f) throw DomainError("cannot write " + csv_file);
      f << buf.str();
    } else if (!out.json()) {
      std::cout << buf.str();
    }
  }
  if (out.json()) {
    json j = {{"check", s.name},         {"trials", s.residuals.size()}, {"max_residual", s.max()},
              {"tolerance", s.tolerance}, {"passed", s.passed()},         {"residuals", s.residuals}};
    std::cout << j.dump() << '\n';
  } else {
    std::cerr << s.name << ": trials=" << s.residuals.size() << " max_residual=" << fmt(s.max())
              << " tolerance=" << fmt(s.tolerance) << (s.passed() ? " PASS" : " FAIL") << '\n';
  }
  return s.passed() ? kPass : kIdentityFailure;
}

const char* kFunctions[] = {"a", "b", "smoothed"};

ScalarFunction trial_function(const std::string& choice, std::size_t trial, int n) {
  if (choice != "all") return parse_function(choice, n);
  return parse_function(kFunctions[trial % 3], n);
}

std::vector<ComplexMatrix> gaussian_args(std::size_t count, Index d, Rng& rng) {
  std::vector<ComplexMatrix> xs;
  for (std::size_t i = 0; i < count; ++i) xs.push_back(gaussian_matrix(d, d, rng));
  return xs;
}

HermitianMatrix gapped_operator(Index d, double lo, double hi, Rng& rng) {
  const auto v = gapped_values(d, lo, hi, 0.05, 0.05, rng);
  return with_spectrum(v, rng);
}

// ---------------------------------------------------------------- moi verify

struct MoiVerifyArgs {
  std::string identity;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  int n = 0;
  Output out;
};

double moi_identity_trial(const std::string& id, std::size_t trial, std::uint64_t seed, int fixed_n) {
  Rng rng = keyed_rng(seed, 0x6d6f69, trial);
  const int n = fixed_n > 0 ? fixed_n : static_cast<int>(trial % 3) + 1;
  const Index d = static_cast<Index>((trial / 3) % 7) + 2;
  const auto m = static_cast<std::size_t>(n) + 1;
  const ScalarFunction f = trial_function("all", trial / 21, n);
  const MoiSymbol phi = MoiSymbol::divided_difference(f);
  const auto xs = gaussian_args(static_cast<std::size_t>(n), d, rng);
  if (id == "amplify") {
    // Spectra of distinct A_l are kept apart so the block operator stays gapped.
    const auto values = gapped_values(d * static_cast<Index>(m), -4.0, 4.0, 0.02, 0.02, rng);
    std::vector<double> order(values.begin(), values.end());
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<HermitianMatrix> ops;
    for (std::size_t l = 0; l < m; ++l) {
      const auto first = order.begin() + static_cast<std::ptrdiff_t>(l) * d;
      const std::vector<double> part(first, first + d);
      ops.push_back(with_spectrum(part, rng));
    }
    return check_amplification(phi, OperatorTuple(std::move(ops)), xs);
  }
  if (id == "indicator") {
    const Sign s = trial % 2 == 0 ? Sign::positive : Sign::negative;
    const HermitianMatrix a = s == Sign::positive ? gapped_operator(d, 0.0, 2.0, rng) : gapped_operator(d, -2.0, 0.0, rng);
    return check_indicator_truncation(phi, a, xs, s);
  }
  if (id == "translate") {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const double delta = uni(rng);
    auto v = gapped_values(d, -2.0, 2.0, 0.05, 0.05, rng);
    for (double& t : v) t -= delta;
    return check_translation(phi, with_spectrum(v, rng), delta, xs);
  }
  throw UsageError("unknown identity '" + id + "' (amplify|indicator|translate)");
}

int run_moi_verify(const MoiVerifyArgs& a) {
  Sweep s{"moi " + a.identity, 1e-10, {}};
  if (a.identity != "amplify" && a.identity != "indicator" && a.identity != "translate") {
    throw UsageError("unknown identity '" + a.identity + "' (amplify|indicator|translate)");
  }
  for (std::size_t t = 0; t < a.trials; ++t) s.residuals.push_back(moi_identity_trial(a.identity, t, a.seed, a.n));
  return report_sweep(s, a.out, false, "");
}

// ---------------------------------------------------------------- verify reduction

struct ReductionArgs {
  std::string lemma;
  int n = 2;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::string function = "all";
  std::string csv_file;
  Output out;
};

std::vector<double> shuffled(std::vector<double> v, Rng& rng) {
  std::shuffle(v.begin(), v.end(), rng);
  return v;
}

double reduction_trial(const ReductionArgs& a, std::size_t trial) {
  Rng rng = keyed_rng(a.seed, 0x726564, trial);
  const int n = a.n;
  const std::string& lemma = a.lemma;
  if (lemma == "consummation") {
    const ExponentTuple p = random_holder_tuple(static_cast<std::size_t>(n), rng);
    const auto qs = consummations(p);
    if (qs.size() != (std::size_t{1} << (n - 1))) return kInfinity;
    double worst = 0.0;
    for (const auto& q : qs) {
      double sum = 0.0;
      for (double v : q.values()) sum += 1.0 / v;
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
  }
  const ScalarFunction f = trial_function(a.function, trial, n);
  if (lemma == "precrucial") {
    auto t = shuffled(gapped_values(n, -3.0, 3.0, 0.05, 0.05, rng), rng);
    if (trial % 5 == 4) std::fill(t.begin(), t.end(), 0.0);
    if (trial % 5 == 3 && n >= 2) t[1] = t[0];
    return check_precrucial(f, t);
  }
  if (lemma == "crucial") {
    const auto t = shuffled(gapped_values(n + 1, -3.0, 3.0, 0.05, 0.05, rng), rng);
    std::uniform_int_distribution<std::size_t> idx(0, static_cast<std::size_t>(n));
    const std::size_t i = idx(rng);
    std::size_t j = idx(rng);
    while (j == i) j = idx(rng);
    return check_crucial(f, t, i, j);
  }
  if (lemma == "postcrucial") {
    std::uniform_int_distribution<int> ldist(0, n - 1);
    const int l = ldist(rng);
    const auto t = shuffled(gapped_values(n - l + 1, -3.0, 3.0, 0.05, 0.05, rng), rng);
    return check_postcrucial(f, l, t);
  }
  const Index dims[] = {4, 6, 8};
  const Index d = dims[trial % 3];
  const HermitianMatrix op = gapped_operator(d, -2.0, 2.0, rng);
  const auto xs = gaussian_args(static_cast<std::size_t>(n), d, rng);
  if (lemma == "blocks") {
    const auto m = static_cast<std::size_t>(n) + 1;
    const ComplexMatrix full = apply_moi(MoiSymbol::divided_difference(f), OperatorTuple::uniform(op, m), xs);
    return std::max(relative_residual(block_sum_direct(f, op, xs), full),
                    relative_residual(block_sum_routed(f, op, xs), full));
  }
  if (lemma == "reduce") {
    double worst = 0.0;
    const unsigned full_mask = (1U << (n + 1)) - 1;
    for (const auto& block : sign_blocks(op, xs)) {
      if (block.mask == 0 || block.mask == full_mask) continue;
      worst = std::max(worst, reduce_block(f, op, block).residual);
    }
    return worst;
  }
  throw UsageError("unknown lemma '" + lemma + "'");
}

int run_verify_reduction(const ReductionArgs& a) {
  static const std::vector<std::string> lemmas = {"precrucial", "crucial", "postcrucial",
                                                  "blocks",     "reduce",  "consummation"};
  if (std::find(lemmas.begin(), lemmas.end(), a.lemma) == lemmas.end()) {
    throw UsageError("unknown lemma '" + a.lemma + "'");
  }
  const bool scalar = a.lemma == "precrucial" || a.lemma == "crucial" || a.lemma == "postcrucial";
  if (a.n < (a.lemma == "consummation" ? 1 : 2)) throw UsageError("--n is too small for this check");
  if (a.n > (scalar ? 6 : 4)) throw UsageError("--n is too large for this check");
  const double tol = scalar ? 1e-8 : (a.lemma == "consummation" ? 1e-12 : 1e-9);
  Sweep s{"reduction " + a.lemma, tol, {}};
  for (std::size_t t = 0; t < a.trials; ++t) s.residuals.push_back(reduction_trial(a, t));
  return report_sweep(s, a.out, true, a.csv_file);
}

// ---------------------------------------------------------------- experiment

struct ExperimentArgs {
  std::string config;
  std::string out_file;
  std::string witness_file;
  Output out;
};

int run_experiment_cmd(const ExperimentArgs& a) {
  const ExperimentConfig c = load_config(a.config);
  const ExperimentReport r = run_experiment(c);
  std::ostringstream csv;
  write_report_csv(csv, r);
  if (!a.out_file.empty()) {
    std::ofstream f(a.out_file, std::ios::binary);
    if (!f) throw DomainError("cannot write " + a.out_file);
    f << csv.str();
  }
  if (!a.witness_file.empty()) {
    std::ofstream f(a.witness_file);
    if (!f) throw DomainError("cannot write " + a.witness_file);
    f << witnesses_to_json(r).dump() << '\n';
  }
  json summary = json::array();
  for (const auto& s : r.samples) {
    if (!s.is_witness) continue;
    summary.push_back({{"dim", s.dim}, {"target", std::string(to_string(s.target))}, {"max_ratio", s.ratio},
                       {"s2_bound", s.s2_bound}});
  }
  if (a.out.json()) {
    std::cout << json{{"config", config_to_json(c)}, {"rows", r.samples.size()}, {"maxima", summary}}.dump() << '\n';
  } else if (a.out_file.empty()) {
    std::cout << csv.str();
  } else {
    for (const auto& e : summary) {
      std::cout << "dim=" << e["dim"] << " target=" << e["target"].get<std::string>()
                << " max_ratio=" << fmt(e["max_ratio"].get<double>()) << '\n';
    }
  }
  return kPass;
}

struct WitnessCheckArgs {
  std::string file;
  Output out;
};

int run_witness_check(const WitnessCheckArgs& a) {
  std::ifstream in(a.file);
  if (!in) throw DomainError("cannot open " + a.file);
  json j;
  in >> j;
  const double worst = max_witness_discrepancy(j);
  const bool ok = worst <= 1e-9;
  if (a.out.json()) {
    std::cout << json{{"witnesses", j.at("witnesses").size()}, {"max_discrepancy", worst}, {"passed", ok}}.dump()
              << '\n';
  } else {
    std::cout << "witnesses=" << j.at("witnesses").size() << " max_discrepancy=" << fmt(worst)
              << (ok ? " PASS" : " FAIL") << '\n';
  }
  return ok ? kPass : kIdentityFailure;
}

struct UltimateArgs {
  std::string function = "a";
  int n = 2;
  std::vector<double> p{2.0, 2.0};
  std::vector<Index> dims{4};
  std::size_t trials = 4;
  int ascent_steps = 5;
  std::uint64_t seed = 0;
  Output out;
};

int run_ultimate(const UltimateArgs& a) {
  const ScalarFunction f = parse_function(a.function, a.n);
  const ExponentTuple p(a.p);
  if (p.size() != static_cast<std::size_t>(a.n)) throw UsageError("--p must have n entries");
  ExperimentConfig base;
  base.function = a.function;
  base.n = a.n;
  base.p = a.p;
  base.dims = a.dims;
  base.ascent_steps = a.ascent_steps;
  base.seed = a.seed;
  const auto rows = verify_theorem_ultimate(f, p, a.trials, base);
  if (a.out.json()) {
    json list = json::array();
    for (const auto& r : rows) {
      list.push_back({{"dim", r.dim}, {"m_hat", r.m_hat}, {"sup_norm", r.sup_norm}, {"l_plus", r.l_plus},
                      {"l_minus", r.l_minus}, {"ratio", r.ratio}});
    }
    std::cout << json{{"rows", list}}.dump() << '\n';
  } else {
    std::cout << "dim,m_hat,sup_norm,l_plus,l_minus,ratio\n";
    for (const auto& r : rows) {
      std::cout << r.dim << ',' << fmt(r.m_hat) << ',' << fmt(r.sup_norm) << ',' << fmt(r.l_plus) << ','
                << fmt(r.l_minus) << ',' << fmt(r.ratio) << '\n';
    }
  }
  return kPass;
}

void apply_thread_cap() {
  if (const char* env = std::getenv("MOILAB_THREADS")) {
    int v = 0;
    const std::string s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc() && v > 0) omp_set_num_threads(v);
  }
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();
  CLI::App app{"Multiple operator integrals of divided differences on Hermitian matrices"};
  app.set_version_flag("--version", std::string("moilab ") + MOILAB_VERSION);
  app.require_subcommand(1);
  std::function<int()> action;

  auto* ddiff = app.add_subcommand("ddiff", "Divided differences");
  ddiff->require_subcommand(1);
  DdiffArgs dd;
  auto* ddiff_eval = ddiff->add_subcommand("eval", "Evaluate f^[k] at nodes");
  ddiff_eval->add_option("--function", dd.function, "a | b | smoothed | poly:c0,c1,..");
  ddiff_eval->add_option("--n", dd.n, "Order n of the function")->required();
  ddiff_eval->add_option("--nodes", dd.nodes, "Comma-separated nodes")->delimiter(',');
  ddiff_eval->add_flag("--classical-zero", dd.classical, "Use f^(n)(0)/n! at the all-zero tuple");
  ddiff_eval->add_option("--batch", dd.batch, "JSON file with a list of node lists");
  add_format(ddiff_eval, dd.out);
  ddiff_eval->callback([&] { action = [&] { return run_ddiff(dd); }; });

  auto* moi = app.add_subcommand("moi", "Multiple operator integrals");
  moi->require_subcommand(1);
  MoiApplyArgs ma;
  auto* moi_apply = moi->add_subcommand("apply", "Evaluate T_phi^A(x_1, ..., x_n)");
  moi_apply->add_option("--symbol", ma.symbol, "ddiff:<f>:<n> | chi+:<m> | chi-:<m> | chi0:<m> | const:<c>:<m>")
      ->required();
  moi_apply->add_option("--A", ma.a_files, "Operator JSON files (one, or one per variable)")
      ->delimiter(',')
      ->required();
  moi_apply->add_option("--x", ma.x_files, "Argument JSON files")->delimiter(',');
  moi_apply->add_option("--out", ma.out_file, "Result JSON file");
  moi_apply->add_option("--execution", ma.execution, "Kernel")->check(CLI::IsMember({"parallel", "serial", "reference"}));
  moi_apply->add_flag("--classical-zero", ma.classical, "Classical value at the all-zero tuple");
  add_format(moi_apply, ma.out);
  moi_apply->callback([&] { action = [&] { return run_moi_apply(ma); }; });

  MoiVerifyArgs mv;
  auto* moi_verify = moi->add_subcommand("verify", "Randomized check of a structural identity");
  moi_verify->add_option("--identity", mv.identity, "amplify | indicator | translate")->required();
  moi_verify->add_option("--trials", mv.trials, "Number of random cases");
  moi_verify->add_option("--seed", mv.seed, "Seed");
  moi_verify->add_option("--n", mv.n, "Fix the number of arguments (default cycles 1..3)")
      ->check(CLI::Range(0, 3));
  add_format(moi_verify, mv.out);
  moi_verify->callback([&] { action = [&] { return run_moi_verify(mv); }; });

  auto* verify = app.add_subcommand("verify", "Reduction identity sweeps");
  verify->require_subcommand(1);
  ReductionArgs ra;
  auto* verify_reduction = verify->add_subcommand("reduction", "Randomized reduction identity check; CSV trial,residual");
  verify_reduction->add_option("--lemma", ra.lemma, "precrucial | crucial | postcrucial | blocks | reduce | consummation")
      ->required();
  verify_reduction->add_option("--n", ra.n, "Order n");
  verify_reduction->add_option("--trials", ra.trials, "Number of random cases");
  verify_reduction->add_option("--seed", ra.seed, "Seed");
  verify_reduction->add_option("--function", ra.function, "a | b | smoothed | all")
      ->check(CLI::IsMember({"a", "b", "smoothed", "all"}));
  verify_reduction->add_option("--csv", ra.csv_file, "Write the residual CSV here instead of stdout");
  add_format(verify_reduction, ra.out);
  verify_reduction->callback([&] { action = [&] { return run_verify_reduction(ra); }; });

  auto* experiment = app.add_subcommand("experiment", "Bound estimation experiments");
  experiment->require_subcommand(1);
  ExperimentArgs ea;
  auto* experiment_run = experiment->add_subcommand("run", "Run a configured experiment");
  experiment_run->add_option("--config", ea.config, "Config JSON")->required()->check(CLI::ExistingFile);
  experiment_run->add_option("--out", ea.out_file, "CSV report");
  experiment_run->add_option("--witness-out", ea.witness_file, "JSON file with the witnesses");
  add_format(experiment_run, ea.out);
  experiment_run->callback([&] { action = [&] { return run_experiment_cmd(ea); }; });

  WitnessCheckArgs wc;
  auto* experiment_check = experiment->add_subcommand("check-witnesses", "Re-evaluate stored witnesses");
  experiment_check->add_option("--witnesses", wc.file, "Witness JSON")->required()->check(CLI::ExistingFile);
  add_format(experiment_check, wc.out);
  experiment_check->callback([&] { action = [&] { return run_witness_check(wc); }; });

  UltimateArgs ua;
  auto* experiment_ultimate = experiment->add_subcommand("ultimate", "M_hat / (sup|f^[n]| + L_hat^+ + L_hat^-) per dim");
  experiment_ultimate->add_option("--function", ua.function, "a | b | smoothed");
  experiment_ultimate->add_option("--n", ua.n, "Order n");
  experiment_ultimate->add_option("--p", ua.p, "Exponents")->delimiter(',');
  experiment_ultimate->add_option("--dims", ua.dims, "Dimensions")->delimiter(',');
  experiment_ultimate->add_option("--trials", ua.trials, "Trials per estimate");
  experiment_ultimate->add_option("--ascent-steps", ua.ascent_steps, "Ascent rounds");
  experiment_ultimate->add_option("--seed", ua.seed, "Seed");
  add_format(experiment_ultimate, ua.out);
  experiment_ultimate->callback([&] { action = [&] { return run_ultimate(ua); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }
  try {
    return action ? action() : kUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
