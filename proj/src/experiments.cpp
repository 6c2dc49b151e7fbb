#include "moilab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>

#include "moilab/errors.hpp"
#include "moilab/matrix_io.hpp"

namespace moilab {
namespace {

double factorial(int k) {
  double out = 1.0;
  for (int i = 2; i <= k; ++i) out *= i;
  return out;
}

double ratio_of(const ComplexMatrix& y, NormTarget target, std::span<const ComplexMatrix> xs, const ExponentTuple& p) {
  double den = 1.0;
  for (std::size_t l = 0; l < xs.size(); ++l) den *= schatten_norm(xs[l], p[l]);
  return target_norm(y, target) / den;
}

/// W with Re Tr(W* y) >= ||y||_target and dual norm at most one (S_1, S_2),
/// or the partial isometry onto the leading singular pairs up to the
/// maximizing index of (k + 1) mu_k (weak).
ComplexMatrix norming_functional(const ComplexMatrix& y, NormTarget target) {
  if (target == NormTarget::s2) {
    const double norm = y.norm();
    return norm > 0.0 ? ComplexMatrix(y / norm) : y;
  }
  Eigen::BDCSVD<ComplexMatrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  Index keep = s.size();
  if (target == NormTarget::weak) {
    Index arg = 0;
    for (Index k = 1; k < s.size(); ++k) {
      if (static_cast<double>(k + 1) * s(k) > static_cast<double>(arg + 1) * s(arg)) arg = k;
    }
    keep = arg + 1;
  }
  return svd.matrixU().leftCols(keep) * svd.matrixV().leftCols(keep).adjoint();
}

/// Unit S_p element maximizing Re Tr(G* x).
std::optional<ComplexMatrix> holder_dual(const ComplexMatrix& g, double p) {
  Eigen::BDCSVD<ComplexMatrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || !(s(0) > 0.0)) return std::nullopt;
  if (p == 1.0) return ComplexMatrix(svd.matrixU().col(0) * svd.matrixV().col(0).adjoint());
  const double q = p / (p - 1.0);
  Eigen::VectorXd w(s.size());
  for (Index i = 0; i < s.size(); ++i) w(i) = std::pow(s(i) / s(0), q - 1.0);
  ComplexMatrix x = svd.matrixU() * w.cast<Complex>().asDiagonal() * svd.matrixV().adjoint();
  const double norm = schatten_norm(x, p);
  if (!(norm > 0.0)) return std::nullopt;
  return ComplexMatrix(x / norm);
}

struct AscentResult {
  double ratio = 0.0;
  std::vector<ComplexMatrix> xs;
};

AscentResult ascend(const MoiOperator& op, const ExponentTuple& p, NormTarget target, std::vector<ComplexMatrix> xs,
                    int steps) {
  AscentResult best{ratio_of(op.apply(xs, Execution::serial), target, xs, p), xs};
  const std::size_t n = xs.size();
  for (int step = 0; step < steps; ++step) {
    for (std::size_t k = 1; k <= n; ++k) {
      const ComplexMatrix w = norming_functional(op.apply(xs, Execution::serial), target);
      const auto next = holder_dual(op.adjoint_slot(xs, k, w, Execution::serial), p[k - 1]);
      if (!next) continue;
      xs[k - 1] = *next;
      const double r = ratio_of(op.apply(xs, Execution::serial), target, xs, p);
      if (r > best.ratio) best = {r, xs};
    }
  }
  return best;
}

std::vector<ComplexMatrix> initial_arguments(Index d, const ExponentTuple& p, Rng& rng) {
  std::vector<ComplexMatrix> xs;
  for (std::size_t l = 0; l < p.size(); ++l) {
    for (;;) {
      ComplexMatrix x = random_rank_matrix(d, rng);
      const double norm = schatten_norm(x, p[l]);
      if (norm > 0.0 && std::isfinite(norm)) {
        xs.emplace_back(x / norm);
        break;
      }
    }
  }
  return xs;
}

void require(bool ok, const std::string& msg) {
  if (!ok) detail::throw_domain("experiment config", msg);
}

double max_ratio(const ExperimentReport& r) {
  double best = 0.0;
  for (const auto& s : r.samples) best = std::max(best, s.ratio);
  return best;
}

BoundEstimate summarize(const ExperimentReport& r, std::string provenance) {
  BoundEstimate out;
  out.trials = r.samples.size();
  out.provenance = std::move(provenance);
  for (const auto& s : r.samples) {
    if (!out.witness || s.ratio > out.value) {
      out.value = s.ratio;
      out.witness = s.witness;
    }
    auto it = std::find_if(out.per_dim.begin(), out.per_dim.end(), [&](const auto& e) { return e.first == s.dim; });
    if (it == out.per_dim.end()) {
      out.per_dim.emplace_back(s.dim, s.ratio);
    } else {
      it->second = std::max(it->second, s.ratio);
    }
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
  require(j.is_object(), "config must be a JSON object");
  static const char* known[] = {"function", "n",       "p",            "target", "targets",
                                "constraint", "dims", "samples", "ascent_steps", "seed"};
  for (const auto& [key, _] : j.items()) {
    require(std::find(std::begin(known), std::end(known), key) != std::end(known), "unknown key '" + key + "'");
  }
  ExperimentConfig c;
  try {
    if (j.contains("function")) c.function = j.at("function").get<std::string>();
    if (j.contains("n")) c.n = j.at("n").get<int>();
    if (j.contains("p")) c.p = j.at("p").get<std::vector<double>>();
    if (j.contains("target") && j.contains("targets")) require(false, "give either 'target' or 'targets'");
    if (j.contains("target")) c.targets = {parse_norm_target(j.at("target").get<std::string>())};
    if (j.contains("targets")) {
      c.targets.clear();
      for (const auto& t : j.at("targets")) c.targets.push_back(parse_norm_target(t.get<std::string>()));
    }
    if (j.contains("constraint")) c.constraint = parse_constraint(j.at("constraint").get<std::string>());
    if (j.contains("dims")) c.dims = j.at("dims").get<std::vector<Index>>();
    if (j.contains("samples")) c.samples = j.at("samples").get<int>();
    if (j.contains("ascent_steps")) c.ascent_steps = j.at("ascent_steps").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    require(false, std::string("malformed field: ") + e.what());
  }
  require(c.n >= 1, "n must be at least 1");
  require(c.p.size() == static_cast<std::size_t>(c.n), "p must have n entries");
  (void)ExponentTuple(c.p);
  require(!c.targets.empty(), "at least one target is required");
  require(!c.dims.empty(), "dims must be nonempty");
  for (Index d : c.dims) require(d >= 2, "dims must be at least 2");
  require(c.samples >= 1, "samples must be at least 1");
  require(c.ascent_steps >= 0, "ascent_steps must be nonnegative");
  parse_function(c.function, c.n);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) detail::throw_domain("load_config", "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    detail::throw_domain("load_config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json targets = nlohmann::json::array();
  for (auto t : c.targets) targets.push_back(std::string(to_string(t)));
  return {{"function", c.function},         {"n", c.n},
          {"p", c.p},                       {"targets", targets},
          {"constraint", std::string(to_string(c.constraint))},
          {"dims", c.dims},                 {"samples", c.samples},
          {"ascent_steps", c.ascent_steps}, {"seed", c.seed}};
}

ExperimentReport run_trials(const ScalarFunction& f, const ExperimentConfig& config) {
  const ExponentTuple p(config.p);
  const int n = f.order();
  if (p.size() != static_cast<std::size_t>(n)) detail::throw_domain("run_trials", "exponent count must equal n");
  const auto samples = static_cast<std::size_t>(config.samples);
  const std::size_t units = config.dims.size() * samples;
  const MoiSymbol phi = MoiSymbol::divided_difference(f);
  const bool sign_definite = config.constraint != SpectrumConstraint::any;
  const bool product_check = sign_definite && f.name() == "a";
  const double eps = config.constraint == SpectrumConstraint::nsd ? -1.0 : 1.0;

  std::vector<std::vector<RatioSample>> slots(units);
  std::vector<std::exception_ptr> errors(units);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t u = 0; u < static_cast<std::ptrdiff_t>(units); ++u) {
    try {
      const Index d = config.dims[static_cast<std::size_t>(u) / samples];
      const std::size_t trial = static_cast<std::size_t>(u) % samples;
      Rng rng = keyed_rng(config.seed, static_cast<std::uint64_t>(d), trial);
      const HermitianMatrix a = sample_operator(d, config.constraint, trial, rng);
      const MoiOperator op(phi, OperatorTuple::uniform(a, static_cast<std::size_t>(n) + 1));
      const std::vector<ComplexMatrix> start = initial_arguments(d, p, rng);
      for (NormTarget target : config.targets) {
        AscentResult best = ascend(op, p, target, start, config.ascent_steps);
        RatioSample s;
        s.dim = d;
        s.trial = trial;
        s.target = target;
        s.ratio = best.ratio;
        s.s2_bound = op.grid_sup();
        if (product_check) {
          const ComplexMatrix y = op.apply(best.xs, Execution::serial);
          const ComplexMatrix prod = ordered_product(best.xs);
          s.product_residual_factorial = relative_residual(y, ComplexMatrix(eps * factorial(n) * prod));
          s.product_residual_unit = relative_residual(y, ComplexMatrix(eps * prod));
        }
        s.witness = Witness{a, std::move(best.xs)};
        slots[static_cast<std::size_t>(u)].push_back(std::move(s));
      }
    } catch (...) {
      errors[static_cast<std::size_t>(u)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentReport report{config, {}};
  report.config.n = n;
  for (std::size_t di = 0; di < config.dims.size(); ++di) {
    for (std::size_t ti = 0; ti < config.targets.size(); ++ti) {
      const std::size_t first = report.samples.size();
      for (std::size_t trial = 0; trial < samples; ++trial) {
        report.samples.push_back(slots[di * samples + trial][ti]);
      }
      if (first == report.samples.size()) continue;
      std::size_t arg = first;
      for (std::size_t i = first; i < report.samples.size(); ++i) {
        if (report.samples[i].ratio > report.samples[arg].ratio) arg = i;
      }
      report.samples[arg].is_witness = true;
    }
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  return run_trials(parse_function(config.function, config.n), config);
}

double evaluate_ratio(const ScalarFunction& f, const ExponentTuple& p, NormTarget target, const Witness& w) {
  const MoiOperator op(MoiSymbol::divided_difference(f), OperatorTuple::uniform(w.a, w.xs.size() + 1));
  return ratio_of(op.apply(w.xs), target, w.xs, p);
}

BoundEstimate estimate_M(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.targets = {config.targets.front()};
  return summarize(run_experiment(c), "M");
}

BoundEstimate estimate_L(const ScalarFunction& f, const ExponentTuple& p, Sign sign, const ExperimentConfig& base) {
  const int n = f.order();
  if (p.size() != static_cast<std::size_t>(n)) detail::throw_domain("estimate_L", "exponent count must equal n");
  BoundEstimate out;
  bool first = true;
  for (int k = 0; k < n; ++k) {
    const ScalarFunction fk = f_chain(f, k);
    for (const auto& q : consummations(p)) {
      if (q.size() != static_cast<std::size_t>(n - k)) continue;
      ExperimentConfig c = base;
      c.n = n - k;
      c.p = q.values();
      c.targets = {base.targets.front()};
      c.constraint = sign == Sign::positive ? SpectrumConstraint::psd : SpectrumConstraint::nsd;
      const BoundEstimate e = summarize(run_trials(fk, c), "k=" + std::to_string(k) + ",q=" + q.to_string());
      out.trials += e.trials;
      for (const auto& [d, v] : e.per_dim) {
        auto it = std::find_if(out.per_dim.begin(), out.per_dim.end(), [&](const auto& x) { return x.first == d; });
        if (it == out.per_dim.end()) {
          out.per_dim.emplace_back(d, v);
        } else {
          it->second = std::max(it->second, v);
        }
      }
      if (first || e.value > out.value) {
        out.value = e.value;
        out.witness = e.witness;
        out.provenance = e.provenance;
        first = false;
      }
    }
  }
  return out;
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
  const std::string p = ExponentTuple(report.config.p).to_string();
  const std::string constraint(to_string(report.config.constraint));
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf.precision(17);
  buf << kReportHeader << '\n';
  for (const auto& s : report.samples) {
    buf << s.dim << ',' << report.config.n << ',' << p << ',' << to_string(s.target) << ',' << constraint << ','
        << s.trial << ',' << s.ratio << ',' << (s.is_witness ? 1 : 0) << '\n';
  }
  out << buf.str();
}

nlohmann::json witnesses_to_json(const ExperimentReport& report) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& s : report.samples) {
    if (!s.is_witness) continue;
    nlohmann::json xs = nlohmann::json::array();
    for (const auto& x : s.witness.xs) xs.push_back(matrix_to_json(x));
    nlohmann::json entry = {{"dim", s.dim},
                            {"trial", s.trial},
                            {"target", std::string(to_string(s.target))},
                            {"ratio", s.ratio},
                            {"A", matrix_to_json(s.witness.a.matrix())},
                            {"xs", xs}};
    if (s.product_residual_factorial) {
      entry["product_residual_factorial"] = *s.product_residual_factorial;
      entry["product_residual_unit"] = *s.product_residual_unit;
    }
    list.push_back(std::move(entry));
  }
  return {{"config", config_to_json(report.config)}, {"witnesses", list}};
}

double max_witness_discrepancy(const nlohmann::json& j) {
  const ExperimentConfig c = parse_config(j.at("config"));
  const ScalarFunction f = parse_function(c.function, c.n);
  const ExponentTuple p(c.p);
  double worst = 0.0;
  for (const auto& w : j.at("witnesses")) {
    Witness witness{HermitianMatrix(matrix_from_json(w.at("A"))), {}};
    for (const auto& x : w.at("xs")) witness.xs.push_back(matrix_from_json(x));
    const double stored = w.at("ratio").get<double>();
    const double again = evaluate_ratio(f, p, parse_norm_target(w.at("target").get<std::string>()), witness);
    worst = std::max(worst, std::abs(stored - again) / std::max(1.0, std::abs(stored)));
  }
  return worst;
}

std::vector<UltimateRow> verify_theorem_ultimate(const ScalarFunction& f, const ExponentTuple& p, std::size_t trials,
                                                 const ExperimentConfig& base) {
  std::vector<UltimateRow> rows;
  if (trials == 0) return rows;
  for (Index d : base.dims) {
    ExperimentConfig c = base;
    c.dims = {d};
    c.samples = static_cast<int>(trials);
    c.targets = {NormTarget::weak};
    c.constraint = SpectrumConstraint::any;
    c.n = f.order();
    c.p = p.values();
    const ExperimentReport r = run_trials(f, c);
    UltimateRow row;
    row.dim = d;
    row.m_hat = max_ratio(r);
    for (const auto& s : r.samples) row.sup_norm = std::max(row.sup_norm, s.s2_bound);
    row.l_plus = estimate_L(f, p, Sign::positive, c).value;
    row.l_minus = estimate_L(f, p, Sign::negative, c).value;
    const double den = row.sup_norm + row.l_plus + row.l_minus;
    row.ratio = den > 0.0 ? row.m_hat / den : (row.m_hat == 0.0 ? 0.0 : kInfinity);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace moilab
