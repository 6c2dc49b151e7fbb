#pragma once

// Randomized lower-bound estimation of multilinear MOI norms
//
//   ratio = ||T_{f^[n]}^{(A..A)}(x_1..x_n)||_target / prod ||x_l||_{p_l}
//
// with seeded sampling, coordinate ascent over one argument at a time and
// CSV / JSON reporting. All values are empirical lower bounds on suprema.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "moilab/functions.hpp"
#include "moilab/matrix.hpp"
#include "moilab/moi.hpp"
#include "moilab/reduction.hpp"
#include "moilab/sampling.hpp"

namespace moilab {

inline constexpr const char* kReportHeader = "dim,n,p_tuple,target,constraint,trial,ratio,is_witness";

struct ExperimentConfig {
  std::string function = "a";
  int n = 2;
  std::vector<double> p{2.0, 2.0};
  std::vector<NormTarget> targets{NormTarget::weak};
  SpectrumConstraint constraint = SpectrumConstraint::any;
  std::vector<Index> dims{4};
  int samples = 8;
  int ascent_steps = 5;
  std::uint64_t seed = 0;
};

/// Validates and throws DomainError on bad fields.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& c);

struct Witness {
  HermitianMatrix a = HermitianMatrix::identity(1);
  std::vector<ComplexMatrix> xs;
};

/// One (dim, trial, target) outcome after ascent.
struct RatioSample {
  Index dim = 0;
  std::size_t trial = 0;
  NormTarget target = NormTarget::weak;
  double ratio = 0.0;
  double s2_bound = 0.0;  // sup |f^[n]| on the spectrum grid of the trial operator
  bool is_witness = false;
  /// Sign-definite f = a only: residuals of T(xs) against c * x_1 ... x_n
  /// with c = eps * n! and with c = eps.
  std::optional<double> product_residual_factorial;
  std::optional<double> product_residual_unit;
  Witness witness;
};

struct BoundEstimate {
  double value = 0.0;
  std::optional<Witness> witness;
  std::size_t trials = 0;
  std::vector<std::pair<Index, double>> per_dim;
  std::string provenance;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<RatioSample> samples;
};

/// Trials over all dims and targets; trials run in parallel and the result
/// does not depend on the thread count.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Lower-level entry point used by estimate_L with derived functions.
ExperimentReport run_trials(const ScalarFunction& f, const ExperimentConfig& config);

/// Ratio of a witness recomputed from scratch.
double evaluate_ratio(const ScalarFunction& f, const ExponentTuple& p, NormTarget target, const Witness& w);

/// Estimate for config.targets.front().
BoundEstimate estimate_M(const ExperimentConfig& config);

/// Max over k in [0, n) and consummations q of length n - k of the estimate
/// for f_k with exponents q under a psd (positive) or nsd (negative)
/// constraint. dims, samples, ascent_steps and seed come from `base`.
BoundEstimate estimate_L(const ScalarFunction& f, const ExponentTuple& p, Sign sign, const ExperimentConfig& base);

void write_report_csv(std::ostream& out, const ExperimentReport& report);
/// Rows with is_witness set: A, xs and the stored ratio.
nlohmann::json witnesses_to_json(const ExperimentReport& report);
/// Max |stored - recomputed| / max(1, stored) over witnesses in `j`.
double max_witness_discrepancy(const nlohmann::json& j);

struct UltimateRow {
  Index dim = 0;
  double m_hat = 0.0;
  double sup_norm = 0.0;
  double l_plus = 0.0;
  double l_minus = 0.0;
  double ratio = 0.0;
};

/// Per dim: M_hat / (sup |f^[n]| + L_hat^+ + L_hat^-), weak target. An empty
/// report for trials = 0.
std::vector<UltimateRow> verify_theorem_ultimate(const ScalarFunction& f, const ExponentTuple& p, std::size_t trials,
                                                 const ExperimentConfig& base);

}  // namespace moilab
