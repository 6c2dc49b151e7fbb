#include "moilab/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "moilab/errors.hpp"

namespace moilab {

Rng keyed_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a),    static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b),    static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

SpectrumConstraint parse_constraint(std::string_view name) {
  if (name == "any") return SpectrumConstraint::any;
  if (name == "psd") return SpectrumConstraint::psd;
  if (name == "nsd") return SpectrumConstraint::nsd;
  detail::throw_domain("parse_constraint", "unknown constraint '" + std::string(name) + "' (any|psd|nsd)");
}

std::string_view to_string(SpectrumConstraint c) {
  switch (c) {
    case SpectrumConstraint::any: return "any";
    case SpectrumConstraint::psd: return "psd";
    case SpectrumConstraint::nsd: return "nsd";
  }
  return "?";
}

ComplexMatrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix out(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      out(i, j) = Complex(re, im);
    }
  }
  return out;
}

ComplexMatrix haar_unitary(Index d, Rng& rng) {
  const ComplexMatrix g = gaussian_matrix(d, d, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Index j = 0; j < d; ++j) {
    const Complex diag = r(j, j);
    const double mag = std::abs(diag);
    if (mag > 0.0) q.col(j) *= diag / mag;
  }
  return q;
}

HermitianMatrix gue(Index d, Rng& rng) {
  const ComplexMatrix g = gaussian_matrix(d, d, rng);
  return HermitianMatrix((g + g.adjoint()) / (2.0 * std::sqrt(static_cast<double>(d) / 2.0)));
}

HermitianMatrix with_spectrum(std::span<const double> eigenvalues, Rng& rng) {
  const auto d = static_cast<Index>(eigenvalues.size());
  const ComplexMatrix u = haar_unitary(d, rng);
  Eigen::VectorXcd diag(d);
  for (Index i = 0; i < d; ++i) diag(i) = eigenvalues[static_cast<std::size_t>(i)];
  return HermitianMatrix(u * diag.asDiagonal() * u.adjoint());
}

std::vector<double> uniform_values(Index d, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> uni(lo, hi);
  std::vector<double> out(static_cast<std::size_t>(d));
  for (double& v : out) v = uni(rng);
  return out;
}

std::vector<double> gapped_values(Index d, double lo, double hi, double min_gap, double min_abs, Rng& rng) {
  if (lo >= 0.0) lo = std::max(lo, min_abs);
  if (hi <= 0.0) hi = std::min(hi, -min_abs);
  const double slack = (hi - lo) - static_cast<double>(d - 1) * min_gap;
  if (!(slack > 0.0)) detail::throw_precondition("gapped_values", "interval too short for the requested gaps");
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<double> u = uniform_values(d, 0.0, slack, rng);
    std::sort(u.begin(), u.end());
    bool ok = true;
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] += lo + static_cast<double>(i) * min_gap;
      if (std::abs(u[i]) < min_abs) ok = false;
    }
    if (ok) return u;
  }
  detail::throw_precondition("gapped_values", "could not place values away from 0");
}

HermitianMatrix sample_operator(Index d, SpectrumConstraint c, std::uint64_t draw, Rng& rng) {
  std::vector<double> values;
  if (draw % 2 == 0) {
    const auto spec = eig(gue(d, rng));
    for (std::size_t i = 0; i < spec.size(); ++i) {
      values.insert(values.end(), static_cast<std::size_t>(spec.multiplicities[i]), spec.eigenvalues[i]);
    }
  } else {
    values = uniform_values(d, -2.0, 2.0, rng);
  }
  if (c != SpectrumConstraint::any) {
    const double s = c == SpectrumConstraint::psd ? 1.0 : -1.0;
    for (double& v : values) v = s * std::abs(v);
  }
  return with_spectrum(values, rng);
}

ComplexMatrix random_rank_matrix(Index d, Rng& rng) {
  std::uniform_int_distribution<Index> rank_dist(1, d);
  const Index r = rank_dist(rng);
  if (r == d) return gaussian_matrix(d, d, rng);
  const ComplexMatrix left = gaussian_matrix(d, r, rng);
  const ComplexMatrix right = gaussian_matrix(r, d, rng);
  return left * right;
}

ExponentTuple random_holder_tuple(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> uni(0.05, 1.0);
  std::vector<double> w(n);
  double sum = 0.0;
  for (double& v : w) {
    v = uni(rng);
    sum += v;
  }
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = std::max(1.0, sum / w[i]);
  return ExponentTuple(std::move(p));
}

}  // namespace moilab
