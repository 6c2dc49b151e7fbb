#pragma once

// Test-side generators and oracles. Oracles here avoid the library's
// eigenvalue clustering and Newton tables on purpose.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "moilab/matrix.hpp"

namespace moilab::test {

using Gen = std::mt19937_64;

inline Gen gen(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x7e57u};
  return Gen(seq);
}

inline double uniform(Gen& g, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }

inline int uniform_int(Gen& g, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }

inline ComplexMatrix random_matrix(Gen& g, Index rows, Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(normal(g), normal(g));
  }
  return m;
}

inline ComplexMatrix random_matrix(Gen& g, Index d) { return random_matrix(g, d, d); }

inline std::vector<ComplexMatrix> random_args(Gen& g, std::size_t n, Index d) {
  std::vector<ComplexMatrix> xs;
  for (std::size_t i = 0; i < n; ++i) xs.push_back(random_matrix(g, d));
  return xs;
}

inline ComplexMatrix random_unitary(Gen& g, Index d) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(g, d));
  return qr.householderQ();
}

/// U diag(values) U* with a random unitary U.
inline HermitianMatrix hermitian_with(Gen& g, const std::vector<double>& values) {
  const auto d = static_cast<Index>(values.size());
  const ComplexMatrix u = random_unitary(g, d);
  Eigen::VectorXcd v(d);
  for (Index i = 0; i < d; ++i) v(i) = values[static_cast<std::size_t>(i)];
  return HermitianMatrix(u * v.asDiagonal() * u.adjoint());
}

/// Values in [lo, hi] that are pairwise at least `gap` apart and at least
/// `gap` away from 0.
inline std::vector<double> separated_values(Gen& g, std::size_t count, double lo, double hi, double gap) {
  std::vector<double> out;
  while (out.size() < count) {
    const double v = uniform(g, lo, hi);
    if (std::abs(v) < gap) continue;
    bool ok = true;
    for (double w : out) ok = ok && std::abs(v - w) >= gap;
    if (ok) out.push_back(v);
  }
  return out;
}

inline HermitianMatrix random_hermitian(Gen& g, Index d, double lo = -2.0, double hi = 2.0) {
  return hermitian_with(g, separated_values(g, static_cast<std::size_t>(d), lo, hi, 0.05));
}

/// Hermitian matrix with repeated eigenvalues drawn from a small pool.
inline HermitianMatrix degenerate_hermitian(Gen& g, Index d) {
  const std::vector<double> pool = {-1.5, -0.5, 0.75, 2.0};
  std::vector<double> v(static_cast<std::size_t>(d));
  for (double& x : v) x = pool[static_cast<std::size_t>(uniform_int(g, 0, 3))];
  return hermitian_with(g, v);
}

/// Complete homogeneous symmetric polynomial h_k(t_0, ..., t_m) by the
/// recursion h_k(t_0..t_m) = h_k(t_0..t_{m-1}) + t_m h_{k-1}(t_0..t_m).
inline double complete_homogeneous(int k, std::span<const double> t) {
  if (k < 0) return 0.0;
  std::vector<double> h(static_cast<std::size_t>(k) + 1, 0.0);
  h[0] = 1.0;
  for (double x : t) {
    for (int j = 1; j <= k; ++j) h[static_cast<std::size_t>(j)] += x * h[static_cast<std::size_t>(j) - 1];
  }
  return h[static_cast<std::size_t>(k)];
}

/// Divided difference of t^m over `nodes` (repetitions allowed).
inline double monomial_dd(int m, std::span<const double> nodes) {
  return complete_homogeneous(m - static_cast<int>(nodes.size()) + 1, nodes);
}

/// Divided difference over pairwise distinct nodes by the Lagrange form.
inline double lagrange_dd(const std::function<double(double)>& f, std::span<const double> nodes) {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    long double denom = 1.0L;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (j != i) denom *= static_cast<long double>(nodes[i]) - static_cast<long double>(nodes[j]);
    }
    sum += static_cast<long double>(f(nodes[i])) / denom;
  }
  return static_cast<double>(sum);
}

/// Sum over eigenvector index tuples (no clustering):
///   sum phi(l_{i0}, .., l_{in}) v_{i0} v_{i0}* x_1 v_{i1} v_{i1}* ... x_n v_{in} v_{in}*.
inline ComplexMatrix brute_force_moi(const std::function<double(std::span<const double>)>& phi,
                                     const std::vector<HermitianMatrix>& ops, const std::vector<ComplexMatrix>& xs) {
  const std::size_t m = ops.size();
  const Index d = ops.front().dim();
  std::vector<Eigen::VectorXd> lambda;
  std::vector<ComplexMatrix> vecs;
  std::vector<double> seen;
  for (const auto& a : ops) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix());
    // repeated eigenvalues come back with rounding noise, within one operator
    // and across operators; confluent nodes must be exactly equal
    Eigen::VectorXd l = es.eigenvalues();
    for (Index i = 0; i < d; ++i) {
      const auto hit = std::find_if(seen.begin(), seen.end(), [&](double s) { return std::abs(s - l(i)) < 1e-9; });
      if (hit != seen.end()) {
        l(i) = *hit;
      } else {
        seen.push_back(l(i));
      }
    }
    lambda.push_back(l);
    vecs.push_back(es.eigenvectors());
  }
  // coefficient chain: R[i0, in] = sum phi * prod_l (v_{i_{l-1}}^* x_l v_{i_l})
  std::vector<ComplexMatrix> rotated;
  for (std::size_t l = 1; l < m; ++l) rotated.push_back(vecs[l - 1].adjoint() * xs[l - 1] * vecs[l]);
  ComplexMatrix r = ComplexMatrix::Zero(d, d);
  std::vector<Index> idx(m, 0);
  std::vector<double> t(m);
  while (true) {
    Complex w(1.0, 0.0);
    for (std::size_t l = 1; l < m; ++l) w *= rotated[l - 1](idx[l - 1], idx[l]);
    for (std::size_t l = 0; l < m; ++l) t[l] = lambda[l](idx[l]);
    r(idx.front(), idx.back()) += phi(t) * w;
    std::size_t pos = m;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < d) break;
      idx[pos] = 0;
      if (pos == 0) return vecs.front() * r * vecs.back().adjoint();
    }
  }
}

/// Same with the n = 0 convention phi(A_0).
inline ComplexMatrix brute_force_moi(const std::function<double(std::span<const double>)>& phi,
                                     const HermitianMatrix& a, std::size_t n, const std::vector<ComplexMatrix>& xs) {
  return brute_force_moi(phi, std::vector<HermitianMatrix>(n + 1, a), xs);
}

inline double rel(double lhs, double rhs) { return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}); }

inline double rel(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  return (lhs - rhs).norm() / std::max(1.0, rhs.norm());
}

}  // namespace moilab::test
