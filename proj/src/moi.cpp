#include "moilab/moi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "moilab/errors.hpp"

namespace moilab {
namespace {

using RowMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Shared state of one path enumeration. Position l carries eigenvector index
/// j_l of A_l; the factor between positions l-1 and l is xt[l-1](j_{l-1}, j_l).
struct Paths {
  const std::vector<RowMatrix>* xt;
  const std::vector<const int*>* clusters;
  const std::vector<std::size_t>* strides;
  const double* grid;
  std::size_t n;
  Index d;
};

/// Forward kernel: accumulate R(a, j_n) for a fixed row a = j_0.
void forward_walk(const Paths& p, std::size_t l, Index prev, Complex prod, std::size_t off, Complex* acc) {
  const Complex* row = (*p.xt)[l - 1].data() + prev * p.d;
  const int* cl = (*p.clusters)[l];
  const std::size_t stride = (*p.strides)[l];
  if (l == p.n) {
    for (Index j = 0; j < p.d; ++j) {
      acc[j] += p.grid[off + static_cast<std::size_t>(cl[j]) * stride] * (prod * row[j]);
    }
    return;
  }
  for (Index j = 0; j < p.d; ++j) {
    forward_walk(p, l + 1, j, prod * row[j], off + static_cast<std::size_t>(cl[j]) * stride, acc);
  }
}

/// Adjoint kernel for slot k with j_{k-1} = fixed: accumulates
/// c(fixed, j_k) += conj(wt(j_0, j_n)) phi prod_{l != k} xt_l.
struct AdjointWalk {
  const Paths* p;
  const RowMatrix* wt;
  std::size_t slot;
  Index fixed;
  std::vector<Index> j;
  Complex* acc;

  void run(std::size_t l, Complex prod, std::size_t off) {
    const std::size_t n = p->n;
    if (l > n) {
      acc[j[slot]] += std::conj((*wt)(j[0], j[n])) * p->grid[off] * prod;
      return;
    }
    const int* cl = (*p->clusters)[l];
    const std::size_t stride = (*p->strides)[l];
    const Index lo = (l == slot - 1) ? fixed : 0;
    const Index hi = (l == slot - 1) ? fixed + 1 : p->d;
    for (Index jl = lo; jl < hi; ++jl) {
      j[l] = jl;
      Complex next = prod;
      if (l >= 1 && l != slot) next *= (*p->xt)[l - 1](j[l - 1], jl);
      run(l + 1, next, off + static_cast<std::size_t>(cl[jl]) * stride);
    }
  }
};

void reference_walk(const MoiSymbol& phi, const OperatorTuple& a, std::span<const ComplexMatrix> xs, std::size_t l,
                    const ComplexMatrix& partial, std::vector<double>& nodes, ComplexMatrix& out) {
  const auto& spec = a.spectrum(l);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    nodes[l] = spec.eigenvalues[i];
    const ComplexMatrix& proj = spec.projections[i].matrix();
    ComplexMatrix next = (l == 0) ? proj : ComplexMatrix(partial * xs[l - 1] * proj);
    if (l + 1 == a.size()) {
      out += phi(std::span<const double>(nodes)) * next;
    } else {
      reference_walk(phi, a, xs, l + 1, next, nodes, out);
    }
  }
}

void check_tuple_arity(const MoiSymbol& phi, const OperatorTuple& a, const char* where) {
  if (phi.arity() != a.size()) {
    std::ostringstream msg;
    msg << "symbol arity " << phi.arity() << " does not match " << a.size() << " operators";
    detail::throw_precondition(where, msg.str());
  }
}

std::vector<ComplexMatrix> with_replaced(std::span<const ComplexMatrix> xs, std::size_t i, ComplexMatrix y) {
  std::vector<ComplexMatrix> out(xs.begin(), xs.end());
  out[i] = std::move(y);
  return out;
}

}  // namespace

OperatorTuple::OperatorTuple(std::vector<HermitianMatrix> operators) : operators_(std::move(operators)) {
  if (operators_.empty()) detail::throw_precondition("OperatorTuple", "at least one operator is required");
  for (const auto& op : operators_) {
    if (op.dim() != operators_.front().dim()) {
      detail::throw_precondition("OperatorTuple", "operators must share one dimension");
    }
  }
  spectra_.reserve(operators_.size());
  std::vector<double> seen;
  double tol = 0.0;
  for (std::size_t i = 0; i < operators_.size(); ++i) {
    const auto same = std::find_if(operators_.begin(), operators_.begin() + static_cast<std::ptrdiff_t>(i),
                                   [&](const HermitianMatrix& b) { return b.matrix() == operators_[i].matrix(); });
    if (same != operators_.begin() + static_cast<std::ptrdiff_t>(i)) {
      spectra_.push_back(spectra_[static_cast<std::size_t>(same - operators_.begin())]);
      continue;
    }
    // Eigenvalues of different operators within the cluster tolerance take one
    // common value, so symbols see exactly confluent nodes.
    SpectralDecomposition spec = eig(operators_[i]);
    tol = std::max(tol, spec.cluster_tolerance);
    for (double& t : spec.eigenvalues) {
      const auto hit = std::find_if(seen.begin(), seen.end(), [&](double s) { return std::abs(s - t) < tol; });
      if (hit != seen.end()) {
        t = *hit;
      } else {
        seen.push_back(t);
      }
    }
    spectra_.push_back(std::make_shared<const SpectralDecomposition>(std::move(spec)));
  }
}

OperatorTuple::OperatorTuple(std::vector<HermitianMatrix> operators,
                             std::vector<std::shared_ptr<const SpectralDecomposition>> spectra)
    : operators_(std::move(operators)), spectra_(std::move(spectra)) {}

OperatorTuple OperatorTuple::uniform(const HermitianMatrix& a, std::size_t count) {
  if (count == 0) detail::throw_precondition("OperatorTuple::uniform", "at least one operator is required");
  auto spectrum = std::make_shared<const SpectralDecomposition>(eig(a));
  return OperatorTuple(std::vector<HermitianMatrix>(count, a),
                       std::vector<std::shared_ptr<const SpectralDecomposition>>(count, spectrum));
}

MoiOperator::MoiOperator(MoiSymbol phi, OperatorTuple operators)
    : phi_(std::move(phi)), operators_(std::move(operators)) {
  check_tuple_arity(phi_, operators_, "MoiOperator");
  const std::size_t m = operators_.size();
  strides_.assign(m, 1);
  for (std::size_t l = m - 1; l > 0; --l) strides_[l - 1] = strides_[l] * operators_.spectrum(l).size();
  const std::size_t total = strides_[0] * operators_.spectrum(0).size();

  grid_.resize(total);
  std::vector<double> nodes(m);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (std::size_t l = 0; l < m; ++l) {
      nodes[l] = operators_.spectrum(l).eigenvalues[rest / strides_[l]];
      rest %= strides_[l];
    }
    const double v = phi_(std::span<const double>(nodes));
    if (!std::isfinite(v)) {
      throw NumericalError("MoiOperator: symbol " + phi_.describe() + " is not finite on the spectrum grid");
    }
    grid_[flat] = v;
  }
}

void MoiOperator::check_arguments(std::span<const ComplexMatrix> xs, const char* where) const {
  if (xs.size() != degree()) {
    std::ostringstream msg;
    msg << "expected " << degree() << " arguments, got " << xs.size();
    detail::throw_precondition(where, msg.str());
  }
  for (const auto& x : xs) {
    if (x.rows() != dim() || x.cols() != dim()) {
      std::ostringstream msg;
      msg << "argument of shape " << x.rows() << "x" << x.cols() << " does not match dimension " << dim();
      detail::throw_precondition(where, msg.str());
    }
  }
}

std::vector<ComplexMatrix> MoiOperator::rotated_arguments(std::span<const ComplexMatrix> xs) const {
  std::vector<ComplexMatrix> out;
  out.reserve(xs.size());
  for (std::size_t l = 1; l <= xs.size(); ++l) {
    out.emplace_back(operators_.spectrum(l - 1).eigenvectors.adjoint() * xs[l - 1] *
                     operators_.spectrum(l).eigenvectors);
  }
  return out;
}

ComplexMatrix MoiOperator::apply(std::span<const ComplexMatrix> xs, Execution exec) const {
  check_arguments(xs, "MoiOperator::apply");
  const std::size_t n = degree();
  const Index d = dim();
  const auto& u0 = operators_.spectrum(0).eigenvectors;
  const auto& un = operators_.spectrum(n).eigenvectors;

  if (n == 0) {
    ComplexMatrix r = ComplexMatrix::Zero(d, d);
    const auto& cl = operators_.spectrum(0).cluster_of;
    for (Index a = 0; a < d; ++a) r(a, a) = grid_[static_cast<std::size_t>(cl[static_cast<std::size_t>(a)])];
    return u0 * r * u0.adjoint();
  }

  std::vector<RowMatrix> xt;
  for (auto& x : rotated_arguments(xs)) xt.emplace_back(x);
  std::vector<const int*> clusters;
  for (std::size_t l = 0; l <= n; ++l) clusters.push_back(operators_.spectrum(l).cluster_of.data());
  const Paths paths{&xt, &clusters, &strides_, grid_.data(), n, d};

  RowMatrix r = RowMatrix::Zero(d, d);
  const bool parallel = exec == Execution::parallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (Index a = 0; a < d; ++a) {
    const std::size_t off = static_cast<std::size_t>(clusters[0][a]) * strides_[0];
    forward_walk(paths, 1, a, Complex(1.0, 0.0), off, r.data() + a * d);
  }
  return u0 * r * un.adjoint();
}

ComplexMatrix MoiOperator::adjoint_slot(std::span<const ComplexMatrix> xs, std::size_t slot, const ComplexMatrix& w,
                                        Execution exec) const {
  check_arguments(xs, "MoiOperator::adjoint_slot");
  const std::size_t n = degree();
  const Index d = dim();
  if (slot < 1 || slot > n) detail::throw_precondition("MoiOperator::adjoint_slot", "slot out of range");
  if (w.rows() != d || w.cols() != d) detail::throw_precondition("MoiOperator::adjoint_slot", "functional has wrong shape");

  std::vector<RowMatrix> xt;
  for (auto& x : rotated_arguments(xs)) xt.emplace_back(x);
  std::vector<const int*> clusters;
  for (std::size_t l = 0; l <= n; ++l) clusters.push_back(operators_.spectrum(l).cluster_of.data());
  const Paths paths{&xt, &clusters, &strides_, grid_.data(), n, d};
  const RowMatrix wt = operators_.spectrum(0).eigenvectors.adjoint() * w * operators_.spectrum(n).eigenvectors;

  RowMatrix c = RowMatrix::Zero(d, d);
  const bool parallel = exec == Execution::parallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (Index p = 0; p < d; ++p) {
    AdjointWalk walk{&paths, &wt, slot, p, std::vector<Index>(n + 1, 0), c.data() + p * d};
    walk.run(0, Complex(1.0, 0.0), 0);
  }
  return operators_.spectrum(slot - 1).eigenvectors * ComplexMatrix(c.conjugate()) *
         operators_.spectrum(slot).eigenvectors.adjoint();
}

double MoiOperator::grid_sup() const {
  double best = 0.0;
  for (double v : grid_) best = std::max(best, std::abs(v));
  return best;
}

std::vector<int> MoiOperator::grid_argmax() const {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    if (std::abs(grid_[i]) > std::abs(grid_[arg])) arg = i;
  }
  std::vector<int> out(operators_.size());
  for (std::size_t l = 0; l < out.size(); ++l) {
    out[l] = static_cast<int>(arg / strides_[l]);
    arg %= strides_[l];
  }
  return out;
}

ComplexMatrix apply_moi(const MoiSymbol& phi, const OperatorTuple& a, std::span<const ComplexMatrix> xs,
                        Execution exec) {
  return MoiOperator(phi, a).apply(xs, exec);
}

ComplexMatrix apply_moi_reference(const MoiSymbol& phi, const OperatorTuple& a, std::span<const ComplexMatrix> xs) {
  check_tuple_arity(phi, a, "apply_moi_reference");
  if (xs.size() + 1 != a.size()) detail::throw_precondition("apply_moi_reference", "argument count mismatch");
  const Index d = a.dim();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  std::vector<double> nodes(a.size());
  reference_walk(phi, a, xs, 0, ComplexMatrix(), nodes, out);
  return out;
}

double moi_s2_bound(const MoiSymbol& phi, const OperatorTuple& a) { return MoiOperator(phi, a).grid_sup(); }

SharpnessWitness sharpness_witness(const MoiSymbol& phi, const OperatorTuple& a) {
  const MoiOperator op(phi, a);
  const std::vector<int> arg = op.grid_argmax();
  std::vector<Eigen::VectorXcd> v;
  for (std::size_t l = 0; l < a.size(); ++l) {
    const auto& cl = a.spectrum(l).cluster_of;
    const auto col = std::find(cl.begin(), cl.end(), arg[l]) - cl.begin();
    v.emplace_back(a.spectrum(l).eigenvectors.col(col));
  }
  SharpnessWitness out;
  for (std::size_t l = 1; l < a.size(); ++l) out.xs.emplace_back(v[l - 1] * v[l].adjoint());
  out.bound = op.grid_sup();
  out.achieved = op.apply(out.xs).norm();
  return out;
}

ComplexMatrix ordered_product(std::span<const ComplexMatrix> xs) {
  if (xs.empty()) detail::throw_precondition("ordered_product", "empty product");
  ComplexMatrix out = xs[0];
  for (std::size_t l = 1; l < xs.size(); ++l) out = out * xs[l];
  return out;
}

ComplexMatrix compressed_product(const ComplexMatrix& q, std::span<const ComplexMatrix> xs) {
  ComplexMatrix out = q;
  for (const auto& x : xs) out = out * x * q;
  return out;
}

MoiSymbol truncate_orthant(const MoiSymbol& phi, Sign s) {
  return MoiSymbol::product({phi, MoiSymbol::indicator_orthant(s, phi.arity())});
}

double check_indicator_truncation(const MoiSymbol& phi, const HermitianMatrix& a, std::span<const ComplexMatrix> xs,
                                  Sign s) {
  const auto tuple = OperatorTuple::uniform(a, xs.size() + 1);
  for (double lambda : tuple.spectrum(0).eigenvalues) {
    if (sign_value(s) * lambda < 0.0) {
      std::ostringstream msg;
      msg << "operator is not " << (s == Sign::positive ? "positive" : "negative") << " semidefinite (eigenvalue "
          << lambda << ")";
      detail::throw_precondition("check_indicator_truncation", msg.str());
    }
  }
  return relative_residual(apply_moi(phi, tuple, xs), apply_moi(truncate_orthant(phi, s), tuple, xs));
}

MoiSymbol translate_symbol(const MoiSymbol& phi, double delta) {
  if (delta == 0.0) return phi;
  return MoiSymbol::translate(delta, phi);
}

double check_translation(const MoiSymbol& phi, const HermitianMatrix& a, double delta,
                         std::span<const ComplexMatrix> xs) {
  const std::size_t m = xs.size() + 1;
  const ComplexMatrix lhs = apply_moi(translate_symbol(phi, delta), OperatorTuple::uniform(a, m), xs);
  const ComplexMatrix rhs = apply_moi(phi, OperatorTuple::uniform(a.shifted(delta), m), xs);
  return relative_residual(lhs, rhs);
}

double check_zero_indicator(double c, const HermitianMatrix& a, std::span<const ComplexMatrix> xs) {
  const std::size_t m = xs.size() + 1;
  const auto tuple = OperatorTuple::uniform(a, m);
  const MoiSymbol phi = MoiSymbol::product({MoiSymbol::constant(c, m), MoiSymbol::indicator_zero(m)});
  const ComplexMatrix q = tuple.spectrum(0).projection_where([](double t) { return t == 0.0; });
  return relative_residual(apply_moi(phi, tuple, xs), ComplexMatrix(c * compressed_product(q, xs)));
}

double check_elementary_tensor(const std::vector<std::function<double(double)>>& factors, const OperatorTuple& a,
                               std::span<const ComplexMatrix> xs) {
  const ComplexMatrix lhs = apply_moi(MoiSymbol::elementary_tensor(factors), a, xs);
  auto fn = [&](std::size_t l) {
    return a.spectrum(l).apply([&](double t) { return Complex(factors[l](t), 0.0); });
  };
  ComplexMatrix rhs = fn(0);
  for (std::size_t l = 1; l < a.size(); ++l) rhs = rhs * xs[l - 1] * fn(l);
  return relative_residual(lhs, rhs);
}

Amplification amplify(const OperatorTuple& a, std::span<const ComplexMatrix> xs) {
  const std::size_t m = a.size();
  if (xs.size() + 1 != m) detail::throw_precondition("amplify", "expected one argument fewer than operators");
  const auto size = static_cast<Index>(m);
  ComplexMatrix block = ComplexMatrix::Zero(size * a.dim(), size * a.dim());
  for (Index l = 0; l < size; ++l) {
    block += kron(matrix_unit(size, l, l), a.matrix(static_cast<std::size_t>(l)).matrix());
  }
  Amplification out{HermitianMatrix(block), {}};
  for (Index l = 1; l < size; ++l) {
    const auto& x = xs[static_cast<std::size_t>(l - 1)];
    if (x.rows() != a.dim() || x.cols() != a.dim()) detail::throw_precondition("amplify", "argument shape mismatch");
    out.zs.push_back(kron(matrix_unit(size, l - 1, l), x));
  }
  return out;
}

double check_amplification(const MoiSymbol& phi, const OperatorTuple& a, std::span<const ComplexMatrix> xs) {
  const auto amp = amplify(a, xs);
  const auto size = static_cast<Index>(a.size());
  const ComplexMatrix lhs = apply_moi(phi, OperatorTuple::uniform(amp.block_operator, a.size()), amp.zs);
  const ComplexMatrix rhs = kron(matrix_unit(size, 0, size - 1), apply_moi(phi, a, xs));
  return relative_residual(lhs, rhs);
}

double check_lift_composition(const MoiSymbol& h2, const BivariateSymbol& h3, std::size_t k, const HermitianMatrix& a,
                              std::span<const ComplexMatrix> xs) {
  const std::size_t n = xs.size();
  if (k >= n) detail::throw_precondition("check_lift_composition", "k must satisfy 0 <= k < n");
  const auto tuple = OperatorTuple::uniform(a, n + 1);
  const MoiSymbol h1 = MoiSymbol::product({MoiSymbol::bivariate_lift(h3, n + 1, k, k + 1), h2});
  const ComplexMatrix lhs = apply_moi(h1, tuple, xs);
  const ComplexMatrix inner = apply_moi(MoiSymbol::bivariate_lift(h3, 2, 0, 1), OperatorTuple::uniform(a, 2),
                                        xs.subspan(k, 1));
  const ComplexMatrix rhs = apply_moi(h2, tuple, with_replaced(xs, k, inner));
  return relative_residual(lhs, rhs);
}

double check_variable_elimination(const MoiSymbol& h_reduced, std::size_t d, const HermitianMatrix& a,
                                  std::span<const ComplexMatrix> xs) {
  const std::size_t n = xs.size();
  if (n < 1 || h_reduced.arity() != n) {
    detail::throw_precondition("check_variable_elimination", "reduced symbol must have arity n = number of arguments");
  }
  if (d > n) detail::throw_precondition("check_variable_elimination", "eliminated variable out of range");
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i <= n; ++i) {
    if (i != d) kept.push_back(i);
  }
  const MoiSymbol lifted = MoiSymbol::select(h_reduced, n + 1, kept);
  const ComplexMatrix lhs = apply_moi(lifted, OperatorTuple::uniform(a, n + 1), xs);

  const auto reduced_tuple = OperatorTuple::uniform(a, n);
  ComplexMatrix rhs;
  if (d == 0) {
    rhs = xs[0] * apply_moi(h_reduced, reduced_tuple, xs.subspan(1));
  } else if (d == n) {
    rhs = apply_moi(h_reduced, reduced_tuple, xs.first(n - 1)) * xs[n - 1];
  } else {
    std::vector<ComplexMatrix> merged(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(d - 1));
    merged.push_back(xs[d - 1] * xs[d]);
    merged.insert(merged.end(), xs.begin() + static_cast<std::ptrdiff_t>(d + 1), xs.end());
    rhs = apply_moi(h_reduced, reduced_tuple, merged);
  }
  return relative_residual(lhs, rhs);
}

InvertibleShift ensure_invertible(const HermitianMatrix& a, const ShiftPolicy& policy) {
  const auto spec = eig(a);
  if (!spec.has_zero_eigenvalue()) return {a, 0.0};
  double smallest = kInfinity;
  for (double t : spec.eigenvalues) {
    if (t != 0.0) smallest = std::min(smallest, std::abs(t));
  }
  const double delta = std::isinf(smallest) ? policy.delta : std::min(policy.delta, 0.5 * smallest);
  return {a.shifted(-delta), delta};
}

}  // namespace moilab
