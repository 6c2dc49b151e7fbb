#pragma once

// Seeded random matrices and node sets.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "moilab/matrix.hpp"
#include "moilab/reduction.hpp"

namespace moilab {

using Rng = std::mt19937_64;

/// Independent stream keyed by (seed, a, b).
Rng keyed_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

enum class SpectrumConstraint { any, psd, nsd };

SpectrumConstraint parse_constraint(std::string_view name);
std::string_view to_string(SpectrumConstraint c);

/// Complex Ginibre matrix with standard complex normal entries.
ComplexMatrix gaussian_matrix(Index rows, Index cols, Rng& rng);

/// Haar-distributed unitary (QR of a Ginibre matrix with the phase fix).
ComplexMatrix haar_unitary(Index d, Rng& rng);

/// GUE sample scaled to spectrum roughly inside [-2, 2].
HermitianMatrix gue(Index d, Rng& rng);

/// U diag(eigenvalues) U* with U Haar.
HermitianMatrix with_spectrum(std::span<const double> eigenvalues, Rng& rng);

/// d values uniform on [lo, hi].
std::vector<double> uniform_values(Index d, double lo, double hi, Rng& rng);

/// d sorted values in [lo, hi] with consecutive gaps >= min_gap and
/// |value| >= min_abs.
std::vector<double> gapped_values(Index d, double lo, double hi, double min_gap, double min_abs, Rng& rng);

/// Operator draw for experiments: even draws use GUE, odd draws uniform
/// eigenvalues on [-2, 2] with a Haar basis. psd / nsd replace eigenvalues
/// by +|l| / -|l|.
HermitianMatrix sample_operator(Index d, SpectrumConstraint c, std::uint64_t draw, Rng& rng);

/// Ginibre product of a random rank in [1, d].
ComplexMatrix random_rank_matrix(Index d, Rng& rng);

/// Random (p_1, ..., p_n) with sum 1/p_l = 1.
ExponentTuple random_holder_tuple(std::size_t n, Rng& rng);

}  // namespace moilab
