#pragma once

#include <cstdint>

#include "ppvq/probabilities.hpp"

namespace ppvq {

/// Shannon entropy -sum_s p_s lg(p_s) in bits/symbol. Lies in [0, lg D].
double entropy(const Probabilities& p);

/// Exact Kullback-Leibler divergence sum_s p_s lg(p_s/q_s) in bits/symbol:
/// the extra cost of coding a p-source with a q-model. Throws on dimension
/// mismatch.
double kl_divergence(const Probabilities& p, const Probabilities& q);

/// Second-order Taylor form of the KL divergence,
/// (1/ln 4) * sum_s (p_s - q_s)^2 / p_s. Agrees with kl_divergence to
/// second order as q -> p.
double kl_quadratic(const Probabilities& p, const Probabilities& q);

/// Binary entropy h(x) = -x lg x - (1-x) lg(1-x), with h(0) = h(1) = 0.
double binary_entropy(double x);

/// Exact bits/symbol penalty -lg(1 - k*q_min) of reserving probability
/// q_min for each of k unused symbols (the remaining symbols rescale by
/// 1 - k*q_min). Requires 0 <= k*q_min < 1.
double zero_symbol_penalty(std::uint64_t k, double q_min);

/// Exact cost lg C(D, k) in bits of pointing out k unused symbols among D,
/// evaluated through log-gamma.
double unused_marking_cost(std::uint64_t dim, std::uint64_t k);

/// The entropy-bound estimate D * h(k/D) for the same marking cost;
/// always >= unused_marking_cost(dim, k).
double unused_marking_estimate(std::uint64_t dim, std::uint64_t k);

struct PenaltyReport {
    double header_bits = 0.0;  // c(q)
    double delta_h = 0.0;      // bits/symbol
    double total = 0.0;        // header_bits + N * delta_h
};

/// Description-length compromise for a frame of n_symbols symbols:
/// total = header_bits + n_symbols * delta_h.
PenaltyReport mdl_penalty(double header_bits, std::uint64_t n_symbols, double delta_h);

/// Uniformly drawn i.i.d. coordinates in (0,1), normalized to sum 1.
/// Deterministic per (dim, seed): mt19937_64 with 53-bit doubles, so the
/// output is identical across platforms. Note this is not a Dirichlet
/// draw; it is the plain normalize-uniforms recipe.
Probabilities random_simplex(std::size_t dim, std::uint64_t seed);

}  // namespace ppvq
