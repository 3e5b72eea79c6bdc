#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ppvq/count_vector.hpp"
#include "ppvq/probabilities.hpp"

namespace ppvq {

/// Reconstruction-side deformation: q_s proportional to Q_s^power + offset.
/// The power densifies quantization at low probabilities; the offset keeps
/// every reconstructed probability positive. Stated defaults are the tuned
/// operating point.
struct DeformParams {
    double power = 1.2;
    double offset = 0.15;
    /// When set, overrides the scalar offset per symbol.
    std::optional<std::vector<double>> per_symbol_offset;
};

/// Quantize p to counts summing exactly to K. The target is the power-
/// deformed distribution t_s = p_s^(1/w) / sum p^(1/w); counts start at
/// round(K * t) and the sum is then repaired one unit at a time, always
/// picking the coordinates with the smallest quadratic penalty increment
/// ((Q_s + df - K t_s)^2 - (Q_s - K t_s)^2) / (K t_s), ties to the lowest
/// index, never driving a count below min_count.
///
/// min_count = 0 is the plain quantizer; min_count = 1 is the variant for
/// entropy-coder tables where every symbol needs a nonzero count.
CountVector quantize(const Probabilities& p, std::uint64_t k_total, double power,
                     std::uint32_t min_count = 0);

/// Decoder-side reconstruction q_s = (Q_s^w + o_s) / sum_s' (Q_s'^w + o_s').
/// Throws if every numerator is zero, or (via Probabilities) if some entry
/// comes out non-positive.
Probabilities reconstruct(const CountVector& counts, const DeformParams& params);

/// Relative penalty of the full quantize/reconstruct cycle:
/// kl_divergence(p, reconstruct(quantize(p, K, w), params)) / entropy(p).
/// Zero-entropy (single-symbol) inputs return 0.
double quantization_loss(const Probabilities& p, std::uint64_t k_total,
                         const DeformParams& params, std::uint32_t min_count = 0);

}  // namespace ppvq
