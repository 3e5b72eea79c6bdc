#pragma once

#include <cstdint>
#include <vector>

#include "ppvq/probabilities.hpp"
#include "ppvq/tans.hpp"

namespace ppvq {

/// Bits emitted when the state renormalizes down to reduced index i:
/// lg L - floor(lg i), for i in [1, 2L).
std::uint32_t bits_for_reduced_index(std::uint32_t num_states, std::uint32_t reduced_index);

/// Transition structure of a coding automaton evaluated against the true
/// source distribution. Destination state `pos` is reached from the source
/// interval [src_lo[pos], src_hi[pos]) with probability of the symbol the
/// spread placed at pos, so every column of the implied L x L matrix sums
/// to 1. Storage is one interval per destination instead of the dense
/// matrix.
struct AutomatonModel {
    std::uint32_t num_states = 0;
    std::vector<std::uint32_t> symbol;       // per destination offset
    std::vector<std::uint32_t> reduced;      // reduced index i
    std::vector<std::uint8_t> bits;          // renormalization bits for i
    std::vector<std::uint32_t> src_lo;       // source interval begin (offset)
    std::vector<std::uint32_t> src_hi;       // source interval end (offset)
    std::vector<double> symbol_prob;         // true probability of `symbol`
    std::vector<double> source;              // the true distribution
};

/// Assemble the model for a spread against the true source probabilities
/// (which generally differ from the quantized ones the spread encodes).
AutomatonModel build_model(const SpreadTable& spread, const Probabilities& real_p);

/// State occupation probabilities: the fixed point of the transition
/// matrix, indexed by state offset.
struct StationaryDistribution {
    std::vector<double> rho;
};

/// Solve M rho = rho by power iteration from the lg(e)/x profile;
/// reducible chains and non-convergence raise the matching errors. Small
/// systems fall back to a dense solve when iteration stalls.
StationaryDistribution stationary(const AutomatonModel& model);

/// Expected emitted bits per symbol under the stationary distribution.
/// Never below the source entropy.
double mean_bits_per_symbol(const AutomatonModel& model, const StationaryDistribution& rho);

/// Relative redundancy (mean bits - H(p)) / H(p) of coding p with the
/// automaton. Zero-entropy sources return 0.
double automaton_delta_h(const Probabilities& p, const SpreadTable& spread);

}  // namespace ppvq
