#include "ppvq/automaton.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ppvq/errors.hpp"
#include "ppvq/probmodel.hpp"

namespace ppvq {

namespace {

constexpr double kIterationTolerance = 1e-13;
constexpr std::uint64_t kMaxIterations = 1000000;
constexpr std::uint32_t kDenseFallbackLimit = 256;

std::vector<double> initial_profile(std::uint32_t num_states) {
    // lg(e)/x over x in [L, 2L), normalized
    std::vector<double> rho(num_states);
    double total = 0.0;
    for (std::uint32_t pos = 0; pos < num_states; ++pos) {
        rho[pos] = 1.0 / static_cast<double>(num_states + pos);
        total += rho[pos];
    }
    for (double& v : rho) {
        v /= total;
    }
    return rho;
}

void apply_transition(const AutomatonModel& model, const std::vector<double>& rho,
                      std::vector<double>& prefix, std::vector<double>& out) {
    const std::uint32_t n = model.num_states;
    prefix[0] = 0.0;
    for (std::uint32_t pos = 0; pos < n; ++pos) {
        prefix[pos + 1] = prefix[pos] + rho[pos];
    }
    for (std::uint32_t pos = 0; pos < n; ++pos) {
        out[pos] = model.symbol_prob[pos] * (prefix[model.src_hi[pos]] - prefix[model.src_lo[pos]]);
    }
}

// Both reachability directions from state offset 0 must cover the chain;
// otherwise the stationary vector is not unique.
bool strongly_connected(const AutomatonModel& model) {
    const std::uint32_t n = model.num_states;
    const std::size_t alphabet = model.source.size();

    // forward: successor per (state, symbol) via each symbol's appearance list
    std::vector<std::uint32_t> app_offset(alphabet + 1, 0);
    for (std::uint32_t pos = 0; pos < n; ++pos) {
        ++app_offset[model.symbol[pos] + 1];
    }
    for (std::size_t s = 0; s < alphabet; ++s) {
        app_offset[s + 1] += app_offset[s];
    }
    std::vector<std::uint32_t> appearances(n);
    {
        std::vector<std::uint32_t> cursor(app_offset.begin(), app_offset.end() - 1);
        for (std::uint32_t pos = 0; pos < n; ++pos) {
            appearances[cursor[model.symbol[pos]]++] = pos;
        }
    }
    std::vector<std::uint32_t> counts(alphabet);
    for (std::size_t s = 0; s < alphabet; ++s) {
        counts[s] = app_offset[s + 1] - app_offset[s];
    }

    std::vector<char> seen(n, 0);
    std::vector<std::uint32_t> queue;
    queue.reserve(n);
    seen[0] = 1;
    queue.push_back(0);
    std::size_t visited = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::uint32_t state = n + queue[head];
        for (std::size_t s = 0; s < alphabet; ++s) {
            std::uint32_t x = state;
            while (x >= 2 * counts[s]) {
                x >>= 1;
            }
            const std::uint32_t dest = appearances[app_offset[s] + (x - counts[s])];
            if (!seen[dest]) {
                seen[dest] = 1;
                queue.push_back(dest);
                ++visited;
            }
        }
    }
    if (visited != n) return false;

    // backward: predecessors of a destination are its source interval
    std::fill(seen.begin(), seen.end(), 0);
    queue.clear();
    seen[0] = 1;
    queue.push_back(0);
    visited = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::uint32_t pos = queue[head];
        for (std::uint32_t src = model.src_lo[pos]; src < model.src_hi[pos]; ++src) {
            if (!seen[src]) {
                seen[src] = 1;
                queue.push_back(src);
                ++visited;
            }
        }
    }
    return visited == n;
}

// Gaussian elimination on (M - I) with the normalization row substituted;
// only used for small L when iteration stalls.
StationaryDistribution dense_stationary(const AutomatonModel& model) {
    const std::uint32_t n = model.num_states;
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::uint32_t pos = 0; pos < n; ++pos) {
        for (std::uint32_t src = model.src_lo[pos]; src < model.src_hi[pos]; ++src) {
            a[pos][src] += model.symbol_prob[pos];
        }
        a[pos][pos] -= 1.0;
    }
    for (std::uint32_t col = 0; col < n; ++col) {
        a[0][col] = 1.0;
    }
    a[0][n] = 1.0;

    for (std::uint32_t col = 0; col < n; ++col) {
        std::uint32_t pivot = col;
        for (std::uint32_t row = col + 1; row < n; ++row) {
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
        }
        if (std::abs(a[pivot][col]) < 1e-14) {
            throw ConvergenceError("stationary solve: singular system");
        }
        std::swap(a[col], a[pivot]);
        for (std::uint32_t row = col + 1; row < n; ++row) {
            const double f = a[row][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::uint32_t j = col; j <= n; ++j) {
                a[row][j] -= f * a[col][j];
            }
        }
    }
    StationaryDistribution result;
    result.rho.assign(n, 0.0);
    for (std::uint32_t row = n; row-- > 0;) {
        double v = a[row][n];
        for (std::uint32_t j = row + 1; j < n; ++j) {
            v -= a[row][j] * result.rho[j];
        }
        result.rho[row] = v / a[row][row];
    }
    double total = 0.0;
    for (double v : result.rho) total += v;
    for (double& v : result.rho) v /= total;
    return result;
}

}  // namespace

std::uint32_t bits_for_reduced_index(std::uint32_t num_states, std::uint32_t reduced_index) {
    if (!std::has_single_bit(num_states)) {
        throw std::invalid_argument("state count must be a power of two");
    }
    if (reduced_index == 0 || reduced_index >= 2 * num_states) {
        throw std::invalid_argument("reduced index outside [1, 2L)");
    }
    const std::uint32_t lg_states = static_cast<std::uint32_t>(std::bit_width(num_states)) - 1;
    const std::uint32_t lg_index = static_cast<std::uint32_t>(std::bit_width(reduced_index)) - 1;
    return lg_states - std::min(lg_index, lg_states);
}

AutomatonModel build_model(const SpreadTable& spread, const Probabilities& real_p) {
    spread.validate();
    if (real_p.size() != spread.alphabet_size()) {
        throw std::invalid_argument("source distribution does not match the spread alphabet");
    }
    const std::uint32_t n = spread.num_states;
    AutomatonModel model;
    model.num_states = n;
    model.symbol = spread.spread;
    model.reduced = spread.reduced_indices();
    model.bits.resize(n);
    model.src_lo.resize(n);
    model.src_hi.resize(n);
    model.symbol_prob.resize(n);
    model.source = real_p.values();
    for (std::uint32_t pos = 0; pos < n; ++pos) {
        const std::uint32_t i = model.reduced[pos];
        const std::uint32_t b = bits_for_reduced_index(n, i);
        model.bits[pos] = static_cast<std::uint8_t>(b);
        model.src_lo[pos] = (i << b) - n;
        model.src_hi[pos] = ((i + 1) << b) - n;
        model.symbol_prob[pos] = real_p[model.symbol[pos]];
    }
    return model;
}

StationaryDistribution stationary(const AutomatonModel& model) {
    const std::uint32_t n = model.num_states;
    if (n == 0) {
        throw std::invalid_argument("empty model");
    }
    if (!strongly_connected(model)) {
        throw ReducibleChainError("reducible chain: no unique stationary distribution");
    }

    StationaryDistribution result;
    result.rho = initial_profile(n);
    std::vector<double> prefix(n + 1);
    std::vector<double> next(n);
    for (std::uint64_t iter = 0; iter < kMaxIterations; ++iter) {
        apply_transition(model, result.rho, prefix, next);
        double diff = 0.0;
        for (std::uint32_t pos = 0; pos < n; ++pos) {
            diff = std::max(diff, std::abs(next[pos] - result.rho[pos]));
        }
        result.rho.swap(next);
        if (diff < kIterationTolerance) {
            return result;
        }
    }
    if (n <= kDenseFallbackLimit) {
        return dense_stationary(model);
    }
    throw ConvergenceError("stationary distribution did not converge");
}

double mean_bits_per_symbol(const AutomatonModel& model, const StationaryDistribution& rho) {
    const std::uint32_t n = model.num_states;
    if (rho.rho.size() != n) {
        throw std::invalid_argument("distribution size does not match the model");
    }
    std::vector<double> prefix(n + 1, 0.0);
    for (std::uint32_t pos = 0; pos < n; ++pos) {
        prefix[pos + 1] = prefix[pos] + rho.rho[pos];
    }
    double bits = 0.0;
    for (std::uint32_t pos = 0; pos < n; ++pos) {
        bits += static_cast<double>(model.bits[pos]) * model.symbol_prob[pos] *
                (prefix[model.src_hi[pos]] - prefix[model.src_lo[pos]]);
    }
    return bits;
}

double automaton_delta_h(const Probabilities& p, const SpreadTable& spread) {
    const double h = entropy(p);
    if (h <= 0.0) {
        return 0.0;
    }
    const AutomatonModel model = build_model(spread, p);
    const StationaryDistribution rho = stationary(model);
    return (mean_bits_per_symbol(model, rho) - h) / h;
}

SpreadTable spread_tuned_iterated(const std::vector<std::uint32_t>& symbol_counts,
                                  const Probabilities& p, std::uint32_t num_states,
                                  std::uint32_t iterations) {
    if (iterations == 0) {
        throw std::invalid_argument("spread_tuned_iterated requires at least one iteration");
    }
    SpreadTable table = spread_tuned_sorted(symbol_counts, p, num_states);
    if (symbol_counts.size() == 1) {
        return table;  // re-sorting a one-symbol alphabet cannot move anything
    }
    std::vector<double> masses(num_states);
    for (std::uint32_t round = 0; round < iterations; ++round) {
        const AutomatonModel model = build_model(table, p);
        const StationaryDistribution rho = stationary(model);
        std::vector<double> prefix(num_states + 1, 0.0);
        for (std::uint32_t pos = 0; pos < num_states; ++pos) {
            prefix[pos + 1] = prefix[pos] + rho.rho[pos];
        }
        // mass of appearance (s, i): p_s * Pr(source lands in range i)
        std::size_t at = 0;
        for (std::uint32_t s = 0; s < symbol_counts.size(); ++s) {
            for (std::uint32_t i = symbol_counts[s]; i < 2 * symbol_counts[s]; ++i) {
                const std::uint32_t b = bits_for_reduced_index(num_states, i);
                const std::uint32_t lo = (i << b) - num_states;
                const std::uint32_t hi = ((i + 1) << b) - num_states;
                masses[at++] = p[s] * (prefix[hi] - prefix[lo]);
            }
        }
        table = spread_from_pair_masses(symbol_counts, masses, num_states);
    }
    return table;
}

}  // namespace ppvq
