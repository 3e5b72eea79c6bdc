#include "ppvq/tans.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "ppvq/errors.hpp"

namespace ppvq {

namespace {

void check_spread_inputs(const std::vector<std::uint32_t>& symbol_counts,
                         std::uint32_t num_states) {
    if (num_states == 0 || !std::has_single_bit(num_states)) {
        throw std::invalid_argument("state count must be a power of two");
    }
    if (symbol_counts.empty()) {
        throw std::invalid_argument("alphabet must be non-empty");
    }
    std::uint64_t total = 0;
    for (std::uint32_t c : symbol_counts) {
        if (c == 0) {
            throw std::invalid_argument("every symbol needs at least one state");
        }
        total += c;
    }
    if (total != num_states) {
        throw std::invalid_argument("symbol counts must sum to the state count");
    }
}

struct Appearance {
    double position;
    std::uint32_t symbol;
    std::uint32_t index;  // i in [Ls, 2Ls)
};

// 1/ln(1+1/i) for i = 1 .. 2*max(Ls)-1, computed once per spread build;
// preferred positions are table[i]/p_s, equalizing p_s * Pr(i-th subrange)
// with the lg(e)/x state-probability shape.
std::vector<double> reciprocal_log_table(const std::vector<std::uint32_t>& symbol_counts) {
    std::uint32_t max_count = 0;
    for (std::uint32_t c : symbol_counts) max_count = std::max(max_count, c);
    std::vector<double> table(2 * static_cast<std::size_t>(max_count));
    for (std::size_t i = 1; i < table.size(); ++i) {
        table[i] = 1.0 / std::log1p(1.0 / static_cast<double>(i));
    }
    return table;
}

}  // namespace

void SpreadTable::validate() const {
    check_spread_inputs(symbol_counts, num_states);
    if (spread.size() != num_states) {
        throw std::invalid_argument("spread length must equal the state count");
    }
    std::vector<std::uint32_t> seen(symbol_counts.size(), 0);
    for (std::uint32_t s : spread) {
        if (s >= symbol_counts.size()) {
            throw std::invalid_argument("spread refers to a symbol outside the alphabet");
        }
        ++seen[s];
    }
    if (seen != symbol_counts) {
        throw std::invalid_argument("spread appearance counts disagree with symbol counts");
    }
}

std::vector<std::uint32_t> SpreadTable::reduced_indices() const {
    std::vector<std::uint32_t> next(symbol_counts);
    std::vector<std::uint32_t> reduced(spread.size());
    for (std::size_t pos = 0; pos < spread.size(); ++pos) {
        reduced[pos] = next[spread[pos]]++;
    }
    return reduced;
}

void Bitstream::push_bit(bool bit) {
    if ((size_ & 7) == 0) {
        bytes_.push_back(0);
    }
    if (bit) {
        bytes_[size_ >> 3] |= static_cast<std::uint8_t>(0x80u >> (size_ & 7));
    }
    ++size_;
}

bool Bitstream::pop_bit() {
    if (size_ == 0) {
        throw DecodeError("bitstream underflow");
    }
    --size_;
    const bool bit = (bytes_[size_ >> 3] >> (7 - (size_ & 7))) & 1;
    bytes_[size_ >> 3] &= static_cast<std::uint8_t>(~(0x80u >> (size_ & 7)));
    if ((size_ & 7) == 0) {
        bytes_.pop_back();
    }
    return bit;
}

std::vector<std::uint8_t> Bitstream::to_bytes() const { return bytes_; }

Bitstream Bitstream::from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count) {
    if (bytes.size() != (bit_count + 7) / 8) {
        throw DecodeError("bitstream byte count disagrees with the bit count");
    }
    Bitstream out;
    out.bytes_.assign(bytes.begin(), bytes.end());
    out.size_ = bit_count;
    if (!out.bytes_.empty()) {
        // zero the padding so pop/push stay consistent
        const unsigned used = bit_count & 7;
        if (used != 0) {
            out.bytes_.back() &= static_cast<std::uint8_t>(0xff00u >> used);
        }
    }
    return out;
}

SpreadTable spread_fast(const std::vector<std::uint32_t>& symbol_counts,
                        std::uint32_t num_states) {
    check_spread_inputs(symbol_counts, num_states);
    const std::uint32_t step = num_states / 2 + num_states / 8 + 3;
    SpreadTable table;
    table.num_states = num_states;
    table.symbol_counts = symbol_counts;
    table.spread.assign(num_states, 0);
    std::uint32_t pos = 1;
    for (std::uint32_t s = 0; s < symbol_counts.size(); ++s) {
        for (std::uint32_t j = 0; j < symbol_counts[s]; ++j) {
            pos = (pos + step) % num_states;
            table.spread[pos] = s;
        }
    }
    table.validate();  // rejects the degenerate even-step walks
    return table;
}

SpreadTable spread_tuned_sorted(const std::vector<std::uint32_t>& symbol_counts,
                                const Probabilities& p, std::uint32_t num_states) {
    check_spread_inputs(symbol_counts, num_states);
    if (p.size() != symbol_counts.size()) {
        throw std::invalid_argument("probability and count alphabets differ");
    }
    const std::vector<double> inv_log = reciprocal_log_table(symbol_counts);
    std::vector<Appearance> pairs;
    pairs.reserve(num_states);
    for (std::uint32_t s = 0; s < symbol_counts.size(); ++s) {
        for (std::uint32_t i = symbol_counts[s]; i < 2 * symbol_counts[s]; ++i) {
            pairs.push_back({inv_log[i] / p[s], s, i});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Appearance& a, const Appearance& b) {
        return std::tie(a.position, a.symbol, a.index) < std::tie(b.position, b.symbol, b.index);
    });
    SpreadTable table;
    table.num_states = num_states;
    table.symbol_counts = symbol_counts;
    table.spread.reserve(num_states);
    for (const Appearance& a : pairs) {
        table.spread.push_back(a.symbol);
    }
    table.validate();
    return table;
}

SpreadTable spread_tuned_bucketed(const std::vector<std::uint32_t>& symbol_counts,
                                  const Probabilities& p, std::uint32_t num_states) {
    check_spread_inputs(symbol_counts, num_states);
    if (p.size() != symbol_counts.size()) {
        throw std::invalid_argument("probability and count alphabets differ");
    }
    const double lo = static_cast<double>(num_states);
    const double hi = 2.0 * lo - 1.0;
    const std::vector<double> inv_log = reciprocal_log_table(symbol_counts);
    std::vector<std::vector<std::uint32_t>> buckets(num_states);
    for (std::uint32_t s = 0; s < symbol_counts.size(); ++s) {
        for (std::uint32_t i = symbol_counts[s]; i < 2 * symbol_counts[s]; ++i) {
            const double x = inv_log[i] / p[s];
            std::uint32_t slot;
            if (x >= hi) {
                slot = num_states - 1;
            } else if (x <= lo) {
                slot = 0;
            } else {
                slot = static_cast<std::uint32_t>(std::llround(x)) - num_states;
            }
            buckets[slot].push_back(s);
        }
    }
    SpreadTable table;
    table.num_states = num_states;
    table.symbol_counts = symbol_counts;
    table.spread.reserve(num_states);
    for (const auto& bucket : buckets) {
        table.spread.insert(table.spread.end(), bucket.begin(), bucket.end());
    }
    table.validate();
    return table;
}

SpreadTable spread_from_pair_masses(const std::vector<std::uint32_t>& symbol_counts,
                                    const std::vector<double>& masses,
                                    std::uint32_t num_states) {
    check_spread_inputs(symbol_counts, num_states);
    if (masses.size() != num_states) {
        throw std::invalid_argument("need one mass per symbol appearance");
    }
    std::vector<Appearance> pairs;
    pairs.reserve(num_states);
    std::size_t at = 0;
    for (std::uint32_t s = 0; s < symbol_counts.size(); ++s) {
        for (std::uint32_t i = symbol_counts[s]; i < 2 * symbol_counts[s]; ++i) {
            pairs.push_back({masses[at++], s, i});
        }
    }
    // heaviest first; the per-symbol i order re-emerges downstream because
    // reduced indices are assigned by appearance order
    std::sort(pairs.begin(), pairs.end(), [](const Appearance& a, const Appearance& b) {
        return std::tie(b.position, a.symbol, a.index) < std::tie(a.position, b.symbol, b.index);
    });
    SpreadTable table;
    table.num_states = num_states;
    table.symbol_counts = symbol_counts;
    table.spread.reserve(num_states);
    for (const Appearance& a : pairs) {
        table.spread.push_back(a.symbol);
    }
    table.validate();
    return table;
}

TansCoder::TansCoder(SpreadTable table) : table_(std::move(table)) {
    table_.validate();
    const std::uint32_t num_states = table_.num_states;
    state_bits_ = static_cast<std::uint32_t>(std::bit_width(num_states) - 1);

    decode_symbol_.resize(num_states);
    decode_bits_.resize(num_states);
    decode_base_.resize(num_states);
    encode_offset_.resize(table_.alphabet_size() + 1, 0);
    for (std::size_t s = 0; s < table_.alphabet_size(); ++s) {
        encode_offset_[s + 1] = encode_offset_[s] + table_.symbol_counts[s];
    }
    encode_table_.resize(num_states);

    const std::vector<std::uint32_t> reduced = table_.reduced_indices();
    for (std::uint32_t pos = 0; pos < num_states; ++pos) {
        const std::uint32_t symbol = table_.spread[pos];
        const std::uint32_t i = reduced[pos];
        const std::uint32_t bits =
            state_bits_ - (static_cast<std::uint32_t>(std::bit_width(i)) - 1);
        decode_symbol_[pos] = symbol;
        decode_bits_[pos] = static_cast<std::uint8_t>(bits);
        decode_base_[pos] = i << bits;
        encode_table_[encode_offset_[symbol] + (i - table_.symbol_counts[symbol])] =
            num_states + pos;
    }
}

std::uint32_t TansCoder::encode_step(std::uint32_t state, std::uint32_t symbol,
                                     Bitstream& bits) const {
    if (symbol >= table_.alphabet_size()) {
        throw std::invalid_argument("symbol outside the alphabet");
    }
    if (state < table_.num_states || state >= 2 * table_.num_states) {
        throw std::invalid_argument("state outside [L, 2L)");
    }
    const std::uint32_t count = table_.symbol_counts[symbol];
    while (state >= 2 * count) {
        bits.push_bit(state & 1);
        state >>= 1;
    }
    return encode_table_[encode_offset_[symbol] + (state - count)];
}

std::pair<std::uint32_t, std::uint32_t> TansCoder::decode_step(std::uint32_t state,
                                                               Bitstream& bits) const {
    if (state < table_.num_states || state >= 2 * table_.num_states) {
        throw DecodeError("state outside [L, 2L)");
    }
    const std::uint32_t pos = state - table_.num_states;
    std::uint32_t prev = decode_base_[pos];
    for (std::uint32_t b = decode_bits_[pos]; b > 0; --b) {
        prev |= static_cast<std::uint32_t>(bits.pop_bit()) << (b - 1);
    }
    return {decode_symbol_[pos], prev};
}

TansCoder::Encoded TansCoder::encode(std::span<const std::uint32_t> symbols) const {
    Encoded out;
    std::uint32_t state = initial_state();
    for (std::size_t j = symbols.size(); j > 0; --j) {
        state = encode_step(state, symbols[j - 1], out.bits);
    }
    out.final_state = state;
    return out;
}

std::vector<std::uint32_t> TansCoder::decode(Bitstream bits, std::uint32_t final_state,
                                             std::size_t count) const {
    std::vector<std::uint32_t> out(count);
    std::uint32_t state = final_state;
    for (std::size_t j = 0; j < count; ++j) {
        const auto [symbol, prev] = decode_step(state, bits);
        out[j] = symbol;
        state = prev;
    }
    if (!bits.empty()) {
        throw DecodeError("bitstream not fully consumed");
    }
    if (state != initial_state()) {
        throw DecodeError("stream did not return to the initial state");
    }
    return out;
}

}  // namespace ppvq
