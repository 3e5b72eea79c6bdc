#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppvq/probabilities.hpp"

namespace ppvq {

/// Assignment of symbols to the L automaton states {L, ..., 2L-1}, stored
/// at offsets 0..L-1. Symbol s appears exactly symbol_counts[s] times, so
/// it is used with implied probability symbol_counts[s] / L.
struct SpreadTable {
    std::uint32_t num_states = 0;               // L, a power of two
    std::vector<std::uint32_t> symbol_counts;   // Ls, all >= 1, summing to L
    std::vector<std::uint32_t> spread;          // state offset -> symbol

    std::size_t alphabet_size() const { return symbol_counts.size(); }

    /// Reduced index per state offset: the j-th appearance of symbol s in
    /// state order carries index Ls[s] + j. Drives both coder tables and
    /// the automaton transition structure.
    std::vector<std::uint32_t> reduced_indices() const;

    /// Throws std::invalid_argument when the invariants fail.
    void validate() const;
};

/// Bit stack: reads come back in the reverse order of writes. Serialized
/// most-significant-bit-first into bytes, last partial byte zero-padded.
class Bitstream {
public:
    void push_bit(bool bit);
    bool pop_bit();
    std::size_t bit_count() const { return size_; }
    bool empty() const { return size_ == 0; }

    std::vector<std::uint8_t> to_bytes() const;
    static Bitstream from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count);

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t size_ = 0;
};

/// Modulo-step filling: the cursor starts at 1 and advances by
/// L/2 + L/8 + 3 per appearance, symbols in index order. The walk covers
/// all states when the step is odd, which holds for every power of two
/// except L in {2, 8}; those sizes are rejected by validation.
SpreadTable spread_fast(const std::vector<std::uint32_t>& symbol_counts, std::uint32_t num_states);

/// Preferred-position spread: each appearance (s, i), i in [Ls, 2Ls), wants
/// state x = 1 / (p_s ln(1 + 1/i)); all pairs are sorted by position
/// (ties: symbol index, then i) and fill the states in that order.
SpreadTable spread_tuned_sorted(const std::vector<std::uint32_t>& symbol_counts,
                                const Probabilities& p, std::uint32_t num_states);

/// Linear-time variant: preferred positions round into one of L buckets
/// (clamped to [L, 2L-1]), buckets scanned in order, insertion order within
/// a bucket.
SpreadTable spread_tuned_bucketed(const std::vector<std::uint32_t>& symbol_counts,
                                  const Probabilities& p, std::uint32_t num_states);

/// Refine the tuned spread by replacing the lg(e)/x state-distribution
/// guess with the measured stationary distribution of the current
/// automaton, `iterations` times. Defined alongside the automaton
/// machinery.
SpreadTable spread_tuned_iterated(const std::vector<std::uint32_t>& symbol_counts,
                                  const Probabilities& p, std::uint32_t num_states,
                                  std::uint32_t iterations);

/// Build a spread from per-appearance masses (generation order: for each
/// symbol s, i = Ls..2Ls-1): pairs sorted by descending mass (ties: symbol
/// index, then i) fill states from L upward.
SpreadTable spread_from_pair_masses(const std::vector<std::uint32_t>& symbol_counts,
                                    const std::vector<double>& masses,
                                    std::uint32_t num_states);

/// Encode/decode tables for the automaton defined by a spread.
///
/// Encoding a symbol from state x in [L, 2L) first streams out least-
/// significant bits of x until x lands in [Ls, 2Ls), then jumps to that
/// reduced value's appearance of s in the spread. Decoding inverts one
/// step per symbol. The whole stream is LIFO: the encoder walks its input
/// backwards so the decoder emits it forwards.
class TansCoder {
public:
    explicit TansCoder(SpreadTable table);

    std::uint32_t num_states() const { return table_.num_states; }
    std::size_t alphabet_size() const { return table_.alphabet_size(); }
    std::uint32_t initial_state() const { return table_.num_states; }
    const SpreadTable& spread() const { return table_; }

    /// One encoding step; returns the successor state.
    std::uint32_t encode_step(std::uint32_t state, std::uint32_t symbol, Bitstream& bits) const;
    /// One decoding step; returns {symbol, predecessor state}.
    std::pair<std::uint32_t, std::uint32_t> decode_step(std::uint32_t state, Bitstream& bits) const;

    struct Encoded {
        Bitstream bits;
        std::uint32_t final_state;
    };
    Encoded encode(std::span<const std::uint32_t> symbols) const;

    /// Reproduces the symbol sequence from encode()'s output; count must be
    /// the encoded length. Raises DecodeError on underflow or when the
    /// stream fails to return to the initial state.
    std::vector<std::uint32_t> decode(Bitstream bits, std::uint32_t final_state,
                                      std::size_t count) const;

private:
    SpreadTable table_;
    std::uint32_t state_bits_ = 0;                // lg L
    std::vector<std::uint32_t> decode_symbol_;    // per state offset
    std::vector<std::uint8_t> decode_bits_;       // per state offset
    std::vector<std::uint32_t> decode_base_;      // per state offset: i << bits
    std::vector<std::uint32_t> encode_table_;     // appearance -> state, per symbol
    std::vector<std::uint32_t> encode_offset_;    // symbol -> start in encode_table_
};

}  // namespace ppvq
