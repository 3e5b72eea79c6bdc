#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ppvq/count_vector.hpp"

namespace ppvq {

/// Encoded distribution header. Wire layout:
///   varint(D), varint(K), payload bytes, 4-byte final coder state (LE).
/// The payload is the streaming coder's renormalization output; decoding
/// consumes exactly the bytes encoding produced.
struct HeaderBytes {
    std::vector<std::uint8_t> bytes;
    std::size_t prefix_size = 0;  // the two varints

    std::size_t payload_size() const { return bytes.size() - prefix_size - 4; }
    double payload_bits() const { return 8.0 * static_cast<double>(payload_size()); }
};

/// Serialize a count vector under the conditional composition model,
/// coordinate by coordinate. Requires K < 2^16 so every feasible value
/// keeps a nonzero scaled frequency.
HeaderBytes stream_encode_header(const CountVector& q);

/// Inverse of stream_encode_header. The span must hold exactly one header;
/// corrupt, truncated or trailing input raises DecodeError.
CountVector stream_decode_header(std::span<const std::uint8_t> bytes);

}  // namespace ppvq
