#include "ppvq/header_codec.hpp"

#include <algorithm>
#include <limits>

#include "ppvq/composition.hpp"
#include "ppvq/errors.hpp"

namespace ppvq {

namespace {

// 32-bit state, byte-wise renormalization, interval [2^23, 2^31).
constexpr std::uint32_t kStateLow = 1u << 23;
constexpr std::uint32_t kScaleBits = CompositionModel::kScaleBits;
constexpr std::uint32_t kMaxDim = 1u << 20;
constexpr std::uint32_t kMaxSum = (1u << kScaleBits) - 1;

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<std::uint8_t>(v) | 0x80);
        v >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint64_t get_varint(std::span<const std::uint8_t> bytes, std::size_t& pos) {
    std::uint64_t v = 0;
    for (unsigned shift = 0; shift < 64; shift += 7) {
        if (pos >= bytes.size()) {
            throw DecodeError("header truncated inside varint");
        }
        const std::uint8_t b = bytes[pos++];
        v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
        if (!(b & 0x80)) return v;
    }
    throw DecodeError("varint overlong");
}

struct Step {
    std::uint32_t s;  // coordinates remaining, >= 2
    std::uint32_t k;  // remaining sum, >= 1
    std::uint32_t value;
};

}  // namespace

HeaderBytes stream_encode_header(const CountVector& q) {
    const std::size_t dim = q.size();
    if (dim == 0 || dim > kMaxDim) {
        throw std::invalid_argument("header dimension out of range");
    }
    if (q.total() > kMaxSum) {
        throw std::invalid_argument("header total too large for the streaming coder");
    }
    const CompositionModel model(static_cast<std::uint32_t>(dim),
                                 static_cast<std::uint32_t>(q.total()));

    // Gather the coded steps walking the vector backwards (model coordinate
    // s = remaining count); the coder is last-in-first-out, so decoding will
    // then produce coordinates front to back. The final coordinate (s = 1)
    // and exhausted tails (k = 0) are forced and never coded.
    std::vector<Step> steps;
    steps.reserve(dim);
    std::uint32_t k = 0;
    for (std::size_t j = dim; j >= 1; --j) {
        k += q[j - 1];
        const std::uint32_t s = static_cast<std::uint32_t>(dim - j + 1);
        if (s >= 2 && k > 0) {
            steps.push_back({s, k, q[j - 1]});
        }
    }

    std::uint32_t state = kStateLow;
    std::vector<std::uint8_t> emitted;
    for (const Step& step : steps) {
        const std::vector<std::uint32_t> freq = model.scaled_frequencies(step.s, step.k);
        std::uint32_t start = 0;
        for (std::uint32_t i = 0; i < step.value; ++i) {
            start += freq[i];
        }
        const std::uint32_t f = freq[step.value];
        const std::uint32_t limit = ((kStateLow >> kScaleBits) << 8) * f;
        while (state >= limit) {
            emitted.push_back(static_cast<std::uint8_t>(state));
            state >>= 8;
        }
        state = ((state / f) << kScaleBits) + (state % f) + start;
    }

    HeaderBytes header;
    put_varint(header.bytes, dim);
    put_varint(header.bytes, q.total());
    header.prefix_size = header.bytes.size();
    // renormalization bytes are replayed in reverse while decoding
    header.bytes.insert(header.bytes.end(), emitted.rbegin(), emitted.rend());
    for (int b = 0; b < 4; ++b) {
        header.bytes.push_back(static_cast<std::uint8_t>(state >> (8 * b)));
    }
    return header;
}

CountVector stream_decode_header(std::span<const std::uint8_t> bytes) {
    std::size_t pos = 0;
    const std::uint64_t dim = get_varint(bytes, pos);
    const std::uint64_t sum = get_varint(bytes, pos);
    if (dim == 0 || dim > kMaxDim) {
        throw DecodeError("decoded dimension out of range");
    }
    if (sum > kMaxSum) {
        throw DecodeError("decoded total out of range");
    }
    if (bytes.size() < pos + 4) {
        throw DecodeError("header too short for the final state");
    }
    const std::size_t payload_end = bytes.size() - 4;
    std::uint32_t state = 0;
    for (int b = 0; b < 4; ++b) {
        state |= static_cast<std::uint32_t>(bytes[payload_end + b]) << (8 * b);
    }
    if (state < kStateLow) {
        throw DecodeError("final coder state below the normalization interval");
    }

    const CompositionModel model(static_cast<std::uint32_t>(dim),
                                 static_cast<std::uint32_t>(sum));
    std::vector<std::uint32_t> q(dim, 0);
    std::vector<std::uint32_t> cum;
    std::uint32_t k = static_cast<std::uint32_t>(sum);
    for (std::uint64_t j = 1; j <= dim; ++j) {
        const std::uint32_t s = static_cast<std::uint32_t>(dim - j + 1);
        std::uint32_t value;
        if (s == 1) {
            value = k;
        } else if (k == 0) {
            value = 0;
        } else {
            const std::vector<std::uint32_t> freq = model.scaled_frequencies(s, k);
            cum.assign(freq.size() + 1, 0);
            for (std::size_t i = 0; i < freq.size(); ++i) {
                cum[i + 1] = cum[i] + freq[i];
            }
            const std::uint32_t slot = state & ((1u << kScaleBits) - 1);
            const auto it = std::upper_bound(cum.begin(), cum.end(), slot);
            value = static_cast<std::uint32_t>(it - cum.begin()) - 1;
            state = freq[value] * (state >> kScaleBits) + slot - cum[value];
            while (state < kStateLow) {
                if (pos >= payload_end) {
                    throw DecodeError("header payload underflow");
                }
                state = (state << 8) | bytes[pos++];
            }
        }
        q[j - 1] = value;
        k -= value;
    }
    if (pos != payload_end) {
        throw DecodeError("header payload has trailing bytes");
    }
    if (state != kStateLow) {
        throw DecodeError("final coder state mismatch");
    }
    return CountVector(std::move(q));
}

}  // namespace ppvq
