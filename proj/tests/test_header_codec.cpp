#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ppvq/composition.hpp"
#include "ppvq/errors.hpp"
#include "ppvq/header_codec.hpp"
#include "ppvq/probmodel.hpp"
#include "ppvq/quantizer.hpp"

using namespace ppvq;

namespace {

CountVector random_counts(std::mt19937_64& rng, std::size_t dim, std::uint32_t sum) {
    // uniform-ish split: throw sum balls into dim slots
    std::vector<std::uint32_t> q(dim, 0);
    for (std::uint32_t b = 0; b < sum; ++b) {
        ++q[rng() % dim];
    }
    return CountVector(q);
}

}  // namespace

TEST_CASE("single symbol header is prefix plus state only") {
    const CountVector q({37});
    const HeaderBytes h = stream_encode_header(q);
    CHECK(h.payload_size() == 0);
    CHECK(stream_decode_header(h.bytes) == q);
}

TEST_CASE("zero total header") {
    const CountVector q({0, 0, 0});
    const HeaderBytes h = stream_encode_header(q);
    CHECK(h.payload_size() == 0);
    CHECK(stream_decode_header(h.bytes) == q);
}

TEST_CASE("roundtrip on quantized random draws with near-optimal size") {
    std::mt19937_64 rng(101);
    const HeaderCost cost = header_cost_bits(256, 2048);
    double total_payload_bits = 0.0;
    const int trials = 40;
    for (int t = 0; t < trials; ++t) {
        const Probabilities p = random_simplex(256, rng());
        const CountVector q = quantize(p, 2048, 1.0);
        const HeaderBytes h = stream_encode_header(q);
        REQUIRE(stream_decode_header(h.bytes) == q);
        total_payload_bits += h.payload_bits();
    }
    const double mean_bits = total_payload_bits / trials;
    CHECK(mean_bits <= 1.02 * cost.exact_bits + 64.0);
}

TEST_CASE("fuzzed roundtrips across dimensions and totals") {
    std::mt19937_64 rng(103);
    const std::vector<std::size_t> dims = {1, 2, 16, 256};
    const std::vector<std::uint32_t> sums = {1, 16, 2048};
    int cases = 0;
    for (std::size_t dim : dims) {
        for (std::uint32_t sum : sums) {
            const int reps = (dim == 256 && sum == 2048) ? 60 : 904;
            for (int r = 0; r < reps; ++r) {
                const CountVector q = random_counts(rng, dim, sum);
                const HeaderBytes h = stream_encode_header(q);
                REQUIRE(stream_decode_header(h.bytes) == q);
                ++cases;
            }
        }
    }
    CHECK(cases >= 10000);
}

TEST_CASE("decode rejects malformed input") {
    std::mt19937_64 rng(107);
    const CountVector q = random_counts(rng, 16, 100);
    const HeaderBytes h = stream_encode_header(q);

    // truncations
    for (std::size_t cut = 0; cut < h.bytes.size(); ++cut) {
        std::vector<std::uint8_t> shorter(h.bytes.begin(), h.bytes.begin() + cut);
        CHECK_THROWS_AS((void)stream_decode_header(shorter), DecodeError);
    }
    // trailing garbage
    std::vector<std::uint8_t> longer = h.bytes;
    longer.push_back(0x00);
    CHECK_THROWS_AS((void)stream_decode_header(longer), DecodeError);

    // single-byte corruption either fails or decodes to a different vector
    for (std::size_t at = 0; at < h.bytes.size(); ++at) {
        std::vector<std::uint8_t> bent = h.bytes;
        bent[at] ^= 0x5a;
        bool silent_identical = false;
        try {
            silent_identical = (stream_decode_header(bent) == q);
        } catch (const DecodeError&) {
        } catch (const std::invalid_argument&) {
        }
        CHECK_FALSE(silent_identical);
    }

    CHECK_THROWS_AS((void)stream_decode_header(std::vector<std::uint8_t>{}), DecodeError);
}

TEST_CASE("encode guards its domain") {
    // totals at the frequency scale cannot keep every value representable
    std::vector<std::uint32_t> q(2, 0);
    q[0] = 1u << 16;
    CHECK_THROWS_AS((void)stream_encode_header(CountVector(q)), std::invalid_argument);
}
