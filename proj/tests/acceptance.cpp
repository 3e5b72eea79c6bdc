// Acceptance suite: end-to-end checks with pinned tolerances, one
// PASS/FAIL line per check. Returns the number of failed checks.

#include <boost/multiprecision/cpp_int.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "ppvq/automaton.hpp"
#include "ppvq/composition.hpp"
#include "ppvq/errors.hpp"
#include "ppvq/header_codec.hpp"
#include "ppvq/probmodel.hpp"
#include "ppvq/quantizer.hpp"
#include "ppvq/tans.hpp"

using namespace ppvq;

namespace {

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
    std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), pattern, args...);
    return buf;
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t trial) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (trial + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kMasterSeed = 1;

const std::vector<double> kExampleP = {0.04, 0.16, 0.16, 0.64};
const std::vector<std::uint32_t> kExampleLs = {1, 3, 2, 10};

std::vector<std::uint32_t> sample_symbols(const Probabilities& p, std::size_t count,
                                          std::uint64_t seed) {
    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) {
        acc += p[s];
        cdf[s] = acc;
    }
    std::mt19937_64 rng(seed);
    std::vector<std::uint32_t> out(count);
    for (auto& v : out) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        v = static_cast<std::uint32_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u * acc) - cdf.begin());
        if (v >= p.size()) v = static_cast<std::uint32_t>(p.size()) - 1;
    }
    return out;
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void check_worked_instance() {
    const auto start = std::chrono::steady_clock::now();
    const Probabilities p(kExampleP);
    const double h = entropy(p);
    const double quant_rel =
        kl_divergence(p, reconstruct(CountVector({1, 3, 2, 10}),
                                     DeformParams{1.0, 0.0, std::nullopt})) /
        h;
    report("1a worked-instance quantization penalty",
           std::abs(quant_rel - 0.0114) <= 0.0002,
           fmt("dH/H = %.6f, expected 0.0114 +/- 0.0002", quant_rel));

    const double tuned = automaton_delta_h(p, spread_tuned_sorted(kExampleLs, p, 16));
    report("1b tuned spread beats the quantization penalty", tuned < quant_rel,
           fmt("tuned dH/H = %.6f < %.6f", tuned, quant_rel));

    const double fast = automaton_delta_h(p, spread_fast(kExampleLs, 16));
    report("1c fast spread trails the tuned spread", fast > tuned,
           fmt("fast dH/H = %.6f > tuned %.6f", fast, tuned));
    std::printf("      elapsed %.2fs (budget 1s)\n", elapsed_since(start));
}

void check_header_size() {
    const auto start = std::chrono::steady_clock::now();
    const HeaderCost cost = header_cost_bits(256, 2048);
    report("2a header size matches the 139-byte reference figure",
           std::abs(cost.exact_bits - 1113.6) <= 0.5,
           fmt("exact lg n(256,2048) = %.4f bits (%.1f bytes), reference value 1113.6 +/- 0.5; "
               "the reference tracks the 8*256*h(1/8) shortcut, not the evaluated size",
               cost.exact_bits, cost.exact_bits / 8.0));

    const BigNat n = count_compositions(256, 2048);
    const CompositionModel model(256, 2048);
    std::vector<std::uint32_t> top(256, 0);
    top.back() = 2048;
    const BigNat max_index = model.enum_encode(CountVector(top));
    const bool top_ok = (max_index == n - 1);
    const std::size_t bitlen = boost::multiprecision::msb(n - 1) + 1;
    const std::size_t ceil_lg = static_cast<std::size_t>(std::ceil(cost.exact_bits));
    report("2b enumerative index bit length equals ceil(lg n)",
           top_ok && bitlen == ceil_lg,
           fmt("max rank has %zu bits, ceil(lg n) = %zu", bitlen, ceil_lg));

    double payload_bits = 0.0;
    bool roundtrips = true;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        const Probabilities p = random_simplex(256, mix_seed(kMasterSeed, 9000 + t));
        const CountVector q = quantize(p, 2048, 1.0);
        const HeaderBytes h = stream_encode_header(q);
        roundtrips = roundtrips && (stream_decode_header(h.bytes) == q);
        payload_bits += h.payload_bits();
    }
    payload_bits /= trials;
    const double bound = 1.02 * cost.exact_bits + 64.0;
    report("2c streaming header stays near the enumerative optimum",
           roundtrips && payload_bits <= bound,
           fmt("mean payload %.1f bits <= %.1f (1.02 lg n + 64), 100/100 roundtrips",
               payload_bits, bound));
    std::printf("      elapsed %.2fs (budget 30s)\n", elapsed_since(start));
}

void check_quantization_band() {
    const auto start = std::chrono::steady_clock::now();
    const DeformParams plain{1.0, 0.0, std::nullopt};
    std::vector<double> means;
    for (const std::uint32_t k_total : {512u, 1024u, 2048u}) {
        double acc = 0.0;
        for (int t = 0; t < 1000; ++t) {
            const Probabilities p = random_simplex(256, mix_seed(kMasterSeed, t));
            acc += quantization_loss(p, k_total, plain, 1);
        }
        means.push_back(acc / 1000.0);
    }
    report("3a mean dH/H at K=2048 within 3x of 6e-4",
           means[2] >= 6e-4 / 3.0 && means[2] <= 6e-4 * 3.0,
           fmt("mean dH/H = %.3g, band [%.3g, %.3g]", means[2], 6e-4 / 3.0, 6e-4 * 3.0));
    report("3b mean dH/H non-increasing across K in {512,1024,2048}",
           means[0] >= means[1] && means[1] >= means[2],
           fmt("%.3g >= %.3g >= %.3g", means[0], means[1], means[2]));
    std::printf("      elapsed %.2fs (budget 120s)\n", elapsed_since(start));
}

void check_deformation_benefit() {
    const auto start = std::chrono::steady_clock::now();
    double mean_plain = 0.0;
    double mean_deformed = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const Probabilities p = random_simplex(256, mix_seed(kMasterSeed, t));
        mean_plain += quantization_loss(p, 512, DeformParams{1.0, 0.15, std::nullopt});
        mean_deformed += quantization_loss(p, 512, DeformParams{1.2, 0.15, std::nullopt});
    }
    mean_plain /= 1000.0;
    mean_deformed /= 1000.0;
    report("4 deformation w=1.2 beats w=1.0 at K=512, o=0.15",
           mean_deformed < mean_plain,
           fmt("w=1.2 mean dH/H = %.6g vs w=1.0 %.6g; at this K the deformation "
               "overshoots the small probabilities and the ordering reverses "
               "(it holds from K around 1000 up)",
               mean_deformed, mean_plain));
    std::printf("      elapsed %.2fs (no budget stated)\n", elapsed_since(start));
}

void check_enumerative_bijection() {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string first_bad;
    for (std::uint32_t dim = 1; dim <= 4 && ok; ++dim) {
        for (std::uint32_t sum = 0; sum <= 8 && ok; ++sum) {
            const CompositionModel model(dim, sum);
            const BigNat n = count_compositions(dim, sum);
            std::set<BigNat> seen;
            std::vector<std::uint32_t> q(dim, 0);
            const std::function<void(std::uint32_t, std::uint32_t)> rec =
                [&](std::uint32_t at, std::uint32_t left) {
                    if (!ok) return;
                    if (at + 1 == dim) {
                        q[at] = left;
                        const CountVector vec(q);
                        const BigNat code = model.enum_encode(vec);
                        if (code < 0 || code >= n || !seen.insert(code).second ||
                            !(model.enum_decode(code) == vec)) {
                            ok = false;
                            first_bad = fmt("dim=%u sum=%u", dim, sum);
                        }
                        return;
                    }
                    for (std::uint32_t v = 0; v <= left; ++v) {
                        q[at] = v;
                        rec(at + 1, left - v);
                    }
                };
            rec(0, sum);
            if (ok && seen.size() != static_cast<std::size_t>(n)) {
                ok = false;
                first_bad = fmt("dim=%u sum=%u covers %zu of %s ranks", dim, sum, seen.size(),
                                n.str().c_str());
            }
        }
    }
    report("5 enumerative code is a bijection for all D<=4, K<=8", ok,
           ok ? "every composition ranks uniquely and roundtrips" : first_bad);
    std::printf("      elapsed %.2fs (budget 1s)\n", elapsed_since(start));
}

void check_stream_roundtrips() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(mix_seed(kMasterSeed, 777));
    const std::vector<std::size_t> dims = {1, 2, 4, 256};
    int cases = 0;
    bool ok = true;
    std::string first_bad;
    for (int t = 0; t < 10000 && ok; ++t) {
        const std::size_t dim = dims[t % dims.size()];
        const std::uint32_t num_states = dim <= 4 ? 16 : 2048;
        std::vector<std::uint32_t> ls(dim, 1);
        for (std::uint32_t b = static_cast<std::uint32_t>(dim); b < num_states; ++b) {
            ++ls[rng() % dim];
        }
        const Probabilities p = random_simplex(dim, rng());
        SpreadTable spread;
        switch (t % 3) {
            case 0: spread = spread_fast(ls, num_states); break;
            case 1: spread = spread_tuned_sorted(ls, p, num_states); break;
            default: spread = spread_tuned_bucketed(ls, p, num_states); break;
        }
        const TansCoder coder(spread);
        // lengths mostly short with a heavy tail up to 10^4
        const std::size_t len = (t % 10 == 0) ? rng() % 10000 : rng() % 700;
        const auto symbols = sample_symbols(p, len, rng());
        const auto enc = coder.encode(symbols);
        if (coder.decode(enc.bits, enc.final_state, len) != symbols) {
            ok = false;
            first_bad = fmt("case %d: dim=%zu len=%zu", t, dim, len);
        }
        ++cases;
    }
    report("6 coding tables roundtrip fuzzed sequences", ok && cases == 10000,
           ok ? fmt("%d/%d sequences identical after decode", cases, cases) : first_bad);
    std::printf("      elapsed %.2fs (budget 60s)\n", elapsed_since(start));
}

void check_analytic_vs_empirical() {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t frame = 1000000;
    bool ok = true;
    double worst = 0.0;

    const auto compare = [&](const Probabilities& p, const SpreadTable& spread,
                             std::uint64_t seed) {
        const AutomatonModel model = build_model(spread, p);
        const StationaryDistribution rho = stationary(model);
        const double analytic = mean_bits_per_symbol(model, rho);
        const TansCoder coder(spread);
        const auto symbols = sample_symbols(p, frame, seed);
        const auto enc = coder.encode(symbols);
        const double empirical =
            static_cast<double>(enc.bits.bit_count()) / static_cast<double>(frame);
        const double gap = std::abs(analytic - empirical);
        worst = std::max(worst, gap);
        ok = ok && gap <= 5e-3;
    };

    const Probabilities example(kExampleP);
    compare(example, spread_tuned_sorted(kExampleLs, example, 16), mix_seed(kMasterSeed, 501));

    int done = 0;
    for (std::uint64_t t = 0; done < 10; ++t) {
        const Probabilities p = random_simplex(8, mix_seed(kMasterSeed, 600 + t));
        const CountVector ls = quantize(p, 64, 1.0, 1);
        const SpreadTable spread = spread_tuned_sorted(ls.counts(), p, 64);
        try {
            compare(p, spread, mix_seed(kMasterSeed, 700 + t));
            ++done;
        } catch (const ReducibleChainError&) {
        }
    }
    report("7 analytic mean bits matches measurement within 5e-3", ok,
           fmt("worst |analytic - empirical| = %.2e over 11 instances at N=10^6", worst));
    std::printf("      elapsed %.2fs (budget 60s)\n", elapsed_since(start));
}

void check_spread_ordering_at_scale() {
    const auto start = std::chrono::steady_clock::now();
    // the sorted and bucketed variants differ only by within-bucket order at
    // this scale; their means sit within ~2e-9 of each other, so resolving
    // the ordering needs the large ensemble (se ~ 1e-9 at 10^4 trials)
    const int trials = 10000;
    double tuned_acc = 0.0, bucketed_acc = 0.0, fast_acc = 0.0;
    int used = 0;
    for (int t = 0; t < trials; ++t) {
        const Probabilities p = random_simplex(256, mix_seed(kMasterSeed, t));
        const CountVector q = quantize(p, 2048, 1.0);
        const Probabilities qr = reconstruct(q, DeformParams{1.0, 0.15, std::nullopt});
        const CountVector ls = quantize(qr, 2048, 1.0, 1);
        try {
            const double tuned = automaton_delta_h(p, spread_tuned_sorted(ls.counts(), p, 2048));
            const double bucketed =
                automaton_delta_h(p, spread_tuned_bucketed(ls.counts(), p, 2048));
            const double fast = automaton_delta_h(p, spread_fast(ls.counts(), 2048));
            tuned_acc += tuned;
            bucketed_acc += bucketed;
            fast_acc += fast;
            ++used;
        } catch (const ReducibleChainError&) {
        }
    }
    const double tuned = tuned_acc / used;
    const double bucketed = bucketed_acc / used;
    const double fast = fast_acc / used;
    report("8 mean redundancy orders tuned <= bucketed <= fast at scale",
           used >= 100 && tuned <= bucketed && bucketed <= fast,
           fmt("tuned %.8g vs bucketed %.8g vs fast %.8g over %d trials "
               "(the two tuned variants are near-identical at L=2048)",
               tuned, bucketed, fast, used));
    std::printf("      elapsed %.2fs (budget 600s)\n", elapsed_since(start));
}

}  // namespace

int main() {
    check_worked_instance();
    check_header_size();
    check_quantization_band();
    check_deformation_benefit();
    check_enumerative_bijection();
    check_stream_roundtrips();
    check_analytic_vs_empirical();
    check_spread_ordering_at_scale();
    std::printf("%d check(s) failed\n", failures);
    return failures > 99 ? 99 : failures;
}
