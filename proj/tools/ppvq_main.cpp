// Command-line harness: quantization/header benchmarks over random
// distributions and a full encode-decode roundtrip checker.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ppvq/automaton.hpp"
#include "ppvq/composition.hpp"
#include "ppvq/errors.hpp"
#include "ppvq/header_codec.hpp"
#include "ppvq/probmodel.hpp"
#include "ppvq/quantizer.hpp"
#include "ppvq/tans.hpp"

using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitMismatch = 2;
constexpr int kExitDecode = 3;

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t trial) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (trial + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

unsigned thread_count(std::size_t trials) {
    if (const char* env = std::getenv("PPVQ_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(std::min<long>(v, 256));
    }
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(trials, 1)));
}

// runs fn(trial) over a work queue; results must go into per-trial slots so
// aggregation order never depends on scheduling
template <typename Fn>
void run_trials(std::size_t count, const Fn& fn) {
    const unsigned workers = thread_count(count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

void write_output(const ordered_json& rows, const std::string& path, const std::string& format) {
    std::ostringstream body;
    if (format == "json") {
        body << rows.dump(2) << "\n";
    } else {
        if (!rows.empty()) {
            bool first = true;
            for (const auto& [key, value] : rows.front().items()) {
                (void)value;
                body << (first ? "" : ",") << key;
                first = false;
            }
            body << "\n";
            for (const auto& row : rows) {
                first = true;
                for (const auto& [key, value] : row.items()) {
                    (void)key;
                    body << (first ? "" : ",");
                    if (value.is_string()) {
                        body << value.get<std::string>();
                    } else {
                        body << value.dump();
                    }
                    first = false;
                }
                body << "\n";
            }
        }
    }
    if (path.empty() || path == "-") {
        std::cout << body.str();
    } else {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot open output file: " + path);
        }
        out << body.str();
    }
}

std::vector<std::uint32_t> sample_symbols(const ppvq::Probabilities& p, std::size_t count,
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

ppvq::Probabilities load_distribution(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open distribution file: " + path);
    }
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos || line[begin] == '#') continue;
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(line.substr(begin), &used);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": not a number: " + line);
        }
        const auto rest = line.find_first_not_of(" \t\r", begin + used);
        if (rest != std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": trailing characters: " + line);
        }
        values.push_back(v);
    }
    return ppvq::Probabilities(std::move(values));
}

ppvq::SpreadTable build_spread(const std::string& kind,
                               const std::vector<std::uint32_t>& counts,
                               const ppvq::Probabilities& p, std::uint32_t num_states,
                               std::uint32_t iters) {
    if (kind == "fast") return ppvq::spread_fast(counts, num_states);
    if (kind == "tuned") return ppvq::spread_tuned_sorted(counts, p, num_states);
    if (kind == "bucketed") return ppvq::spread_tuned_bucketed(counts, p, num_states);
    if (kind == "iterated") {
        return ppvq::spread_tuned_iterated(counts, p, num_states, std::max(1u, iters));
    }
    throw std::invalid_argument("unknown spread kind: " + kind);
}

struct BenchConfig {
    std::uint32_t alphabet = 256;
    std::uint32_t states = 2048;
    std::vector<std::uint32_t> sums;
    std::vector<double> powers;
    double offset = 0.15;
    std::uint32_t trials = 1000;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> frames;
    std::uint32_t iters = 0;
    std::string out;
    std::string format = "csv";
};

int cmd_bench_quant(const BenchConfig& cfg) {
    const std::uint32_t min_count = (cfg.offset == 0.0) ? 1 : 0;
    ordered_json rows = ordered_json::array();
    for (const std::uint32_t k_total : cfg.sums) {
        if (k_total >= (1u << 16)) {
            throw CLI::ValidationError("--sum must stay below 2^16 to measure headers");
        }
        const ppvq::HeaderCost cost = ppvq::header_cost_bits(cfg.alphabet, k_total);
        for (const double power : cfg.powers) {
            struct Cell {
                double rel = 0.0;
                double bits = 0.0;
                double wire = 0.0;
                double payload = 0.0;
            };
            std::vector<Cell> cells(cfg.trials);
            const ppvq::DeformParams params{power, cfg.offset, std::nullopt};
            run_trials(cfg.trials, [&](std::size_t t) {
                const ppvq::Probabilities p =
                    ppvq::random_simplex(cfg.alphabet, mix_seed(cfg.seed, t));
                const ppvq::CountVector q = ppvq::quantize(p, k_total, power, min_count);
                const ppvq::Probabilities qr = ppvq::reconstruct(q, params);
                const double kl = ppvq::kl_divergence(p, qr);
                const ppvq::HeaderBytes header = ppvq::stream_encode_header(q);
                cells[t] = {kl / ppvq::entropy(p), kl,
                            8.0 * static_cast<double>(header.bytes.size()),
                            header.payload_bits()};
            });
            Cell mean;
            for (const Cell& c : cells) {
                mean.rel += c.rel;
                mean.bits += c.bits;
                mean.wire += c.wire;
                mean.payload += c.payload;
            }
            mean.rel /= cfg.trials;
            mean.bits /= cfg.trials;
            mean.wire /= cfg.trials;
            mean.payload /= cfg.trials;

            ordered_json row;
            row["k"] = k_total;
            row["w"] = power;
            row["o"] = cfg.offset;
            row["trials"] = cfg.trials;
            row["mean_dh_rel"] = mean.rel;
            row["mean_dh_bits"] = mean.bits;
            row["header_exact_bits"] = cost.exact_bits;
            row["mean_wire_bits"] = mean.wire;
            row["mean_payload_bits"] = mean.payload;
            for (const std::uint64_t n : cfg.frames) {
                row["mdl_total_n" + std::to_string(n)] =
                    mean.wire + static_cast<double>(n) * mean.bits;
            }
            rows.push_back(row);
        }
    }
    write_output(rows, cfg.out, cfg.format);
    return kExitOk;
}

int cmd_bench_tans(const BenchConfig& cfg) {
    std::vector<std::string> kinds = {"tuned", "bucketed", "fast"};
    if (cfg.iters > 0) kinds.push_back("iterated");
    ordered_json rows = ordered_json::array();
    for (const std::uint32_t k_total : cfg.sums) {
        if (k_total > cfg.states) {
            throw CLI::ValidationError("--sum must not exceed --states");
        }
        for (const double power : cfg.powers) {
            const std::uint32_t min_count = (cfg.offset == 0.0) ? 1 : 0;
            const ppvq::DeformParams params{power, cfg.offset, std::nullopt};
            struct Cell {
                double dh = 0.0;
                bool usable = false;
            };
            std::vector<std::vector<Cell>> results(kinds.size(),
                                                   std::vector<Cell>(cfg.trials));
            run_trials(cfg.trials, [&](std::size_t t) {
                const ppvq::Probabilities p =
                    ppvq::random_simplex(cfg.alphabet, mix_seed(cfg.seed, t));
                const ppvq::CountVector q = ppvq::quantize(p, k_total, power, min_count);
                const ppvq::Probabilities qr = ppvq::reconstruct(q, params);
                const ppvq::CountVector table_counts =
                    ppvq::quantize(qr, cfg.states, 1.0, 1);
                for (std::size_t which = 0; which < kinds.size(); ++which) {
                    try {
                        const ppvq::SpreadTable spread = build_spread(
                            kinds[which], table_counts.counts(), p, cfg.states, cfg.iters);
                        results[which][t] = {ppvq::automaton_delta_h(p, spread), true};
                    } catch (const ppvq::ReducibleChainError&) {
                    } catch (const ppvq::ConvergenceError&) {
                    }
                }
            });
            for (std::size_t which = 0; which < kinds.size(); ++which) {
                double acc = 0.0;
                std::uint32_t used = 0;
                for (const Cell& c : results[which]) {
                    if (c.usable) {
                        acc += c.dh;
                        ++used;
                    }
                }
                ordered_json row;
                row["k"] = k_total;
                row["w"] = power;
                row["spread"] = kinds[which];
                row["mean_dh_rel"] = used ? acc / used : 0.0;
                row["trials_used"] = used;
                row["excluded"] = cfg.trials - used;
                rows.push_back(row);
            }
        }
    }
    write_output(rows, cfg.out, cfg.format);
    return kExitOk;
}

struct RoundtripConfig {
    std::string input;
    std::uint32_t sum = 2048;
    double power = 1.2;
    double offset = 0.15;
    std::uint32_t states = 2048;
    std::string kind = "tuned";
    std::uint32_t iters = 2;
    std::uint64_t frames = 100000;
    std::uint64_t seed = 1;
    std::string header_out;
    std::string header_in;
    std::string out;
    std::string format = "json";
};

int cmd_roundtrip(const RoundtripConfig& cfg) {
    const ppvq::Probabilities p = load_distribution(cfg.input);
    const double h = ppvq::entropy(p);
    const std::uint32_t min_count = (cfg.offset == 0.0) ? 1 : 0;
    const ppvq::DeformParams params{cfg.power, cfg.offset, std::nullopt};

    const ppvq::CountVector q = ppvq::quantize(p, cfg.sum, cfg.power, min_count);
    const ppvq::HeaderBytes header = ppvq::stream_encode_header(q);
    if (!cfg.header_out.empty()) {
        std::ofstream hout(cfg.header_out, std::ios::binary);
        if (!hout) throw std::runtime_error("cannot open " + cfg.header_out);
        hout.write(reinterpret_cast<const char*>(header.bytes.data()),
                   static_cast<std::streamsize>(header.bytes.size()));
    }

    std::vector<std::uint8_t> wire = header.bytes;
    if (!cfg.header_in.empty()) {
        std::ifstream hin(cfg.header_in, std::ios::binary);
        if (!hin) throw std::runtime_error("cannot open " + cfg.header_in);
        wire.assign(std::istreambuf_iterator<char>(hin), std::istreambuf_iterator<char>());
    }

    ppvq::CountVector decoded({0});
    try {
        decoded = ppvq::stream_decode_header(wire);
    } catch (const ppvq::DecodeError& e) {
        std::cerr << "header decode error: " << e.what() << "\n";
        return kExitDecode;
    }
    if (!(decoded == q) && cfg.header_in.empty()) {
        std::cerr << "header roundtrip mismatch\n";
        return kExitMismatch;
    }

    const ppvq::Probabilities qr = ppvq::reconstruct(decoded, params);
    const ppvq::CountVector table_counts = ppvq::quantize(qr, cfg.states, 1.0, 1);
    const ppvq::SpreadTable spread =
        build_spread(cfg.kind, table_counts.counts(), p, cfg.states, cfg.iters);
    const double delta_rel = ppvq::automaton_delta_h(p, spread);
    const double analytic_bits = h * (1.0 + delta_rel);

    const ppvq::TansCoder coder(spread);
    const auto symbols = sample_symbols(p, cfg.frames, cfg.seed);
    const auto encoded = coder.encode(symbols);
    std::vector<std::uint32_t> back;
    try {
        back = coder.decode(encoded.bits, encoded.final_state, symbols.size());
    } catch (const ppvq::DecodeError& e) {
        std::cerr << "stream decode error: " << e.what() << "\n";
        return kExitDecode;
    }
    if (back != symbols) {
        std::cerr << "symbol roundtrip mismatch\n";
        return kExitMismatch;
    }
    const double empirical_bits =
        cfg.frames ? static_cast<double>(encoded.bits.bit_count()) /
                         static_cast<double>(cfg.frames)
                   : 0.0;

    const double header_bits = 8.0 * static_cast<double>(header.bytes.size());
    const ppvq::PenaltyReport mdl =
        ppvq::mdl_penalty(header_bits, cfg.frames, std::max(0.0, analytic_bits - h));

    ordered_json row;
    row["alphabet"] = p.size();
    row["k"] = cfg.sum;
    row["states"] = cfg.states;
    row["spread"] = cfg.kind;
    row["entropy_bits"] = h;
    row["header_wire_bits"] = header_bits;
    row["header_payload_bits"] = header.payload_bits();
    row["header_exact_bits"] = ppvq::header_cost_bits(p.size(), cfg.sum).exact_bits;
    row["analytic_bits_per_symbol"] = analytic_bits;
    row["empirical_bits_per_symbol"] = empirical_bits;
    row["delta_h_rel"] = delta_rel;
    row["frames"] = cfg.frames;
    row["mdl_total_bits"] = mdl.total;
    ordered_json rows = ordered_json::array({row});
    write_output(rows, cfg.out, cfg.format);
    return kExitOk;
}

void add_common_flags(CLI::App* cmd, BenchConfig& cfg) {
    cmd->add_option("--alphabet", cfg.alphabet, "alphabet size D")
        ->check(CLI::Range(1u, 1u << 16));
    cmd->add_option("--sum", cfg.sums, "quantization totals K (repeatable)")
        ->check(CLI::Range(1u, 1u << 20));
    cmd->add_option("--power", cfg.powers, "deformation powers w (repeatable)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--offset", cfg.offset, "reconstruction offset o")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--trials", cfg.trials, "random distributions per cell")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", cfg.seed, "master seed");
    cmd->add_option("--out", cfg.out, "output path (default stdout)");
    cmd->add_option("--format", cfg.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"probability-distribution quantization and coding toolkit"};
    app.require_subcommand(1);

    BenchConfig quant_cfg;
    quant_cfg.sums = {512, 1024, 2048};
    quant_cfg.powers = {1.0, 1.1, 1.2, 1.3};
    quant_cfg.frames = {100000};
    CLI::App* quant = app.add_subcommand(
        "bench-quant", "quantization penalty and header size over random distributions");
    add_common_flags(quant, quant_cfg);
    quant->add_option("--frames", quant_cfg.frames, "frame lengths N for the MDL column");

    BenchConfig tans_cfg;
    tans_cfg.sums = {2048};
    tans_cfg.powers = {1.0};
    CLI::App* tans = app.add_subcommand(
        "bench-tans", "coding-table redundancy per spread kind over random distributions");
    add_common_flags(tans, tans_cfg);
    tans->add_option("--states", tans_cfg.states, "table size L (power of two)")
        ->check(CLI::Range(2u, 1u << 16));
    tans->add_option("--iters", tans_cfg.iters,
                     "also evaluate the iterated tuned spread with this many rounds");

    RoundtripConfig rt_cfg;
    CLI::App* rt = app.add_subcommand("roundtrip",
                                      "encode, decode and verify one distribution end to end");
    rt->add_option("--input", rt_cfg.input, "distribution file, one probability per line")
        ->required();
    rt->add_option("--sum", rt_cfg.sum, "quantization total K")->check(CLI::Range(1u, 1u << 20));
    rt->add_option("--power", rt_cfg.power, "deformation power w")->check(CLI::PositiveNumber);
    rt->add_option("--offset", rt_cfg.offset, "reconstruction offset o")
        ->check(CLI::NonNegativeNumber);
    rt->add_option("--states", rt_cfg.states, "table size L (power of two)")
        ->check(CLI::Range(2u, 1u << 16));
    rt->add_option("--spread", rt_cfg.kind, "fast | tuned | bucketed | iterated")
        ->check(CLI::IsMember({"fast", "tuned", "bucketed", "iterated"}));
    rt->add_option("--iters", rt_cfg.iters, "rounds for the iterated spread");
    rt->add_option("--frames", rt_cfg.frames, "number of symbols to code");
    rt->add_option("--seed", rt_cfg.seed, "sampling seed");
    rt->add_option("--header-out", rt_cfg.header_out, "write the encoded header here");
    rt->add_option("--header-in", rt_cfg.header_in, "decode this header file instead");
    rt->add_option("--out", rt_cfg.out, "output path (default stdout)");
    rt->add_option("--format", rt_cfg.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (quant->parsed()) return cmd_bench_quant(quant_cfg);
        if (tans->parsed()) return cmd_bench_tans(tans_cfg);
        if (rt->parsed()) return cmd_roundtrip(rt_cfg);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const ppvq::DecodeError& e) {
        std::cerr << "decode error: " << e.what() << "\n";
        return kExitDecode;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
