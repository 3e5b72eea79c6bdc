#include "ppvq/probmodel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace ppvq {

namespace {

// Neumaier compensated accumulation; KL targets near 1e-7 absolute need
// better than naive summation at D >= 256.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }

    double value() const { return sum + comp; }
};

void require_same_dim(const Probabilities& p, const Probabilities& q) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("dimension mismatch: " + std::to_string(p.size()) +
                                    " vs " + std::to_string(q.size()));
    }
}

}  // namespace

Probabilities::Probabilities(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw std::invalid_argument("probability vector must be non-empty");
    }
    CompensatedSum sum;
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("probability entries must be finite");
        }
        if (v < kMinEntry) {
            throw std::invalid_argument("probability entry " + std::to_string(v) +
                                        " below minimum " + std::to_string(kMinEntry) +
                                        "; zero-probability symbols are the caller's job");
        }
        sum.add(v);
    }
    if (std::abs(sum.value() - 1.0) > kSumTolerance) {
        throw std::invalid_argument("probabilities sum to " + std::to_string(sum.value()) +
                                    ", not 1");
    }
}

double entropy(const Probabilities& p) {
    CompensatedSum acc;
    for (double v : p) {
        acc.add(-v * std::log2(v));
    }
    return acc.value();
}

double kl_divergence(const Probabilities& p, const Probabilities& q) {
    require_same_dim(p, q);
    CompensatedSum acc;
    for (std::size_t s = 0; s < p.size(); ++s) {
        acc.add(p[s] * std::log2(p[s] / q[s]));
    }
    return acc.value();
}

double kl_quadratic(const Probabilities& p, const Probabilities& q) {
    require_same_dim(p, q);
    constexpr double inv_ln4 = 0.72134752044448170368;  // 1/ln 4
    CompensatedSum acc;
    for (std::size_t s = 0; s < p.size(); ++s) {
        const double d = p[s] - q[s];
        acc.add(d * d / p[s]);
    }
    return inv_ln4 * acc.value();
}

double binary_entropy(double x) {
    if (x < 0.0 || x > 1.0) {
        throw std::invalid_argument("binary_entropy argument outside [0,1]");
    }
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double zero_symbol_penalty(std::uint64_t k, double q_min) {
    const double reserved = static_cast<double>(k) * q_min;
    if (!(reserved >= 0.0) || reserved >= 1.0) {
        throw std::invalid_argument("k*q_min must lie in [0,1)");
    }
    return -std::log2(1.0 - reserved);
}

double unused_marking_cost(std::uint64_t dim, std::uint64_t k) {
    if (k > dim) {
        throw std::invalid_argument("cannot mark more unused symbols than the alphabet holds");
    }
    const double n = static_cast<double>(dim);
    const double r = static_cast<double>(k);
    constexpr double ln2 = 0.69314718055994530942;
    return (std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0)) / ln2;
}

double unused_marking_estimate(std::uint64_t dim, std::uint64_t k) {
    if (k > dim) {
        throw std::invalid_argument("cannot mark more unused symbols than the alphabet holds");
    }
    if (dim == 0) return 0.0;
    return static_cast<double>(dim) *
           binary_entropy(static_cast<double>(k) / static_cast<double>(dim));
}

PenaltyReport mdl_penalty(double header_bits, std::uint64_t n_symbols, double delta_h) {
    if (header_bits < 0.0 || delta_h < 0.0) {
        throw std::invalid_argument("mdl_penalty takes non-negative costs");
    }
    PenaltyReport report;
    report.header_bits = header_bits;
    report.delta_h = delta_h;
    report.total = header_bits + static_cast<double>(n_symbols) * delta_h;
    return report;
}

Probabilities random_simplex(std::size_t dim, std::uint64_t seed) {
    if (dim == 0) {
        throw std::invalid_argument("dimension must be at least 1");
    }
    std::mt19937_64 engine(seed);
    std::vector<double> draw(dim);
    double total = 0.0;
    for (double& v : draw) {
        // 53-bit uniform in [0,1); redrawing the rare tiny values keeps the
        // normalized entries clear of the Probabilities floor.
        double u;
        do {
            u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
        } while (u < 1e-8);
        v = u;
        total += u;
    }
    for (double& v : draw) {
        v /= total;
    }
    return Probabilities(std::move(draw));
}

}  // namespace ppvq
