#include "ppvq/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "ppvq/probmodel.hpp"

namespace ppvq {

namespace {

// Penalty denominators are floored; the listing this follows divides by the
// deformed target and never addresses targets underflowing to zero.
constexpr double kTargetFloor = 1e-12;

std::vector<double> deformed_target(const Probabilities& p, double power) {
    std::vector<double> target(p.size());
    double total = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) {
        target[s] = (power == 1.0) ? p[s] : std::pow(p[s], 1.0 / power);
        total += target[s];
    }
    for (double& t : target) {
        t /= total;
    }
    return target;
}

}  // namespace

CountVector quantize(const Probabilities& p, std::uint64_t k_total, double power,
                     std::uint32_t min_count) {
    if (k_total == 0) {
        throw std::invalid_argument("quantize requires a positive total");
    }
    if (k_total > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("quantize total too large");
    }
    if (!(power > 0.0) || !std::isfinite(power)) {
        throw std::invalid_argument("deformation power must be positive and finite");
    }
    const std::size_t dim = p.size();
    if (static_cast<std::uint64_t>(min_count) * dim > k_total) {
        throw std::invalid_argument("minimum counts exceed the total");
    }

    const std::vector<double> target = deformed_target(p, power);
    std::vector<double> scaled(dim);
    std::vector<std::int64_t> q(dim);
    std::int64_t running = 0;
    for (std::size_t s = 0; s < dim; ++s) {
        scaled[s] = static_cast<double>(k_total) * target[s];
        q[s] = std::max<std::int64_t>(static_cast<std::int64_t>(std::llround(scaled[s])),
                                      min_count);
        running += q[s];
    }

    const std::int64_t want = static_cast<std::int64_t>(k_total);
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(dim);
    while (running != want) {
        const std::int64_t df = (want > running) ? 1 : -1;
        order.clear();
        for (std::size_t s = 0; s < dim; ++s) {
            if (q[s] + df < static_cast<std::int64_t>(min_count)) continue;
            const double pk = std::max(scaled[s], kTargetFloor);
            const double before = static_cast<double>(q[s]) - pk;
            const double after = before + static_cast<double>(df);
            order.emplace_back((after * after - before * before) / pk, s);
        }
        if (order.empty()) {
            throw std::invalid_argument("quantize cannot repair the count total: "
                                        "every coordinate is pinned at its minimum");
        }
        const std::size_t moves =
            std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::llabs(want - running)));
        std::sort(order.begin(), order.end());
        for (std::size_t j = 0; j < moves; ++j) {
            q[order[j].second] += df;
        }
        running += df * static_cast<std::int64_t>(moves);
    }

    std::vector<std::uint32_t> out(dim);
    for (std::size_t s = 0; s < dim; ++s) {
        out[s] = static_cast<std::uint32_t>(q[s]);
    }
    return CountVector(std::move(out));
}

Probabilities reconstruct(const CountVector& counts, const DeformParams& params) {
    if (!(params.power > 0.0) || !std::isfinite(params.power)) {
        throw std::invalid_argument("deformation power must be positive and finite");
    }
    const std::size_t dim = counts.size();
    if (params.per_symbol_offset && params.per_symbol_offset->size() != dim) {
        throw std::invalid_argument("per-symbol offset length mismatch");
    }
    std::vector<double> numerator(dim);
    double total = 0.0;
    for (std::size_t s = 0; s < dim; ++s) {
        const double offset =
            params.per_symbol_offset ? (*params.per_symbol_offset)[s] : params.offset;
        if (offset < 0.0) {
            throw std::invalid_argument("offsets must be non-negative");
        }
        const double base = static_cast<double>(counts[s]);
        numerator[s] = ((params.power == 1.0) ? base : std::pow(base, params.power)) + offset;
        total += numerator[s];
    }
    if (total <= 0.0) {
        throw std::invalid_argument("reconstruct: all numerators are zero");
    }
    for (double& v : numerator) {
        v /= total;
    }
    return Probabilities(std::move(numerator));
}

double quantization_loss(const Probabilities& p, std::uint64_t k_total,
                         const DeformParams& params, std::uint32_t min_count) {
    const double h = entropy(p);
    if (h <= 0.0) {
        return 0.0;  // single-symbol source: quantization is exact
    }
    const CountVector q = quantize(p, k_total, params.power, min_count);
    return kl_divergence(p, reconstruct(q, params)) / h;
}

}  // namespace ppvq
