#include "ppvq/composition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ppvq/probmodel.hpp"

namespace ppvq {

namespace {

BigNat binomial(std::uint64_t n, std::uint64_t r) {
    if (r > n) return 0;
    r = std::min(r, n - r);
    BigNat result = 1;
    for (std::uint64_t j = 1; j <= r; ++j) {
        result *= n - r + j;
        result /= j;  // exact at every step
    }
    return result;
}

}  // namespace

BigNat count_compositions(std::uint64_t dim, std::uint64_t sum) {
    if (dim == 0) {
        throw std::invalid_argument("count_compositions requires dim >= 1");
    }
    return binomial(sum + dim - 1, dim - 1);
}

HeaderCost header_cost_bits(std::uint64_t dim, std::uint64_t sum) {
    if (dim == 0) {
        throw std::invalid_argument("header_cost_bits requires dim >= 1");
    }
    constexpr double ln2 = 0.69314718055994530942;
    const double n = static_cast<double>(sum + dim - 1);
    const double r = static_cast<double>(dim - 1);
    HeaderCost cost;
    cost.exact_bits =
        (std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0)) / ln2;
    cost.estimate_bits = (dim == 1) ? 0.0 : n * binary_entropy(r / n);
    return cost;
}

CompositionModel::CompositionModel(std::uint32_t dim, std::uint32_t sum)
    : dim_(dim), sum_(sum) {
    if (dim == 0) {
        throw std::invalid_argument("CompositionModel requires dim >= 1");
    }
}

BigNat CompositionModel::count(std::uint32_t s, std::uint32_t k) const {
    if (s < 1 || s > dim_ || k > sum_) {
        throw std::invalid_argument("count(s,k) out of range");
    }
    return binomial(static_cast<std::uint64_t>(k) + s - 1, s - 1);
}

BigRat CompositionModel::conditional_probability(std::uint32_t s, std::uint32_t k,
                                                 std::uint32_t i) const {
    if (s < 2 || s > dim_) {
        throw std::invalid_argument("conditional_probability requires 2 <= s <= dim");
    }
    if (k > sum_ || i > k) {
        throw std::invalid_argument("conditional_probability requires 0 <= i <= k <= sum");
    }
    return BigRat(count(s - 1, k - i), count(s, k));
}

BigNat CompositionModel::enum_encode(const CountVector& q) const {
    if (q.size() != dim_ || q.total() != sum_) {
        throw std::invalid_argument("enum_encode: vector does not match the model");
    }
    // code(Q_s..Q_1) = code(Q_{s-1}..Q_1) + sum_{i<Q_s} n(s-1, k-i), with
    // k the partial sum through coordinate s. The inner terms step exactly:
    // n(s-1, j-1) = n(s-1, j) * j / (j + s - 2).
    BigNat code = 0;
    std::uint64_t k = q[0];
    for (std::uint32_t s = 2; s <= dim_; ++s) {
        k += q[s - 1];
        BigNat term = count(s - 1, static_cast<std::uint32_t>(k));
        for (std::uint32_t i = 0; i < q[s - 1]; ++i) {
            code += term;
            const std::uint64_t j = k - i;
            term *= j;
            term /= j + s - 2;
        }
    }
    return code;
}

CountVector CompositionModel::enum_decode(const BigNat& index) const {
    if (index < 0 || index >= count_compositions(dim_, sum_)) {
        throw std::invalid_argument("enum_decode: index out of range");
    }
    std::vector<std::uint32_t> q(dim_, 0);
    BigNat rest = index;
    std::uint32_t k = sum_;
    for (std::uint32_t s = dim_; s >= 2; --s) {
        BigNat term = count(s - 1, k);
        std::uint32_t i = 0;
        while (rest >= term) {
            rest -= term;
            const std::uint64_t j = k - i;
            term *= j;
            term /= j + s - 2;
            ++i;
        }
        q[s - 1] = i;
        k -= i;
    }
    q[0] = k;
    return CountVector(std::move(q));
}

std::vector<std::uint32_t> CompositionModel::scaled_frequencies(std::uint32_t s,
                                                                std::uint32_t k) const {
    if (s < 2 || s > dim_ || k > sum_) {
        throw std::invalid_argument("scaled_frequencies out of range");
    }
    const std::uint32_t slots = 1u << kScaleBits;
    const std::size_t m = static_cast<std::size_t>(k) + 1;
    if (m > slots) {
        throw std::invalid_argument("remaining sum too large for the frequency scale");
    }

    // Relative weights w_i = n(s-1, k-i), computed through the exact ratio
    // w_{i+1}/w_i = (k-i)/(k-i+s-2) in doubles. w_0 = 1 is the maximum, so
    // the products only decay; anything that underflows is caught by the
    // >= 1 floor below.
    std::vector<double> weight(m);
    double w = 1.0;
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        weight[i] = w;
        total += w;
        const double j = static_cast<double>(k - i);
        w *= j / (j + static_cast<double>(s) - 2.0);
    }

    std::vector<std::uint32_t> freq(m);
    std::vector<std::pair<double, std::size_t>> remainder(m);
    std::uint64_t assigned = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double raw = weight[i] / total * static_cast<double>(slots);
        const double fl = std::floor(raw);
        freq[i] = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(fl));
        remainder[i] = {raw - fl, i};
        assigned += freq[i];
    }
    if (assigned < slots) {
        // hand out the leftovers by largest remainder, lowest index first
        std::sort(remainder.begin(), remainder.end(),
                  [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second < b.second;
                  });
        std::uint64_t need = slots - assigned;
        for (std::size_t j = 0; need > 0; j = (j + 1) % m) {
            ++freq[remainder[j].second];
            --need;
        }
    } else if (assigned > slots) {
        // floors lifted to 1 overshot; reclaim from smallest remainders
        std::sort(remainder.begin(), remainder.end());
        std::uint64_t excess = assigned - slots;
        while (excess > 0) {
            for (std::size_t j = 0; j < m && excess > 0; ++j) {
                std::uint32_t& f = freq[remainder[j].second];
                if (f > 1) {
                    --f;
                    --excess;
                }
            }
        }
    }
    return freq;
}

}  // namespace ppvq
