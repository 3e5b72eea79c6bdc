#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <vector>

#include "ppvq/count_vector.hpp"

namespace ppvq {

using BigNat = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

/// Number of compositions of `sum` into `dim` natural parts:
/// n(D,K) = C(K+D-1, D-1), exactly.
BigNat count_compositions(std::uint64_t dim, std::uint64_t sum);

struct HeaderCost {
    double exact_bits;     // lg n(D,K) via log-gamma
    double estimate_bits;  // (K+D-1) * h((D-1)/(K+D-1)), an upper bound
};

/// Exact and entropy-estimate size in bits of a uniformly coded
/// composition header.
HeaderCost header_cost_bits(std::uint64_t dim, std::uint64_t sum);

/// Enumerative model over compositions of `sum` into `dim` parts.
///
/// n(s,k) counts compositions of k into s parts; the counting recurrence
/// n(s,k) = sum_i n(s-1, k-i) drives both the exact ranking code and the
/// per-coordinate conditional model Pr(Q=i | s,k) = n(s-1,k-i) / n(s,k).
/// Counts are evaluated on demand from the closed binomial form with exact
/// integer updates between adjacent arguments, so no D*K table is held.
class CompositionModel {
public:
    CompositionModel(std::uint32_t dim, std::uint32_t sum);

    std::uint32_t dim() const { return dim_; }
    std::uint32_t sum() const { return sum_; }

    /// n(s,k) for 1 <= s <= dim, 0 <= k <= sum.
    BigNat count(std::uint32_t s, std::uint32_t k) const;

    /// Exact conditional Pr(Q = i | s, k) as a rational. Requires
    /// 2 <= s <= dim and 0 <= i <= k <= sum.
    BigRat conditional_probability(std::uint32_t s, std::uint32_t k, std::uint32_t i) const;

    /// Bijection between composition vectors and ranks [0, n(D,K)).
    BigNat enum_encode(const CountVector& q) const;
    CountVector enum_decode(const BigNat& index) const;

    /// Conditional frequencies for the streaming coder: Pr(Q=i | s,k) for
    /// i = 0..k, scaled to total 2^16 with every value >= 1
    /// (largest-remainder apportionment). Requires k+1 <= 2^16.
    static constexpr std::uint32_t kScaleBits = 16;
    std::vector<std::uint32_t> scaled_frequencies(std::uint32_t s, std::uint32_t k) const;

private:
    std::uint32_t dim_;
    std::uint32_t sum_;
};

}  // namespace ppvq
