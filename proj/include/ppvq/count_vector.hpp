#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace ppvq {

/// Integer approximation of a distribution: D natural counts with fixed
/// total K (a composition of K into D parts). The total is derived from
/// the counts, so the sum invariant holds by construction.
class CountVector {
public:
    explicit CountVector(std::vector<std::uint32_t> counts)
        : counts_(std::move(counts)),
          total_(std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0})) {}

    std::size_t size() const { return counts_.size(); }
    std::uint32_t operator[](std::size_t s) const { return counts_[s]; }
    const std::vector<std::uint32_t>& counts() const { return counts_; }
    std::uint64_t total() const { return total_; }

    bool operator==(const CountVector& other) const { return counts_ == other.counts_; }

private:
    std::vector<std::uint32_t> counts_;
    std::uint64_t total_;
};

}  // namespace ppvq
