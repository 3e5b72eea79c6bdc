#pragma once

#include <cstddef>
#include <vector>

namespace ppvq {

/// A point of the open probability simplex: strictly positive entries
/// summing to 1. Immutable after construction; construction validates.
class Probabilities {
public:
    /// Smallest admissible entry. Zero-probability symbols must be handled
    /// by the caller (unused-symbol costs / reconstruction offsets), never
    /// passed in here.
    static constexpr double kMinEntry = 1e-12;
    /// Tolerance on |sum - 1|.
    static constexpr double kSumTolerance = 1e-9;

    /// Throws std::invalid_argument on empty input, non-finite entries,
    /// entries below kMinEntry, or sum outside 1 +/- kSumTolerance.
    explicit Probabilities(std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t s) const { return values_[s]; }
    const std::vector<double>& values() const { return values_; }

    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

private:
    std::vector<double> values_;
};

}  // namespace ppvq
