#pragma once

#include <span>

namespace regret {

// Running sum built on the TwoSum error-free transformation: every addition
// records its exact rounding error and the errors are folded back in at the
// end. Order of add() calls fixes the result bit-for-bit.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double s = sum_ + x;
        const double bp = s - sum_;
        const double err = (sum_ - (s - bp)) + (x - bp);
        sum_ = s;
        carry_ += err;
    }

    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
    CompensatedSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

}  // namespace regret
