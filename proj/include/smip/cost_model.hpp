#pragma once

#include "smip/selective.hpp"

#include <compare>
#include <cstdint>

namespace smip {

/// Currency amount in integer micro-units. Per-instance terms are rounded
/// once, so sums do not depend on summation order.
struct Money {
    std::int64_t micros = 0;

    static Money from_double(double v);
    double to_double() const { return static_cast<double>(micros) / 1e6; }

    Money& operator+=(Money o)
    {
        micros += o.micros;
        return *this;
    }
    Money& operator-=(Money o)
    {
        micros -= o.micros;
        return *this;
    }
    friend Money operator+(Money a, Money b) { return a += b; }
    friend Money operator-(Money a, Money b) { return a -= b; }
    friend auto operator<=>(const Money&, const Money&) = default;
};

struct CostModel {
    double w_tp = 0.2;
    double w_tn = 0.0;
    double w_fn = 3.0;
    double w_fp = 2.4;
    /// Cost of one manual review.
    double c = 3.0;

    /// Throws std::invalid_argument unless every field is finite and >= 0.
    void validate() const;
};

/// Contribution of one decided or rejected instance with value t. A
/// rejected instance earns its true-class benefit (review resolves it) and
/// pays c.
Money contribution(const CostModel& cm, DecisionKind kind, int y, double t);

} // namespace smip
