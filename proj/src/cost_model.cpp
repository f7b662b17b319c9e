#include "smip/cost_model.hpp"

#include <cmath>
#include <stdexcept>

namespace smip {

Money Money::from_double(double v)
{
    if (!std::isfinite(v))
        throw std::invalid_argument("Money: non-finite amount");
    return Money{std::llround(v * 1e6)};
}

void CostModel::validate() const
{
    for (double w : {w_tp, w_tn, w_fn, w_fp, c})
        if (!std::isfinite(w) || w < 0.0)
            throw std::invalid_argument("CostModel: multipliers and c must be finite and nonnegative");
}

Money contribution(const CostModel& cm, DecisionKind kind, int y, double t)
{
    switch (kind) {
    case DecisionKind::Positive:
        return y == 0 ? Money::from_double(cm.w_tp * t) : Money{} - Money::from_double(cm.w_fp * t);
    case DecisionKind::Negative:
        return y == 1 ? Money::from_double(cm.w_tn * t) : Money{} - Money::from_double(cm.w_fn * t);
    case DecisionKind::Reject:
        break;
    }
    const double benefit = y == 0 ? cm.w_tp * t : cm.w_tn * t;
    return Money::from_double(benefit) - Money::from_double(cm.c);
}

} // namespace smip
