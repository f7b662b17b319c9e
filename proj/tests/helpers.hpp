#pragma once

#include "smip/selective.hpp"

#include <optional>
#include <vector>

namespace smip::test {

inline LabeledInstance inst(double mu, double sigma, int y, std::optional<double> value = std::nullopt,
                            std::size_t id = 0)
{
    LabeledInstance i;
    i.id = id;
    i.est = {mu, sigma};
    i.y = y;
    i.value = value;
    return i;
}

inline std::vector<LabeledInstance> numbered(std::vector<LabeledInstance> v)
{
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k].id = k;
    return v;
}

} // namespace smip::test
