#pragma once

#include <map>
#include <utility>

#include "rnls/ground_state.hpp"

namespace rnls::testing {

// Ground-state solves are the slowest fixture; share them across cases.
inline const GroundState& cached_power_Q(double p, double c = 1.0) {
    static std::map<std::pair<double, double>, GroundState> cache;
    auto it = cache.find({p, c});
    if (it == cache.end())
        it = cache.emplace(std::make_pair(p, c),
                           solve_ground_state(Nonlinearity::power(p, 1), c))
                 .first;
    return it->second;
}

inline const GroundState& cached_exponential_Q(double kappa0 = 1.0) {
    static std::map<double, GroundState> cache;
    auto it = cache.find(kappa0);
    if (it == cache.end())
        it = cache.emplace(kappa0,
                           solve_ground_state(Nonlinearity::exponential(kappa0, 1), 1.0))
                 .first;
    return it->second;
}

}  // namespace rnls::testing
