#pragma once

#include <string>

#include "fcrepair/petri_net.hpp"
#include "fcrepair/transition_system.hpp"

namespace fcrepair {

/// States s1..sn (1-based), final states double-circled, an arrow into the
/// initial state.
std::string to_dot(const TransitionSystem& ts, const std::string& name = "ts");

/// Places as circles with one dot per initial token, transitions as boxes,
/// silent transitions filled black.
std::string to_dot(const NetSystem& sys, const std::string& name = "net");

}  // namespace fcrepair
