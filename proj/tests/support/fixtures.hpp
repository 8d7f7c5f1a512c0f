#pragma once

#include <filesystem>
#include <string>

#include "fcrepair/event_log.hpp"
#include "fcrepair/petri_net.hpp"
#include "fcrepair/transition_system.hpp"

namespace fcrepair::testing {

std::filesystem::path data_path(const std::string& file);

NetSystem load_net(const std::string& file);

/// The two application-handling traces.
EventLog motivating_log();

/// The seven-state system of the motivating log written out by hand:
/// s1 -send-> s2, s1 -create-> s3, s2 -check-> s4, s3 -check-> s5,
/// s4 -notify-> s6, s5 -complete-> s6, s6 -accept-> s7 (final).
/// State k is s(k+1).
TransitionSystem motivating_ts();

inline constexpr const char* kSend = "send application";
inline constexpr const char* kCreate = "create application";
inline constexpr const char* kCheck = "check application";
inline constexpr const char* kNotify = "notify client";
inline constexpr const char* kComplete = "complete application";
inline constexpr const char* kAccept = "accept application";

}  // namespace fcrepair::testing
