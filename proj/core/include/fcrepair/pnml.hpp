#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fcrepair/petri_net.hpp"

namespace fcrepair {

/// Reads the PNML place/transition subset: places with optional
/// <initialMarking>, transitions whose <name> is the label (silent when the
/// name is missing or empty, or when a <toolspecific activity="$invisible$">
/// child is present), unweighted arcs, and an optional ProM-style
/// <finalmarkings> block. Without that block the finals default to [sink]
/// for workflow nets and to the empty set otherwise.
///
/// Throws ParseError for malformed XML, unknown arc endpoints, weighted
/// arcs, duplicate labels, or a document without any initial marking.
NetSystem parse_pnml(std::string_view xml);

/// Deterministic PNML text; parse_pnml(serialize_pnml(s)) reproduces s.
std::string serialize_pnml(const NetSystem& sys, std::string_view net_id = "net");

NetSystem read_pnml_file(const std::filesystem::path& path);

}  // namespace fcrepair
