#include "fcrepair/pnml.hpp"

#include <charconv>
#include <sstream>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "fcrepair/error.hpp"
#include "io.hpp"

namespace fcrepair {

namespace {

namespace pt = boost::property_tree;

std::string trimmed(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

std::uint32_t parse_count(const std::string& text, const std::string& context) {
    const auto s = trimmed(text);
    std::uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError("invalid token count '" + s + "' in " + context);
    return value;
}

struct RawArc {
    std::string id, source, target;
};

struct Collected {
    std::vector<std::pair<std::string, std::optional<std::string>>> places;  // id, name
    std::vector<std::uint32_t> initial;
    bool any_marking = false;
    std::vector<std::pair<std::string, std::optional<Label>>> transitions;
    std::vector<RawArc> arcs;
};

std::string attr(const pt::ptree& node, const char* name) {
    return node.get<std::string>(std::string("<xmlattr>.") + name, "");
}

std::optional<std::string> name_text(const pt::ptree& node) {
    const auto text = node.get_optional<std::string>("name.text");
    if (!text) return std::nullopt;
    return trimmed(*text);
}

void collect(const pt::ptree& container, Collected& out) {
    for (const auto& [tag, node] : container) {
        if (tag == "page") {
            collect(node, out);
        } else if (tag == "place") {
            const auto id = attr(node, "id");
            if (id.empty()) throw ParseError("<place> without id");
            out.places.emplace_back(id, name_text(node));
            std::uint32_t tokens = 0;
            if (const auto m = node.get_child_optional("initialMarking")) {
                tokens = parse_count(m->get<std::string>("text", ""), "initialMarking of place " + id);
                out.any_marking = true;
            }
            out.initial.push_back(tokens);
        } else if (tag == "transition") {
            const auto id = attr(node, "id");
            if (id.empty()) throw ParseError("<transition> without id");
            bool invisible = false;
            for (const auto& [child_tag, child] : node)
                if (child_tag == "toolspecific" && attr(child, "activity") == "$invisible$") invisible = true;
            auto label = name_text(node);
            if (invisible || (label && label->empty())) label.reset();
            out.transitions.emplace_back(id, std::move(label));
        } else if (tag == "arc") {
            RawArc arc{attr(node, "id"), attr(node, "source"), attr(node, "target")};
            if (const auto w = node.get_child_optional("inscription")) {
                if (parse_count(w->get<std::string>("text", ""), "inscription of arc " + arc.id) != 1)
                    throw ParseError("weighted arc '" + arc.id + "' is not supported");
            }
            out.arcs.push_back(std::move(arc));
        }
    }
}

std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

NetSystem parse_pnml(std::string_view xml) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(xml)};
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError("malformed PNML: " + e.message(), e.line());
    }
    const auto net_node = tree.get_child_optional("pnml.net");
    if (!net_node) throw ParseError("PNML document has no <pnml><net> element");

    Collected raw;
    collect(*net_node, raw);
    if (!raw.any_marking) throw ParseError("missing <initialMarking>: no place carries an initial marking");

    NetSystem sys;
    try {
        for (const auto& [id, name] : raw.places) sys.net.add_place(id, name.value_or(""));
        for (const auto& [id, label] : raw.transitions) sys.net.add_transition(id, label);
        for (const auto& arc : raw.arcs) {
            const auto sp = sys.net.find_place(arc.source);
            const auto st = sys.net.find_transition(arc.source);
            const auto tp = sys.net.find_place(arc.target);
            const auto tt = sys.net.find_transition(arc.target);
            if (sp && tt) {
                sys.net.add_input_arc(*sp, *tt);
            } else if (st && tp) {
                sys.net.add_output_arc(*st, *tp);
            } else if ((!sp && !st) || (!tp && !tt)) {
                throw ParseError("arc '" + arc.id + "' references an unknown node");
            } else {
                throw ParseError("arc '" + arc.id + "' connects two nodes of the same kind");
            }
        }
    } catch (const PreconditionError& e) {
        throw ParseError(e.what());
    }
    sys.initial = Marking(raw.initial);

    if (const auto finals = net_node->get_child_optional("finalmarkings")) {
        for (const auto& [tag, marking] : *finals) {
            if (tag != "marking") continue;
            Marking m(sys.net.num_places());
            for (const auto& [ptag, place] : marking) {
                if (ptag != "place") continue;
                const auto ref = attr(place, "idref");
                const auto p = sys.net.find_place(ref);
                if (!p) throw ParseError("final marking references unknown place '" + ref + "'");
                m[*p] = parse_count(place.get<std::string>("text", ""), "final marking of place " + ref);
            }
            sys.add_final(std::move(m));
        }
    } else {
        const auto wf = is_workflow_net(sys.net);
        if (wf.sink_candidates.size() == 1 && wf.source_candidates.size() == 1) {
            Marking m(sys.net.num_places());
            m[*wf.sink] = 1;
            sys.add_final(std::move(m));
        }
    }
    return sys;
}

std::string serialize_pnml(const NetSystem& sys, std::string_view net_id) {
    sys.validate();
    const auto& net = sys.net;
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<pnml>\n"
        << "  <net id=\"" << escape(net_id) << "\" type=\"http://www.pnml.org/version-2009/grammar/ptnet\">\n"
        << "    <page id=\"page\">\n";
    for (PlaceIndex p = 0; p < net.num_places(); ++p) {
        const auto& place = net.place(p);
        out << "      <place id=\"" << escape(place.id) << "\">\n"
            << "        <name>\n          <text>" << escape(place.name.empty() ? place.id : place.name)
            << "</text>\n        </name>\n";
        if (sys.initial[p] > 0)
            out << "        <initialMarking>\n          <text>" << sys.initial[p] << "</text>\n        </initialMarking>\n";
        out << "      </place>\n";
    }
    for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
        const auto& tr = net.transition(t);
        out << "      <transition id=\"" << escape(tr.id) << "\">\n"
            << "        <name>\n          <text>" << escape(tr.label ? *tr.label : tr.id) << "</text>\n        </name>\n";
        if (tr.silent()) out << "        <toolspecific tool=\"ProM\" version=\"6.4\" activity=\"$invisible$\"/>\n";
        out << "      </transition>\n";
    }
    std::size_t arc_id = 0;
    for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
        for (const auto p : net.inputs(t))
            out << "      <arc id=\"a" << ++arc_id << "\" source=\"" << escape(net.place(p).id) << "\" target=\""
                << escape(net.transition(t).id) << "\"/>\n";
        for (const auto p : net.outputs(t))
            out << "      <arc id=\"a" << ++arc_id << "\" source=\"" << escape(net.transition(t).id)
                << "\" target=\"" << escape(net.place(p).id) << "\"/>\n";
    }
    out << "    </page>\n"
        << "    <finalmarkings>\n";
    for (const auto& f : sys.finals) {
        out << "      <marking>\n";
        for (PlaceIndex p = 0; p < f.size(); ++p)
            if (f[p] > 0)
                out << "        <place idref=\"" << escape(net.place(p).id) << "\">\n          <text>" << f[p]
                    << "</text>\n        </place>\n";
        out << "      </marking>\n";
    }
    out << "    </finalmarkings>\n"
        << "  </net>\n"
        << "</pnml>\n";
    return out.str();
}

NetSystem read_pnml_file(const std::filesystem::path& path) { return parse_pnml(detail::read_file(path)); }

}  // namespace fcrepair
