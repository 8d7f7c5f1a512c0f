#include "fixtures.hpp"

#include <algorithm>

#include "fcrepair/pnml.hpp"

#ifndef FCREPAIR_TEST_DATA
#error "FCREPAIR_TEST_DATA must point at tests/data"
#endif

namespace fcrepair::testing {

std::filesystem::path data_path(const std::string& file) { return std::filesystem::path(FCREPAIR_TEST_DATA) / file; }

NetSystem load_net(const std::string& file) { return read_pnml_file(data_path(file)); }

EventLog motivating_log() {
    EventLog log;
    log.add({kSend, kCheck, kNotify, kAccept});
    log.add({kCreate, kCheck, kComplete, kAccept});
    return log;
}

TransitionSystem motivating_ts() {
    std::vector<Label> events{kAccept, kCheck, kComplete, kCreate, kNotify, kSend};
    auto id = [&](const char* l) {
        return static_cast<EventId>(std::find(events.begin(), events.end(), l) - events.begin());
    };
    std::vector<Arc> arcs{{0, id(kSend), 1},     {0, id(kCreate), 2},   {1, id(kCheck), 3}, {2, id(kCheck), 4},
                          {3, id(kNotify), 5},   {4, id(kComplete), 5}, {5, id(kAccept), 6}};
    return TransitionSystem(events, 7, arcs, 0, {6});
}

}  // namespace fcrepair::testing
