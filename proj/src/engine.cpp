#include "oapsim/engine.hpp"

#include <stdexcept>

namespace oapsim {

void Engine::schedule(std::uint64_t fire_time, NodeId target, EventKind kind,
                      std::uint64_t payload_index) {
    if (fire_time < clock_.now)
        throw std::logic_error("cannot schedule an event in the past");
    queue_.push(Event{fire_time, next_seq_++, target, kind, payload_index});
}

SimOutcome Engine::run_until(const std::function<bool()>& predicate,
                             std::uint64_t max_time,
                             const std::function<void(const Event&)>& handler) {
    SimOutcome out;
    if (predicate()) {
        out.completion_time = clock_.now;
        return out;
    }
    while (!queue_.empty()) {
        Event ev = queue_.top();
        if (ev.fire_time > max_time) {
            out.timed_out = true;
            out.completion_time = clock_.now;
            return out;
        }
        queue_.pop();
        clock_.now = ev.fire_time;
        if (ev.kind == EventKind::SlotBoundary) clock_.slot_index = ev.fire_time;
        handler(ev);
        ++out.events_processed;
        if (predicate()) {
            out.completion_time = clock_.now;
            return out;
        }
    }
    out.completion_time = clock_.now;
    return out;
}

} // namespace oapsim
