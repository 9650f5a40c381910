#ifndef OAPSIM_ENGINE_HPP
#define OAPSIM_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "oapsim/netmodel.hpp"

namespace oapsim {

enum class EventKind { SlotBoundary, PacketDelivery, TimerExpiry, ProtocolWake };

struct Event {
    std::uint64_t fire_time = 0;
    std::uint64_t sequence = 0; // monotone tiebreak, assigned by the engine
    NodeId target = kNoNode;
    EventKind kind = EventKind::ProtocolWake;
    std::uint64_t payload_index = 0; // caller-owned storage index
};

struct SimClock {
    std::uint64_t now = 0;
    std::uint64_t slot_index = 0;
};

struct SimOutcome {
    std::uint64_t completion_time = 0;
    bool timed_out = false;
    std::uint64_t events_processed = 0;
};

// Single-threaded time-ordered event queue. Events dequeue in
// (fire_time, sequence) order; the clock never moves backward.
class Engine {
public:
    const SimClock& clock() const { return clock_; }

    // Throws std::logic_error for fire_time < now.
    void schedule(std::uint64_t fire_time, NodeId target, EventKind kind,
                  std::uint64_t payload_index = 0);

    // Drains events, invoking handler for each, until the predicate holds
    // (checked after each event), the queue empties, or the clock passes
    // max_time (flagged timeout, never an exception).
    SimOutcome run_until(const std::function<bool()>& predicate,
                         std::uint64_t max_time,
                         const std::function<void(const Event&)>& handler);

    bool empty() const { return queue_.empty(); }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
            return a.sequence > b.sequence;
        }
    };
    SimClock clock_;
    std::uint64_t next_seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

} // namespace oapsim

#endif
