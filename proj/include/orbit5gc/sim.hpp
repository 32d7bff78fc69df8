#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "orbit5gc/types.hpp"

namespace orbit5gc {

// Deterministic discrete-event scheduler. Events at equal timestamps run
// in insertion (FIFO) order; handlers run to completion.
class Simulator {
public:
    void at(TimeUs t, std::function<void()> fn) {
        queue_.push(Item{t < now_ ? now_ : t, next_seq_++, std::move(fn)});
    }

    void after(TimeUs delay, std::function<void()> fn) { at(now_ + delay, std::move(fn)); }

    TimeUs now() const { return now_; }
    std::uint64_t events_processed() const { return processed_; }

    // Scheduler sequence number of the event currently executing; trace
    // records carry it so verification can find event boundaries.
    std::uint64_t current_event() const { return current_event_; }

    // Timestamp of the next pending event, -1 when the queue is empty.
    TimeUs peek_next_time() const { return queue_.empty() ? -1 : queue_.top().t; }

    bool step() {
        if (queue_.empty()) return false;
        Item item = std::move(const_cast<Item&>(queue_.top()));
        queue_.pop();
        now_ = item.t;
        ++processed_;
        current_event_ = processed_;
        item.fn();
        return true;
    }

    void run() {
        while (step()) {}
    }

private:
    struct Item {
        TimeUs t;
        std::uint64_t seq;
        std::function<void()> fn;

        bool operator>(const Item& o) const { return t != o.t ? t > o.t : seq > o.seq; }
    };

    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue_;
    TimeUs now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t processed_ = 0;
    std::uint64_t current_event_ = 0;
};

}  // namespace orbit5gc
