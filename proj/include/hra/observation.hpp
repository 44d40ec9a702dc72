#pragma once

#include <deque>
#include <stdexcept>

namespace hra {

/// Channel-state counts for one service class in one frame. The sum always
/// equals the number of dedicated channels of that class.
struct ClassTriplet {
    int success = 0;
    int collision = 0;
    int idle = 0;

    int total() const { return success + collision + idle; }
};

/// What the base station records about frame `frame_index`: one triplet per
/// class. This is its only traffic telemetry.
struct Observation {
    ClassTriplet urllc;
    ClassTriplet mmtc;
    long frame_index = 0;
};

/// Sliding window of the most recent observations, ordered and contiguous
/// by frame index.
class History {
public:
    explicit History(int window)
        : window_(window) {
        if (window < 1) throw std::invalid_argument("history window must be >= 1");
    }

    void push(const Observation& obs) {
        if (!buf_.empty() && obs.frame_index != buf_.back().frame_index + 1)
            throw std::logic_error("history observations must be contiguous");
        buf_.push_back(obs);
        if (static_cast<int>(buf_.size()) > window_) buf_.pop_front();
    }

    bool empty() const { return buf_.empty(); }
    int size() const { return static_cast<int>(buf_.size()); }
    int window() const { return window_; }
    const Observation& operator[](int i) const { return buf_[i]; }
    const Observation& back() const { return buf_.back(); }
    void clear() { buf_.clear(); }

private:
    int window_;
    std::deque<Observation> buf_;
};

} // namespace hra
