#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "hra/acb.hpp"
#include "hra/grid.hpp"
#include "hra/observation.hpp"
#include "hra/predictor.hpp"
#include "hra/slicer.hpp"
#include "hra/traffic.hpp"

namespace hra {

enum class UserStatus { idle, pending, barred };

/// One device. A user holds at most one pending packet; new arrivals while
/// busy are dropped and counted separately.
struct UserState {
    ServiceClass service = ServiceClass::mmtc;
    UserStatus status = UserStatus::idle;
    int attempts = 0;        // Msg1 participations for the current packet
    long rejoin_frame = 0;   // first frame a barred user contends again
    long barred_at = -1;     // frame the current barring started
    long arrival_frame = -1; // birth frame of the pending packet
};

/// How per-class channel counts are chosen each frame.
struct SlicerReservation {};  // pack from the predicted backlog
struct FixedReservation {
    int l_urllc = 8;
    int l_mmtc = 46;
};
struct TableReservation {
    std::vector<std::pair<int, int>> points;  // k_mmtc -> l_urllc, ascending
    int total = 54;
};
using ReservationPolicy = std::variant<SlicerReservation, FixedReservation, TableReservation>;

/// URLLC channel count for the given mMTC population: linear interpolation
/// between table points, clamped at the ends, rounded to nearest.
int table_l_urllc(const TableReservation& table, int k_mmtc);

struct EngineConfig {
    TrafficConfig traffic;
    GridConfig grid;
    ServiceProfile urllc_profile{32, 4, ServiceClass::urllc, std::nullopt};
    ServiceProfile mmtc_profile{200, 256, ServiceClass::mmtc, 16};
    SlicerOptions slicer;
    AcbConfig acb;
    ReservationPolicy reservation = SlicerReservation{};
    int history_window = 20;
    // Cold-start estimates used until the first observation exists.
    int prior_urllc = 1;
    int prior_mmtc = 1;

    void validate() const;
};

struct ClassFrameStats {
    int channels = 0;          // dedicated channels this frame
    int predicted = 0;         // estimate the reservation was built from
    int carried = 0;           // pending before arrivals (incl. rejoining barred)
    int arrivals = 0;          // accepted new packets
    int arrivals_dropped_busy = 0;
    int contenders = 0;        // carried + arrivals; the realized backlog
    int msg1_collided = 0;     // collided channels observed at Msg2
    int served = 0;
    int dropped = 0;           // packets abandoned after W attempts
    int newly_barred = 0;      // users entering barred state this frame
    int backlog_out = 0;       // still pending at frame end
    double p_acb = 1.0;        // broadcast barring factor
    long latency_frames = 0;   // summed serve-minus-arrival over served users
};

struct FrameOutcome {
    long frame = 0;
    Observation observation;  // end-of-frame channel states
    ClassFrameStats urllc;
    ClassFrameStats mmtc;

    const ClassFrameStats& stats(ServiceClass c) const {
        return c == ServiceClass::urllc ? urllc : mmtc;
    }
};

/// Per-frame four-step random access loop: SIB2 (predict + reserve), Msg1
/// (uniform channel selection), Msg2 (triplet observation + barring factor),
/// Msg3 (survivor retransmission). Owns the user population and history.
class SimulationEngine {
public:
    SimulationEngine(EngineConfig cfg, BacklogPredictor* predictor);

    FrameOutcome run_frame(long t, Rng& rng);

    const History& history() const { return history_; }
    const EngineConfig& config() const { return cfg_; }

    /// Pending users per class right now (the oracle's ground truth).
    BacklogEstimate true_backlog() const;

private:
    struct ClassChannels {
        int count = 0;
        std::vector<std::vector<int>> selectors;  // user ids per channel
    };

    void admit_arrivals(long t, Rng& rng, ClassFrameStats& su, ClassFrameStats& sm);
    std::pair<int, int> reserve_channels(const BacklogEstimate& est, long t);

    EngineConfig cfg_;
    BacklogPredictor* predictor_;
    std::vector<UserState> users_;  // URLLC ids first, then mMTC
    History history_;
};

struct RealizationTrace {
    std::vector<FrameOutcome> frames;
};

/// Independent realizations with per-realization derived seeds; the
/// predictor factory is invoked once per realization.
std::vector<RealizationTrace> run_simulation(
    const EngineConfig& cfg,
    const std::function<std::unique_ptr<BacklogPredictor>()>& predictor_factory, long frames,
    int realizations, std::uint64_t master_seed);

} // namespace hra
