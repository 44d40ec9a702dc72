#pragma once

#include <string>
#include <vector>

#include "hra/grid.hpp"

namespace hra {

/// Priority weights of the channel-assignment objective.
struct SlicerWeights {
    double w_urllc = 0.9;
    double w_mmtc = 0.05;
    double w_penalty = 0.05;

    void validate() const;
};

/// Per-channel received power gains; all ones unless a scoring experiment
/// configures otherwise.
struct GainVectors {
    std::vector<double> urllc;
    std::vector<double> mmtc;

    static GainVectors ones(std::size_t l_urllc, std::size_t l_mmtc) {
        return {std::vector<double>(l_urllc, 1.0), std::vector<double>(l_mmtc, 1.0)};
    }
};

/// One frame's channel layout: dedicated rectangles per class plus the
/// maximal free rectangles that remain.
struct ChannelPlan {
    std::vector<ChannelRect> urllc_channels;
    std::vector<ChannelRect> mmtc_channels;
    std::vector<ChannelRect> free_rects;
    long frame_index = 0;

    int l_urllc() const { return static_cast<int>(urllc_channels.size()); }
    int l_mmtc() const { return static_cast<int>(mmtc_channels.size()); }
    int total_channels() const { return l_urllc() + l_mmtc(); }
    int assigned_rbs() const;
};

struct SlicerOptions {
    bool slicing = true;   // false: uniform channels only (no-slicing baseline)
    int urllc_mu = 2;      // URLLC channel numerology; width is aligned to 2^mu
    int baseline_mu = 2;   // shape of the uniform baseline channel:
    int baseline_rbs = 16; // f_ext = baseline_rbs, s_ext = 1
};

/// Pack up to the requested per-class channel counts into the grid with the
/// maximal-rectangles bottom-left heuristic. URLLC first (single-slot boxes),
/// then mMTC boxes shaped per numerology at each bottom-left vertex.
ChannelPlan maxrect_pack(int k_hat_urllc, int k_hat_mmtc, const GridConfig& grid,
                         const ServiceProfile& urllc_profile,
                         const ServiceProfile& mmtc_profile,
                         const SlicerOptions& opts = {}, long frame_index = 0);

enum class PlanConstraint {
    grid_bounds,
    urllc_single_slot,     // each URLLC channel spans one time slot
    numerology_alignment,  // f_ext must be a multiple of 2^mu
    overlap,               // channels must use orthogonal resources
    packet_size,           // channel area must cover the class packet
};

const char* to_string(PlanConstraint c);

struct PlanViolation {
    PlanConstraint constraint;
    int channel_a = -1;  // combined index: URLLC channels first, then mMTC
    int channel_b = -1;  // second channel for overlap violations
};

/// Empty result iff the plan satisfies every structural constraint.
std::vector<PlanViolation> validate_plan(const ChannelPlan& plan, const GridConfig& grid,
                                         const ServiceProfile& urllc_profile,
                                         const ServiceProfile& mmtc_profile);

/// Assignment objective: weighted gain sums minus the shortage penalty
/// w_p * max(0, k_breve - min(L, z)). Assumes a validated plan.
double objective(const ChannelPlan& plan, const GainVectors& gains,
                 const SlicerWeights& weights, int k_breve_total, int z);

/// Text occupancy map, one line per time slot and one character per RB:
/// '.' free, 'A'.. for URLLC channels, 'a'.. for mMTC channels.
std::string dump_occupancy(const ChannelPlan& plan, const GridConfig& grid);

} // namespace hra
