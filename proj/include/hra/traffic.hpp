#pragma once

#include <vector>

#include "hra/rng.hpp"

namespace hra {

/// Mixed arrival model: mMTC users activate per frame with probability p
/// (plus a periodic cohort firing every t_mmtc_period frames), URLLC users
/// follow a Beta-shaped activation profile repeating every t_urllc_period
/// frames.
struct TrafficConfig {
    int k_mmtc = 1000;          // mMTC population
    int k_urllc = 25;           // URLLC population
    double p_active = 0.005;    // per-frame mMTC activation probability
    int k_mmtc_periodic = 10;   // periodic mMTC cohort size, <= k_mmtc
    int t_mmtc_period = 10;     // frames between periodic mMTC bursts
    double alpha = 3.0;         // Beta shape parameters
    double beta = 4.0;
    int t_urllc_period = 10;    // URLLC profile period in frames

    void validate() const;
};

/// Per-user URLLC activation probability at frame t: the Beta(alpha,beta)
/// density sampled at tau = t mod T_u and clamped to [0,1].
double urllc_activation_probability(const TrafficConfig& cfg, long frame);

/// Indices (within the class population) of this frame's mMTC arrivals.
/// Users [0, k_mmtc_periodic) are the periodic cohort and fire together on
/// frames t = 0 mod t_mmtc_period; the rest draw Bernoulli(p) each frame.
std::vector<int> draw_mmtc_arrival_users(const TrafficConfig& cfg, long frame, Rng& rng);

/// Indices of this frame's URLLC arrivals.
std::vector<int> draw_urllc_arrival_users(const TrafficConfig& cfg, long frame, Rng& rng);

/// Arrival counts; these consume the random stream exactly as the
/// index-returning variants do.
int gen_mmtc_arrivals(const TrafficConfig& cfg, long frame, Rng& rng);
int gen_urllc_arrivals(const TrafficConfig& cfg, long frame, Rng& rng);

} // namespace hra
