#pragma once

#include "hra/rng.hpp"

namespace hra {

enum class AcbMode {
    fixed,          // broadcast a constant factor
    optimal_oracle, // p* = min(1, 1/n_bar) from the true per-channel collider counts
};

struct AcbConfig {
    AcbMode mode = AcbMode::optimal_oracle;
    double p_fixed = 1.0;       // factor used in fixed mode
    int barring_time = 0;       // T_acb in frames
    int max_attempts = 20;      // W, access attempts before a packet is dropped
    bool apply_urllc = true;    // classes the barring check is applied to
    bool apply_mmtc = true;

    void validate() const;
};

/// Expected number of success channels with k_breve users selecting uniformly
/// among l channels: K*(1 - 1/L)^(K-1).
double expected_success(int k_breve, int l);

/// Barring factor that maximizes successful transmissions given a mean of
/// n_bar colliding users per channel: min(1, 1/n_bar).
double optimal_acb(double n_bar);

/// One barring check: draw q ~ U[0,1); pass iff q <= p. p=0 never passes,
/// p=1 always passes.
bool acb_check(double p, Rng& rng);

/// Barring delay in frames: round((0.7 + 0.1*U[0,1)) * t_acb).
int barring_delay(int t_acb, Rng& rng);

} // namespace hra
