#include "hra/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hra {

void TrafficConfig::validate() const {
    if (k_mmtc < 0) throw std::invalid_argument("traffic.k_mmtc must be >= 0");
    if (k_urllc < 0) throw std::invalid_argument("traffic.k_urllc must be >= 0");
    if (p_active < 0.0 || p_active > 1.0)
        throw std::invalid_argument("traffic.p must be in [0,1]");
    if (k_mmtc_periodic < 0 || k_mmtc_periodic > k_mmtc)
        throw std::invalid_argument("traffic.k_mmtc_periodic must be in [0, k_mmtc]");
    if (t_mmtc_period < 1) throw std::invalid_argument("traffic.t_mmtc_period must be >= 1");
    if (t_urllc_period < 1) throw std::invalid_argument("traffic.t_urllc_period must be >= 1");
    if (alpha <= 0.0 || beta <= 0.0)
        throw std::invalid_argument("traffic.alpha and traffic.beta must be > 0");
}

double urllc_activation_probability(const TrafficConfig& cfg, long frame) {
    const double period = cfg.t_urllc_period;
    const double tau = static_cast<double>(frame % cfg.t_urllc_period);
    const double b = std::beta(cfg.alpha, cfg.beta);
    const double q = std::pow(tau, cfg.alpha - 1.0) * std::pow(period - tau, cfg.beta - 1.0) /
                     (std::pow(period, cfg.alpha + cfg.beta - 1.0) * b);
    return std::clamp(q, 0.0, 1.0);
}

std::vector<int> draw_mmtc_arrival_users(const TrafficConfig& cfg, long frame, Rng& rng) {
    std::vector<int> users;
    if (frame % cfg.t_mmtc_period == 0) {
        for (int u = 0; u < cfg.k_mmtc_periodic; ++u) users.push_back(u);
    }
    // Aperiodic users only; the periodic cohort does not also draw Bernoulli.
    for (int u = cfg.k_mmtc_periodic; u < cfg.k_mmtc; ++u) {
        if (uniform01(rng) >= 1.0 - cfg.p_active) users.push_back(u);
    }
    return users;
}

std::vector<int> draw_urllc_arrival_users(const TrafficConfig& cfg, long frame, Rng& rng) {
    const double q = urllc_activation_probability(cfg, frame);
    std::vector<int> users;
    for (int u = 0; u < cfg.k_urllc; ++u) {
        if (uniform01(rng) >= 1.0 - q) users.push_back(u);
    }
    return users;
}

int gen_mmtc_arrivals(const TrafficConfig& cfg, long frame, Rng& rng) {
    return static_cast<int>(draw_mmtc_arrival_users(cfg, frame, rng).size());
}

int gen_urllc_arrivals(const TrafficConfig& cfg, long frame, Rng& rng) {
    return static_cast<int>(draw_urllc_arrival_users(cfg, frame, rng).size());
}

} // namespace hra
