#include "hra/acb.hpp"

#include <cmath>
#include <stdexcept>

namespace hra {

void AcbConfig::validate() const {
    if (p_fixed < 0.0 || p_fixed > 1.0)
        throw std::invalid_argument("acb.p must be in [0,1]");
    if (barring_time < 0) throw std::invalid_argument("acb.t_acb must be >= 0");
    if (max_attempts < 1) throw std::invalid_argument("acb.max_attempts must be >= 1");
}

double expected_success(int k_breve, int l) {
    if (l < 1) throw std::invalid_argument("expected_success: channel count must be >= 1");
    if (k_breve < 0) throw std::invalid_argument("expected_success: backlog must be >= 0");
    if (k_breve == 0) return 0.0;
    return k_breve * std::pow(1.0 - 1.0 / l, k_breve - 1);
}

double optimal_acb(double n_bar) {
    if (n_bar < 0.0) throw std::invalid_argument("optimal_acb: n_bar must be >= 0");
    if (n_bar <= 1.0) return 1.0;
    return 1.0 / n_bar;
}

bool acb_check(double p, Rng& rng) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("acb_check: p must be in [0,1]");
    const double q = uniform01(rng);
    return p > 0.0 && q <= p;
}

int barring_delay(int t_acb, Rng& rng) {
    if (t_acb < 0) throw std::invalid_argument("barring_delay: t_acb must be >= 0");
    const double wait = (0.7 + 0.1 * uniform01(rng)) * t_acb;
    return static_cast<int>(std::lround(wait));
}

} // namespace hra
