#include "hra/grid.hpp"

#include <bit>
#include <cmath>

namespace hra {

void GridConfig::validate() const {
    if (freq_rbs < 1) throw std::invalid_argument("grid.freq_rbs must be >= 1");
    if (time_slots < 1) throw std::invalid_argument("grid.time_slots must be >= 1");
    if (symbols_per_rb < 1) throw std::invalid_argument("grid.symbols_per_rb must be >= 1");
    if (overhead_symbols < 0) throw std::invalid_argument("grid.overhead_symbols must be >= 0");
}

void ServiceProfile::validate() const {
    if (packet_bytes < 1) throw std::invalid_argument("profile.packet_bytes must be >= 1");
    const bool pow2 = mod_order >= 2 && mod_order <= 256 &&
                      std::has_single_bit(static_cast<unsigned>(mod_order));
    if (!pow2) throw std::invalid_argument("profile.mod_order must be a power of two in [2,256]");
    if (rb_override && *rb_override < 1)
        throw std::invalid_argument("profile.rb_override must be >= 1");
}

double tti_ms(int mu, int n_sym, int symbols_per_rb) {
    if (mu < 0 || mu > max_numerology)
        throw std::invalid_argument("numerology mu must be in {0,1,2}");
    if (n_sym < 1) throw std::invalid_argument("n_sym must be >= 1");
    return static_cast<double>(n_sym) / ((1 << mu) * symbols_per_rb);
}

int symbols_per_ms(int mu, int symbols_per_rb) {
    if (mu < 0 || mu > max_numerology)
        throw std::invalid_argument("numerology mu must be in {0,1,2}");
    return (1 << mu) * symbols_per_rb;
}

int packet_rbs(const ServiceProfile& profile, const GridConfig& grid) {
    if (profile.rb_override) return *profile.rb_override;
    // Exact integer ceil of (8P/lg + xi)/nu == (8P + xi*lg) / (lg*nu).
    const long long lg = static_cast<long long>(std::bit_width(static_cast<unsigned>(profile.mod_order)) - 1);
    const long long num = 8LL * profile.packet_bytes + static_cast<long long>(grid.overhead_symbols) * lg;
    const long long den = lg * grid.symbols_per_rb;
    return static_cast<int>((num + den - 1) / den);
}

int z_bound(const GridConfig& grid, int iota_urllc, int k_urllc, int iota_mmtc) {
    if (iota_mmtc < 1) throw std::invalid_argument("iota_mmtc must be >= 1");
    const long long remainder =
        static_cast<long long>(grid.total_rbs()) - static_cast<long long>(iota_urllc) * k_urllc;
    if (remainder < 0) {
        if (iota_urllc < 1) throw std::invalid_argument("iota_urllc must be >= 1");
        return grid.total_rbs() / iota_urllc;
    }
    return static_cast<int>(remainder / iota_mmtc) + k_urllc;
}

} // namespace hra
