#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace hra {

enum class ServiceClass { urllc, mmtc };

inline const char* to_string(ServiceClass c) {
    return c == ServiceClass::urllc ? "urllc" : "mmtc";
}

/// The time-frequency grid of one frame: F frequency resource blocks by
/// S time slots, each RB carrying nu OFDM symbols at base numerology.
struct GridConfig {
    int freq_rbs = 50;          // F
    int time_slots = 10;        // S
    int symbols_per_rb = 14;    // nu
    int overhead_symbols = 5;   // xi, protocol overhead per packet

    void validate() const;
    int total_rbs() const { return freq_rbs * time_slots; }
};

/// Per-service packet description used to derive the channel size in RBs.
struct ServiceProfile {
    int packet_bytes = 32;
    int mod_order = 4;                  // must be a power of two in [2, 256]
    ServiceClass service = ServiceClass::urllc;
    std::optional<int> rb_override;     // pins the RB count regardless of the formula

    void validate() const;
};

/// An axis-aligned rectangle of RBs forming one dedicated channel.
/// Contiguity in both dimensions is structural.
struct ChannelRect {
    int f0 = 0;      // first frequency RB, 0-based
    int s0 = 0;      // first time slot, 0-based
    int f_ext = 1;   // frequency extent in RBs
    int s_ext = 1;   // time extent in slots
    int mu = 0;      // numerology factor, 0..2

    int area() const { return f_ext * s_ext; }
    int f_end() const { return f0 + f_ext; }
    int s_end() const { return s0 + s_ext; }

    bool overlaps(const ChannelRect& o) const {
        return f0 < o.f_end() && o.f0 < f_end() && s0 < o.s_end() && o.s0 < s_end();
    }
    bool contains(const ChannelRect& o) const {
        return f0 <= o.f0 && s0 <= o.s0 && o.f_end() <= f_end() && o.s_end() <= s_end();
    }
    bool within(const GridConfig& g) const {
        return f0 >= 0 && s0 >= 0 && f_end() <= g.freq_rbs && s_end() <= g.time_slots;
    }
};

inline constexpr int max_numerology = 2;  // higher factors are mmWave-only

/// Transmission time interval in ms for n_sym symbols at numerology mu.
double tti_ms(int mu, int n_sym, int symbols_per_rb = 14);

/// Symbols that fit in one 1 ms slot at numerology mu.
int symbols_per_ms(int mu, int symbols_per_rb = 14);

/// Channel size in base (15 kHz x 1 ms) RBs for one packet of the profile:
/// ceil((8P/log2(M) + xi) / nu), unless the profile pins an override.
int packet_rbs(const ServiceProfile& profile, const GridConfig& grid);

/// Upper bound on the number of channels the grid can host when k_urllc
/// URLLC channels are reserved first.
int z_bound(const GridConfig& grid, int iota_urllc, int k_urllc, int iota_mmtc);

} // namespace hra
