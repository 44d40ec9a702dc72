#include "hra/slicer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace hra {

namespace {

int align_up(int x, int a) { return ((x + a - 1) / a) * a; }

// Bottom-left scan order: earliest time slot first, then lowest frequency.
// The remaining fields only break ties deterministically.
bool bottom_left_less(const ChannelRect& a, const ChannelRect& b) {
    if (a.s0 != b.s0) return a.s0 < b.s0;
    if (a.f0 != b.f0) return a.f0 < b.f0;
    if (a.s_ext != b.s_ext) return a.s_ext > b.s_ext;
    return a.f_ext > b.f_ext;
}

// Maximal free-rectangle bookkeeping. Free rects may overlap each other;
// each one is a maximal empty region, so any box placed inside a single
// free rect cannot collide with previously placed boxes.
class FreeSpace {
public:
    explicit FreeSpace(const GridConfig& g) {
        free_.push_back({0, 0, g.freq_rbs, g.time_slots, 0});
    }

    const std::vector<ChannelRect>& rects() const { return free_; }

    long long max_area() const {
        long long m = 0;
        for (const auto& r : free_) m = std::max(m, static_cast<long long>(r.area()));
        return m;
    }

    void place(const ChannelRect& box) {
        std::vector<ChannelRect> next;
        next.reserve(free_.size() + 4);
        for (const auto& fr : free_) {
            if (!fr.overlaps(box)) {
                next.push_back(fr);
                continue;
            }
            if (box.f0 > fr.f0)
                next.push_back({fr.f0, fr.s0, box.f0 - fr.f0, fr.s_ext, 0});
            if (box.f_end() < fr.f_end())
                next.push_back({box.f_end(), fr.s0, fr.f_end() - box.f_end(), fr.s_ext, 0});
            if (box.s0 > fr.s0)
                next.push_back({fr.f0, fr.s0, fr.f_ext, box.s0 - fr.s0, 0});
            if (box.s_end() < fr.s_end())
                next.push_back({fr.f0, box.s_end(), fr.f_ext, fr.s_end() - box.s_end(), 0});
        }
        prune(next);
        free_ = std::move(next);
        std::sort(free_.begin(), free_.end(), bottom_left_less);
    }

private:
    static void prune(std::vector<ChannelRect>& rects) {
        std::vector<ChannelRect> kept;
        kept.reserve(rects.size());
        for (std::size_t i = 0; i < rects.size(); ++i) {
            bool contained = false;
            for (std::size_t j = 0; j < rects.size() && !contained; ++j) {
                if (i == j) continue;
                if (rects[j].contains(rects[i]) &&
                    !(rects[i].contains(rects[j]) && j > i))  // keep one copy of duplicates
                    contained = true;
            }
            if (!contained) kept.push_back(rects[i]);
        }
        rects = std::move(kept);
    }

    std::vector<ChannelRect> free_;
};

struct BoxShape {
    int f_ext;
    int s_ext;
};

// Smallest-bandwidth box of >= iota RBs at numerology mu inside a w x h
// free rect: f_ext = 2^mu * k with the least k whose ceil(iota/f_ext) rows
// fit the rect height.
std::optional<BoxShape> shape_box(int iota, int mu, int w, int h) {
    const int step = 1 << mu;
    for (int f_ext = step; f_ext <= w; f_ext += step) {
        const int s_ext = (iota + f_ext - 1) / f_ext;
        if (s_ext <= h) return BoxShape{f_ext, s_ext};
    }
    return std::nullopt;
}

} // namespace

void SlicerWeights::validate() const {
    auto in01 = [](double w) { return w >= 0.0 && w <= 1.0; };
    if (!in01(w_urllc) || !in01(w_mmtc) || !in01(w_penalty))
        throw std::invalid_argument("slicer weights must be in [0,1]");
    if (std::abs(w_urllc + w_mmtc + w_penalty - 1.0) > 1e-9)
        throw std::invalid_argument("slicer weights must sum to 1");
    if (!(w_urllc > w_mmtc && w_mmtc >= w_penalty))
        throw std::invalid_argument("slicer weights must satisfy w_urllc > w_mmtc >= w_penalty");
}

int ChannelPlan::assigned_rbs() const {
    auto sum = [](const std::vector<ChannelRect>& v) {
        return std::accumulate(v.begin(), v.end(), 0,
                               [](int acc, const ChannelRect& r) { return acc + r.area(); });
    };
    return sum(urllc_channels) + sum(mmtc_channels);
}

ChannelPlan maxrect_pack(int k_hat_urllc, int k_hat_mmtc, const GridConfig& grid,
                         const ServiceProfile& urllc_profile,
                         const ServiceProfile& mmtc_profile,
                         const SlicerOptions& opts, long frame_index) {
    if (k_hat_urllc < 0 || k_hat_mmtc < 0)
        throw std::invalid_argument("maxrect_pack: demands must be >= 0");
    if (opts.urllc_mu < 0 || opts.urllc_mu > max_numerology)
        throw std::invalid_argument("maxrect_pack: urllc_mu must be in {0,1,2}");

    ChannelPlan plan;
    plan.frame_index = frame_index;
    FreeSpace space(grid);

    if (!opts.slicing) {
        // Uniform channels only: every channel is one slot by baseline_rbs,
        // handed to URLLC demand first.
        const ChannelRect shape{0, 0, opts.baseline_rbs, 1, opts.baseline_mu};
        int remaining_u = k_hat_urllc;
        int remaining_m = k_hat_mmtc;
        while (remaining_u + remaining_m > 0) {
            bool placed = false;
            for (const auto& fr : space.rects()) {
                if (fr.f_ext >= shape.f_ext && fr.s_ext >= shape.s_ext) {
                    ChannelRect box{fr.f0, fr.s0, shape.f_ext, shape.s_ext, shape.mu};
                    if (remaining_u > 0) {
                        plan.urllc_channels.push_back(box);
                        --remaining_u;
                    } else {
                        plan.mmtc_channels.push_back(box);
                        --remaining_m;
                    }
                    space.place(box);
                    placed = true;
                    break;
                }
            }
            if (!placed) break;
        }
        plan.free_rects = space.rects();
        return plan;
    }

    // Phase 1: URLLC boxes, one time slot each, width aligned to the URLLC
    // numerology so the sub-channel split of constraint 7e stays feasible.
    const int iota_u = packet_rbs(urllc_profile, grid);
    const int width_u = align_up(iota_u, 1 << opts.urllc_mu);
    for (int l = 0; l < k_hat_urllc; ++l) {
        bool placed = false;
        for (const auto& fr : space.rects()) {
            if (fr.f_ext >= width_u) {
                ChannelRect box{fr.f0, fr.s0, width_u, 1, opts.urllc_mu};
                plan.urllc_channels.push_back(box);
                space.place(box);
                placed = true;
                break;
            }
        }
        if (!placed) break;
    }

    // Phase 2: mMTC boxes. At each bottom-left vertex try numerologies 0..2;
    // if none admits a shape, move to the next vertex.
    const int iota_m = packet_rbs(mmtc_profile, grid);
    while (plan.l_mmtc() < k_hat_mmtc && space.max_area() >= iota_m) {
        bool placed = false;
        for (const auto& fr : space.rects()) {
            for (int mu = 0; mu <= max_numerology && !placed; ++mu) {
                if (auto shape = shape_box(iota_m, mu, fr.f_ext, fr.s_ext)) {
                    ChannelRect box{fr.f0, fr.s0, shape->f_ext, shape->s_ext, mu};
                    plan.mmtc_channels.push_back(box);
                    space.place(box);
                    placed = true;
                }
            }
            if (placed) break;
        }
        if (!placed) break;
    }

    plan.free_rects = space.rects();
    return plan;
}

const char* to_string(PlanConstraint c) {
    switch (c) {
        case PlanConstraint::grid_bounds: return "grid_bounds";
        case PlanConstraint::urllc_single_slot: return "urllc_single_slot";
        case PlanConstraint::numerology_alignment: return "numerology_alignment";
        case PlanConstraint::overlap: return "overlap";
        case PlanConstraint::packet_size: return "packet_size";
    }
    return "?";
}

std::vector<PlanViolation> validate_plan(const ChannelPlan& plan, const GridConfig& grid,
                                         const ServiceProfile& urllc_profile,
                                         const ServiceProfile& mmtc_profile) {
    std::vector<PlanViolation> out;
    const int iota_u = packet_rbs(urllc_profile, grid);
    const int iota_m = packet_rbs(mmtc_profile, grid);
    const int l_u = plan.l_urllc();

    std::vector<const ChannelRect*> all;
    all.reserve(plan.total_channels());
    for (const auto& r : plan.urllc_channels) all.push_back(&r);
    for (const auto& r : plan.mmtc_channels) all.push_back(&r);

    for (int i = 0; i < static_cast<int>(all.size()); ++i) {
        const ChannelRect& r = *all[i];
        const bool is_urllc = i < l_u;
        if (!r.within(grid) || r.f_ext < 1 || r.s_ext < 1)
            out.push_back({PlanConstraint::grid_bounds, i, -1});
        if (is_urllc && r.s_ext != 1)
            out.push_back({PlanConstraint::urllc_single_slot, i, -1});
        if (r.mu < 0 || r.mu > max_numerology || r.f_ext % (1 << r.mu) != 0)
            out.push_back({PlanConstraint::numerology_alignment, i, -1});
        if (r.area() < (is_urllc ? iota_u : iota_m))
            out.push_back({PlanConstraint::packet_size, i, -1});
        for (int j = i + 1; j < static_cast<int>(all.size()); ++j) {
            if (r.overlaps(*all[j]))
                out.push_back({PlanConstraint::overlap, i, j});
        }
    }
    return out;
}

double objective(const ChannelPlan& plan, const GainVectors& gains,
                 const SlicerWeights& weights, int k_breve_total, int z) {
    if (gains.urllc.size() != plan.urllc_channels.size() ||
        gains.mmtc.size() != plan.mmtc_channels.size())
        throw std::invalid_argument("objective: gain vector lengths must match the plan");

    double value = 0.0;
    for (double rho : gains.urllc) value += weights.w_urllc * rho;
    for (double rho : gains.mmtc) value += weights.w_mmtc * rho;

    const int served_bound = std::min(plan.total_channels(), z);
    const int shortage = std::max(0, k_breve_total - served_bound);
    return value - weights.w_penalty * shortage;
}

std::string dump_occupancy(const ChannelPlan& plan, const GridConfig& grid) {
    std::string cell(static_cast<std::size_t>(grid.total_rbs()), '.');
    auto paint = [&](const ChannelRect& r, char c) {
        for (int s = r.s0; s < r.s_end(); ++s)
            for (int f = r.f0; f < r.f_end(); ++f)
                cell[static_cast<std::size_t>(s) * grid.freq_rbs + f] = c;
    };
    for (std::size_t i = 0; i < plan.urllc_channels.size(); ++i)
        paint(plan.urllc_channels[i], static_cast<char>('A' + i % 26));
    for (std::size_t i = 0; i < plan.mmtc_channels.size(); ++i)
        paint(plan.mmtc_channels[i], static_cast<char>('a' + i % 26));

    std::string out;
    out.reserve(static_cast<std::size_t>(grid.total_rbs()) + grid.time_slots);
    for (int s = 0; s < grid.time_slots; ++s) {
        out.append(cell, static_cast<std::size_t>(s) * grid.freq_rbs,
                   static_cast<std::size_t>(grid.freq_rbs));
        out.push_back('\n');
    }
    return out;
}

} // namespace hra
