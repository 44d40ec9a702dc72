#include <doctest.h>

#include "hra/rng.hpp"
#include "hra/slicer.hpp"

using namespace hra;

namespace {

const GridConfig ref_grid{50, 10, 14, 5};
const ServiceProfile urllc_ref{32, 4, ServiceClass::urllc, std::nullopt};   // iota 10
const ServiceProfile mmtc_ref{200, 256, ServiceClass::mmtc, 16};            // iota 16

SlicerOptions with_mu(int mu) {
    SlicerOptions opts;
    opts.urllc_mu = mu;
    return opts;
}

} // namespace

TEST_CASE("single URLLC box lands at the bottom-left vertex") {
    // At mu=0 the box is exactly the packet width.
    const ChannelPlan plan = maxrect_pack(1, 0, ref_grid, urllc_ref, mmtc_ref, with_mu(0));
    REQUIRE(plan.l_urllc() == 1);
    CHECK(plan.l_mmtc() == 0);
    const ChannelRect& r = plan.urllc_channels[0];
    CHECK(r.f0 == 0);
    CHECK(r.s0 == 0);
    CHECK(r.f_ext == 10);
    CHECK(r.s_ext == 1);

    // At the default mu=2 the width is aligned up to a multiple of 4.
    const ChannelPlan plan2 = maxrect_pack(1, 0, ref_grid, urllc_ref, mmtc_ref, with_mu(2));
    CHECK(plan2.urllc_channels[0].f_ext == 12);
    CHECK(plan2.urllc_channels[0].s_ext == 1);
}

TEST_CASE("no-slicing baseline packs exactly 30 uniform channels on 480 RBs") {
    SlicerOptions opts;
    opts.slicing = false;
    const ChannelPlan plan = maxrect_pack(0, 1000, ref_grid, urllc_ref, mmtc_ref, opts);
    CHECK(plan.total_channels() == 30);
    CHECK(plan.assigned_rbs() == 480);
    for (const auto& r : plan.mmtc_channels) {
        CHECK(r.f_ext == 16);
        CHECK(r.s_ext == 1);
        CHECK(r.mu == 2);
    }
    CHECK(validate_plan(plan, ref_grid, urllc_ref, mmtc_ref).empty());
}

TEST_CASE("slicing capacity ranges from 31 to 41 channels with URLLC demand") {
    const ChannelPlan low = maxrect_pack(1, 1000, ref_grid, urllc_ref, mmtc_ref);
    CHECK(low.l_urllc() == 1);
    CHECK(low.total_channels() >= 30);
    CHECK(low.total_channels() <= 32);

    const ChannelPlan high = maxrect_pack(40, 1000, ref_grid, urllc_ref, mmtc_ref);
    CHECK(high.l_urllc() == 40);
    CHECK(high.total_channels() >= 40);
    CHECK(high.total_channels() <= 42);
}

TEST_CASE("validate_plan flags constructed violations") {
    const ChannelPlan empty;
    CHECK(validate_plan(empty, ref_grid, urllc_ref, mmtc_ref).empty());

    ChannelPlan dup;
    dup.mmtc_channels.push_back({0, 0, 4, 4, 0});
    dup.mmtc_channels.push_back({0, 0, 4, 4, 0});
    const auto overlap = validate_plan(dup, ref_grid, urllc_ref, mmtc_ref);
    REQUIRE(overlap.size() == 1);
    CHECK(overlap[0].constraint == PlanConstraint::overlap);
    CHECK(overlap[0].channel_a == 0);
    CHECK(overlap[0].channel_b == 1);

    ChannelPlan wide;
    wide.urllc_channels.push_back({0, 0, 12, 2, 2});  // two time slots
    const auto v = validate_plan(wide, ref_grid, urllc_ref, mmtc_ref);
    REQUIRE(v.size() == 1);
    CHECK(v[0].constraint == PlanConstraint::urllc_single_slot);

    ChannelPlan misaligned;
    misaligned.mmtc_channels.push_back({0, 0, 18, 1, 2});  // 18 not a multiple of 4
    bool found = false;
    for (const auto& violation : validate_plan(misaligned, ref_grid, urllc_ref, mmtc_ref))
        found |= violation.constraint == PlanConstraint::numerology_alignment;
    CHECK(found);

    ChannelPlan tiny;
    tiny.mmtc_channels.push_back({0, 0, 4, 2, 0});  // 8 RBs < iota 16
    bool small = false;
    for (const auto& violation : validate_plan(tiny, ref_grid, urllc_ref, mmtc_ref))
        small |= violation.constraint == PlanConstraint::packet_size;
    CHECK(small);
}

TEST_CASE("objective arithmetic") {
    SlicerWeights w;  // 0.9 / 0.05 / 0.05
    const ChannelPlan empty;
    CHECK(objective(empty, GainVectors::ones(0, 0), w, 0, 31) == doctest::Approx(0.0));

    ChannelPlan one;
    one.urllc_channels.push_back({0, 0, 12, 1, 2});
    CHECK(objective(one, GainVectors::ones(1, 0), w, 1, 31) == doctest::Approx(0.9));
    CHECK(objective(one, GainVectors::ones(1, 0), w, 3, 10) == doctest::Approx(0.8));
    // Over-provisioning earns nothing: the shortage term clamps at zero.
    CHECK(objective(one, GainVectors::ones(1, 0), w, 0, 31) == doctest::Approx(0.9));

    CHECK_THROWS_AS(objective(one, GainVectors::ones(2, 0), w, 1, 31), std::invalid_argument);
}

TEST_CASE("weights invariants") {
    SlicerWeights ok;
    ok.validate();
    SlicerWeights bad{0.5, 0.3, 0.1};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    SlicerWeights inverted{0.05, 0.9, 0.05};
    CHECK_THROWS_AS(inverted.validate(), std::invalid_argument);
}

TEST_CASE("packer output is always a valid plan (closed loop)") {
    Rng rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        GridConfig grid;
        grid.freq_rbs = std::uniform_int_distribution<int>(4, 60)(rng);
        grid.time_slots = std::uniform_int_distribution<int>(2, 16)(rng);

        SlicerOptions opts;
        opts.slicing = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
        opts.urllc_mu = std::uniform_int_distribution<int>(0, 2)(rng);
        const int iota_cap = opts.slicing ? 30 : opts.baseline_rbs;

        ServiceProfile u = urllc_ref;
        u.rb_override = std::uniform_int_distribution<int>(1, std::min(20, iota_cap))(rng);
        ServiceProfile m = mmtc_ref;
        m.rb_override = std::uniform_int_distribution<int>(1, iota_cap)(rng);

        const int ku = std::uniform_int_distribution<int>(0, 60)(rng);
        const int km = std::uniform_int_distribution<int>(0, 60)(rng);

        const ChannelPlan plan = maxrect_pack(ku, km, grid, u, m, opts);
        CHECK(validate_plan(plan, grid, u, m).empty());
        CHECK(plan.l_urllc() <= ku);
        CHECK(plan.l_mmtc() <= km);
        CHECK(plan.assigned_rbs() <= grid.total_rbs());
    }
}

TEST_CASE("packing is deterministic") {
    const ChannelPlan a = maxrect_pack(7, 23, ref_grid, urllc_ref, mmtc_ref);
    const ChannelPlan b = maxrect_pack(7, 23, ref_grid, urllc_ref, mmtc_ref);
    REQUIRE(a.total_channels() == b.total_channels());
    for (int i = 0; i < a.l_urllc(); ++i) {
        CHECK(a.urllc_channels[i].f0 == b.urllc_channels[i].f0);
        CHECK(a.urllc_channels[i].s0 == b.urllc_channels[i].s0);
    }
    for (int i = 0; i < a.l_mmtc(); ++i) {
        CHECK(a.mmtc_channels[i].f0 == b.mmtc_channels[i].f0);
        CHECK(a.mmtc_channels[i].s0 == b.mmtc_channels[i].s0);
        CHECK(a.mmtc_channels[i].f_ext == b.mmtc_channels[i].f_ext);
    }
}

TEST_CASE("more URLLC demand never grows the mMTC side") {
    Rng rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        const int ku = std::uniform_int_distribution<int>(0, 44)(rng);
        const int km = std::uniform_int_distribution<int>(0, 60)(rng);
        const ChannelPlan base = maxrect_pack(ku, km, ref_grid, urllc_ref, mmtc_ref);
        const ChannelPlan more = maxrect_pack(ku + 1, km, ref_grid, urllc_ref, mmtc_ref);
        CHECK(more.l_mmtc() <= base.l_mmtc());
    }
}

TEST_CASE("slicing never allocates fewer channels than the uniform baseline") {
    Rng rng(13);
    SlicerOptions baseline;
    baseline.slicing = false;
    for (int trial = 0; trial < 60; ++trial) {
        const int ku = std::uniform_int_distribution<int>(1, 50)(rng);
        const int km = std::uniform_int_distribution<int>(0, 50)(rng);
        const ChannelPlan sliced = maxrect_pack(ku, km, ref_grid, urllc_ref, mmtc_ref);
        const ChannelPlan uniform = maxrect_pack(ku, km, ref_grid, urllc_ref, mmtc_ref, baseline);
        CHECK(sliced.total_channels() >= uniform.total_channels());
    }
}

TEST_CASE("occupancy map golden output") {
    GridConfig grid{8, 4, 14, 5};
    ServiceProfile u{32, 4, ServiceClass::urllc, 4};
    ServiceProfile m{200, 256, ServiceClass::mmtc, 6};
    const ChannelPlan plan = maxrect_pack(1, 2, grid, u, m, with_mu(0));
    CHECK(dump_occupancy(plan, grid) == "AAAAaabb\n"
                                        "....aabb\n"
                                        "....aabb\n"
                                        "........\n");
}
