#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "hra/metrics.hpp"

using namespace hra;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<RealizationTrace> small_run(std::uint64_t seed, int realizations = 3) {
    EngineConfig cfg;
    cfg.traffic.k_urllc = 5;
    cfg.traffic.k_mmtc = 80;
    cfg.traffic.p_active = 0.03;
    cfg.traffic.k_mmtc_periodic = 4;
    cfg.reservation = FixedReservation{2, 8};
    cfg.acb.mode = AcbMode::optimal_oracle;
    return run_simulation(
        cfg, [] { return std::make_unique<OraclePredictor>(); }, 120, realizations, seed);
}

} // namespace

TEST_CASE("channel loading arithmetic and the L=0 sentinel") {
    CHECK(channel_loading(54, 54) == doctest::Approx(1.0));
    CHECK(channel_loading(0, 54) == 0.0);
    CHECK(channel_loading(30, 54) == doctest::Approx(0.5556).epsilon(1e-3));
    CHECK(std::isnan(channel_loading(7, 0)));
}

TEST_CASE("normalized throughput arithmetic") {
    CHECK(normalized_throughput(54, 0, 0) == doctest::Approx(1.0));
    CHECK(normalized_throughput(0, 13, 41) == 0.0);
    CHECK(normalized_throughput(27, 13, 14) == doctest::Approx(0.5));
    CHECK(normalized_throughput(0, 0, 0) == 0.0);  // no channels at all
    CHECK_THROWS_AS(normalized_throughput(-1, 0, 0), std::invalid_argument);
}

TEST_CASE("eta equals served over channel count on simulated frames") {
    const auto traces = small_run(7, 1);
    for (const FrameOutcome& f : traces[0].frames) {
        const auto& o = f.observation.mmtc;
        const double eta = normalized_throughput(o.success, o.collision, o.idle);
        CHECK(eta == doctest::Approx(static_cast<double>(f.mmtc.served) / f.mmtc.channels));
    }
}

TEST_CASE("aggregate means stay inside the per-realization envelope") {
    const auto traces = small_run(11, 4);
    const MetricsSeries series = aggregate_metrics(traces, 5, 80);
    std::vector<std::vector<std::vector<double>>> raw;
    for (const auto& tr : traces) raw.push_back(frame_metrics(tr, 5, 80));

    const int idx = series.index_of("served_mmtc");
    REQUIRE(idx >= 0);
    for (std::size_t t = 0; t < static_cast<std::size_t>(series.frames()); ++t) {
        double lo = 1e30, hi = -1e30;
        for (const auto& rm : raw) {
            lo = std::min(lo, rm[static_cast<std::size_t>(idx)][t]);
            hi = std::max(hi, rm[static_cast<std::size_t>(idx)][t]);
        }
        const double mean = series.mean[static_cast<std::size_t>(idx)][t];
        CHECK(mean >= lo - 1e-12);
        CHECK(mean <= hi + 1e-12);
    }
}

TEST_CASE("window means skip undefined channel-loading frames") {
    // A class with zero channels all run long: cl is NaN everywhere and the
    // aggregate must stay NaN rather than poisoning means with infinities.
    EngineConfig cfg;
    cfg.traffic.k_urllc = 2;
    cfg.traffic.k_mmtc = 10;
    cfg.traffic.p_active = 0.1;
    cfg.reservation = FixedReservation{0, 4};
    const auto traces = run_simulation(
        cfg, [] { return std::make_unique<OraclePredictor>(); }, 50, 2, 3);
    const MetricsSeries series = aggregate_metrics(traces, 2, 10);
    CHECK(std::isnan(series.window_mean("cl_urllc")));
    CHECK(!std::isnan(series.window_mean("cl_mmtc")));
}

TEST_CASE("emitters are byte-stable across identical runs") {
    const auto traces_a = small_run(21);
    const auto traces_b = small_run(21);
    const MetricsSeries sa = aggregate_metrics(traces_a, 5, 80);
    const MetricsSeries sb = aggregate_metrics(traces_b, 5, 80);

    write_frame_csv(sa, "metrics_a.csv");
    write_frame_csv(sb, "metrics_b.csv");
    CHECK(slurp("metrics_a.csv") == slurp("metrics_b.csv"));
    CHECK(!slurp("metrics_a.csv").empty());

    write_long_csv(traces_a, 5, 80, "long_a.csv");
    write_long_csv(traces_b, 5, 80, "long_b.csv");
    CHECK(slurp("long_a.csv") == slurp("long_b.csv"));

    write_summary_json(sa, "t", 21, "summary_a.json");
    write_summary_json(sb, "t", 21, "summary_b.json");
    CHECK(slurp("summary_a.json") == slurp("summary_b.json"));

    for (const char* f : {"metrics_a.csv", "metrics_b.csv", "long_a.csv", "long_b.csv",
                          "summary_a.json", "summary_b.json"})
        std::remove(f);
}

TEST_CASE("trace_mean over a window") {
    const auto traces = small_run(5, 1);
    const double all = trace_mean(
        traces[0], [](const FrameOutcome& f) { return static_cast<double>(f.mmtc.served); });
    const double tail = trace_mean(
        traces[0], [](const FrameOutcome& f) { return static_cast<double>(f.mmtc.served); }, 100);
    CHECK(all >= 0.0);
    CHECK(tail >= 0.0);
}
