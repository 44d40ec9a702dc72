#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "hra/scenario.hpp"

using namespace hra;

TEST_CASE("table1 preset echoes the reference parameters") {
    const Scenario s = preset_scenario("table1-baseline");
    CHECK(s.name == "table1-baseline");
    CHECK(s.traffic.k_urllc == 25);
    CHECK(s.traffic.k_mmtc == 1000);
    CHECK(s.grid.freq_rbs == 50);
    CHECK(s.grid.time_slots == 10);
    CHECK(s.grid.symbols_per_rb == 14);
    CHECK(s.urllc_profile.packet_bytes == 32);
    CHECK(s.urllc_profile.mod_order == 4);
    CHECK(s.mmtc_profile.packet_bytes == 200);
    CHECK(s.mmtc_profile.mod_order == 256);
    REQUIRE(s.mmtc_profile.rb_override.has_value());
    CHECK(*s.mmtc_profile.rb_override == 16);

    bool found_ku = false, found_km = false, found_f = false, found_s = false;
    for (const auto& [k, v] : s.to_kv()) {
        found_ku |= k == "traffic.k_urllc" && v == "25";
        found_km |= k == "traffic.k_mmtc" && v == "1000";
        found_f |= k == "grid.freq_rbs" && v == "50";
        found_s |= k == "grid.time_slots" && v == "10";
    }
    CHECK(found_ku);
    CHECK(found_km);
    CHECK(found_f);
    CHECK(found_s);

    s.engine_config();  // the shipped preset must validate
}

TEST_CASE("every shipped preset validates") {
    for (const auto& [name, text] : scenario_presets()) {
        CAPTURE(name);
        Scenario s = preset_scenario(name);
        if (s.predictor == PredictorKind::lstm) s.model_file = "placeholder.json";
        CHECK_NOTHROW(s.engine_config());
    }
}

TEST_CASE("parse errors carry the line number") {
    try {
        scenario_from_text("traffic.k_mmtc = 10\nthis is not a key value line\n");
        FAIL("expected ConfigParseError");
    } catch (const ConfigParseError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("unknown keys and bad values are field errors") {
    Scenario s;
    CHECK_THROWS_AS(s.set("no.such.key", "1"), ConfigFieldError);
    CHECK_THROWS_AS(s.set("traffic.k_mmtc", "many"), ConfigFieldError);
    CHECK_THROWS_AS(s.set("acb.mode", "sometimes"), ConfigFieldError);
    CHECK_NOTHROW(s.set("acb.mode", "fixed:1.0"));
    CHECK(s.acb.mode == AcbMode::fixed);
    CHECK(s.acb.p_fixed == 1.0);
}

TEST_CASE("comments and blank lines are ignored") {
    const Scenario s = scenario_from_text(
        "# leading comment\n\ntraffic.k_mmtc = 123  # trailing comment\n");
    CHECK(s.traffic.k_mmtc == 123);
}

TEST_CASE("urllc population follows the proportionality rule when set") {
    Scenario s = preset_scenario("fig4a-fixed");
    s.set("traffic.k_mmtc", "4000");
    CHECK(s.effective_k_urllc() == 100);  // ratio 40
    s.set("traffic.urllc_ratio", "400");
    CHECK(s.effective_k_urllc() == 10);
    s.set("traffic.urllc_ratio", "0");
    s.set("traffic.k_urllc", "33");
    CHECK(s.effective_k_urllc() == 33);
}

TEST_CASE("invalid combinations are rejected at resolve time") {
    Scenario s = preset_scenario("table1-baseline");
    s.set("reservation.fixed_urllc", "0");
    s.set("reservation.fixed_mmtc", "0");
    CHECK_THROWS_AS(s.engine_config(), ConfigFieldError);

    Scenario lstm = preset_scenario("table1-baseline");
    lstm.set("predictor.kind", "lstm");
    CHECK_THROWS_AS(lstm.engine_config(), ConfigFieldError);  // no model file

    Scenario over = preset_scenario("table1-baseline");
    over.set("reservation.fixed_mmtc", "100000");  // beyond the grid RB count
    CHECK_THROWS_AS(over.engine_config(), ConfigFieldError);
}

TEST_CASE("scenario round-trips through its manifest key-value form") {
    Scenario original = preset_scenario("fig5-perfect");
    original.set("acb.mode", "fixed:0.4");
    original.set("sim.seed", "99");

    std::string text;
    for (const auto& [k, v] : original.to_kv()) {
        if (k == "traffic.k_urllc") continue;  // derived when the ratio rule is active
        text += k + " = " + v + "\n";
    }
    const Scenario reparsed = scenario_from_text(text);
    CHECK(reparsed.name == original.name);
    CHECK(reparsed.traffic.k_mmtc == original.traffic.k_mmtc);
    CHECK(reparsed.effective_k_urllc() == original.effective_k_urllc());
    CHECK(reparsed.acb.mode == AcbMode::fixed);
    CHECK(reparsed.acb.p_fixed == doctest::Approx(0.4));
    CHECK(reparsed.seed == 99);
    CHECK(reparsed.reservation_mode == original.reservation_mode);
}

TEST_CASE("scenario files load over a base") {
    const std::string path = "test-scenario.cfg";
    {
        std::ofstream out(path);
        out << "traffic.k_mmtc = 77\nacb.max_attempts = 4\n";
    }
    const Scenario s = load_scenario_file(path, preset_scenario("table1-baseline"));
    std::remove(path.c_str());
    CHECK(s.traffic.k_mmtc == 77);
    CHECK(s.acb.max_attempts == 4);
    CHECK(s.traffic.k_urllc == 25);  // untouched base value
}

TEST_CASE("reservation table parses from the config syntax") {
    Scenario s;
    s.set("reservation.mode", "table");
    s.set("reservation.table", "1000:4, 30000:34");
    s.set("reservation.table_total", "54");
    REQUIRE(s.reservation_table.size() == 2);
    CHECK(s.reservation_table[0] == std::pair<int, int>{1000, 4});
    CHECK(s.reservation_table[1] == std::pair<int, int>{30000, 34});
    CHECK_THROWS_AS(s.set("reservation.table", "oops"), ConfigFieldError);
}

TEST_CASE("make_predictor honors the configured kind") {
    Scenario s = preset_scenario("table1-baseline");
    CHECK(dynamic_cast<OraclePredictor*>(make_predictor(s).get()) != nullptr);
    s.set("predictor.kind", "moving-average");
    CHECK(dynamic_cast<MovingAveragePredictor*>(make_predictor(s).get()) != nullptr);
}
