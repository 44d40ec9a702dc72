#include "hra/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hra/errors.hpp"
#include "hra/traffic.hpp"

namespace hra {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw ConfigFieldError(key, "expected an integer, got '" + v + "'");
    }
}

long parse_long(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigFieldError(key, "expected an integer, got '" + v + "'");
    }
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigFieldError(key, "expected a number, got '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    throw ConfigFieldError(key, "expected a boolean, got '" + v + "'");
}

// "1000:4,30000:34" -> {(1000,4),(30000,34)}
std::vector<std::pair<int, int>> parse_table(const std::string& key, const std::string& v) {
    std::vector<std::pair<int, int>> points;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigFieldError(key, "expected k:l pairs, got '" + item + "'");
        points.emplace_back(parse_int(key, trim(item.substr(0, colon))),
                            parse_int(key, trim(item.substr(colon + 1))));
    }
    if (points.empty()) throw ConfigFieldError(key, "table is empty");
    return points;
}

std::string fmt_table(const std::vector<std::pair<int, int>>& points) {
    std::string out;
    for (const auto& [k, l] : points) {
        if (!out.empty()) out += ',';
        out += std::to_string(k) + ':' + std::to_string(l);
    }
    return out;
}

std::string fmt_num(double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

} // namespace

void Scenario::set(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "name") name = v;
    else if (key == "traffic.k_urllc") traffic.k_urllc = parse_int(key, v);
    else if (key == "traffic.k_mmtc") traffic.k_mmtc = parse_int(key, v);
    else if (key == "traffic.p") traffic.p_active = parse_double(key, v);
    else if (key == "traffic.k_mmtc_periodic") traffic.k_mmtc_periodic = parse_int(key, v);
    else if (key == "traffic.t_mmtc_period") traffic.t_mmtc_period = parse_int(key, v);
    else if (key == "traffic.t_urllc_period") traffic.t_urllc_period = parse_int(key, v);
    else if (key == "traffic.alpha") traffic.alpha = parse_double(key, v);
    else if (key == "traffic.beta") traffic.beta = parse_double(key, v);
    else if (key == "traffic.urllc_ratio") urllc_ratio = parse_double(key, v);
    else if (key == "grid.freq_rbs") grid.freq_rbs = parse_int(key, v);
    else if (key == "grid.time_slots") grid.time_slots = parse_int(key, v);
    else if (key == "grid.symbols_per_rb") grid.symbols_per_rb = parse_int(key, v);
    else if (key == "grid.overhead_symbols") grid.overhead_symbols = parse_int(key, v);
    else if (key == "urllc.packet_bytes") urllc_profile.packet_bytes = parse_int(key, v);
    else if (key == "urllc.mod_order") urllc_profile.mod_order = parse_int(key, v);
    else if (key == "urllc.iota_override") {
        urllc_profile.rb_override =
            v.empty() || v == "none" ? std::nullopt : std::optional<int>(parse_int(key, v));
    } else if (key == "mmtc.packet_bytes") mmtc_profile.packet_bytes = parse_int(key, v);
    else if (key == "mmtc.mod_order") mmtc_profile.mod_order = parse_int(key, v);
    else if (key == "mmtc.iota_override") {
        mmtc_profile.rb_override =
            v.empty() || v == "none" ? std::nullopt : std::optional<int>(parse_int(key, v));
    } else if (key == "slicer.w_urllc") weights.w_urllc = parse_double(key, v);
    else if (key == "slicer.w_mmtc") weights.w_mmtc = parse_double(key, v);
    else if (key == "slicer.w_penalty") weights.w_penalty = parse_double(key, v);
    else if (key == "slicer.slicing") slicer.slicing = parse_bool(key, v);
    else if (key == "slicer.urllc_mu") slicer.urllc_mu = parse_int(key, v);
    else if (key == "slicer.baseline_mu") slicer.baseline_mu = parse_int(key, v);
    else if (key == "slicer.baseline_rbs") slicer.baseline_rbs = parse_int(key, v);
    else if (key == "acb.mode") {
        if (v == "optimal") acb.mode = AcbMode::optimal_oracle;
        else if (v == "fixed") acb.mode = AcbMode::fixed;
        else if (v.rfind("fixed:", 0) == 0) {
            acb.mode = AcbMode::fixed;
            acb.p_fixed = parse_double(key, v.substr(6));
        } else throw ConfigFieldError(key, "expected optimal|fixed|fixed:<p>, got '" + v + "'");
    } else if (key == "acb.p") acb.p_fixed = parse_double(key, v);
    else if (key == "acb.t_acb") acb.barring_time = parse_int(key, v);
    else if (key == "acb.max_attempts") acb.max_attempts = parse_int(key, v);
    else if (key == "acb.apply_urllc") acb.apply_urllc = parse_bool(key, v);
    else if (key == "acb.apply_mmtc") acb.apply_mmtc = parse_bool(key, v);
    else if (key == "predictor.kind") {
        if (v == "oracle") predictor = PredictorKind::oracle;
        else if (v == "moving-average") predictor = PredictorKind::moving_average;
        else if (v == "lstm") predictor = PredictorKind::lstm;
        else throw ConfigFieldError(key, "expected oracle|moving-average|lstm, got '" + v + "'");
    } else if (key == "predictor.model_file") model_file = v;
    else if (key == "predictor.window") window = parse_int(key, v);
    else if (key == "predictor.prior_urllc") prior_urllc = parse_int(key, v);
    else if (key == "predictor.prior_mmtc") prior_mmtc = parse_int(key, v);
    else if (key == "reservation.mode") {
        if (v != "slicer" && v != "fixed" && v != "table")
            throw ConfigFieldError(key, "expected slicer|fixed|table, got '" + v + "'");
        reservation_mode = v;
    } else if (key == "reservation.fixed_urllc") fixed_l_urllc = parse_int(key, v);
    else if (key == "reservation.fixed_mmtc") fixed_l_mmtc = parse_int(key, v);
    else if (key == "reservation.table") reservation_table = parse_table(key, v);
    else if (key == "reservation.table_total") reservation_table_total = parse_int(key, v);
    else if (key == "sim.frames") frames = parse_long(key, v);
    else if (key == "sim.realizations") realizations = parse_int(key, v);
    else if (key == "sim.seed") seed = static_cast<std::uint64_t>(parse_long(key, v));
    else if (key == "output.dir") out_dir = v;
    else if (key == "output.frame_log") frame_log = parse_bool(key, v);
    else if (key == "output.per_realization_csv") per_realization_csv = parse_bool(key, v);
    else throw ConfigFieldError(key, "unknown configuration key");
}

int Scenario::effective_k_urllc() const {
    if (urllc_ratio > 0.0)
        return std::max(1, static_cast<int>(std::lround(traffic.k_mmtc / urllc_ratio)));
    return traffic.k_urllc;
}

EngineConfig Scenario::engine_config() const {
    EngineConfig cfg;
    cfg.traffic = traffic;
    cfg.traffic.k_urllc = effective_k_urllc();
    cfg.grid = grid;
    cfg.urllc_profile = urllc_profile;
    cfg.mmtc_profile = mmtc_profile;
    cfg.slicer = slicer;
    cfg.acb = acb;
    cfg.history_window = window;

    if (reservation_mode == "fixed") {
        cfg.reservation = FixedReservation{fixed_l_urllc, fixed_l_mmtc};
    } else if (reservation_mode == "table") {
        cfg.reservation = TableReservation{reservation_table, reservation_table_total};
    } else {
        cfg.reservation = SlicerReservation{};
    }

    // Cold-start priors default to the mean per-frame arrival counts.
    if (prior_urllc >= 0) {
        cfg.prior_urllc = prior_urllc;
    } else {
        double mean_q = 0.0;
        for (int tau = 0; tau < cfg.traffic.t_urllc_period; ++tau)
            mean_q += urllc_activation_probability(cfg.traffic, tau);
        cfg.prior_urllc = static_cast<int>(
            std::ceil(cfg.traffic.k_urllc * mean_q / cfg.traffic.t_urllc_period));
    }
    if (prior_mmtc >= 0) {
        cfg.prior_mmtc = prior_mmtc;
    } else {
        const double mean_arrivals =
            (cfg.traffic.k_mmtc - cfg.traffic.k_mmtc_periodic) * cfg.traffic.p_active +
            static_cast<double>(cfg.traffic.k_mmtc_periodic) / cfg.traffic.t_mmtc_period;
        cfg.prior_mmtc = static_cast<int>(std::ceil(mean_arrivals));
    }

    try {
        weights.validate();
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigFieldError(name, e.what());
    }
    if (predictor == PredictorKind::lstm && model_file.empty())
        throw ConfigFieldError("predictor.model_file", "lstm predictor needs a model file");
    return cfg;
}

std::vector<std::pair<std::string, std::string>> Scenario::to_kv() const {
    std::vector<std::pair<std::string, std::string>> kv;
    auto add = [&](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
    add("name", name);
    add("traffic.k_urllc", std::to_string(effective_k_urllc()));
    add("traffic.k_mmtc", std::to_string(traffic.k_mmtc));
    add("traffic.p", fmt_num(traffic.p_active));
    add("traffic.k_mmtc_periodic", std::to_string(traffic.k_mmtc_periodic));
    add("traffic.t_mmtc_period", std::to_string(traffic.t_mmtc_period));
    add("traffic.t_urllc_period", std::to_string(traffic.t_urllc_period));
    add("traffic.alpha", fmt_num(traffic.alpha));
    add("traffic.beta", fmt_num(traffic.beta));
    add("traffic.urllc_ratio", fmt_num(urllc_ratio));
    add("grid.freq_rbs", std::to_string(grid.freq_rbs));
    add("grid.time_slots", std::to_string(grid.time_slots));
    add("grid.symbols_per_rb", std::to_string(grid.symbols_per_rb));
    add("grid.overhead_symbols", std::to_string(grid.overhead_symbols));
    add("urllc.packet_bytes", std::to_string(urllc_profile.packet_bytes));
    add("urllc.mod_order", std::to_string(urllc_profile.mod_order));
    add("urllc.iota_override",
        urllc_profile.rb_override ? std::to_string(*urllc_profile.rb_override) : "none");
    add("mmtc.packet_bytes", std::to_string(mmtc_profile.packet_bytes));
    add("mmtc.mod_order", std::to_string(mmtc_profile.mod_order));
    add("mmtc.iota_override",
        mmtc_profile.rb_override ? std::to_string(*mmtc_profile.rb_override) : "none");
    add("slicer.w_urllc", fmt_num(weights.w_urllc));
    add("slicer.w_mmtc", fmt_num(weights.w_mmtc));
    add("slicer.w_penalty", fmt_num(weights.w_penalty));
    add("slicer.slicing", slicer.slicing ? "on" : "off");
    add("slicer.urllc_mu", std::to_string(slicer.urllc_mu));
    add("slicer.baseline_mu", std::to_string(slicer.baseline_mu));
    add("slicer.baseline_rbs", std::to_string(slicer.baseline_rbs));
    add("acb.mode", acb.mode == AcbMode::optimal_oracle ? "optimal" : "fixed");
    add("acb.p", fmt_num(acb.p_fixed));
    add("acb.t_acb", std::to_string(acb.barring_time));
    add("acb.max_attempts", std::to_string(acb.max_attempts));
    add("acb.apply_urllc", acb.apply_urllc ? "true" : "false");
    add("acb.apply_mmtc", acb.apply_mmtc ? "true" : "false");
    switch (predictor) {
        case PredictorKind::oracle: add("predictor.kind", "oracle"); break;
        case PredictorKind::moving_average: add("predictor.kind", "moving-average"); break;
        case PredictorKind::lstm: add("predictor.kind", "lstm"); break;
    }
    add("predictor.model_file", model_file);
    add("predictor.window", std::to_string(window));
    add("predictor.prior_urllc", std::to_string(prior_urllc));
    add("predictor.prior_mmtc", std::to_string(prior_mmtc));
    add("reservation.mode", reservation_mode);
    add("reservation.fixed_urllc", std::to_string(fixed_l_urllc));
    add("reservation.fixed_mmtc", std::to_string(fixed_l_mmtc));
    add("reservation.table", fmt_table(reservation_table));
    add("reservation.table_total", std::to_string(reservation_table_total));
    add("sim.frames", std::to_string(frames));
    add("sim.realizations", std::to_string(realizations));
    add("sim.seed", std::to_string(seed));
    add("output.dir", out_dir);
    add("output.frame_log", frame_log ? "true" : "false");
    add("output.per_realization_csv", per_realization_csv ? "true" : "false");
    return kv;
}

Scenario scenario_from_text(const std::string& text, Scenario base) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigParseError(line_no, "expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigParseError(line_no, "empty key");
        try {
            base.set(key, value);
        } catch (const ConfigFieldError& e) {
            throw ConfigParseError(line_no, e.what());
        }
    }
    return base;
}

Scenario load_scenario_file(const std::string& path, Scenario base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return scenario_from_text(ss.str(), std::move(base));
}

const std::map<std::string, std::string>& scenario_presets() {
    static const std::map<std::string, std::string> presets = {
        {"table1-baseline", R"(
# System and channel parameters of the reference configuration.
name = table1-baseline
traffic.k_urllc = 25
traffic.k_mmtc = 1000
traffic.p = 0.005
traffic.k_mmtc_periodic = 10
traffic.t_mmtc_period = 10
traffic.t_urllc_period = 10
traffic.alpha = 3
traffic.beta = 4
grid.freq_rbs = 50
grid.time_slots = 10
grid.symbols_per_rb = 14
grid.overhead_symbols = 5
urllc.packet_bytes = 32
urllc.mod_order = 4
mmtc.packet_bytes = 200
mmtc.mod_order = 256
mmtc.iota_override = 16
reservation.mode = fixed
reservation.fixed_urllc = 8
reservation.fixed_mmtc = 46
acb.mode = optimal
acb.t_acb = 0
acb.max_attempts = 20
predictor.kind = oracle
predictor.window = 20
sim.frames = 1000
sim.realizations = 10
sim.seed = 1
)"},
        {"fig3-cl-rs", R"(
# Channel loading with resource slicing driven by the packer.
name = fig3-cl-rs
traffic.k_urllc = 25
traffic.k_mmtc = 1000
traffic.p = 0.001
reservation.mode = slicer
slicer.slicing = on
predictor.kind = oracle
acb.mode = optimal
sim.frames = 1200
sim.realizations = 10
)"},
        {"fig3-cl-nors", R"(
# Channel loading without slicing: uniform 16-RB channels only.
name = fig3-cl-nors
traffic.k_urllc = 25
traffic.k_mmtc = 1000
traffic.p = 0.001
reservation.mode = slicer
slicer.slicing = off
predictor.kind = oracle
acb.mode = optimal
sim.frames = 1200
sim.realizations = 10
)"},
        {"fig4a-fixed", R"(
# ACB contention resolution with a fixed 8/46 channel split; sweep
# traffic.k_mmtc to reproduce the throughput-vs-users curves.
name = fig4a-fixed
traffic.urllc_ratio = 40
traffic.k_mmtc = 4000
traffic.p = 0.005
reservation.mode = fixed
reservation.fixed_urllc = 8
reservation.fixed_mmtc = 46
acb.mode = optimal
acb.t_acb = 0
acb.max_attempts = 20
predictor.kind = oracle
sim.frames = 1000
sim.realizations = 10
)"},
        {"fig4b-variable", R"(
# ACB contention resolution with the URLLC reservation growing in the
# mMTC population (4..34 of 54 channels).
name = fig4b-variable
traffic.urllc_ratio = 40
traffic.k_mmtc = 4000
traffic.p = 0.005
reservation.mode = table
reservation.table = 1000:4,30000:34
reservation.table_total = 54
acb.mode = optimal
acb.t_acb = 0
acb.max_attempts = 20
predictor.kind = oracle
sim.frames = 1000
sim.realizations = 10
)"},
        {"fig5-perfect", R"(
# Perfect traffic prediction plus slicing; sweep traffic.k_mmtc with the
# 1/400 URLLC proportionality rule.
name = fig5-perfect
traffic.urllc_ratio = 400
traffic.k_mmtc = 10000
traffic.p = 0.001
reservation.mode = slicer
slicer.slicing = on
predictor.kind = oracle
acb.mode = optimal
acb.max_attempts = 20
sim.frames = 1200
sim.realizations = 10
)"},
        {"predictor-training", R"(
# Fixed-channel setup for training and scoring the backlog predictor.
name = predictor-training
traffic.k_urllc = 25
traffic.k_mmtc = 1000
traffic.p = 0.005
reservation.mode = fixed
reservation.fixed_urllc = 5
reservation.fixed_mmtc = 49
acb.mode = optimal
predictor.kind = lstm
predictor.window = 20
sim.frames = 1200
sim.realizations = 10
)"},
    };
    return presets;
}

Scenario preset_scenario(const std::string& name) {
    const auto& presets = scenario_presets();
    const auto it = presets.find(name);
    if (it == presets.end()) {
        std::string known;
        for (const auto& [k, v] : presets) {
            if (!known.empty()) known += ", ";
            known += k;
        }
        throw ConfigFieldError("preset", "unknown preset '" + name + "' (known: " + known + ")");
    }
    return scenario_from_text(it->second);
}

std::unique_ptr<BacklogPredictor> make_predictor(const Scenario& s) {
    switch (s.predictor) {
        case PredictorKind::oracle:
            return std::make_unique<OraclePredictor>();
        case PredictorKind::moving_average:
            return std::make_unique<MovingAveragePredictor>(s.effective_k_urllc(),
                                                            s.traffic.k_mmtc);
        case PredictorKind::lstm: {
            FeatureSpec features{s.traffic.t_mmtc_period, s.traffic.t_urllc_period};
            return std::make_unique<LstmPredictor>(LstmNetwork::load(s.model_file), features,
                                                   s.effective_k_urllc(), s.traffic.k_mmtc);
        }
    }
    throw std::logic_error("unreachable predictor kind");
}

} // namespace hra
