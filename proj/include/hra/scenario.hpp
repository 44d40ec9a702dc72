#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hra/protocol.hpp"
#include "hra/slicer.hpp"

namespace hra {

struct ConfigParseError : std::runtime_error {
    ConfigParseError(int at_line, const std::string& message)
        : std::runtime_error("line " + std::to_string(at_line) + ": " + message),
          line(at_line) {}
    int line;
};

struct ConfigFieldError : std::runtime_error {
    ConfigFieldError(std::string field_path, const std::string& message)
        : std::runtime_error(field_path + ": " + message), field(std::move(field_path)) {}
    std::string field;
};

enum class PredictorKind { oracle, moving_average, lstm };

/// A full experiment description: every key of the flat config file maps to
/// one field here. Values are plain and human-diffable; anything can be
/// overridden from the command line with --set key=value.
struct Scenario {
    std::string name = "custom";

    TrafficConfig traffic;
    double urllc_ratio = 0.0;  // >0: k_urllc is derived as round(k_mmtc / ratio)

    GridConfig grid;
    ServiceProfile urllc_profile{32, 4, ServiceClass::urllc, std::nullopt};
    ServiceProfile mmtc_profile{200, 256, ServiceClass::mmtc, 16};
    SlicerWeights weights;
    SlicerOptions slicer;
    AcbConfig acb;

    PredictorKind predictor = PredictorKind::oracle;
    std::string model_file;
    int window = 20;
    int prior_urllc = -1;  // -1: derive from mean per-frame arrivals
    int prior_mmtc = -1;

    std::string reservation_mode = "fixed";  // slicer | fixed | table
    int fixed_l_urllc = 8;
    int fixed_l_mmtc = 46;
    std::vector<std::pair<int, int>> reservation_table{{1000, 4}, {30000, 34}};
    int reservation_table_total = 54;

    long frames = 1000;
    int realizations = 10;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    bool frame_log = false;
    bool per_realization_csv = false;

    /// Applies one dotted key; throws ConfigFieldError on unknown keys or
    /// unparsable values.
    void set(const std::string& key, const std::string& value);

    /// Resolved URLLC population after the ratio rule.
    int effective_k_urllc() const;

    /// Build and validate the engine configuration (resolves the ratio rule,
    /// cold-start priors and the reservation policy).
    EngineConfig engine_config() const;

    /// Ordered key/value echo of every setting, as written to run manifests.
    std::vector<std::pair<std::string, std::string>> to_kv() const;
};

/// Parse `key = value` lines ('#' comments) on top of a base scenario.
Scenario scenario_from_text(const std::string& text, Scenario base = {});
Scenario load_scenario_file(const std::string& path, Scenario base = {});

/// Built-in experiment presets, keyed by name.
const std::map<std::string, std::string>& scenario_presets();
Scenario preset_scenario(const std::string& name);

/// Predictor instance per the scenario (the LSTM model file is loaded once
/// per call).
std::unique_ptr<BacklogPredictor> make_predictor(const Scenario& s);

} // namespace hra
