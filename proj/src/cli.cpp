#include "hra/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hra/errors.hpp"
#include "hra/metrics.hpp"
#include "hra/scenario.hpp"
#include "hra/training.hpp"
#include "hra/version.hpp"

namespace hra {

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
    std::string preset;
    std::string scenario_file;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<long> frames;
    std::optional<int> realizations;
    std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--preset", args.preset, "built-in scenario preset name");
    cmd->add_option("--scenario", args.scenario_file, "scenario file (key = value lines)");
    cmd->add_option("--set", args.overrides, "override one key, e.g. --set acb.mode=fixed:1.0")
        ->take_all();
    cmd->add_option("--seed", args.seed, "master seed (overrides sim.seed)");
    cmd->add_option("--frames", args.frames, "frames per realization (overrides sim.frames)");
    cmd->add_option("--realizations", args.realizations,
                    "Monte-Carlo realizations (overrides sim.realizations)");
    cmd->add_option("--out-dir", args.out_dir, "output directory (overrides output.dir)");
}

Scenario resolve_scenario(const CommonArgs& args) {
    Scenario s;
    if (!args.preset.empty()) s = preset_scenario(args.preset);
    if (!args.scenario_file.empty()) s = load_scenario_file(args.scenario_file, std::move(s));
    for (const std::string& kv : args.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigFieldError(kv, "--set expects key=value");
        std::string key = kv.substr(0, eq);
        key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
        s.set(key, kv.substr(eq + 1));
    }
    if (args.seed) s.seed = *args.seed;
    if (args.frames) s.frames = *args.frames;
    if (args.realizations) s.realizations = *args.realizations;
    if (args.out_dir) s.out_dir = *args.out_dir;
    return s;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + dir);
}

void write_manifest(const Scenario& s, const std::string& command, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest: " + path);
    out << "# run manifest\n";
    out << "tool.version = " << version << '\n';
    out << "tool.command = " << command << '\n';
    for (const auto& [k, v] : s.to_kv()) out << k << " = " << v << '\n';
}

/// Loads the LSTM model once; realizations share copies of the network.
std::function<std::unique_ptr<BacklogPredictor>()> predictor_factory(const Scenario& s) {
    if (s.predictor == PredictorKind::lstm) {
        auto net = std::make_shared<LstmNetwork>(LstmNetwork::load(s.model_file));
        const FeatureSpec features{s.traffic.t_mmtc_period, s.traffic.t_urllc_period};
        const int k_u = s.effective_k_urllc();
        const int k_m = s.traffic.k_mmtc;
        return [net, features, k_u, k_m] {
            return std::make_unique<LstmPredictor>(*net, features, k_u, k_m);
        };
    }
    return [s] { return make_predictor(s); };
}

struct RunArtifacts {
    MetricsSeries series;
    std::string dir;
};

RunArtifacts execute_run(const Scenario& s, const std::string& command,
                         const std::string& dir) {
    const EngineConfig cfg = s.engine_config();
    const auto traces =
        run_simulation(cfg, predictor_factory(s), s.frames, s.realizations, s.seed);
    MetricsSeries series =
        aggregate_metrics(traces, cfg.traffic.k_urllc, cfg.traffic.k_mmtc);

    ensure_dir(dir);
    write_frame_csv(series, dir + "/metrics.csv");
    write_summary_json(series, s.name, s.seed, dir + "/summary.json");
    write_manifest(s, command, dir + "/manifest.txt");
    if (s.per_realization_csv)
        write_long_csv(traces, cfg.traffic.k_urllc, cfg.traffic.k_mmtc,
                       dir + "/realizations.csv");
    if (s.frame_log) write_frame_log(traces, dir + "/frames.log");
    return {std::move(series), dir};
}

void print_run_summary(const Scenario& s, const MetricsSeries& series) {
    auto show = [&](const char* name) {
        const double v = series.window_mean(name);
        std::printf("  %-14s %.4f\n", name, v);
    };
    std::printf("scenario %s: %ld frames x %d realizations (seed %llu)\n", s.name.c_str(),
                s.frames, s.realizations, static_cast<unsigned long long>(s.seed));
    show("eta_urllc");
    show("eta_mmtc");
    show("eta_total");
    show("cl_urllc");
    show("cl_mmtc");
    show("served_mmtc");
    std::printf("  results in %s\n", s.out_dir.c_str());
}

int cmd_run(const CommonArgs& args) {
    const Scenario s = resolve_scenario(args);
    const auto artifacts = execute_run(s, "run", s.out_dir);
    print_run_summary(s, artifacts.series);
    return 0;
}

int cmd_validate(const CommonArgs& args) {
    const Scenario s = resolve_scenario(args);
    s.engine_config();  // full validation
    for (const auto& [k, v] : s.to_kv()) std::printf("%s = %s\n", k.c_str(), v.c_str());
    std::printf("configuration OK\n");
    return 0;
}

std::string sanitize(const std::string& key) {
    std::string out = key;
    for (char& c : out)
        if (c == '.' || c == '/') c = '_';
    return out;
}

int cmd_sweep(const CommonArgs& args, const std::string& axis,
              const std::vector<std::string>& values) {
    if (values.empty()) throw ConfigFieldError("--values", "sweep needs at least one value");
    const Scenario base = resolve_scenario(args);
    ensure_dir(base.out_dir);

    const std::vector<std::string> columns = {
        "eta_urllc", "eta_mmtc",     "eta_total",    "served_urllc", "served_mmtc",
        "cl_urllc",  "cl_mmtc",      "dropped_urllc","dropped_mmtc", "backlog_mmtc",
    };
    std::ofstream summary(base.out_dir + "/sweep_summary.csv");
    if (!summary) throw IoError("cannot write sweep summary");
    summary << "axis,value";
    for (const auto& c : columns) summary << ',' << c;
    summary << '\n';

    for (const std::string& value : values) {
        Scenario point = base;
        point.set(axis, value);
        point.name = base.name + "/" + sanitize(axis) + "=" + value;
        point.out_dir = base.out_dir + "/" + sanitize(axis) + "=" + value;
        const auto artifacts = execute_run(point, "sweep", point.out_dir);

        summary << axis << ',' << value;
        char buf[40];
        for (const auto& c : columns) {
            std::snprintf(buf, sizeof buf, "%.12g", artifacts.series.window_mean(c));
            summary << ',' << buf;
        }
        summary << '\n';
        std::printf("sweep point %s=%s done\n", axis.c_str(), value.c_str());
    }
    std::printf("sweep summary in %s/sweep_summary.csv\n", base.out_dir.c_str());
    return 0;
}

struct TrainArgs {
    int epochs = 200;
    long samples = 2000;
    std::string out_path = "lstm-model.json";
    int hidden = 32;
    int layers = 1;
    int batch = 32;
    double learning_rate = 0.01;
    double lr_decay = 1.0;
};

int cmd_train(const CommonArgs& args, const TrainArgs& train) {
    Scenario s = resolve_scenario(args);
    if (s.predictor != PredictorKind::lstm)
        throw ConfigFieldError("predictor.kind",
                               "train-predictor needs predictor.kind = lstm, nothing to train");
    s.model_file = train.out_path;
    const EngineConfig cfg = s.engine_config();

    const FeatureSpec features{cfg.traffic.t_mmtc_period, cfg.traffic.t_urllc_period};
    const long stream_frames = train.samples + s.window;
    std::printf("synthesizing %ld training frames...\n", stream_frames);
    const RealizationTrace train_trace = simulate_stream(cfg, stream_frames, s.seed);
    const auto dataset = dataset_from_trace(train_trace, features, s.window,
                                            cfg.traffic.k_urllc, cfg.traffic.k_mmtc);
    if (dataset.empty()) throw ConfigFieldError("train.samples", "not enough frames for a window");

    Rng rng(mix_seed(s.seed ^ 0x7261696e6c73746dULL));
    LstmNetwork net({FeatureSpec::feature_count, train.hidden, train.layers, 2, 0.1}, rng);

    TrainOptions opts;
    opts.epochs = train.epochs;
    opts.batch_size = train.batch;
    opts.learning_rate = train.learning_rate;
    opts.lr_decay = train.lr_decay;
    std::printf("training: %zu samples, %d epochs, hidden %d, layers %d\n", dataset.size(),
                train.epochs, train.hidden, train.layers);
    const TrainReport report = train_lstm(net, dataset, opts, rng);

    const fs::path out_path(train.out_path);
    if (out_path.has_parent_path()) ensure_dir(out_path.parent_path().string());
    net.save(train.out_path);

    const std::string curve_path = train.out_path + ".curve.csv";
    std::ofstream curve(curve_path);
    if (!curve) throw IoError("cannot write training curve: " + curve_path);
    curve << "epoch,loss,lr\n";
    char buf[64];
    for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
        std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g\n", e, report.epoch_loss[e],
                      report.epoch_lr[e]);
        curve << buf;
    }

    // Held-out comparison on a fresh stream.
    const RealizationTrace eval_trace =
        simulate_stream(cfg, std::max(200L, train.samples / 4) + s.window, s.seed + 1);
    LstmPredictor lstm_pred(net, features, cfg.traffic.k_urllc, cfg.traffic.k_mmtc);
    MovingAveragePredictor ma_pred(cfg.traffic.k_urllc, cfg.traffic.k_mmtc);
    const auto lstm_eval = evaluate_on_trace(lstm_pred, eval_trace, s.window,
                                             cfg.traffic.k_urllc, cfg.traffic.k_mmtc);
    const auto ma_eval = evaluate_on_trace(ma_pred, eval_trace, s.window, cfg.traffic.k_urllc,
                                           cfg.traffic.k_mmtc);

    std::printf("final training loss %.3e (epoch 0: %.3e)\n", report.epoch_loss.back(),
                report.epoch_loss.front());
    std::printf("held-out normalized MSE  lstm: urllc %.3e mmtc %.3e | moving-average: urllc "
                "%.3e mmtc %.3e\n",
                lstm_eval.mse_urllc, lstm_eval.mse_mmtc, ma_eval.mse_urllc, ma_eval.mse_mmtc);
    std::printf("model written to %s\n", train.out_path.c_str());
    return 0;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"frame-level simulator of a hybrid grant-based/grant-free random access "
                 "protocol for mixed URLLC-mMTC traffic"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args, train_args_common, validate_args;
    std::string sweep_axis;
    std::vector<std::string> sweep_values;
    TrainArgs train_args;

    auto* run_cmd = app.add_subcommand("run", "execute one scenario and write result files");
    add_common(run_cmd, run_args);

    auto* sweep_cmd =
        app.add_subcommand("sweep", "run a scenario once per value of one numeric key");
    add_common(sweep_cmd, sweep_args);
    sweep_cmd->add_option("--axis", sweep_axis, "scenario key to vary")->required();
    sweep_cmd->add_option("--values", sweep_values, "comma- or space-separated values")
        ->required()
        ->delimiter(',');

    auto* train_cmd =
        app.add_subcommand("train-predictor", "train the LSTM backlog predictor offline");
    add_common(train_cmd, train_args_common);
    train_cmd->add_option("--epochs", train_args.epochs, "training epochs");
    train_cmd->add_option("--samples", train_args.samples, "traffic samples to synthesize");
    train_cmd->add_option("--out", train_args.out_path, "model output file");
    train_cmd->add_option("--hidden", train_args.hidden, "hidden units");
    train_cmd->add_option("--layers", train_args.layers, "stacked LSTM layers");
    train_cmd->add_option("--batch", train_args.batch, "mini-batch size");
    train_cmd->add_option("--lr", train_args.learning_rate, "learning rate");
    train_cmd->add_option("--lr-decay", train_args.lr_decay, "per-epoch learning-rate factor");

    auto* validate_cmd =
        app.add_subcommand("validate", "check a scenario and echo the resolved configuration");
    add_common(validate_cmd, validate_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_args);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_args, sweep_axis, sweep_values);
        if (train_cmd->parsed()) return cmd_train(train_args_common, train_args);
        if (validate_cmd->parsed()) return cmd_validate(validate_args);
    } catch (const ConfigParseError& e) {
        std::cerr << "config parse error: " << e.what() << '\n';
        return 2;
    } catch (const TrainingDiverged& e) {
        std::cerr << "training error: " << e.what() << '\n';
        return 5;
    } catch (const ConfigFieldError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace hra
