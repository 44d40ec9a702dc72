#include "hra/training.hpp"

#include <memory>
#include <stdexcept>

namespace hra {

RealizationTrace simulate_stream(const EngineConfig& cfg, long frames, std::uint64_t seed) {
    auto traces = run_simulation(
        cfg, [] { return std::make_unique<OraclePredictor>(); }, frames, 1, seed);
    return std::move(traces.front());
}

std::vector<TrainSample> dataset_from_trace(const RealizationTrace& trace,
                                            const FeatureSpec& features, int window,
                                            int k_urllc, int k_mmtc) {
    std::vector<TrainSample> samples;
    if (static_cast<long>(trace.frames.size()) <= window) return samples;
    samples.reserve(trace.frames.size() - static_cast<std::size_t>(window));

    History history(window);
    for (const FrameOutcome& frame : trace.frames) {
        if (history.size() == window) {
            TrainSample s;
            s.sequence = features.featurize(history);
            s.target.resize(2);
            s.target(0) = k_urllc > 0
                              ? static_cast<double>(frame.urllc.contenders) / k_urllc
                              : 0.0;
            s.target(1) = k_mmtc > 0 ? static_cast<double>(frame.mmtc.contenders) / k_mmtc : 0.0;
            samples.push_back(std::move(s));
        }
        history.push(frame.observation);
    }
    return samples;
}

PredictorEval evaluate_on_trace(BacklogPredictor& predictor, const RealizationTrace& trace,
                                int window, int k_urllc, int k_mmtc) {
    auto* oracle = dynamic_cast<OraclePredictor*>(&predictor);
    std::vector<double> pred_u, true_u, pred_m, true_m;
    History history(window);
    for (const FrameOutcome& frame : trace.frames) {
        if (oracle) oracle->set_truth({frame.urllc.contenders, frame.mmtc.contenders});
        if (history.size() == window) {
            const auto est = predictor.predict(history);
            if (!est) throw std::logic_error("predictor returned no estimate on a full window");
            pred_u.push_back(k_urllc > 0 ? static_cast<double>(est->urllc) / k_urllc : 0.0);
            true_u.push_back(k_urllc > 0
                                 ? static_cast<double>(frame.urllc.contenders) / k_urllc
                                 : 0.0);
            pred_m.push_back(k_mmtc > 0 ? static_cast<double>(est->mmtc) / k_mmtc : 0.0);
            true_m.push_back(k_mmtc > 0 ? static_cast<double>(frame.mmtc.contenders) / k_mmtc
                                        : 0.0);
        }
        history.push(frame.observation);
    }
    PredictorEval eval;
    eval.samples = static_cast<long>(pred_u.size());
    if (eval.samples > 0) {
        eval.mse_urllc = mse(pred_u, true_u);
        eval.mse_mmtc = mse(pred_m, true_m);
    }
    return eval;
}

} // namespace hra
