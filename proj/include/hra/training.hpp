#pragma once

#include <cstdint>
#include <vector>

#include "hra/metrics.hpp"
#include "hra/predictor.hpp"
#include "hra/protocol.hpp"

namespace hra {

/// One simulated stream under the given config with an oracle predictor
/// driving the reservation (no trained model needed to generate data).
RealizationTrace simulate_stream(const EngineConfig& cfg, long frames, std::uint64_t seed);

/// (history-window features, next-frame normalized backlog) pairs from a
/// trace; only full windows are kept.
std::vector<TrainSample> dataset_from_trace(const RealizationTrace& trace,
                                            const FeatureSpec& features, int window,
                                            int k_urllc, int k_mmtc);

struct PredictorEval {
    double mse_urllc = 0.0;  // population-normalized
    double mse_mmtc = 0.0;
    long samples = 0;

    double combined() const { return 0.5 * (mse_urllc + mse_mmtc); }
};

/// Passive evaluation: replay a trace's observation stream and score the
/// predictor's one-step-ahead backlog estimates against the realized ones.
/// An oracle predictor is fed the realized backlog frame by frame.
PredictorEval evaluate_on_trace(BacklogPredictor& predictor, const RealizationTrace& trace,
                                int window, int k_urllc, int k_mmtc);

} // namespace hra
