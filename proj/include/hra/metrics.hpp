#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hra/protocol.hpp"

namespace hra {

/// Backlog over available channels of a class. L = 0 has no defined loading;
/// returns NaN as the saturated-undefined sentinel (excluded from means).
double channel_loading(int k_breve, int l);

/// Success channels over all channels of a class; 0 by convention when the
/// class had no channels at all.
double normalized_throughput(int v_s, int v_c, int v_i);

/// Per-frame means/stds across realizations for every tracked metric.
/// NaN entries (undefined channel loading) are excluded from the statistics.
class MetricsSeries {
public:
    MetricsSeries(std::vector<std::string> names, long frames, int realizations);

    const std::vector<std::string>& names() const { return names_; }
    long frames() const { return frames_; }
    int realizations() const { return realizations_; }

    double mean_at(const std::string& name, long frame) const;
    double std_at(const std::string& name, long frame) const;
    const std::vector<double>& mean_series(const std::string& name) const;

    /// Mean over per-frame means on [from_frame, frames), NaN-aware.
    double window_mean(const std::string& name, long from_frame = 0) const;

    int index_of(const std::string& name) const;  // -1 when absent

    std::vector<std::vector<double>> mean;    // [metric][frame]
    std::vector<std::vector<double>> stddev;  // [metric][frame]

private:
    std::vector<std::string> names_;
    long frames_;
    int realizations_;
};

/// The tracked per-frame metrics of one realization, in a fixed name order
/// shared with MetricsSeries.
std::vector<std::string> metric_names();
std::vector<std::vector<double>> frame_metrics(const RealizationTrace& trace,
                                               int k_urllc, int k_mmtc);

MetricsSeries aggregate_metrics(const std::vector<RealizationTrace>& traces, int k_urllc,
                                int k_mmtc);

/// Mean of f over a trace's frames, starting at from_frame.
double trace_mean(const RealizationTrace& trace,
                  const std::function<double(const FrameOutcome&)>& f, long from_frame = 0);

// Emitters. CSV floats are printed with a fixed %.12g format so identical
// runs produce byte-identical files.
void write_frame_csv(const MetricsSeries& series, const std::string& path);
void write_long_csv(const std::vector<RealizationTrace>& traces, int k_urllc, int k_mmtc,
                    const std::string& path);
void write_frame_log(const std::vector<RealizationTrace>& traces, const std::string& path);
void write_summary_json(const MetricsSeries& series, const std::string& scenario_name,
                        std::uint64_t seed, const std::string& path);

} // namespace hra
