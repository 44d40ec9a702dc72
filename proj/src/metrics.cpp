#include "hra/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "hra/errors.hpp"

namespace hra {

namespace {

constexpr double nan_val = std::numeric_limits<double>::quiet_NaN();

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path);
    return out;
}

} // namespace

double channel_loading(int k_breve, int l) {
    if (l < 0 || k_breve < 0) throw std::invalid_argument("channel_loading: negative input");
    if (l == 0) return nan_val;
    return static_cast<double>(k_breve) / l;
}

double normalized_throughput(int v_s, int v_c, int v_i) {
    if (v_s < 0 || v_c < 0 || v_i < 0)
        throw std::invalid_argument("normalized_throughput: negative count");
    const int total = v_s + v_c + v_i;
    if (total == 0) return 0.0;
    return static_cast<double>(v_s) / total;
}

std::vector<std::string> metric_names() {
    return {
        "cl_urllc",      "cl_mmtc",      "eta_urllc",     "eta_mmtc",     "eta_total",
        "served_urllc",  "served_mmtc",  "collided_urllc","collided_mmtc","dropped_urllc",
        "dropped_mmtc",  "backlog_urllc","backlog_mmtc",  "arrivals_urllc","arrivals_mmtc",
        "barred_urllc",  "barred_mmtc",  "channels_urllc","channels_mmtc", "p_acb_urllc",
        "p_acb_mmtc",    "pred_err_sq_urllc", "pred_err_sq_mmtc",
    };
}

std::vector<std::vector<double>> frame_metrics(const RealizationTrace& trace, int k_urllc,
                                               int k_mmtc) {
    const auto names = metric_names();
    std::vector<std::vector<double>> out(names.size());
    for (auto& v : out) v.reserve(trace.frames.size());

    auto norm_err = [](int predicted, int realized, int population) {
        if (population == 0) return 0.0;
        const double d = static_cast<double>(predicted - realized) / population;
        return d * d;
    };

    for (const FrameOutcome& f : trace.frames) {
        const auto& u = f.urllc;
        const auto& m = f.mmtc;
        const auto& ou = f.observation.urllc;
        const auto& om = f.observation.mmtc;
        std::size_t i = 0;
        out[i++].push_back(channel_loading(u.contenders, u.channels));
        out[i++].push_back(channel_loading(m.contenders, m.channels));
        out[i++].push_back(normalized_throughput(ou.success, ou.collision, ou.idle));
        out[i++].push_back(normalized_throughput(om.success, om.collision, om.idle));
        out[i++].push_back(normalized_throughput(ou.success + om.success,
                                                 ou.collision + om.collision,
                                                 ou.idle + om.idle));
        out[i++].push_back(u.served);
        out[i++].push_back(m.served);
        out[i++].push_back(ou.collision);
        out[i++].push_back(om.collision);
        out[i++].push_back(u.dropped);
        out[i++].push_back(m.dropped);
        out[i++].push_back(u.backlog_out);
        out[i++].push_back(m.backlog_out);
        out[i++].push_back(u.arrivals);
        out[i++].push_back(m.arrivals);
        out[i++].push_back(u.newly_barred);
        out[i++].push_back(m.newly_barred);
        out[i++].push_back(u.channels);
        out[i++].push_back(m.channels);
        out[i++].push_back(u.p_acb);
        out[i++].push_back(m.p_acb);
        out[i++].push_back(norm_err(u.predicted, u.contenders, k_urllc));
        out[i++].push_back(norm_err(m.predicted, m.contenders, k_mmtc));
    }
    return out;
}

MetricsSeries::MetricsSeries(std::vector<std::string> names, long frames, int realizations)
    : mean(names.size(), std::vector<double>(static_cast<std::size_t>(frames), nan_val)),
      stddev(names.size(), std::vector<double>(static_cast<std::size_t>(frames), nan_val)),
      names_(std::move(names)),
      frames_(frames),
      realizations_(realizations) {}

int MetricsSeries::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    return -1;
}

double MetricsSeries::mean_at(const std::string& name, long frame) const {
    const int i = index_of(name);
    if (i < 0) throw std::invalid_argument("unknown metric: " + name);
    return mean[static_cast<std::size_t>(i)][static_cast<std::size_t>(frame)];
}

double MetricsSeries::std_at(const std::string& name, long frame) const {
    const int i = index_of(name);
    if (i < 0) throw std::invalid_argument("unknown metric: " + name);
    return stddev[static_cast<std::size_t>(i)][static_cast<std::size_t>(frame)];
}

const std::vector<double>& MetricsSeries::mean_series(const std::string& name) const {
    const int i = index_of(name);
    if (i < 0) throw std::invalid_argument("unknown metric: " + name);
    return mean[static_cast<std::size_t>(i)];
}

double MetricsSeries::window_mean(const std::string& name, long from_frame) const {
    const auto& series = mean_series(name);
    double acc = 0.0;
    long n = 0;
    for (std::size_t t = static_cast<std::size_t>(std::max(0L, from_frame)); t < series.size();
         ++t) {
        if (std::isnan(series[t])) continue;
        acc += series[t];
        ++n;
    }
    return n > 0 ? acc / n : nan_val;
}

MetricsSeries aggregate_metrics(const std::vector<RealizationTrace>& traces, int k_urllc,
                                int k_mmtc) {
    if (traces.empty()) throw std::invalid_argument("aggregate_metrics: no traces");
    const long frames = static_cast<long>(traces[0].frames.size());
    MetricsSeries series(metric_names(), frames, static_cast<int>(traces.size()));

    std::vector<std::vector<std::vector<double>>> per_real;  // [r][metric][frame]
    per_real.reserve(traces.size());
    for (const auto& tr : traces) {
        if (static_cast<long>(tr.frames.size()) != frames)
            throw std::invalid_argument("aggregate_metrics: ragged traces");
        per_real.push_back(frame_metrics(tr, k_urllc, k_mmtc));
    }

    const std::size_t n_metrics = series.names().size();
    for (std::size_t mi = 0; mi < n_metrics; ++mi) {
        for (long t = 0; t < frames; ++t) {
            double acc = 0.0, acc2 = 0.0;
            int n = 0;
            for (const auto& rm : per_real) {
                const double v = rm[mi][static_cast<std::size_t>(t)];
                if (std::isnan(v)) continue;
                acc += v;
                acc2 += v * v;
                ++n;
            }
            auto& mu = series.mean[mi][static_cast<std::size_t>(t)];
            auto& sd = series.stddev[mi][static_cast<std::size_t>(t)];
            if (n == 0) continue;  // stays NaN
            mu = acc / n;
            sd = n > 1 ? std::sqrt(std::max(0.0, (acc2 - acc * acc / n) / (n - 1))) : 0.0;
        }
    }
    return series;
}

double trace_mean(const RealizationTrace& trace,
                  const std::function<double(const FrameOutcome&)>& f, long from_frame) {
    double acc = 0.0;
    long n = 0;
    for (const auto& frame : trace.frames) {
        if (frame.frame < from_frame) continue;
        acc += f(frame);
        ++n;
    }
    return n > 0 ? acc / n : 0.0;
}

void write_frame_csv(const MetricsSeries& series, const std::string& path) {
    auto out = open_out(path);
    out << "frame,metric,mean,std\n";
    for (std::size_t mi = 0; mi < series.names().size(); ++mi) {
        for (long t = 0; t < series.frames(); ++t) {
            out << t << ',' << series.names()[mi] << ','
                << fmt_double(series.mean[mi][static_cast<std::size_t>(t)]) << ','
                << fmt_double(series.stddev[mi][static_cast<std::size_t>(t)]) << '\n';
        }
    }
}

void write_long_csv(const std::vector<RealizationTrace>& traces, int k_urllc, int k_mmtc,
                    const std::string& path) {
    auto out = open_out(path);
    out << "realization,frame,metric,value\n";
    const auto names = metric_names();
    for (std::size_t r = 0; r < traces.size(); ++r) {
        const auto rm = frame_metrics(traces[r], k_urllc, k_mmtc);
        for (std::size_t mi = 0; mi < names.size(); ++mi) {
            for (std::size_t t = 0; t < rm[mi].size(); ++t) {
                out << r << ',' << t << ',' << names[mi] << ',' << fmt_double(rm[mi][t]) << '\n';
            }
        }
    }
}

void write_frame_log(const std::vector<RealizationTrace>& traces, const std::string& path) {
    auto out = open_out(path);
    for (std::size_t r = 0; r < traces.size(); ++r) {
        for (const FrameOutcome& f : traces[r].frames) {
            const auto& ou = f.observation.urllc;
            const auto& om = f.observation.mmtc;
            out << "r=" << r << " t=" << f.frame << " L=(" << f.urllc.channels << ','
                << f.mmtc.channels << ") u=(" << ou.success << ',' << ou.collision << ','
                << ou.idle << ") m=(" << om.success << ',' << om.collision << ',' << om.idle
                << ") p_acb=(" << fmt_double(f.urllc.p_acb) << ',' << fmt_double(f.mmtc.p_acb)
                << ") served=(" << f.urllc.served << ',' << f.mmtc.served << ") dropped=("
                << f.urllc.dropped << ',' << f.mmtc.dropped << ") backlog=("
                << f.urllc.backlog_out << ',' << f.mmtc.backlog_out << ")\n";
        }
    }
}

void write_summary_json(const MetricsSeries& series, const std::string& scenario_name,
                        std::uint64_t seed, const std::string& path) {
    nlohmann::json j;
    j["scenario"] = scenario_name;
    j["seed"] = seed;
    j["frames"] = series.frames();
    j["realizations"] = series.realizations();
    const long tail = std::max(0L, series.frames() - 200);
    nlohmann::json metrics;
    for (const auto& name : series.names()) {
        const double overall = series.window_mean(name, 0);
        const double final_window = series.window_mean(name, tail);
        nlohmann::json entry;
        entry["mean"] = std::isnan(overall) ? nlohmann::json() : nlohmann::json(overall);
        entry["final200_mean"] =
            std::isnan(final_window) ? nlohmann::json() : nlohmann::json(final_window);
        metrics[name] = std::move(entry);
    }
    j["metrics"] = std::move(metrics);
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

} // namespace hra
