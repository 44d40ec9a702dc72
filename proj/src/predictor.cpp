#include "hra/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hra {

namespace {

int clamp_round(double x, int hi) {
    const long r = std::lround(x);
    return static_cast<int>(std::clamp(r, 0L, static_cast<long>(hi)));
}

} // namespace

std::optional<BacklogEstimate> MovingAveragePredictor::predict(const History& history) const {
    if (history.empty()) return std::nullopt;
    double sum_u = 0.0, sum_m = 0.0;
    for (int i = 0; i < history.size(); ++i) {
        const Observation& o = history[i];
        sum_u += o.urllc.success + 2.0 * o.urllc.collision;
        sum_m += o.mmtc.success + 2.0 * o.mmtc.collision;
    }
    return BacklogEstimate{clamp_round(sum_u / history.size(), k_urllc_),
                           clamp_round(sum_m / history.size(), k_mmtc_)};
}

Eigen::VectorXd FeatureSpec::featurize(const Observation& obs) const {
    Eigen::VectorXd x(feature_count);
    auto norm = [](const ClassTriplet& t) -> Eigen::Vector3d {
        const int l = t.total();
        if (l == 0) return Eigen::Vector3d::Zero();
        return {static_cast<double>(t.success) / l, static_cast<double>(t.collision) / l,
                static_cast<double>(t.idle) / l};
    };
    x.segment<3>(0) = norm(obs.urllc);
    x.segment<3>(3) = norm(obs.mmtc);
    x(6) = static_cast<double>(obs.frame_index % t_mmtc_period) / t_mmtc_period;
    x(7) = static_cast<double>(obs.frame_index % t_urllc_period) / t_urllc_period;
    return x;
}

Eigen::MatrixXd FeatureSpec::featurize(const History& history) const {
    if (history.empty()) throw std::invalid_argument("featurize: empty history");
    Eigen::MatrixXd seq(feature_count, history.size());
    for (int t = 0; t < history.size(); ++t) seq.col(t) = featurize(history[t]);
    return seq;
}

std::optional<BacklogEstimate> LstmPredictor::predict(const History& history) const {
    if (history.empty()) return std::nullopt;
    const Eigen::VectorXd y = net_.predict(features_.featurize(history));
    return BacklogEstimate{clamp_round(y(0) * k_urllc_, k_urllc_),
                           clamp_round(y(1) * k_mmtc_, k_mmtc_)};
}

double mse(std::span<const double> predictions, std::span<const double> truths) {
    if (predictions.size() != truths.size())
        throw std::invalid_argument("mse: sequence lengths differ");
    if (predictions.empty()) throw std::invalid_argument("mse: empty sequences");
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - truths[i];
        acc += d * d;
    }
    return acc / static_cast<double>(predictions.size());
}

} // namespace hra
