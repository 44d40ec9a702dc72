#pragma once

#include <memory>
#include <optional>
#include <span>

#include "hra/lstm.hpp"
#include "hra/observation.hpp"

namespace hra {

struct BacklogEstimate {
    int urllc = 0;
    int mmtc = 0;
};

/// Next-frame backlog estimator fed by the observation history. Learned
/// predictors return nullopt on an empty history (cold start); the caller
/// falls back to its configured prior.
class BacklogPredictor {
public:
    virtual ~BacklogPredictor() = default;
    virtual std::optional<BacklogEstimate> predict(const History& history) const = 0;
};

/// Returns the exact realized backlog; the engine refreshes it every frame
/// from the true pending-user state (perfect traffic prediction).
class OraclePredictor : public BacklogPredictor {
public:
    void set_truth(const BacklogEstimate& truth) { truth_ = truth; }
    std::optional<BacklogEstimate> predict(const History&) const override { return truth_; }

private:
    BacklogEstimate truth_{};
};

/// Window mean of the per-frame attempt proxy v_success + 2*v_collision
/// (a collided channel hides at least two users).
class MovingAveragePredictor : public BacklogPredictor {
public:
    MovingAveragePredictor(int k_urllc, int k_mmtc)
        : k_urllc_(k_urllc), k_mmtc_(k_mmtc) {}
    std::optional<BacklogEstimate> predict(const History& history) const override;

private:
    int k_urllc_;
    int k_mmtc_;
};

/// Feature layout per timestep: the two observation triplets normalized by
/// their class channel counts, plus the mMTC/URLLC period phases of the
/// observation's frame.
struct FeatureSpec {
    int t_mmtc_period = 10;
    int t_urllc_period = 10;

    static constexpr int feature_count = 8;
    Eigen::VectorXd featurize(const Observation& obs) const;
    Eigen::MatrixXd featurize(const History& history) const;
};

class LstmPredictor : public BacklogPredictor {
public:
    LstmPredictor(LstmNetwork net, FeatureSpec features, int k_urllc, int k_mmtc)
        : net_(std::move(net)), features_(features), k_urllc_(k_urllc), k_mmtc_(k_mmtc) {}

    std::optional<BacklogEstimate> predict(const History& history) const override;
    const LstmNetwork& network() const { return net_; }

private:
    LstmNetwork net_;
    FeatureSpec features_;
    int k_urllc_;
    int k_mmtc_;
};

/// Mean squared difference between two equally long sequences (callers pass
/// population-normalized backlogs).
double mse(std::span<const double> predictions, std::span<const double> truths);

} // namespace hra
