#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "hra/rng.hpp"

namespace hra {

struct LstmConfig {
    int input_size = 8;
    int hidden_size = 32;
    int num_layers = 1;
    int output_size = 2;
    double init_scale = 0.1;  // parameters start uniform in [-init_scale, init_scale]
};

/// Fused gate parameters of one recurrent layer. Row blocks of the 4H
/// dimension are ordered: input gate, forget gate, cell candidate, output gate.
struct LstmLayerParams {
    Eigen::MatrixXd w_x;  // 4H x layer-input
    Eigen::MatrixXd w_h;  // 4H x H
    Eigen::VectorXd b;    // 4H
};

struct TrainingDiverged : std::runtime_error {
    explicit TrainingDiverged(int at_epoch)
        : std::runtime_error("training diverged (loss is not finite) at epoch " +
                             std::to_string(at_epoch)),
          epoch(at_epoch) {}
    int epoch;
};

/// A small stacked-LSTM regressor with a linear output head on the final
/// hidden state. Forward and backward passes are hand-rolled; gradients are
/// checked against finite differences in the test suite.
class LstmNetwork {
public:
    LstmNetwork() = default;
    LstmNetwork(const LstmConfig& cfg, Rng& rng);

    const LstmConfig& config() const { return cfg_; }

    /// sequence is input_size x T (one column per timestep); returns the
    /// output head applied to the last hidden state of the top layer.
    Eigen::VectorXd predict(const Eigen::MatrixXd& sequence) const;

    /// Batch loss: mean over columns of 0.5*|y - target|^2. inputs[t] is
    /// input_size x B, targets is output_size x B.
    double loss(const std::vector<Eigen::MatrixXd>& inputs,
                const Eigen::MatrixXd& targets) const;

    /// Same loss with gradients written to `grad` (layout of parameters()).
    double loss_and_gradient(const std::vector<Eigen::MatrixXd>& inputs,
                             const Eigen::MatrixXd& targets, Eigen::VectorXd& grad) const;

    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& theta);
    Eigen::Index parameter_count() const;

    void save(const std::string& path) const;
    static LstmNetwork load(const std::string& path);

private:
    int layer_input_size(int layer) const {
        return layer == 0 ? cfg_.input_size : cfg_.hidden_size;
    }

    LstmConfig cfg_;
    std::vector<LstmLayerParams> layers_;
    Eigen::MatrixXd w_out_;  // output_size x H
    Eigen::VectorXd b_out_;  // output_size
};

struct TrainSample {
    Eigen::MatrixXd sequence;  // input_size x T
    Eigen::VectorXd target;    // output_size
};

struct TrainOptions {
    int epochs = 200;
    int batch_size = 32;
    double learning_rate = 0.01;
    double lr_decay = 1.0;        // per-epoch multiplier
    double clip_norm = 1.0;       // global gradient-norm clip
    double early_stop_loss = 0.0; // stop once epoch loss falls below this
};

struct TrainReport {
    std::vector<double> epoch_loss;
    std::vector<double> epoch_lr;
};

/// Adam over shuffled mini-batches. All sample sequences must share one
/// length. Throws TrainingDiverged when the loss stops being finite.
TrainReport train_lstm(LstmNetwork& net, const std::vector<TrainSample>& dataset,
                       const TrainOptions& opts, Rng& rng);

} // namespace hra
