#include "hra/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "hra/errors.hpp"

namespace hra {

namespace {

Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& x) {
    return 1.0 / (1.0 + (-x).exp());
}

// Per-(layer, timestep) forward cache needed by backpropagation through time.
struct StepCache {
    Eigen::MatrixXd x;       // layer input
    Eigen::ArrayXXd i, f, g, o;
    Eigen::ArrayXXd c_prev;
    Eigen::ArrayXXd c;
    Eigen::ArrayXXd tanh_c;
};

} // namespace

LstmNetwork::LstmNetwork(const LstmConfig& cfg, Rng& rng)
    : cfg_(cfg) {
    if (cfg.input_size < 1 || cfg.hidden_size < 1 || cfg.num_layers < 1 || cfg.output_size < 1)
        throw std::invalid_argument("lstm dimensions must be >= 1");
    std::uniform_real_distribution<double> init(-cfg.init_scale, cfg.init_scale);
    auto fill = [&](auto& m) {
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = init(rng);
    };
    layers_.resize(cfg.num_layers);
    for (int l = 0; l < cfg.num_layers; ++l) {
        layers_[l].w_x.resize(4 * cfg.hidden_size, layer_input_size(l));
        layers_[l].w_h.resize(4 * cfg.hidden_size, cfg.hidden_size);
        layers_[l].b.resize(4 * cfg.hidden_size);
        fill(layers_[l].w_x);
        fill(layers_[l].w_h);
        fill(layers_[l].b);
    }
    w_out_.resize(cfg.output_size, cfg.hidden_size);
    b_out_.resize(cfg.output_size);
    fill(w_out_);
    fill(b_out_);
}

Eigen::VectorXd LstmNetwork::predict(const Eigen::MatrixXd& sequence) const {
    if (sequence.rows() != cfg_.input_size)
        throw std::invalid_argument("predict: sequence rows must equal input_size");
    if (sequence.cols() < 1) throw std::invalid_argument("predict: empty sequence");

    const int h_size = cfg_.hidden_size;
    Eigen::MatrixXd below = sequence;
    for (int l = 0; l < cfg_.num_layers; ++l) {
        const auto& p = layers_[l];
        Eigen::VectorXd h = Eigen::VectorXd::Zero(h_size);
        Eigen::ArrayXd c = Eigen::ArrayXd::Zero(h_size);
        Eigen::MatrixXd outputs(h_size, below.cols());
        for (Eigen::Index t = 0; t < below.cols(); ++t) {
            Eigen::VectorXd pre = p.w_x * below.col(t) + p.w_h * h + p.b;
            auto gate = [&](int k) { return pre.segment(k * h_size, h_size).array(); };
            Eigen::ArrayXd i = 1.0 / (1.0 + (-gate(0)).exp());
            Eigen::ArrayXd f = 1.0 / (1.0 + (-gate(1)).exp());
            Eigen::ArrayXd g = gate(2).tanh();
            Eigen::ArrayXd o = 1.0 / (1.0 + (-gate(3)).exp());
            c = f * c + i * g;
            h = (o * c.tanh()).matrix();
            outputs.col(t) = h;
        }
        below = std::move(outputs);
    }
    return w_out_ * below.col(below.cols() - 1) + b_out_;
}

double LstmNetwork::loss(const std::vector<Eigen::MatrixXd>& inputs,
                         const Eigen::MatrixXd& targets) const {
    Eigen::VectorXd grad;
    return loss_and_gradient(inputs, targets, grad);
}

double LstmNetwork::loss_and_gradient(const std::vector<Eigen::MatrixXd>& inputs,
                                      const Eigen::MatrixXd& targets,
                                      Eigen::VectorXd& grad) const {
    const int steps = static_cast<int>(inputs.size());
    if (steps < 1) throw std::invalid_argument("loss: empty sequence");
    const Eigen::Index batch = inputs[0].cols();
    if (targets.cols() != batch || targets.rows() != cfg_.output_size)
        throw std::invalid_argument("loss: target shape mismatch");

    const int h_size = cfg_.hidden_size;
    const int layers = cfg_.num_layers;

    // Forward with caches.
    std::vector<std::vector<StepCache>> cache(layers, std::vector<StepCache>(steps));
    Eigen::MatrixXd below_last;  // top-layer hidden state at the final step
    {
        std::vector<Eigen::MatrixXd> below(steps);
        for (int t = 0; t < steps; ++t) {
            if (inputs[t].rows() != cfg_.input_size || inputs[t].cols() != batch)
                throw std::invalid_argument("loss: input shape mismatch");
            below[t] = inputs[t];
        }
        for (int l = 0; l < layers; ++l) {
            const auto& p = layers_[l];
            Eigen::MatrixXd h = Eigen::MatrixXd::Zero(h_size, batch);
            Eigen::ArrayXXd c = Eigen::ArrayXXd::Zero(h_size, batch);
            for (int t = 0; t < steps; ++t) {
                StepCache& sc = cache[l][t];
                sc.x = below[t];
                sc.c_prev = c;
                Eigen::MatrixXd pre = p.w_x * sc.x + p.w_h * h;
                pre.colwise() += p.b;
                sc.i = sigmoid(pre.middleRows(0 * h_size, h_size).array());
                sc.f = sigmoid(pre.middleRows(1 * h_size, h_size).array());
                sc.g = pre.middleRows(2 * h_size, h_size).array().tanh();
                sc.o = sigmoid(pre.middleRows(3 * h_size, h_size).array());
                sc.c = sc.f * c + sc.i * sc.g;
                sc.tanh_c = sc.c.tanh();
                c = sc.c;
                h = (sc.o * sc.tanh_c).matrix();
                below[t] = h;
            }
        }
        below_last = below[steps - 1];
    }

    const Eigen::MatrixXd y = (w_out_ * below_last).colwise() + b_out_;
    const Eigen::MatrixXd dy = (y - targets) / static_cast<double>(batch);
    const double total = 0.5 * (y - targets).squaredNorm() / static_cast<double>(batch);

    // Backward.
    std::vector<LstmLayerParams> g_layers(layers);
    for (int l = 0; l < layers; ++l) {
        g_layers[l].w_x = Eigen::MatrixXd::Zero(4 * h_size, layer_input_size(l));
        g_layers[l].w_h = Eigen::MatrixXd::Zero(4 * h_size, h_size);
        g_layers[l].b = Eigen::VectorXd::Zero(4 * h_size);
    }
    Eigen::MatrixXd g_w_out = dy * below_last.transpose();
    Eigen::VectorXd g_b_out = dy.rowwise().sum();

    // dh_above[l][t]: gradient arriving at layer l's hidden output at step t
    // from the layer above (or from the output head, for the top layer).
    std::vector<std::vector<Eigen::MatrixXd>> dh_above(
        layers, std::vector<Eigen::MatrixXd>(steps));
    dh_above[layers - 1][steps - 1] = w_out_.transpose() * dy;

    for (int l = layers - 1; l >= 0; --l) {
        const auto& p = layers_[l];
        Eigen::MatrixXd dh_rec = Eigen::MatrixXd::Zero(h_size, batch);
        Eigen::ArrayXXd dc_rec = Eigen::ArrayXXd::Zero(h_size, batch);
        for (int t = steps - 1; t >= 0; --t) {
            const StepCache& sc = cache[l][t];
            Eigen::ArrayXXd dh = dh_rec.array();
            if (dh_above[l][t].size() > 0) dh += dh_above[l][t].array();

            const Eigen::ArrayXXd do_ = dh * sc.tanh_c;
            const Eigen::ArrayXXd dc = dh * sc.o * (1.0 - sc.tanh_c.square()) + dc_rec;
            const Eigen::ArrayXXd di = dc * sc.g;
            const Eigen::ArrayXXd df = dc * sc.c_prev;
            const Eigen::ArrayXXd dg = dc * sc.i;

            Eigen::MatrixXd dpre(4 * h_size, batch);
            dpre.middleRows(0 * h_size, h_size) = (di * sc.i * (1.0 - sc.i)).matrix();
            dpre.middleRows(1 * h_size, h_size) = (df * sc.f * (1.0 - sc.f)).matrix();
            dpre.middleRows(2 * h_size, h_size) = (dg * (1.0 - sc.g.square())).matrix();
            dpre.middleRows(3 * h_size, h_size) = (do_ * sc.o * (1.0 - sc.o)).matrix();

            g_layers[l].w_x.noalias() += dpre * sc.x.transpose();
            if (t > 0) {
                const Eigen::MatrixXd h_prev = (cache[l][t - 1].o * cache[l][t - 1].tanh_c).matrix();
                g_layers[l].w_h.noalias() += dpre * h_prev.transpose();
            }
            g_layers[l].b += dpre.rowwise().sum();

            dh_rec = p.w_h.transpose() * dpre;
            dc_rec = dc * sc.f;
            if (l > 0) dh_above[l - 1][t] = p.w_x.transpose() * dpre;
        }
    }

    // Flatten gradients in the parameters() layout.
    grad.resize(parameter_count());
    Eigen::Index at = 0;
    auto emit = [&](const auto& m) {
        std::copy(m.data(), m.data() + m.size(), grad.data() + at);
        at += m.size();
    };
    for (int l = 0; l < layers; ++l) {
        emit(g_layers[l].w_x);
        emit(g_layers[l].w_h);
        emit(g_layers[l].b);
    }
    emit(g_w_out);
    emit(g_b_out);
    return total;
}

Eigen::Index LstmNetwork::parameter_count() const {
    Eigen::Index n = 0;
    for (const auto& p : layers_) n += p.w_x.size() + p.w_h.size() + p.b.size();
    return n + w_out_.size() + b_out_.size();
}

Eigen::VectorXd LstmNetwork::parameters() const {
    Eigen::VectorXd theta(parameter_count());
    Eigen::Index at = 0;
    auto emit = [&](const auto& m) {
        std::copy(m.data(), m.data() + m.size(), theta.data() + at);
        at += m.size();
    };
    for (const auto& p : layers_) {
        emit(p.w_x);
        emit(p.w_h);
        emit(p.b);
    }
    emit(w_out_);
    emit(b_out_);
    return theta;
}

void LstmNetwork::set_parameters(const Eigen::VectorXd& theta) {
    if (theta.size() != parameter_count())
        throw std::invalid_argument("set_parameters: size mismatch");
    Eigen::Index at = 0;
    auto take = [&](auto& m) {
        std::copy(theta.data() + at, theta.data() + at + m.size(), m.data());
        at += m.size();
    };
    for (auto& p : layers_) {
        take(p.w_x);
        take(p.w_h);
        take(p.b);
    }
    take(w_out_);
    take(b_out_);
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    std::vector<double> row_major;
    row_major.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) row_major.push_back(m(r, c));
    return row_major;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols) {
    const auto values = j.get<std::vector<double>>();
    if (static_cast<Eigen::Index>(values.size()) != rows * cols)
        throw std::runtime_error("model file: parameter block has wrong size");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = values[static_cast<std::size_t>(r * cols + c)];
    return m;
}

} // namespace

void LstmNetwork::save(const std::string& path) const {
    nlohmann::json j;
    j["format"] = "hra-lstm";
    j["version"] = 1;
    j["input_size"] = cfg_.input_size;
    j["hidden_size"] = cfg_.hidden_size;
    j["num_layers"] = cfg_.num_layers;
    j["output_size"] = cfg_.output_size;
    nlohmann::json jl = nlohmann::json::array();
    for (const auto& p : layers_) {
        jl.push_back({{"w_x", matrix_to_json(p.w_x)},
                      {"w_h", matrix_to_json(p.w_h)},
                      {"b", matrix_to_json(p.b)}});
    }
    j["layers"] = std::move(jl);
    j["w_out"] = matrix_to_json(w_out_);
    j["b_out"] = matrix_to_json(b_out_);

    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file: " + path);
    out << j.dump(2) << '\n';
}

LstmNetwork LstmNetwork::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read model file: " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("format", "") != "hra-lstm" || j.value("version", 0) != 1)
        throw std::runtime_error("unsupported model file format: " + path);

    LstmNetwork net;
    net.cfg_.input_size = j.at("input_size").get<int>();
    net.cfg_.hidden_size = j.at("hidden_size").get<int>();
    net.cfg_.num_layers = j.at("num_layers").get<int>();
    net.cfg_.output_size = j.at("output_size").get<int>();
    const int h = net.cfg_.hidden_size;
    const auto& jl = j.at("layers");
    if (static_cast<int>(jl.size()) != net.cfg_.num_layers)
        throw std::runtime_error("model file: layer count mismatch");
    for (int l = 0; l < net.cfg_.num_layers; ++l) {
        LstmLayerParams p;
        p.w_x = matrix_from_json(jl[l].at("w_x"), 4 * h, net.layer_input_size(l));
        p.w_h = matrix_from_json(jl[l].at("w_h"), 4 * h, h);
        p.b = matrix_from_json(jl[l].at("b"), 4 * h, 1);
        net.layers_.push_back(std::move(p));
    }
    net.w_out_ = matrix_from_json(j.at("w_out"), net.cfg_.output_size, h);
    net.b_out_ = matrix_from_json(j.at("b_out"), net.cfg_.output_size, 1);
    return net;
}

TrainReport train_lstm(LstmNetwork& net, const std::vector<TrainSample>& dataset,
                       const TrainOptions& opts, Rng& rng) {
    if (dataset.empty()) throw std::invalid_argument("train: dataset is empty");
    if (opts.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    const Eigen::Index seq_len = dataset[0].sequence.cols();
    for (const auto& s : dataset) {
        if (s.sequence.cols() != seq_len)
            throw std::invalid_argument("train: all sequences must share one length");
    }

    const Eigen::Index n_params = net.parameter_count();
    Eigen::VectorXd theta = net.parameters();
    Eigen::VectorXd m = Eigen::VectorXd::Zero(n_params);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n_params);
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long step = 0;

    std::vector<int> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    TrainReport report;
    double lr = opts.learning_rate;
    Eigen::VectorXd grad;

    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        long seen = 0;

        for (std::size_t start = 0; start < order.size(); start += opts.batch_size) {
            const std::size_t end = std::min(order.size(), start + opts.batch_size);
            const Eigen::Index batch = static_cast<Eigen::Index>(end - start);

            std::vector<Eigen::MatrixXd> inputs(
                seq_len, Eigen::MatrixXd(net.config().input_size, batch));
            Eigen::MatrixXd targets(net.config().output_size, batch);
            for (Eigen::Index b = 0; b < batch; ++b) {
                const TrainSample& s = dataset[order[start + b]];
                for (Eigen::Index t = 0; t < seq_len; ++t) inputs[t].col(b) = s.sequence.col(t);
                targets.col(b) = s.target;
            }

            const double batch_loss = net.loss_and_gradient(inputs, targets, grad);
            epoch_loss += batch_loss * static_cast<double>(batch);
            seen += batch;

            const double norm = grad.norm();
            if (opts.clip_norm > 0.0 && norm > opts.clip_norm) grad *= opts.clip_norm / norm;

            ++step;
            m = beta1 * m + (1.0 - beta1) * grad;
            v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
            const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            theta -= lr * ((m / bc1).array() / ((v / bc2).array().sqrt() + eps)).matrix();
            net.set_parameters(theta);
        }

        epoch_loss /= static_cast<double>(seen);
        if (!std::isfinite(epoch_loss)) throw TrainingDiverged(epoch);
        report.epoch_loss.push_back(epoch_loss);
        report.epoch_lr.push_back(lr);
        lr *= opts.lr_decay;
        if (opts.early_stop_loss > 0.0 && epoch_loss < opts.early_stop_loss) break;
    }
    return report;
}

} // namespace hra
