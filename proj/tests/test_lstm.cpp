#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "hra/lstm.hpp"

using namespace hra;

namespace {

std::vector<Eigen::MatrixXd> random_inputs(int steps, int input, int batch, Rng& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<Eigen::MatrixXd> inputs(steps, Eigen::MatrixXd(input, batch));
    for (auto& x : inputs)
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = dist(rng);
    return inputs;
}

} // namespace

TEST_CASE("analytic gradients match central finite differences") {
    Rng rng(1234);
    for (int layers : {1, 2}) {
        LstmConfig cfg;
        cfg.input_size = 3;
        cfg.hidden_size = 2;
        cfg.num_layers = layers;
        cfg.output_size = 2;
        LstmNetwork net(cfg, rng);

        const auto inputs = random_inputs(4, cfg.input_size, 2, rng);
        Eigen::MatrixXd targets(2, 2);
        targets << 0.3, -0.2, 0.7, 0.1;

        Eigen::VectorXd grad;
        net.loss_and_gradient(inputs, targets, grad);

        const Eigen::VectorXd theta = net.parameters();
        const double eps = 1e-5;
        double worst = 0.0;
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
            Eigen::VectorXd t = theta;
            t(i) = theta(i) + eps;
            net.set_parameters(t);
            const double up = net.loss(inputs, targets);
            t(i) = theta(i) - eps;
            net.set_parameters(t);
            const double down = net.loss(inputs, targets);
            const double numeric = (up - down) / (2.0 * eps);
            const double denom = std::max(1e-8, std::abs(numeric) + std::abs(grad(i)));
            worst = std::max(worst, std::abs(numeric - grad(i)) / denom);
            net.set_parameters(theta);
        }
        CAPTURE(layers);
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("forward pass is deterministic and bounded over long rollouts") {
    Rng rng(5);
    LstmConfig cfg;
    cfg.input_size = 4;
    cfg.hidden_size = 8;
    LstmNetwork net(cfg, rng);

    Eigen::MatrixXd seq(4, 10000);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (Eigen::Index i = 0; i < seq.size(); ++i) seq.data()[i] = dist(rng);

    const Eigen::VectorXd a = net.predict(seq);
    const Eigen::VectorXd b = net.predict(seq);
    CHECK(a == b);
    CHECK(a.allFinite());
}

TEST_CASE("training fits a constant target to within one count of 100") {
    Rng rng(77);
    LstmConfig cfg;
    cfg.input_size = 2;
    cfg.hidden_size = 8;
    LstmNetwork net(cfg, rng);

    std::vector<TrainSample> dataset;
    for (int i = 0; i < 64; ++i) {
        TrainSample s;
        s.sequence = Eigen::MatrixXd(2, 6);
        std::uniform_real_distribution<double> dist(0.0, 1.0);
        for (Eigen::Index j = 0; j < s.sequence.size(); ++j) s.sequence.data()[j] = dist(rng);
        s.target = Eigen::Vector2d(0.4, 0.4);
        dataset.push_back(std::move(s));
    }
    TrainOptions opts;
    opts.epochs = 120;
    opts.batch_size = 16;
    train_lstm(net, dataset, opts, rng);

    for (int i = 0; i < 5; ++i) {
        const Eigen::VectorXd y = net.predict(dataset[static_cast<std::size_t>(i)].sequence);
        CHECK(std::abs(y(0) - 0.4) * 100.0 <= 1.0);  // within +-1 count of a 100-user class
        CHECK(std::abs(y(1) - 0.4) * 100.0 <= 1.0);
    }
}

TEST_CASE("training improves on a deterministic periodic target") {
    Rng rng(99);
    LstmConfig cfg;
    cfg.input_size = 1;
    cfg.hidden_size = 8;
    LstmNetwork before(cfg, rng);

    // Two-level period-10 signal; the phase input makes it learnable.
    std::vector<TrainSample> dataset;
    for (int start = 0; start < 200; ++start) {
        TrainSample s;
        s.sequence = Eigen::MatrixXd(1, 10);
        for (int t = 0; t < 10; ++t)
            s.sequence(0, t) = static_cast<double>((start + t) % 10) / 10.0;
        const int next = (start + 10) % 10;
        s.target = Eigen::Vector2d(next < 5 ? 0.2 : 0.8, next < 5 ? 0.8 : 0.2);
        dataset.push_back(std::move(s));
    }

    auto eval = [&](const LstmNetwork& net) {
        double acc = 0.0;
        for (const auto& s : dataset) {
            const Eigen::VectorXd y = net.predict(s.sequence);
            acc += (y - s.target).squaredNorm();
        }
        return acc / static_cast<double>(dataset.size());
    };

    const double untrained = eval(before);
    LstmNetwork net = before;
    TrainOptions opts;
    opts.epochs = 60;
    TrainReport report = train_lstm(net, dataset, opts, rng);
    CHECK(eval(net) < untrained);
    CHECK(report.epoch_loss.back() < report.epoch_loss.front());
}

TEST_CASE("divergence reports the epoch") {
    Rng rng(3);
    LstmConfig cfg;
    cfg.input_size = 1;
    cfg.hidden_size = 2;
    LstmNetwork net(cfg, rng);

    std::vector<TrainSample> dataset(4);
    for (auto& s : dataset) {
        s.sequence = Eigen::MatrixXd::Zero(1, 3);
        s.target = Eigen::Vector2d(std::nan(""), 0.0);
    }
    TrainOptions opts;
    opts.epochs = 3;
    try {
        train_lstm(net, dataset, opts, rng);
        FAIL("expected TrainingDiverged");
    } catch (const TrainingDiverged& e) {
        CHECK(e.epoch == 0);
    }
}

TEST_CASE("model files round-trip") {
    Rng rng(11);
    LstmConfig cfg;
    cfg.input_size = 8;
    cfg.hidden_size = 5;
    cfg.num_layers = 2;
    LstmNetwork net(cfg, rng);

    const std::string path = "test-lstm-roundtrip.json";
    net.save(path);
    const LstmNetwork loaded = LstmNetwork::load(path);
    std::remove(path.c_str());

    Eigen::MatrixXd seq = Eigen::MatrixXd::Random(8, 20);
    const Eigen::VectorXd a = net.predict(seq);
    const Eigen::VectorXd b = loaded.predict(seq);
    CHECK((a - b).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(loaded.parameter_count() == net.parameter_count());
}

TEST_CASE("batch shape errors are rejected") {
    Rng rng(1);
    LstmNetwork net({2, 3, 1, 2, 0.1}, rng);
    std::vector<Eigen::MatrixXd> inputs(3, Eigen::MatrixXd::Zero(2, 4));
    Eigen::MatrixXd bad_targets = Eigen::MatrixXd::Zero(2, 3);
    Eigen::VectorXd grad;
    CHECK_THROWS_AS(net.loss_and_gradient(inputs, bad_targets, grad), std::invalid_argument);
    CHECK_THROWS_AS(net.predict(Eigen::MatrixXd::Zero(5, 4)), std::invalid_argument);
}
