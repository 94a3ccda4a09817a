#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "baromocap/checkpoint.hpp"
#include "baromocap/errors.hpp"
#include "baromocap/feature_builder.hpp"
#include "baromocap/training.hpp"

using namespace baromocap;

namespace {

std::vector<Vec> random_seq(std::mt19937_64& rng, int dim, int len) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Vec> seq;
    for (int t = 0; t < len; ++t) {
        Vec x(dim);
        for (int i = 0; i < dim; ++i) x[i] = g(rng);
        seq.push_back(x);
    }
    return seq;
}

void zero_params(std::vector<Eigen::Map<Vec>> views) {
    for (auto& v : views) v.setZero();
}

PoseWindow random_pose_window(std::mt19937_64& rng, int in, int out, int first, int len) {
    std::normal_distribution<double> g(0.0, 1.0);
    PoseWindow w;
    w.first_pose = Vec::NullaryExpr(first, [&](Eigen::Index) { return g(rng); });
    w.inputs = Mat::NullaryExpr(in, len, [&](Eigen::Index, Eigen::Index) { return g(rng); });
    w.targets = Mat::NullaryExpr(out, len, [&](Eigen::Index, Eigen::Index) { return g(rng); });
    return w;
}

VelocityWindow random_velocity_window(std::mt19937_64& rng, int in, int out, int len) {
    std::normal_distribution<double> g(0.0, 1.0);
    VelocityWindow w;
    w.inputs = Mat::NullaryExpr(in, len, [&](Eigen::Index, Eigen::Index) { return g(rng); });
    w.targets = Mat::NullaryExpr(out, len, [&](Eigen::Index, Eigen::Index) { return g(rng); });
    return w;
}

// Central finite differences over every parameter; returns the worst
// relative disagreement with the analytic gradient.
template <class Net, class Window, class Grads>
double worst_gradient_error(Net& net, const std::vector<Window>& windows,
                            double (*loss_fn)(const Net&, const std::vector<const Window*>&),
                            double (*grad_fn)(const Net&, const std::vector<const Window*>&,
                                              Grads&)) {
    std::vector<const Window*> batch;
    for (const Window& w : windows) batch.push_back(&w);

    Grads grads = Grads::zeros_like(net);
    grad_fn(net, batch, grads);

    auto params = param_views(net);
    auto gviews = grad_views(grads);
    const double eps = 1e-5;
    double worst = 0.0;
    for (size_t k = 0; k < params.size(); ++k) {
        for (long i = 0; i < params[k].size(); ++i) {
            const double saved = params[k][i];
            params[k][i] = saved + eps;
            const double up = loss_fn(net, batch);
            params[k][i] = saved - eps;
            const double down = loss_fn(net, batch);
            params[k][i] = saved;
            const double fd = (up - down) / (2.0 * eps);
            const double analytic = gviews[k][i];
            const double err =
                std::abs(fd - analytic) / std::max(1.0, std::abs(fd) + std::abs(analytic));
            worst = std::max(worst, err);
        }
    }
    return worst;
}

}  // namespace

TEST_SUITE("neural") {

TEST_CASE("zero weights map every frame to the head bias") {
    PoseNet net = PoseNet::create(1, 6, 8, 2, 5, 7);
    zero_params(param_views(net));
    net.head.b << 0.1, -0.2, 0.3, -0.4, 0.5;
    std::mt19937_64 rng(81);
    const auto out = pose_forward(net, Vec::Ones(7), random_seq(rng, 6, 4));
    REQUIRE(out.size() == 4);
    for (const Vec& y : out) CHECK((y - net.head.b).norm() == 0.0);

    VelocityNet vnet = VelocityNet::create(2, 6, 8, 2, 2);
    zero_params(param_views(vnet));
    vnet.head.b << 0.7, -0.1;
    const auto vout = velocity_forward(vnet, random_seq(rng, 6, 5));
    REQUIRE(vout.size() == 5);
    for (const auto& y : vout) CHECK((y - Eigen::Vector2d(0.7, -0.1)).norm() == 0.0);
}

TEST_CASE("single-frame sequence emits one output of the right size") {
    PoseNet net = PoseNet::create(3);
    std::mt19937_64 rng(82);
    const auto out = pose_forward(net, Vec::Zero(144), random_seq(rng, 22, 1));
    REQUIRE(out.size() == 1);
    CHECK(out[0].size() == 144);
}

TEST_CASE("wrong input width is rejected") {
    PoseNet net = PoseNet::create(4, 6, 8, 2, 5, 7);
    CHECK_THROWS_AS(pose_forward(net, Vec::Zero(7), {Vec::Zero(9)}), ShapeMismatch);
    CHECK_THROWS_AS(pose_forward(net, Vec::Zero(3), {Vec::Zero(6)}), ShapeMismatch);
    VelocityNet vnet = VelocityNet::create(4, 6, 8, 2, 2);
    CHECK_THROWS_AS(velocity_forward(vnet, {Vec::Zero(10)}), ShapeMismatch);
}

TEST_CASE("forward pass is causal") {
    std::mt19937_64 rng(83);
    PoseNet net = PoseNet::create(5, 6, 8, 2, 5, 7);
    const Vec first = Vec::Ones(7);
    auto seq = random_seq(rng, 6, 20);
    const auto base = pose_forward(net, first, seq);
    seq[7][2] += 0.5;
    const auto bumped = pose_forward(net, first, seq);
    for (int t = 0; t < 7; ++t) {
        CHECK((base[static_cast<size_t>(t)] - bumped[static_cast<size_t>(t)]).norm() == 0.0);
    }
    CHECK((base[7] - bumped[7]).norm() > 0.0);
    CHECK((base[12] - bumped[12]).norm() > 0.0);

    VelocityNet vnet = VelocityNet::create(6, 6, 8, 2, 2);
    auto vseq = random_seq(rng, 6, 15);
    const auto vbase = velocity_forward(vnet, vseq);
    vseq[9][0] += 1.0;
    const auto vbumped = velocity_forward(vnet, vseq);
    for (int t = 0; t < 9; ++t) {
        CHECK((vbase[static_cast<size_t>(t)] - vbumped[static_cast<size_t>(t)]).norm() == 0.0);
    }
    CHECK((vbase[9] - vbumped[9]).norm() > 0.0);
}

TEST_CASE("streaming runner matches the sequence forward") {
    std::mt19937_64 rng(84);
    PoseNet net = PoseNet::create(7, 6, 8, 2, 5, 7);
    const Vec first = Vec::Ones(7) * 0.3;
    const auto seq = random_seq(rng, 6, 12);
    const auto batch = pose_forward(net, first, seq);
    PoseRunner runner(net);
    runner.reset(first);
    for (size_t t = 0; t < seq.size(); ++t) {
        CHECK((runner.step(seq[t]) - batch[t]).norm() == 0.0);
    }
}

TEST_CASE("pose loss matches a double-loop oracle") {
    std::mt19937_64 rng(85);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Vec> pred = random_seq(rng, 144, 9);
    std::vector<Vec> gt = random_seq(rng, 144, 9);
    CHECK(pose_loss(pred, pred) == 0.0);

    double oracle_acc = 0.0;
    for (size_t t = 0; t < pred.size(); ++t) {
        for (int i = 0; i < 144; ++i) {
            const double d = pred[t][i] - gt[t][i];
            oracle_acc += d * d;
        }
    }
    oracle_acc /= static_cast<double>(pred.size());
    CHECK(pose_loss(pred, gt) == doctest::Approx(oracle_acc).epsilon(1e-9));

    // All-ones residual on one frame sums to the component count.
    std::vector<Vec> ones{Vec::Ones(144)};
    std::vector<Vec> zeros{Vec::Zero(144)};
    CHECK(pose_loss(ones, zeros) == doctest::Approx(144.0));

    CHECK_THROWS_AS(pose_loss(pred, std::vector<Vec>(pred.begin(), pred.end() - 1)),
                    LengthMismatch);
}

TEST_CASE("velocity loss depends only on the summed displacement") {
    std::vector<Eigen::Vector2d> pred = {{0.6, 0.0}, {0.4, 0.0}};
    std::vector<Eigen::Vector2d> gt = {{0.0, 0.0}, {0.0, 0.0}};
    CHECK(velocity_loss(pred, pred) == 0.0);
    CHECK(velocity_loss(pred, gt) == doctest::Approx(1.0).epsilon(1e-12));

    std::mt19937_64 rng(86);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Eigen::Vector2d> a(40);
    std::vector<Eigen::Vector2d> b(40);
    for (size_t i = 0; i < a.size(); ++i) {
        a[i] = Eigen::Vector2d(g(rng), g(rng));
        b[i] = Eigen::Vector2d(g(rng), g(rng));
    }
    const double base = velocity_loss(a, b);
    std::vector<Eigen::Vector2d> shuffled = a;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(std::abs(velocity_loss(shuffled, b) - base) <= 1e-12);

    // Zero iff the summed displacements match.
    std::vector<Eigen::Vector2d> matched = b;
    std::shuffle(matched.begin(), matched.end(), rng);
    CHECK(velocity_loss(matched, b) <= 1e-12);

    CHECK_THROWS_AS(velocity_loss(a, std::vector<Eigen::Vector2d>(b.begin(), b.end() - 1)),
                    LengthMismatch);
}

TEST_CASE("analytic gradients match central finite differences (pose path)") {
    std::mt19937_64 rng(87);
    PoseNet net = PoseNet::create(88, 5, 8, 2, 6, 7);
    std::vector<PoseWindow> windows;
    windows.push_back(random_pose_window(rng, 5, 6, 7, 5));
    windows.push_back(random_pose_window(rng, 5, 6, 7, 5));
    const double worst =
        worst_gradient_error<PoseNet, PoseWindow, PoseNetGrads>(net, windows, &pose_batch_loss,
                                                                &pose_batch_grads);
    CHECK(worst < 1e-4);
}

TEST_CASE("analytic gradients match central finite differences (velocity path)") {
    std::mt19937_64 rng(89);
    VelocityNet net = VelocityNet::create(90, 5, 8, 2, 2);
    std::vector<VelocityWindow> windows;
    windows.push_back(random_velocity_window(rng, 5, 2, 6));
    windows.push_back(random_velocity_window(rng, 5, 2, 6));
    const double worst = worst_gradient_error<VelocityNet, VelocityWindow, VelocityNetGrads>(
        net, windows, &velocity_batch_loss, &velocity_batch_grads);
    CHECK(worst < 1e-4);
}

TEST_CASE("gradients accumulate identically across micro-batch boundaries") {
    // 70 windows forces several micro-batches; compare against a smaller
    // direct batch on the shared prefix by linearity of the batch mean.
    std::mt19937_64 rng(91);
    VelocityNet net = VelocityNet::create(92, 4, 6, 2, 2);
    std::vector<VelocityWindow> windows;
    for (int i = 0; i < 70; ++i) windows.push_back(random_velocity_window(rng, 4, 2, 4));
    std::vector<const VelocityWindow*> all;
    for (const auto& w : windows) all.push_back(&w);

    VelocityNetGrads grads = VelocityNetGrads::zeros_like(net);
    const double loss = velocity_batch_grads(net, all, grads);

    double manual = 0.0;
    for (const auto* w : all) {
        manual += velocity_batch_loss(net, {w});
    }
    manual /= static_cast<double>(all.size());
    CHECK(loss == doctest::Approx(manual).epsilon(1e-9));
}

TEST_CASE("training with zero learning rate leaves parameters untouched") {
    std::mt19937_64 rng(93);
    PoseNet net = PoseNet::create(94, 5, 8, 2, 6, 7);
    const PoseNet before = net;
    std::vector<PoseWindow> windows{random_pose_window(rng, 5, 6, 7, 4)};
    TrainConfig cfg;
    cfg.lr = 0.0;
    cfg.epochs = 1;
    cfg.batch = 1;
    train_pose(net, windows, cfg);
    auto a = param_views(net);
    auto b = param_views(const_cast<PoseNet&>(before));
    for (size_t k = 0; k < a.size(); ++k) {
        for (long i = 0; i < a[k].size(); ++i) CHECK(a[k][i] == b[k][i]);
    }
}

TEST_CASE("training is bitwise deterministic given the seed") {
    std::mt19937_64 rng(95);
    std::vector<VelocityWindow> windows;
    for (int i = 0; i < 6; ++i) windows.push_back(random_velocity_window(rng, 4, 2, 8));
    TrainConfig cfg;
    cfg.lr = 1e-3;
    cfg.epochs = 3;
    cfg.batch = 2;
    cfg.seed = 1234;

    VelocityNet a = VelocityNet::create(96, 4, 6, 2, 2);
    VelocityNet b = VelocityNet::create(96, 4, 6, 2, 2);
    train_velocity(a, windows, cfg);
    train_velocity(b, windows, cfg);
    auto va = param_views(a);
    auto vb = param_views(b);
    for (size_t k = 0; k < va.size(); ++k) {
        for (long i = 0; i < va[k].size(); ++i) CHECK(va[k][i] == vb[k][i]);
    }
}

TEST_CASE("a small net overfits four windows") {
    std::mt19937_64 rng(97);
    PoseNet net = PoseNet::create(98, 5, 16, 2, 6, 7);
    std::vector<PoseWindow> windows;
    for (int i = 0; i < 4; ++i) windows.push_back(random_pose_window(rng, 5, 6, 7, 10));
    std::vector<const PoseWindow*> batch;
    for (const auto& w : windows) batch.push_back(&w);
    const double initial = pose_batch_loss(net, batch);

    TrainConfig cfg;
    cfg.lr = 5e-3;
    cfg.epochs = 200;
    cfg.batch = 4;
    cfg.max_steps = 200;
    cfg.target_loss = 0.01 * initial;
    const TrainReport report = train_pose(net, windows, cfg);
    CHECK(report.steps <= 200);
    CHECK(pose_batch_loss(net, batch) < 0.01 * initial);
}

TEST_CASE("non-finite loss aborts with diagnostics") {
    std::mt19937_64 rng(99);
    PoseNet net = PoseNet::create(100, 5, 8, 2, 6, 7);
    net.head.w(0, 0) = std::numeric_limits<double>::infinity();
    std::vector<PoseWindow> windows{random_pose_window(rng, 5, 6, 7, 4)};
    TrainConfig cfg;
    cfg.epochs = 1;
    CHECK_THROWS_AS(train_pose(net, windows, cfg), NonFiniteLoss);
}

TEST_CASE("untrained pose outputs decode to valid rotations") {
    std::mt19937_64 rng(101);
    PoseNet net = PoseNet::create(102);  // full-size untrained
    const auto out = pose_forward(net, Vec::Zero(144), random_seq(rng, 22, 8));
    for (const Vec& y : out) {
        const JointRotations theta = unflatten_pose_6d(PoseVector(y));
        for (const Rot3& r : theta) {
            CHECK(r.is_valid(1e-6));
            CHECK(r.m.determinant() == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("checkpoints round-trip through f32 and validate headers") {
    const std::string pose_path =
        (std::filesystem::temp_directory_path() / "bmc_test_pose.ckpt").string();
    const std::string vel_path =
        (std::filesystem::temp_directory_path() / "bmc_test_vel.ckpt").string();

    PoseNet net = PoseNet::create(103, 5, 8, 2, 6, 7);
    save_pose_net(net, pose_path);
    PoseNet back = load_pose_net(pose_path);
    auto a = param_views(net);
    auto b = param_views(back);
    for (size_t k = 0; k < a.size(); ++k) {
        for (long i = 0; i < a[k].size(); ++i) {
            CHECK(b[k][i] == doctest::Approx(a[k][i]).epsilon(1e-6));
            CHECK(b[k][i] == static_cast<double>(static_cast<float>(a[k][i])));
        }
    }

    VelocityNet vnet = VelocityNet::create(104, 4, 6, 2, 2);
    save_velocity_net(vnet, vel_path);
    const VelocityNet vback = load_velocity_net(vel_path);
    CHECK(vback.core.hidden() == 6);

    SUBCASE("wrong kind") {
        CHECK_THROWS_AS(load_velocity_net(pose_path), CorruptFile);
    }
    SUBCASE("bad magic") {
        std::ofstream f(pose_path, std::ios::binary);
        f << "JUNKJUNKJUNK";
        f.close();
        CHECK_THROWS_AS(load_pose_net(pose_path), BadMagic);
    }
    SUBCASE("truncation") {
        const auto size = std::filesystem::file_size(vel_path);
        std::filesystem::resize_file(vel_path, size - 64);
        CHECK_THROWS_AS(load_velocity_net(vel_path), CorruptFile);
    }
    SUBCASE("feature layout version gate") {
        std::fstream f(pose_path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(8);  // feature layout field
        const char bogus[4] = {42, 0, 0, 0};
        f.write(bogus, 4);
        f.close();
        CHECK_THROWS_AS(load_pose_net(pose_path), VersionMismatch);
    }
    std::remove(pose_path.c_str());
    std::remove(vel_path.c_str());
}

}  // TEST_SUITE
