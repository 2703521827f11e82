#include <doctest.h>

#include <cmath>
#include <random>

#include "actgram/svm.hpp"
#include "helpers.hpp"

using namespace actgram;

namespace {

SvmParams linear_hard() {
    SvmParams p;
    p.kernel.type = KernelType::Linear;
    p.C = 1000.0;
    p.standardize = false;
    p.tol = 1e-6;
    return p;
}

// Two vertical columns of points at x = -a and x = +a.
void columns(double a, std::vector<std::vector<double>>& X, std::vector<int>& y) {
    for (int k = -3; k <= 3; ++k) {
        X.push_back({-a, 0.5 * k});
        y.push_back(0);
        X.push_back({a, 0.5 * k + 0.25});
        y.push_back(1);
    }
}

void blobs(int classes, int per_class, std::uint64_t seed, std::vector<std::vector<double>>& X, std::vector<int>& y) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 0.4);
    for (int c = 0; c < classes; ++c) {
        const double cx = 3.0 * std::cos(c * 2.0 * M_PI / classes);
        const double cy = 3.0 * std::sin(c * 2.0 * M_PI / classes);
        for (int i = 0; i < per_class; ++i) {
            X.push_back({cx + n(rng), cy + n(rng), n(rng)});
            y.push_back(c);
        }
    }
}

}  // namespace

TEST_CASE("functional margin by hand") {
    BinaryMachine m;
    m.kernel.type = KernelType::Linear;
    m.supports = {{1.0}};
    m.coef = {1.0};
    m.bias = 0.0;
    const std::vector<double> x{2.0};
    CHECK(functional_margin(m, x, +1) == doctest::Approx(2.0));
    CHECK(functional_margin(m, x, -1) == doctest::Approx(-2.0));
    CHECK(m.weight_norm() == doctest::Approx(1.0));
    CHECK(geometric_margin(m, x, +1) == doctest::Approx(2.0));
}

TEST_CASE("untrained machine has no margin") {
    BinaryMachine m;
    const std::vector<double> x{1.0};
    CHECK(testutil::error_kind_of([&] { functional_margin(m, x, 1); }) ==
          testutil::kind(ErrorKind::UntrainedModel));
}

TEST_CASE("separable columns: margin is half the gap") {
    for (double a : {0.5, 1.0, 2.5}) {
        std::vector<std::vector<double>> X;
        std::vector<int> y;
        columns(a, X, y);
        const auto model = train_svm(X, y, linear_hard());
        REQUIRE(model.machines.size() == 1);
        const auto& m = model.machines[0];
        double closest = 1e300;
        for (std::size_t i = 0; i < X.size(); ++i) {
            CHECK(predict_svm(model, X[i]).label == y[i]);
            // class 0 is the machine's positive side
            const int sign = y[i] == m.positive ? 1 : -1;
            const auto z = model.transform(X[i]);
            const double gm = geometric_margin(m, z, sign);
            CHECK(functional_margin(m, z, sign) > 0.0);
            closest = std::min(closest, gm);
        }
        CHECK(closest == doctest::Approx(a).epsilon(0.01));
    }
}

TEST_CASE("solver output satisfies the optimality conditions") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> n(0.0, 1.0);
    const std::size_t N = 60;
    std::vector<std::vector<double>> pts;
    std::vector<int> lab;
    for (std::size_t i = 0; i < N; ++i) {
        const int c = i % 2 ? 1 : -1;
        pts.push_back({n(rng) + 0.8 * c, n(rng)});
        lab.push_back(c);
    }
    Kernel k;
    k.type = KernelType::Rbf;
    k.gamma = 0.5;
    std::vector<std::vector<double>> gram(N, std::vector<double>(N));
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) gram[i][j] = std::exp(-0.5 * (std::pow(pts[i][0] - pts[j][0], 2) +
                                                                          std::pow(pts[i][1] - pts[j][1], 2)));
    }
    const double C = 1.0, tol = 1e-3;
    const auto fit = solve_binary(gram, lab, C, tol);
    double balance = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        CHECK(fit.alpha[i] >= 0.0);
        CHECK(fit.alpha[i] <= C);
        balance += fit.alpha[i] * lab[i];
    }
    CHECK(std::abs(balance) < 1e-9);
    for (std::size_t i = 0; i < N; ++i) {
        double f = fit.bias;
        for (std::size_t j = 0; j < N; ++j) f += fit.alpha[j] * lab[j] * gram[j][i];
        const double yf = lab[i] * f;
        if (fit.alpha[i] <= 0.0) {
            CHECK(yf >= 1.0 - tol);
        } else if (fit.alpha[i] >= C) {
            CHECK(yf <= 1.0 + tol);
        } else {
            CHECK(std::abs(yf - 1.0) <= tol);
        }
    }
}

TEST_CASE("four classes give six machines and six votes") {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    blobs(4, 15, 3, X, y);
    const auto model = train_svm(X, y);
    CHECK(model.machines.size() == 6);
    CHECK(model.classes == std::vector<int>{0, 1, 2, 3});
    std::size_t correct = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const auto p = predict_svm(model, X[i]);
        int total = 0;
        for (int v : p.votes) total += v;
        CHECK(total == 6);
        correct += p.label == y[i];
    }
    CHECK(correct >= X.size() - 2);
}

TEST_CASE("rescaling columns leaves predictions alone") {
    std::vector<std::vector<double>> X, Xs;
    std::vector<int> y;
    blobs(3, 12, 8, X, y);
    const double scale[3] = {7.0, 0.02, 300.0};
    const double shift[3] = {-4.0, 100.0, 0.5};
    for (const auto& r : X) Xs.push_back({r[0] * scale[0] + shift[0], r[1] * scale[1] + shift[1], r[2] * scale[2] + shift[2]});
    const auto a = train_svm(X, y);
    const auto b = train_svm(Xs, y);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int k = 0; k < 200; ++k) {
        const std::vector<double> q{u(rng), u(rng), u(rng)};
        const std::vector<double> qs{q[0] * scale[0] + shift[0], q[1] * scale[1] + shift[1], q[2] * scale[2] + shift[2]};
        CHECK(predict_svm(a, q).label == predict_svm(b, qs).label);
    }
}

TEST_CASE("three way vote ties resolve the same way every time") {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    for (int c = 0; c < 3; ++c) {
        const double ang = c * 2.0 * M_PI / 3.0;
        X.push_back({std::cos(ang), std::sin(ang)});
        y.push_back(c);
    }
    const auto model = train_svm(X, y);
    const std::vector<double> centre{0.0, 0.0};
    const auto first = predict_svm(model, centre);
    for (int k = 0; k < 20; ++k) CHECK(predict_svm(model, centre).label == first.label);
    // the winner has the most votes, then the largest summed score
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        const auto w = static_cast<std::size_t>(first.label);
        CHECK(first.votes[w] >= first.votes[c]);
        if (first.votes[w] == first.votes[c] && c != w) {
            CHECK((first.scores[w] > first.scores[c] || (first.scores[w] == first.scores[c] && w < c)));
        }
    }
}

TEST_CASE("rbf kernel is symmetric and bounded") {
    Kernel k;
    k.gamma = 0.3;
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> a{n(rng), n(rng)}, b{n(rng), n(rng)};
        CHECK(k(a, b) == k(b, a));
        CHECK(k(a, b) > 0.0);
        CHECK(k(a, b) <= 1.0);
        CHECK(k(a, a) == 1.0);
    }
}

TEST_CASE("svm errors") {
    const std::vector<std::vector<double>> X{{1.0}, {2.0}};
    CHECK(testutil::error_kind_of([&] { train_svm(X, {0, 0}); }) == testutil::kind(ErrorKind::SingleClass));
    CHECK(testutil::error_kind_of([&] { train_svm({{1.0}, {1.0}}, {0, 1}); }) ==
          testutil::kind(ErrorKind::DegenerateFeatures));
    const auto model = train_svm(X, {0, 1});
    const std::vector<double> wrong{1.0, 2.0};
    CHECK(testutil::error_kind_of([&] { predict_svm(model, wrong); }) ==
          testutil::kind(ErrorKind::DimensionMismatch));
}

TEST_CASE("constant columns are dropped") {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    blobs(2, 10, 6, X, y);
    for (auto& r : X) r.push_back(5.0);
    const auto model = train_svm(X, y);
    CHECK(model.dropped_dims == 1);
    CHECK(model.kept_dims == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("svm json round trip") {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    blobs(4, 8, 12, X, y);
    const auto model = train_svm(X, y);
    const auto back = svm_from_json(svm_to_json(model));
    CHECK(back == model);
    for (const auto& r : X) CHECK(predict_svm(back, r).label == predict_svm(model, r).label);
}
