#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "actgram/mondrian.hpp"
#include "helpers.hpp"

using namespace actgram;

namespace {

void blobs(int per_class, std::uint64_t seed, std::vector<std::vector<double>>& X, std::vector<int>& y) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 0.6);
    for (int i = 0; i < per_class; ++i) {
        for (int c = 0; c < 3; ++c) {
            X.push_back({2.0 * c + n(rng), (c == 1 ? 2.0 : 0.0) + n(rng)});
            y.push_back(c);
        }
    }
}

}  // namespace

TEST_CASE("one leaf with one sample gives the smoothed counts") {
    MondrianTree t(2, std::numeric_limits<double>::infinity(), 1);
    const std::vector<double> x{0.3, -1.0};
    t.extend(x, 0);
    REQUIRE(t.nodes().size() == 1);
    const auto p = t.predict_proba(x);
    CHECK(p[0] == doctest::Approx(2.0 / 3.0));
    CHECK(p[1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("forest output is the mean of its trees") {
    ForestParams fp;
    fp.n_trees = 2;
    fp.n_classes = 2;
    MondrianForest f(fp);
    const std::vector<double> x{1.0};
    auto& trees = f.mutable_trees();
    trees[0].extend(x, 0);
    trees[0].extend(x, 0);
    trees[0].extend(x, 1);
    for (int k = 0; k < 3; ++k) trees[1].extend(x, 1);
    f.set_samples_seen(6);
    CHECK(trees[0].predict_proba(x)[0] == doctest::Approx(0.6));
    CHECK(trees[1].predict_proba(x)[0] == doctest::Approx(0.2));
    const auto p = f.predict_proba(x);
    CHECK(p[0] == doctest::Approx(0.4));
    CHECK(p[1] == doctest::Approx(0.6));
}

TEST_CASE("a point inside every box changes counts only") {
    MondrianTree t(2, std::numeric_limits<double>::infinity(), 9);
    t.extend(std::vector<double>{0.0, 0.0}, 0);
    t.extend(std::vector<double>{1.0, 1.0}, 1);
    t.extend(std::vector<double>{0.0, 1.0}, 0);
    const auto before = t.nodes();
    t.extend(std::vector<double>{0.0, 0.0}, 1);
    const auto& after = t.nodes();
    REQUIRE(after.size() == before.size());
    double added = 0.0;
    for (std::size_t i = 0; i < after.size(); ++i) {
        CHECK(after[i].left == before[i].left);
        CHECK(after[i].right == before[i].right);
        CHECK(after[i].split_dim == before[i].split_dim);
        CHECK(after[i].split_loc == before[i].split_loc);
        CHECK(after[i].split_time == before[i].split_time);
        CHECK(after[i].lower == before[i].lower);
        CHECK(after[i].upper == before[i].upper);
        added += std::accumulate(after[i].counts.begin(), after[i].counts.end(), 0.0) -
                 std::accumulate(before[i].counts.begin(), before[i].counts.end(), 0.0);
    }
    CHECK(added > 0.0);
    const auto& root = after[static_cast<std::size_t>(t.root())];
    CHECK(std::accumulate(root.counts.begin(), root.counts.end(), 0.0) == 4.0);
}

TEST_CASE("split between 0 and 1 falls uniformly in the gap") {
    const int runs = 10000, bins = 10;
    std::vector<int> hist(bins, 0);
    for (int s = 0; s < runs; ++s) {
        MondrianTree t(2, std::numeric_limits<double>::infinity(), static_cast<std::uint64_t>(s) * 7919 + 1);
        t.extend(std::vector<double>{0.0}, 0);
        t.extend(std::vector<double>{1.0}, 1);
        const auto& root = t.nodes()[static_cast<std::size_t>(t.root())];
        REQUIRE_FALSE(root.is_leaf());
        REQUIRE(root.split_loc > 0.0);
        REQUIRE(root.split_loc < 1.0);
        ++hist[std::min(bins - 1, static_cast<int>(root.split_loc * bins))];
    }
    double chi2 = 0.0;
    const double expected = static_cast<double>(runs) / bins;
    for (int h : hist) chi2 += (h - expected) * (h - expected) / expected;
    // 99th percentile of chi-square with 9 degrees of freedom
    CHECK(chi2 < 21.666);
}

TEST_CASE("empty batch leaves the forest alone") {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    blobs(5, 2, X, y);
    ForestParams fp;
    fp.n_trees = 5;
    fp.n_classes = 3;
    MondrianForest f(fp);
    f.partial_fit(X, y);
    const auto before = forest_to_json(f);
    f.partial_fit({}, {});
    CHECK(forest_to_json(f) == before);
    CHECK(f.samples_seen() == X.size());
}

TEST_CASE("unfitted forest refuses to predict") {
    MondrianForest f;
    const std::vector<double> x{1.0};
    CHECK(testutil::error_kind_of([&] { f.predict_proba(x); }) == testutil::kind(ErrorKind::UnfittedForest));
}

TEST_CASE("distributions sum to one and trees stay consistent") {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    blobs(30, 5, X, y);
    ForestParams fp;
    fp.n_trees = 20;
    fp.n_classes = 3;
    fp.seed = 17;
    MondrianForest f(fp);
    for (std::size_t b = 0; b < 3; ++b) {
        const std::size_t lo = b * X.size() / 3, hi = (b + 1) * X.size() / 3;
        f.partial_fit({X.begin() + lo, X.begin() + hi}, {y.begin() + lo, y.begin() + hi});
    }
    for (const auto& t : f.trees()) {
        CHECK(t.count_violations(X) == 0);
        const auto& root = t.nodes()[static_cast<std::size_t>(t.root())];
        CHECK(std::accumulate(root.counts.begin(), root.counts.end(), 0.0) == static_cast<double>(X.size()));
    }
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 7.0);
    for (int k = 0; k < 200; ++k) {
        const std::vector<double> q{u(rng), u(rng)};
        const auto p = f.predict_proba(q);
        CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) < 1e-9);
        for (double v : p) CHECK(v >= 0.0);
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < X.size(); ++i) correct += f.predict(X[i]) == y[i];
    CHECK(correct > X.size() * 9 / 10);
}

TEST_CASE("a broken box is reported") {
    MondrianTree t(2, std::numeric_limits<double>::infinity(), 4);
    t.extend(std::vector<double>{0.0}, 0);
    t.extend(std::vector<double>{1.0}, 1);
    const std::vector<std::vector<double>> X{{0.0}, {1.0}};
    REQUIRE(t.count_violations(X) == 0);
    auto& leaf = t.mutable_nodes()[static_cast<std::size_t>(t.route(std::vector<double>{1.0}))];
    leaf.upper[0] = 0.5;
    leaf.lower[0] = 0.5;
    CHECK(t.count_violations(X) > 0);
}

TEST_CASE("more trees, less spread") {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    blobs(10, 8, X, y);
    const std::vector<double> q{1.0, 1.0};
    auto spread = [&](std::size_t m) {
        std::vector<double> ps;
        for (std::uint64_t s = 0; s < 20; ++s) {
            ForestParams fp;
            fp.n_trees = m;
            fp.n_classes = 3;
            fp.seed = 1000 + s;
            MondrianForest f(fp);
            f.partial_fit(X, y);
            ps.push_back(f.predict_proba(q)[1]);
        }
        const double mean = std::accumulate(ps.begin(), ps.end(), 0.0) / ps.size();
        double v = 0.0;
        for (double p : ps) v += (p - mean) * (p - mean);
        return v / (ps.size() - 1);
    };
    CHECK(spread(100) < spread(10));
}

TEST_CASE("batch bounds split evenly") {
    CHECK(batch_bounds(120, 12) == std::vector<std::size_t>{10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120});
    const auto b = batch_bounds(13, 5);
    REQUIRE(b.size() == 5);
    CHECK(b.back() == 13);
    std::size_t prev = 0;
    for (auto e : b) {
        CHECK(e - prev >= 2);
        CHECK(e - prev <= 3);
        prev = e;
    }
}

TEST_CASE("forest json round trip keeps predictions and rng state") {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    blobs(10, 11, X, y);
    ForestParams fp;
    fp.n_trees = 8;
    fp.n_classes = 3;
    fp.seed = 5;
    MondrianForest f(fp);
    f.partial_fit({X.begin(), X.begin() + 15}, {y.begin(), y.begin() + 15});
    auto g = forest_from_json(forest_to_json(f));
    CHECK(forest_to_json(g) == forest_to_json(f));
    for (const auto& x : X) CHECK(g.predict_proba(x) == f.predict_proba(x));
    // continuing from the reloaded forest matches continuing from the original
    f.partial_fit({X.begin() + 15, X.end()}, {y.begin() + 15, y.end()});
    g.partial_fit({X.begin() + 15, X.end()}, {y.begin() + 15, y.end()});
    CHECK(forest_to_json(g) == forest_to_json(f));
}
