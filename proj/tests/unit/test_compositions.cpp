#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "actgram/compositions.hpp"
#include "helpers.hpp"

using namespace actgram;

namespace {

// Rows p1, columns p2, both in band order pimp..nimp.
const char* const kPairTable[9] = {
    "ccccccccc",  // pimp
    "ciiiuaaac",  // bpos
    "ciiiuaaac",  // mpos
    "ciiiuaaac",  // spos
    "cuuukuuuc",  // const
    "caaaudddc",  // sneg
    "caaaudddc",  // mneg
    "caaaudddc",  // bneg
    "ccccccccc",  // nimp
};

Primitive prim(GradientLabel l, double t0, double t1, double lo = 0.0, double hi = 1.0, double g = 0.0) {
    Primitive p;
    p.label = l;
    p.t_start = t0;
    p.t_end = t1;
    p.min = lo;
    p.max = hi;
    p.avg = 0.5 * (lo + hi);
    p.gradient = g;
    return p;
}

std::string letters(const std::vector<MotionComposition>& mcs) {
    std::string s;
    for (const auto& m : mcs) s += to_string(m.label);
    return s;
}

}  // namespace

TEST_CASE("pair table covers all 81 cells") {
    for (std::size_t r = 0; r < kNumGradientLabels; ++r) {
        for (std::size_t c = 0; c < kNumGradientLabels; ++c) {
            const auto got = classify_pair(kAllGradientLabels[r], kAllGradientLabels[c]);
            CHECK(std::string(to_string(got)) == std::string(1, kPairTable[r][c]));
            CHECK(classify_pair(kAllGradientLabels[r], kAllGradientLabels[c]) == got);
        }
    }
}

TEST_CASE("named pair examples") {
    CHECK(classify_pair(GradientLabel::Spos, GradientLabel::Mneg) == McLabel::Adjustment);
    CHECK(classify_pair(GradientLabel::Pimp, GradientLabel::Nimp) == McLabel::Contact);
    CHECK(classify_pair(GradientLabel::Const, GradientLabel::Bpos) == McLabel::Unstable);
}

TEST_CASE("singletons") {
    CHECK(singleton_label(GradientLabel::Mpos) == McLabel::Increase);
    CHECK(singleton_label(GradientLabel::Bneg) == McLabel::Decrease);
    CHECK(singleton_label(GradientLabel::Const) == McLabel::Constant);
    CHECK(singleton_label(GradientLabel::Nimp) == McLabel::Contact);
    CHECK(singleton_label(GradientLabel::Pimp) == McLabel::Contact);

    const auto mcs = compose({prim(GradientLabel::Const, 2.0, 3.0, 1.0, 1.0)});
    REQUIRE(mcs.size() == 1);
    CHECK(mcs[0].label == McLabel::Constant);
    CHECK(mcs[0].t1_start == 2.0);
    CHECK(mcs[0].t2_end == 3.0);
    CHECK(mcs[0].t1_end == 2.5);
    CHECK(mcs[0].amplitude == 0.0);
}

TEST_CASE("two small rises make an increase") {
    const auto mcs = compose({prim(GradientLabel::Spos, 0, 1), prim(GradientLabel::Spos, 1, 2)});
    REQUIRE(mcs.size() == 1);
    CHECK(mcs[0].label == McLabel::Increase);
    CHECK(mcs[0].p1_label == GradientLabel::Spos);
    CHECK(mcs[0].p2_label == GradientLabel::Spos);
}

TEST_CASE("up up down down twice reads idid") {
    std::vector<Primitive> ps;
    const GradientLabel seq[] = {GradientLabel::Mpos, GradientLabel::Mpos, GradientLabel::Mneg, GradientLabel::Mneg,
                                 GradientLabel::Mpos, GradientLabel::Mpos, GradientLabel::Mneg, GradientLabel::Mneg};
    for (int k = 0; k < 8; ++k) ps.push_back(prim(seq[k], k, k + 1));
    CHECK(letters(compose(ps)) == "idid");
}

TEST_CASE("pair features") {
    // two fitted lines: 1 + 3(t - 0.5) over [0,1] and -2 flat over [1,3]
    auto a = prim(GradientLabel::Mpos, 0.0, 1.0, -0.5, 2.5, 3.0);
    a.avg = 1.0;
    auto b = prim(GradientLabel::Const, 1.0, 3.0, -2.0, -2.0, 0.0);
    b.avg = -2.0;
    const auto m = compose({a, b}).at(0);
    CHECK(m.label == McLabel::Unstable);
    CHECK(m.amplitude == doctest::Approx(4.5));
    CHECK(m.avg == doctest::Approx((1.0 * 1.0 + -2.0 * 2.0) / 3.0));
    CHECK(m.t_avg == doctest::Approx(1.5));
    CHECK(m.t1_end == 1.0);
    CHECK(m.t2_start == 1.0);

    // midpoint-rule integral of the squared piecewise line
    const int n = 300000;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        const double t = 3.0 * (k + 0.5) / n;
        const double y = t < 1.0 ? 1.0 + 3.0 * (t - 0.5) : -2.0;
        acc += y * y;
    }
    CHECK(m.rms == doctest::Approx(std::sqrt(acc / n)).epsilon(1e-6));
}

TEST_CASE("composition count halves, rounding up, and spans tile") {
    std::mt19937_64 rng(17);
    for (int n = 1; n <= 40; ++n) {
        std::vector<Primitive> ps;
        double t = 0.0;
        for (int k = 0; k < n; ++k) {
            const double dt = 0.01 + 0.1 * static_cast<double>(rng() % 100) / 100.0;
            ps.push_back(prim(kAllGradientLabels[rng() % kNumGradientLabels], t, t + dt));
            t += dt;
        }
        const auto mcs = compose(ps);
        CHECK(mcs.size() == static_cast<std::size_t>((n + 1) / 2));
        CHECK(mcs.front().t1_start == 0.0);
        CHECK(mcs.back().t2_end == t);
        for (std::size_t k = 1; k < mcs.size(); ++k) CHECK(mcs[k].t1_start == mcs[k - 1].t2_end);
        for (const auto& m : mcs) CHECK(m.amplitude >= 0.0);
    }
}

TEST_CASE("empty input") {
    CHECK(testutil::error_kind_of([] { compose({}); }) == testutil::kind(ErrorKind::EmptySequence));
}

TEST_CASE("letters round trip") {
    for (auto l : kAllMcLabels) CHECK(parse_mc_label(to_string(l)) == l);
    CHECK_FALSE(parse_mc_label("z").has_value());
}
