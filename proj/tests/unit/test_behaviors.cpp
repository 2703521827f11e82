#include <doctest.h>

#include <random>
#include <string>

#include "actgram/behaviors.hpp"
#include "helpers.hpp"

using namespace actgram;

namespace {

// Rows m1, columns m2, order a i d k c u, equal amplitudes.
const char* const kLlbTable[6][6] = {
    {"AL", "N", "N", "N", "N", "N"},
    {"N", "PS", "AL", "N", "N", "N"},
    {"N", "AL", "PL", "N", "N", "N"},
    {"N", "N", "N", "FX", "N", "N"},
    {"N", "N", "N", "N", "CT", "N"},
    {"N", "N", "N", "N", "N", "N"},
};

MotionComposition mc(McLabel l, double t0, double t1, double amp = 1.0) {
    MotionComposition m;
    m.label = l;
    m.t1_start = t0;
    m.t2_end = t1;
    m.t1_end = m.t2_start = 0.5 * (t0 + t1);
    m.min_val = 0.0;
    m.max_val = amp;
    m.amplitude = amp;
    m.avg = 0.5 * amp;
    return m;
}

}  // namespace

TEST_CASE("behavior table covers all 36 cells") {
    for (std::size_t r = 0; r < kNumMcLabels; ++r) {
        for (std::size_t c = 0; c < kNumMcLabels; ++c) {
            const auto got = classify_mc_pair(mc(kAllMcLabels[r], 0, 1), mc(kAllMcLabels[c], 1, 2));
            CHECK(std::string(to_string(got)) == kLlbTable[r][c]);
        }
    }
}

TEST_CASE("shift needs a strictly larger second amplitude") {
    const auto a = McLabel::Adjustment;
    CHECK(classify_mc_pair(mc(a, 0, 1, 1.0), mc(a, 1, 2, 2.0)) == LlbLabel::Shift);
    CHECK(classify_mc_pair(mc(a, 0, 1, 2.0), mc(a, 1, 2, 1.0)) == LlbLabel::Alignment);
    CHECK(classify_mc_pair(mc(a, 0, 1, 1.0), mc(a, 1, 2, 1.0)) == LlbLabel::Alignment);
    CHECK(classify_mc_pair(mc(McLabel::Increase, 0, 1, 1.0), mc(McLabel::Decrease, 1, 2, 3.0)) == LlbLabel::Shift);
    CHECK(classify_mc_pair(mc(McLabel::Decrease, 0, 1, 3.0), mc(McLabel::Increase, 1, 2, 1.0)) ==
          LlbLabel::Alignment);
}

TEST_CASE("swapping unequal adjustments turns shift into alignment") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int k = 0; k < 200; ++k) {
        const double x = u(rng), y = u(rng);
        if (x == y) continue;
        const auto p = classify_mc_pair(mc(McLabel::Adjustment, 0, 1, x), mc(McLabel::Adjustment, 1, 2, y));
        const auto q = classify_mc_pair(mc(McLabel::Adjustment, 0, 1, y), mc(McLabel::Adjustment, 1, 2, x));
        CHECK(p != q);
    }
}

TEST_CASE("only labels and amplitudes matter") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int k = 0; k < 300; ++k) {
        auto m1 = mc(kAllMcLabels[rng() % kNumMcLabels], 0, 1, 1.0 + (k % 3));
        auto m2 = mc(kAllMcLabels[rng() % kNumMcLabels], 1, 2, 1.0 + (k % 2));
        const auto before = classify_mc_pair(m1, m2);
        m1.avg = u(rng);
        m1.rms = u(rng);
        m2.t_avg = u(rng);
        m2.p1_label = GradientLabel::Nimp;
        m1.t1_end = u(rng);
        CHECK(classify_mc_pair(m1, m2) == before);
    }
}

TEST_CASE("behavior singletons") {
    CHECK(singleton_label(McLabel::Increase) == LlbLabel::Push);
    CHECK(singleton_label(McLabel::Decrease) == LlbLabel::Pull);
    CHECK(singleton_label(McLabel::Constant) == LlbLabel::Fixed);
    CHECK(singleton_label(McLabel::Contact) == LlbLabel::Contact);
    CHECK(singleton_label(McLabel::Adjustment) == LlbLabel::Alignment);
    CHECK(singleton_label(McLabel::Unstable) == LlbLabel::Noise);
}

TEST_CASE("four constants make two fixed behaviors") {
    std::vector<MotionComposition> ks;
    for (int k = 0; k < 4; ++k) ks.push_back(mc(McLabel::Constant, k, k + 1));
    const auto b = derive_behaviors(ks);
    REQUIRE(b.size() == 2);
    CHECK(b[0].label == LlbLabel::Fixed);
    CHECK(b[1].label == LlbLabel::Fixed);
    CHECK(b[0].t1_start == 0.0);
    CHECK(b[1].t2_end == 4.0);
}

TEST_CASE("behavior count halves and max stays above the mean") {
    std::mt19937_64 rng(23);
    for (int n = 1; n <= 30; ++n) {
        std::vector<MotionComposition> ms;
        for (int k = 0; k < n; ++k) {
            ms.push_back(mc(kAllMcLabels[rng() % kNumMcLabels], k, k + 1, 0.5 + static_cast<double>(rng() % 7)));
        }
        const auto b = derive_behaviors(ms);
        CHECK(b.size() == static_cast<std::size_t>((n + 1) / 2));
        for (const auto& x : b) CHECK(x.max_val >= x.avg);
        CHECK(b.back().t2_end == static_cast<double>(n));
    }
}

TEST_CASE("behavior errors and names") {
    CHECK(testutil::error_kind_of([] { derive_behaviors({}); }) == testutil::kind(ErrorKind::EmptySequence));
    for (auto l : kAllLlbLabels) CHECK(parse_llb_label(to_string(l)) == l);
}
