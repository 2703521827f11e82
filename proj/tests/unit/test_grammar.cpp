#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "actgram/grammar.hpp"
#include "actgram/pipeline.hpp"
#include "actgram/synth.hpp"
#include "helpers.hpp"

using namespace actgram;

namespace {

Calibration flat_calibration(double eps, double gmax) {
    Calibration cal;
    for (Axis a : kAllAxes) {
        cal.axes[a].eps_const = eps;
        cal.axes[a].g_max = gmax;
    }
    return cal;
}

Trial zero_trial() {
    Trial t;
    t.trial_id = "zero";
    for (int i = 0; i < 1600; ++i) {
        WrenchSample s;
        s.t = i / 200.0;
        t.samples.push_back(s);
    }
    t.phases = {{Phase::Approach, 0, 2}, {Phase::Rotation, 2, 4}, {Phase::Insertion, 4, 6}, {Phase::Mating, 6, 8}};
    return t;
}

const std::vector<Trial>& synthetic() {
    static const auto trials = generate_dataset(default_profile(), 6, 99);
    return trials;
}

const Calibration& synthetic_calibration() {
    static const auto cal = calibrate_corpus(synthetic(), {}, {});
    return cal;
}

WordSeq word_of(Level l, const char* name) { return {*parse_word(l, name)}; }

}  // namespace

TEST_CASE("stretch by nearest neighbour") {
    CHECK(stretch({7, 9}, 4) == WordSeq{7, 7, 9, 9});
    CHECK(stretch({1, 2, 3}, 3) == WordSeq{1, 2, 3});
    CHECK(stretch({5}, 4) == WordSeq{5, 5, 5, 5});

    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 1 + rng() % 12;
        const std::size_t w = n + rng() % 20;
        WordSeq seq;
        for (std::size_t k = 0; k < n; ++k) {
            int x = static_cast<int>(rng() % 5);
            if (!seq.empty() && x == seq.back()) x = (x + 1) % 5;
            seq.push_back(x);
        }
        const auto out = stretch(seq, w);
        REQUIRE(out.size() == w);
        CHECK(out.front() == seq.front());
        CHECK(out.back() == seq.back());
        if (w > 1) {
            for (std::size_t j = 0; j < w; ++j) {
                const auto idx = static_cast<std::size_t>(
                    std::llround(static_cast<double>(j) * static_cast<double>(n - 1) / static_cast<double>(w - 1)));
                CHECK(out[j] == seq[idx]);
            }
        }
        WordSeq dedup;
        for (int x : out) {
            if (dedup.empty() || dedup.back() != x) dedup.push_back(x);
        }
        CHECK(dedup == seq);
    }
}

TEST_CASE("resampling works per level and phase") {
    GrammarMatrix m;
    m.at(Level::Primitive, Axis::Fx, Phase::Approach) = {1, 2};
    m.at(Level::Primitive, Axis::Fz, Phase::Approach) = {1, 2, 3, 4};
    m.at(Level::Primitive, Axis::Fx, Phase::Mating) = {3};
    m.at(Level::Primitive, Axis::Fy, Phase::Mating) = {3, 4};
    const auto w = word_counts(m);
    CHECK(w[0][0] == 4);
    CHECK(w[0][3] == 2);
    CHECK(w[1][0] == 0);
    const auto r = resample_words(m);
    CHECK(r.at(Level::Primitive, Axis::Fx, Phase::Approach) == WordSeq{1, 1, 2, 2});
    CHECK(r.at(Level::Primitive, Axis::Fz, Phase::Approach) == WordSeq{1, 2, 3, 4});
    CHECK(r.at(Level::Primitive, Axis::Fx, Phase::Mating) == WordSeq{3, 3});
    CHECK(resample_words(r) == r);
}

TEST_CASE("alphabet sizes") {
    CHECK(alphabet_size(Level::Primitive) == 9);
    CHECK(alphabet_size(Level::Composition) == 6);
    CHECK(alphabet_size(Level::Behavior) == 7);
    for (Level l : kAllLevels) {
        for (std::size_t w = 0; w < alphabet_size(l); ++w) {
            CHECK(parse_word(l, word_name(l, static_cast<int>(w))) == static_cast<int>(w));
        }
    }
}

TEST_CASE("a flat zero trial collapses to one constant word per cell") {
    const auto m = encode_trial(zero_trial(), flat_calibration(0.1, 10.0));
    for (Axis a : kAllAxes) {
        for (Phase p : kAllPhases) {
            CHECK(m.at(Level::Primitive, a, p) == word_of(Level::Primitive, "const"));
            CHECK(m.at(Level::Composition, a, p) == word_of(Level::Composition, "k"));
            CHECK(m.at(Level::Behavior, a, p) == word_of(Level::Behavior, "FX"));
        }
    }
}

TEST_CASE("insertion carries a contact on the dominant axis") {
    const auto& cal = synthetic_calibration();
    const int pimp = *parse_word(Level::Primitive, "pimp");
    const int nimp = *parse_word(Level::Primitive, "nimp");
    const int c = *parse_word(Level::Composition, "c");
    for (const auto& trial : synthetic()) {
        const auto m = encode_trial(trial, cal);
        const auto has = [](const WordSeq& s, int w) { return std::find(s.begin(), s.end(), w) != s.end(); };
        const auto& prim = m.at(Level::Primitive, Axis::Fz, Phase::Insertion);
        CHECK((has(prim, pimp) || has(prim, nimp)));
        CHECK(has(m.at(Level::Composition, Axis::Fz, Phase::Insertion), c));
    }
}

TEST_CASE("encoding is deterministic") {
    const auto& cal = synthetic_calibration();
    const auto a = encode_trial(synthetic()[0], cal);
    const auto b = encode_trial(synthetic()[0], cal);
    CHECK(a == b);
    const auto all = encode_corpus(synthetic(), cal, {});
    CHECK(all[0] == a);
    const auto layout = make_layout(dataset_widths(all), build_codebook(all));
    const auto x1 = vectorize(all, layout);
    const auto x2 = vectorize(encode_corpus(synthetic(), cal, {}), layout);
    CHECK(x1.X == x2.X);
    CHECK(dataset_to_csv(x1) == dataset_to_csv(x2));
}

TEST_CASE("layer counts shrink through the stack") {
    EncodeTrace trace;
    encode_trial(synthetic()[1], synthetic_calibration(), {}, &trace);
    for (const auto& axis : trace.counts) {
        for (const auto& c : axis) {
            CHECK(c.primitives <= c.primitives_raw);
            CHECK(c.compositions_raw == (c.primitives + 1) / 2);
            CHECK(c.compositions <= c.compositions_raw);
            CHECK(c.behaviors_raw == (c.compositions + 1) / 2);
            CHECK(c.behaviors <= c.behaviors_raw);
            CHECK(c.behaviors >= 1);
        }
    }
}

TEST_CASE("vectors: one row per phase, shared layout, codes within the codebook") {
    const auto all = encode_corpus(synthetic(), synthetic_calibration(), {});
    const std::vector<GrammarMatrix> train(all.begin(), all.begin() + 4);
    const auto book = build_codebook(train);
    for (Level l : kAllLevels) {
        CHECK(book.size(l) >= 1);
        CHECK(book.size(l) <= alphabet_size(l));
    }
    const auto layout = make_layout(dataset_widths(train), book);
    std::size_t expect_dim = 0;
    for (Level l : kAllLevels) {
        std::size_t widest = 0;
        for (Phase p : kAllPhases) widest = std::max(widest, dataset_widths(train)[static_cast<int>(l)][static_cast<int>(p)]);
        expect_dim += kNumAxes * widest;
    }
    CHECK(layout.dimension() == expect_dim);

    const auto one = vectorize({train[0]}, layout);
    REQUIRE(one.size() == 4);
    CHECK(one.y == std::vector<int>{0, 1, 2, 3});
    for (const auto& row : one.X) {
        CHECK(row.size() == expect_dim);
        for (double v : row) {
            CHECK(v >= 0.0);
            CHECK(v <= 9.0);
            CHECK(v == std::floor(v));
        }
    }
    // the word at slot 0 of (behavior, Fz) for approach is its codebook entry
    const int w = train[0].at(Level::Behavior, Axis::Fz, Phase::Approach).front();
    CHECK(one.X[0][layout.column(Level::Behavior, Axis::Fz, 0)] == book.code(Level::Behavior, w));

    const auto test = vectorize(std::vector<GrammarMatrix>(all.begin() + 4, all.end()), layout);
    CHECK(test.dimension() == expect_dim);
    CHECK(test.size() == 8);
}

TEST_CASE("unseen words map to zero and are counted") {
    GrammarMatrix a, b;
    for (Level l : kAllLevels) {
        for (Axis x : kAllAxes) {
            for (Phase p : kAllPhases) {
                a.at(l, x, p) = {0};
                b.at(l, x, p) = {1};
            }
        }
    }
    const auto layout = make_layout(dataset_widths({a}), build_codebook({a}));
    const auto ds = vectorize({b}, layout);
    CHECK(ds.unknown_words == kNumLevels * kNumAxes * kNumPhases);
    for (const auto& row : ds.X) {
        for (double v : row) CHECK(v == 0.0);
    }
}

TEST_CASE("grammar and layout json round trip") {
    const auto all = encode_corpus(synthetic(), synthetic_calibration(), {});
    const auto back = grammar_from_json(grammar_to_json(all[2]));
    CHECK(back == all[2]);
    const auto layout = make_layout(dataset_widths(all), build_codebook(all));
    CHECK(layout_from_json(layout_to_json(layout)) == layout);
}

TEST_CASE("two arm features sit side by side") {
    const auto trials = generate_dataset(default_profile(), 3, 5, 2);
    const auto cal = calibrate_corpus(trials, {}, {});
    const auto groups = group_trials(encode_corpus(trials, cal, {}), 2);
    REQUIRE(groups.size() == 3);
    const auto space = fit_feature_space(groups, WordEncoding::Ordinal);
    REQUIRE(space.arms.size() == 2);
    CHECK(space.dimension() == space.arms[0].dimension() + space.arms[1].dimension());
    const auto ds = featurize(groups, space);
    CHECK(ds.size() == 12);
    CHECK(ds.dimension() == space.dimension());
    CHECK(feature_space_from_json(feature_space_to_json(space)) == space);
}
