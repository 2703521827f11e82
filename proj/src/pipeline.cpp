#include "actgram/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "actgram/error.hpp"

namespace actgram {

Calibration calibrate_corpus(const std::vector<Trial>& trials, const SegmentConfig& seg, const CutFractions& cuts,
                             bool pooled) {
    if (trials.empty()) throw Error(ErrorKind::EmptyCorpus, "no trials to calibrate on");
    Calibration cal;
    std::vector<AxisSeries> all;
    for (Axis axis : kAllAxes) {
        std::vector<AxisSeries> corpus;
        corpus.reserve(trials.size());
        for (const auto& t : trials) corpus.push_back(t.axis_series(axis));
        if (pooled) {
            all.insert(all.end(), corpus.begin(), corpus.end());
            continue;
        }
        try {
            cal.axes[axis] = calibrate_thresholds(corpus, seg, cuts);
        } catch (const Error& e) {
            rethrow_with_context(e, "axis " + std::string(to_string(axis)));
        }
    }
    if (pooled) {
        const auto th = calibrate_thresholds(all, seg, cuts);
        for (Axis axis : kAllAxes) cal.axes[axis] = th;
    }
    return cal;
}

std::vector<GrammarMatrix> encode_corpus(const std::vector<Trial>& trials, const Calibration& cal,
                                         const EncodeConfig& cfg) {
    std::vector<GrammarMatrix> out(trials.size());
    std::vector<std::exception_ptr> errors(trials.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < trials.size(); i = next++) {
            try {
                out[i] = encode_trial(trials[i], cal, cfg);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n_threads =
        std::min<std::size_t>(trials.size(), std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < n_threads; ++k) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

std::vector<TrialGroup> group_trials(const std::vector<GrammarMatrix>& matrices, int arms) {
    if (arms != 1 && arms != 2) throw Error(ErrorKind::Usage, "arms must be 1 or 2");
    const auto k = static_cast<std::size_t>(arms);
    if (matrices.size() % k != 0) {
        throw Error(ErrorKind::Usage, std::to_string(matrices.size()) + " trials do not pair up across " +
                                          std::to_string(arms) + " arms");
    }
    std::vector<TrialGroup> groups;
    for (std::size_t i = 0; i < matrices.size(); i += k) {
        TrialGroup g(matrices.begin() + static_cast<std::ptrdiff_t>(i),
                     matrices.begin() + static_cast<std::ptrdiff_t>(i + k));
        if (arms == 2 && (g[0].arm != Arm::Right || g[1].arm != Arm::Left)) {
            throw Error(ErrorKind::Usage, "trial " + g[0].trial_id + ": expected a right arm followed by a left arm");
        }
        groups.push_back(std::move(g));
    }
    return groups;
}

std::size_t FeatureSpace::dimension() const {
    std::size_t d = 0;
    for (const auto& l : arms) d += l.dimension();
    return d;
}

FeatureSpace fit_feature_space(const std::vector<TrialGroup>& training, WordEncoding encoding) {
    if (training.empty()) throw Error(ErrorKind::EmptyCorpus, "no training trials");
    FeatureSpace space;
    for (std::size_t arm = 0; arm < training.front().size(); ++arm) {
        std::vector<GrammarMatrix> ms;
        for (const auto& g : training) ms.push_back(g.at(arm));
        space.arms.push_back(make_layout(dataset_widths(ms), build_codebook(ms), encoding));
    }
    return space;
}

PhaseDataset featurize(const std::vector<TrialGroup>& groups, const FeatureSpace& space) {
    std::vector<PhaseDataset> parts;
    for (std::size_t arm = 0; arm < space.arms.size(); ++arm) {
        std::vector<GrammarMatrix> ms;
        for (const auto& g : groups) {
            if (g.size() != space.arms.size()) {
                throw Error(ErrorKind::DimensionMismatch, "trial " + g.front().trial_id + " has " +
                                                              std::to_string(g.size()) + " arms, model expects " +
                                                              std::to_string(space.arms.size()));
            }
            ms.push_back(g[arm]);
        }
        parts.push_back(vectorize(ms, space.arms[arm]));
    }
    return concat_features(parts);
}

std::string feature_space_to_json(const FeatureSpace& space) {
    nlohmann::ordered_json j;
    j["format"] = "actgram-features";
    j["version"] = 1;
    j["arms"] = nlohmann::ordered_json::array();
    for (const auto& l : space.arms) j["arms"].push_back(nlohmann::ordered_json::parse(layout_to_json(l)));
    return j.dump(2) + "\n";
}

FeatureSpace feature_space_from_json(const std::string& text) {
    FeatureSpace space;
    try {
        auto j = nlohmann::json::parse(text);
        if (j.value("format", "") != "actgram-features") throw Error(ErrorKind::BadFile, "not a feature space file");
        for (const auto& arm : j.at("arms")) space.arms.push_back(layout_from_json(arm.dump()));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::BadFile, std::string("feature json: ") + e.what());
    }
    return space;
}

namespace {

double svm_accuracy(const SvmModel& model, const PhaseDataset& ds) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) hit += predict_svm(model, ds.X[i]).label == ds.y[i];
    return static_cast<double>(hit) / static_cast<double>(ds.size());
}

double forest_accuracy(const MondrianForest& forest, const PhaseDataset& ds) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) hit += forest.predict(ds.X[i]) == ds.y[i];
    return static_cast<double>(hit) / static_cast<double>(ds.size());
}

PhaseDataset rows(const PhaseDataset& ds, std::size_t first, std::size_t last) {
    PhaseDataset out;
    out.X.assign(ds.X.begin() + static_cast<std::ptrdiff_t>(first), ds.X.begin() + static_cast<std::ptrdiff_t>(last));
    out.y.assign(ds.y.begin() + static_cast<std::ptrdiff_t>(first), ds.y.begin() + static_cast<std::ptrdiff_t>(last));
    out.ids.assign(ds.ids.begin() + static_cast<std::ptrdiff_t>(first),
                   ds.ids.begin() + static_cast<std::ptrdiff_t>(last));
    return out;
}

double tail_mean(const std::vector<CurvePoint>& curve, std::size_t n, bool svm) {
    std::vector<double> vals;
    for (const auto& p : curve) {
        const auto& v = svm ? p.svm : p.mondrian;
        if (v) vals.push_back(*v);
    }
    if (vals.empty()) return 0.0;
    const std::size_t k = std::min(n, vals.size());
    return std::accumulate(vals.end() - static_cast<std::ptrdiff_t>(k), vals.end(), 0.0) / static_cast<double>(k);
}

}  // namespace

EvalReport evaluate_corpus(const std::vector<Trial>& trials, int arms, const PipelineConfig& pipe,
                           const EvalConfig& eval) {
    if (arms != 1 && arms != 2) throw Error(ErrorKind::Usage, "arms must be 1 or 2");
    const auto k = static_cast<std::size_t>(arms);
    const std::size_t n_groups = trials.size() / k;
    if (eval.n_train < 1 || eval.n_validation < 1) {
        throw Error(ErrorKind::InsufficientTrials, "need at least one training and one validation trial");
    }
    if (n_groups < eval.n_train + eval.n_validation) {
        throw Error(ErrorKind::InsufficientTrials, std::to_string(n_groups) + " trials available, " +
                                                       std::to_string(eval.n_train + eval.n_validation) +
                                                       " requested");
    }
    if (eval.step < 1) throw Error(ErrorKind::Usage, "step must be at least 1");

    std::vector<std::size_t> order(n_groups);
    std::iota(order.begin(), order.end(), 0);
    if (eval.shuffle) {
        std::mt19937_64 rng(eval.seed);
        for (std::size_t i = n_groups; i > 1; --i) {
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
        }
    }
    auto pick = [&](std::size_t first, std::size_t last) {
        std::vector<Trial> out;
        for (std::size_t i = first; i < last; ++i) {
            for (std::size_t a = 0; a < k; ++a) out.push_back(trials[order[i] * k + a]);
        }
        return out;
    };
    const auto train_trials = pick(0, eval.n_train);
    const auto val_trials = pick(eval.n_train, eval.n_train + eval.n_validation);

    const auto cal = calibrate_corpus(train_trials, pipe.encode.segment, pipe.cuts, pipe.pooled_calibration);
    const auto train_groups = group_trials(encode_corpus(train_trials, cal, pipe.encode), arms);
    const auto val_groups = group_trials(encode_corpus(val_trials, cal, pipe.encode), arms);
    const auto space = fit_feature_space(train_groups, pipe.encoding);
    const auto train = featurize(train_groups, space);
    const auto val = featurize(val_groups, space);

    EvalReport report;
    report.feature_dim = space.dimension();
    for (const auto& g : val_groups) report.validation_ids.push_back(g.front().trial_id);

    ForestParams fp = eval.forest;
    fp.n_classes = kNumPhases;
    fp.seed = eval.seed;
    MondrianForest forest(fp);
    std::size_t fed = 0;  // trials already given to the forest

    const std::size_t first = std::min(eval.svm_start, eval.mondrian_start);
    for (std::size_t n = std::max<std::size_t>(first, 1); n <= eval.n_train; n += eval.step) {
        CurvePoint pt;
        pt.train_trials = n;
        pt.train_samples = n * kNumPhases;
        const auto seen = rows(train, 0, n * kNumPhases);
        if (n >= eval.svm_start) pt.svm = svm_accuracy(train_svm(seen, eval.svm), val);
        if (n >= eval.mondrian_start) {
            const auto added = rows(train, fed * kNumPhases, n * kNumPhases);
            forest.partial_fit(added.X, added.y);
            fed = n;
            pt.mondrian = forest_accuracy(forest, val);
        }
        report.curve.push_back(pt);
        if (n + eval.step > eval.n_train && n != eval.n_train) {
            // close the curve on the full training split
            n = eval.n_train - eval.step;
        }
    }
    report.svm_steady = tail_mean(report.curve, eval.steady_steps, true);
    report.mondrian_steady = tail_mean(report.curve, eval.steady_steps, false);
    return report;
}

std::string curve_to_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "train_trials,train_samples,svm_accuracy,mondrian_accuracy\n";
    for (const auto& p : report.curve) {
        out << p.train_trials << ',' << p.train_samples << ',';
        if (p.svm) out << format_double(*p.svm);
        out << ',';
        if (p.mondrian) out << format_double(*p.mondrian);
        out << '\n';
    }
    return out.str();
}

}  // namespace actgram
