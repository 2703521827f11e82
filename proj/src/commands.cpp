#include "actgram/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "actgram/error.hpp"
#include "actgram/svg.hpp"

namespace actgram {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

std::string kernel_name(KernelType k) {
    switch (k) {
        case KernelType::Linear: return "linear";
        case KernelType::Polynomial: return "poly";
        case KernelType::Rbf: return "rbf";
    }
    return "rbf";
}

KernelType parse_kernel(const std::string& s) {
    if (s == "linear") return KernelType::Linear;
    if (s == "poly" || s == "polynomial") return KernelType::Polynomial;
    if (s == "rbf") return KernelType::Rbf;
    throw Error(ErrorKind::Usage, "unknown kernel '" + s + "'");
}

std::string classifier_name(ClassifierKind k) { return k == ClassifierKind::Svm ? "svm" : "mondrian"; }

ClassifierKind parse_classifier(const std::string& s) {
    if (s == "svm") return ClassifierKind::Svm;
    if (s == "mondrian") return ClassifierKind::Mondrian;
    throw Error(ErrorKind::Usage, "unknown classifier '" + s + "'");
}

WordEncoding parse_encoding(const std::string& s) {
    if (s == "ordinal") return WordEncoding::Ordinal;
    if (s == "onehot") return WordEncoding::OneHot;
    throw Error(ErrorKind::Usage, "unknown encoding '" + s + "'");
}

std::string encoding_name(WordEncoding e) { return e == WordEncoding::Ordinal ? "ordinal" : "onehot"; }

template <typename T>
void take(const json& j, const char* key, T& dst) {
    if (j.contains(key) && !j.at(key).is_null()) dst = j.at(key).get<T>();
}

ojson pipeline_json(const PipelineConfig& p) {
    ojson j;
    j["segment"] = {{"r2_min", p.encode.segment.r2_min}, {"min_window", p.encode.segment.min_window}};
    j["cuts"] = {{"small", p.cuts.small}, {"med", p.cuts.med}, {"big", p.cuts.big}};
    j["pooled_calibration"] = p.pooled_calibration;
    j["filter"] = {{"min_duration_ratio", p.encode.filter.min_duration_ratio},
                   {"amp_ratio", p.encode.filter.amp_ratio},
                   {"max_cycles", p.encode.filter.max_cycles},
                   {"min_duration", p.encode.filter.min_duration}};
    j["encoding"] = encoding_name(p.encoding);
    return j;
}

void read_pipeline(const json& j, PipelineConfig& p) {
    if (j.contains("segment")) {
        take(j["segment"], "r2_min", p.encode.segment.r2_min);
        take(j["segment"], "min_window", p.encode.segment.min_window);
    }
    if (j.contains("cuts")) {
        take(j["cuts"], "small", p.cuts.small);
        take(j["cuts"], "med", p.cuts.med);
        take(j["cuts"], "big", p.cuts.big);
    }
    take(j, "pooled_calibration", p.pooled_calibration);
    if (j.contains("filter")) {
        const auto& f = j["filter"];
        take(f, "min_duration_ratio", p.encode.filter.min_duration_ratio);
        take(f, "amp_ratio", p.encode.filter.amp_ratio);
        take(f, "max_cycles", p.encode.filter.max_cycles);
        take(f, "min_duration", p.encode.filter.min_duration);
    }
    if (j.contains("encoding")) p.encoding = parse_encoding(j["encoding"].get<std::string>());
}

bool is_phase_file(const fs::path& p) {
    const auto name = p.filename().string();
    return name.size() > 11 && name.ends_with(".phases.csv");
}

std::vector<GrammarMatrix> load_grammars(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().filename().string().ends_with(".grammar.json")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<GrammarMatrix> out;
    for (const auto& f : files) {
        try {
            out.push_back(grammar_from_json(read_text(f)));
        } catch (const Error& e) {
            rethrow_with_context(e, f.string());
        }
    }
    return out;
}

std::size_t effective_batches(const RunConfig& cfg, std::size_t n) {
    if (cfg.batch_size > 0) return std::max<std::size_t>(1, (n + cfg.batch_size - 1) / cfg.batch_size);
    return cfg.batches;
}

}  // namespace

void RunConfig::validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::Usage, m); };
    if (arms != 1 && arms != 2) fail("arms must be 1 or 2");
    const auto& seg = pipeline.encode.segment;
    if (!(seg.r2_min > 0.0 && seg.r2_min < 1.0)) fail("r2_min must lie in (0, 1)");
    if (seg.min_window < 2) fail("min_window must be at least 2");
    const auto& c = pipeline.cuts;
    if (!(0.0 < c.small && c.small < c.med && c.med < c.big && c.big <= 1.0)) {
        fail("band cuts must satisfy 0 < small < med < big <= 1");
    }
    try {
        pipeline.encode.filter.validate();
    } catch (const Error& e) {
        fail(e.detail());
    }
    if (!(svm.C > 0.0)) fail("C must be positive");
    if (!(svm.tol > 0.0)) fail("tol must be positive");
    if (forest.n_trees < 1) fail("trees must be at least 1");
    if (!(forest.lifetime > 0.0)) fail("lifetime must be positive");
    if (batches < 1) fail("batches must be at least 1");
    if (eval.n_train < 1) fail("eval needs at least one training trial");
    if (eval.n_validation < 1) fail("eval needs a non-empty validation split");
    if (eval.step < 1) fail("eval step must be at least 1");
    if (eval.svm_start < 1 || eval.mondrian_start < 1) fail("eval start sizes must be at least 1");
    if (plot_axes.empty()) fail("plot needs at least one axis");
    if (synth_trials < 1) fail("synth needs at least one trial");
}

RunConfig run_config_from_json(const std::string& text, RunConfig cfg) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Usage, std::string("config: ") + e.what());
    }
    try {
        if (j.contains("data_dir")) cfg.data_dir = j["data_dir"].get<std::string>();
        if (j.contains("calibration")) cfg.calibration = j["calibration"].get<std::string>();
        if (j.contains("model")) cfg.model = j["model"].get<std::string>();
        if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
        if (j.contains("profile") && !j["profile"].is_null()) cfg.profile = j["profile"].get<std::string>();
        take(j, "arms", cfg.arms);
        take(j, "seed", cfg.seed);
        read_pipeline(j, cfg.pipeline);
        if (j.contains("classifier")) cfg.classifier = parse_classifier(j["classifier"].get<std::string>());
        if (j.contains("svm")) {
            const auto& s = j["svm"];
            if (s.contains("kernel")) cfg.svm.kernel.type = parse_kernel(s["kernel"].get<std::string>());
            take(s, "C", cfg.svm.C);
            take(s, "gamma", cfg.svm.kernel.gamma);
            take(s, "degree", cfg.svm.kernel.degree);
            take(s, "coef0", cfg.svm.kernel.coef0);
            take(s, "tol", cfg.svm.tol);
            take(s, "standardize", cfg.svm.standardize);
        }
        if (j.contains("mondrian")) {
            const auto& m = j["mondrian"];
            take(m, "trees", cfg.forest.n_trees);
            if (m.contains("lifetime")) {
                cfg.forest.lifetime =
                    m["lifetime"].is_null() ? std::numeric_limits<double>::infinity() : m["lifetime"].get<double>();
            }
            take(m, "batches", cfg.batches);
            take(m, "batch_size", cfg.batch_size);
        }
        if (j.contains("eval")) {
            const auto& e = j["eval"];
            take(e, "train", cfg.eval.n_train);
            take(e, "validation", cfg.eval.n_validation);
            take(e, "step", cfg.eval.step);
            take(e, "svm_start", cfg.eval.svm_start);
            take(e, "mondrian_start", cfg.eval.mondrian_start);
            take(e, "steady_steps", cfg.eval.steady_steps);
            take(e, "shuffle", cfg.eval.shuffle);
        }
        if (j.contains("plot")) {
            const auto& p = j["plot"];
            if (p.contains("level")) {
                auto l = parse_level(p["level"].get<std::string>());
                if (!l) throw Error(ErrorKind::Usage, "unknown plot level");
                cfg.plot_level = *l;
            }
            if (p.contains("axes")) {
                cfg.plot_axes.clear();
                for (const auto& a : p["axes"]) {
                    auto ax = parse_axis(a.get<std::string>());
                    if (!ax) throw Error(ErrorKind::Usage, "unknown axis " + a.dump());
                    cfg.plot_axes.push_back(*ax);
                }
            }
        }
        if (j.contains("synth")) take(j["synth"], "trials", cfg.synth_trials);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Usage, std::string("config: ") + e.what());
    }
    return cfg;
}

std::string run_config_to_json(const RunConfig& cfg) {
    ojson j;
    j["data_dir"] = cfg.data_dir.string();
    j["calibration"] = cfg.calibration.string();
    j["model"] = cfg.model.string();
    j["output_dir"] = cfg.output_dir.string();
    j["profile"] = cfg.profile ? ojson(cfg.profile->string()) : ojson(nullptr);
    j["arms"] = cfg.arms;
    j["seed"] = cfg.seed;
    const auto pipe = pipeline_json(cfg.pipeline);
    for (const auto& [k, v] : pipe.items()) j[k] = v;
    j["classifier"] = classifier_name(cfg.classifier);
    j["svm"] = {{"kernel", kernel_name(cfg.svm.kernel.type)}, {"C", cfg.svm.C},
                {"gamma", cfg.svm.kernel.gamma},            {"degree", cfg.svm.kernel.degree},
                {"coef0", cfg.svm.kernel.coef0},            {"tol", cfg.svm.tol},
                {"standardize", cfg.svm.standardize}};
    j["mondrian"] = {{"trees", cfg.forest.n_trees},
                     {"lifetime", std::isinf(cfg.forest.lifetime) ? ojson(nullptr) : ojson(cfg.forest.lifetime)},
                     {"batches", cfg.batches},
                     {"batch_size", cfg.batch_size}};
    j["eval"] = {{"train", cfg.eval.n_train},         {"validation", cfg.eval.n_validation},
                 {"step", cfg.eval.step},             {"svm_start", cfg.eval.svm_start},
                 {"mondrian_start", cfg.eval.mondrian_start}, {"steady_steps", cfg.eval.steady_steps},
                 {"shuffle", cfg.eval.shuffle}};
    auto axes = ojson::array();
    for (Axis a : cfg.plot_axes) axes.push_back(std::string(to_string(a)));
    j["plot"] = {{"level", std::string(to_string(cfg.plot_level))}, {"axes", axes}};
    j["synth"] = {{"trials", cfg.synth_trials}};
    return j.dump(2) + "\n";
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage: return kExitUsage;
        case ErrorKind::Invariant: return kExitInternal;
        default: return kExitData;
    }
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::BadFile, "cannot open " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::BadFile, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::BadFile, "write failed: " + path.string());
}

std::vector<CorpusEntry> list_corpus(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(ErrorKind::BadFile, "data directory not found: " + dir.string());
    std::vector<CorpusEntry> out;
    const auto manifest = dir / "manifest.json";
    if (fs::exists(manifest)) {
        try {
            const auto j = json::parse(read_text(manifest));
            for (const auto& t : j.at("trials")) {
                CorpusEntry e;
                e.csv = dir / t.at("csv").get<std::string>();
                e.trial_id = t.value("trial_id", e.csv.stem().string());
                auto arm = parse_arm(t.value("arm", std::string("right")));
                if (!arm) throw Error(ErrorKind::BadFile, "manifest: bad arm for " + e.trial_id);
                e.arm = *arm;
                e.phases = t.contains("phases") ? dir / t.at("phases").get<std::string>() : default_phase_path(e.csv);
                out.push_back(std::move(e));
            }
        } catch (const json::exception& e) {
            throw Error(ErrorKind::BadFile, std::string("manifest.json: ") + e.what());
        }
        return out;
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".csv" && !is_phase_file(e.path())) {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.push_back({f.stem().string(), Arm::Right, f, default_phase_path(f)});
    return out;
}

std::vector<Trial> load_corpus(const fs::path& dir) {
    std::vector<Trial> trials;
    for (const auto& e : list_corpus(dir)) {
        TrialFormat fmt;
        fmt.phase_file = e.phases;
        fmt.trial_id = e.trial_id;
        fmt.arm = e.arm;
        trials.push_back(load_trial(e.csv, fmt));
    }
    if (trials.empty()) throw Error(ErrorKind::EmptyCorpus, "no trials in " + dir.string());
    return trials;
}

void write_manifest(const fs::path& dir, const std::vector<CorpusEntry>& entries) {
    ojson j;
    j["trials"] = ojson::array();
    for (const auto& e : entries) {
        j["trials"].push_back({{"trial_id", e.trial_id},
                               {"arm", std::string(to_string(e.arm))},
                               {"csv", e.csv.filename().string()},
                               {"phases", e.phases.filename().string()}});
    }
    write_text(dir / "manifest.json", j.dump(2) + "\n");
}

std::string bundle_to_json(const ModelBundle& b) {
    ojson j;
    j["format"] = "actgram-model";
    j["version"] = 1;
    j["pipeline"] = pipeline_json(b.pipeline);
    j["calibration"] = ojson::parse(calibration_to_json(b.calibration));
    j["features"] = ojson::parse(feature_space_to_json(b.features));
    j["classifier"] = classifier_name(b.classifier);
    if (b.svm) j["svm"] = ojson::parse(svm_to_json(*b.svm));
    if (b.forest) j["mondrian"] = ojson::parse(forest_to_json(*b.forest));
    return j.dump() + "\n";
}

ModelBundle bundle_from_json(const std::string& text) {
    ModelBundle b;
    try {
        const auto j = json::parse(text);
        if (j.value("format", "") != "actgram-model") throw Error(ErrorKind::BadFile, "not a model file");
        read_pipeline(j.at("pipeline"), b.pipeline);
        b.calibration = calibration_from_json(j.at("calibration").dump());
        b.features = feature_space_from_json(j.at("features").dump());
        b.classifier = parse_classifier(j.at("classifier").get<std::string>());
        if (j.contains("svm")) b.svm = svm_from_json(j.at("svm").dump());
        if (j.contains("mondrian")) b.forest = forest_from_json(j.at("mondrian").dump());
    } catch (const json::exception& e) {
        throw Error(ErrorKind::BadFile, std::string("model file: ") + e.what());
    }
    if (b.classifier == ClassifierKind::Svm && !b.svm) throw Error(ErrorKind::BadFile, "model file lacks the svm");
    if (b.classifier == ClassifierKind::Mondrian && !b.forest) {
        throw Error(ErrorKind::BadFile, "model file lacks the forest");
    }
    return b;
}

void cmd_calibrate(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    const auto trials = load_corpus(cfg.data_dir);
    const auto cal =
        calibrate_corpus(trials, cfg.pipeline.encode.segment, cfg.pipeline.cuts, cfg.pipeline.pooled_calibration);
    write_text(cfg.calibration, calibration_to_json(cal));
    out << "calibrated on " << trials.size() << " trials -> " << cfg.calibration.string() << '\n';
    out << std::left << std::setw(6) << "axis" << std::setw(24) << "eps_const"
        << "g_max" << '\n';
    for (const auto& [axis, th] : cal.axes) {
        out << std::left << std::setw(6) << to_string(axis) << std::setw(24) << format_double(th.eps_const)
            << format_double(th.g_max) << '\n';
    }
}

void cmd_encode(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    const auto trials = load_corpus(cfg.data_dir);
    const auto cal = calibration_from_json(read_text(cfg.calibration));
    const auto grammars = encode_corpus(trials, cal, cfg.pipeline.encode);
    const auto dir = cfg.output_dir / "grammar";
    fs::create_directories(dir);
    std::ostringstream counts;
    counts << "trial_id,arm,phase,level,axis,words\n";
    for (const auto& g : grammars) {
        write_text(dir / (g.trial_id + ".grammar.json"), grammar_to_json(g));
        for (Phase p : kAllPhases) {
            for (Level l : kAllLevels) {
                for (Axis a : kAllAxes) {
                    counts << g.trial_id << ',' << to_string(g.arm) << ',' << to_string(p) << ',' << to_string(l)
                           << ',' << to_string(a) << ',' << g.at(l, a, p).size() << '\n';
                }
            }
        }
    }
    write_text(cfg.output_dir / "word_counts.csv", counts.str());

    const auto groups = group_trials(grammars, cfg.arms);
    const auto space = fit_feature_space(groups, cfg.pipeline.encoding);
    const auto ds = featurize(groups, space);
    write_text(cfg.output_dir / "dataset.csv", dataset_to_csv(ds));
    write_text(cfg.output_dir / "layout.json", feature_space_to_json(space));
    out << "encoded " << grammars.size() << " trials -> " << dir.string() << '\n';
    out << "dataset: " << ds.size() << " samples x " << ds.dimension() << " dims\n";
}

void cmd_train(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    const auto trials = load_corpus(cfg.data_dir);
    ModelBundle b;
    b.pipeline = cfg.pipeline;
    b.calibration = fs::exists(cfg.calibration)
                        ? calibration_from_json(read_text(cfg.calibration))
                        : calibrate_corpus(trials, cfg.pipeline.encode.segment, cfg.pipeline.cuts,
                                           cfg.pipeline.pooled_calibration);
    const auto groups = group_trials(encode_corpus(trials, b.calibration, cfg.pipeline.encode), cfg.arms);
    b.features = fit_feature_space(groups, cfg.pipeline.encoding);
    const auto ds = featurize(groups, b.features);
    b.classifier = cfg.classifier;
    std::size_t correct = 0;
    if (cfg.classifier == ClassifierKind::Svm) {
        b.svm = train_svm(ds, cfg.svm);
        for (std::size_t i = 0; i < ds.size(); ++i) correct += predict_svm(*b.svm, ds.X[i]).label == ds.y[i];
        out << "svm: " << b.svm->machines.size() << " machines, " << b.svm->dropped_dims
            << " constant dims dropped\n";
    } else {
        ForestParams fp = cfg.forest;
        fp.n_classes = kNumPhases;
        fp.seed = cfg.seed;
        MondrianForest forest(fp);
        std::size_t begin = 0;
        const auto bounds = batch_bounds(ds.size(), effective_batches(cfg, ds.size()));
        for (std::size_t end : bounds) {
            std::vector<std::vector<double>> X(ds.X.begin() + static_cast<std::ptrdiff_t>(begin),
                                               ds.X.begin() + static_cast<std::ptrdiff_t>(end));
            std::vector<int> y(ds.y.begin() + static_cast<std::ptrdiff_t>(begin),
                               ds.y.begin() + static_cast<std::ptrdiff_t>(end));
            forest.partial_fit(X, y);
            begin = end;
        }
        for (std::size_t i = 0; i < ds.size(); ++i) correct += forest.predict(ds.X[i]) == ds.y[i];
        out << "mondrian: " << fp.n_trees << " trees, " << bounds.size() << " mini-batches\n";
        b.forest = std::move(forest);
    }
    write_text(cfg.model, bundle_to_json(b));
    out << "trained on " << ds.size() << " samples x " << ds.dimension() << " dims, training accuracy "
        << format_double(static_cast<double>(correct) / static_cast<double>(ds.size())) << " -> "
        << cfg.model.string() << '\n';
}

void cmd_predict(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    const auto b = bundle_from_json(read_text(cfg.model));
    const auto trials = load_corpus(cfg.data_dir);
    const int arms = static_cast<int>(b.features.arms.size());
    const auto groups = group_trials(encode_corpus(trials, b.calibration, b.pipeline.encode), arms);
    const auto ds = featurize(groups, b.features);
    std::ostringstream csv;
    csv << "trial_id,phase,predicted";
    for (Phase p : kAllPhases) csv << ',' << (b.classifier == ClassifierKind::Svm ? "votes_" : "p_") << to_string(p);
    csv << '\n';
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        int label = 0;
        std::vector<double> extra(kNumPhases, 0.0);
        if (b.classifier == ClassifierKind::Svm) {
            const auto pred = predict_svm(*b.svm, ds.X[i]);
            label = pred.label;
            for (std::size_t c = 0; c < b.svm->classes.size(); ++c) {
                extra[static_cast<std::size_t>(b.svm->classes[c])] = pred.votes[c];
            }
        } else {
            extra = b.forest->predict_proba(ds.X[i]);
            label = static_cast<int>(std::max_element(extra.begin(), extra.end()) - extra.begin());
        }
        correct += label == ds.y[i];
        csv << ds.ids[i].trial_id << ',' << to_string(ds.ids[i].phase) << ',' << to_string(static_cast<Phase>(label));
        for (double v : extra) csv << ',' << format_double(v);
        csv << '\n';
    }
    write_text(cfg.output_dir / "predictions.csv", csv.str());
    if (ds.unknown_words > 0) out << "note: " << ds.unknown_words << " words unseen at training time\n";
    out << "predicted " << ds.size() << " phase samples, accuracy "
        << format_double(static_cast<double>(correct) / static_cast<double>(ds.size())) << " -> "
        << (cfg.output_dir / "predictions.csv").string() << '\n';
}

EvalReport cmd_eval(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    const auto trials = load_corpus(cfg.data_dir);
    EvalConfig ec = cfg.eval;
    ec.seed = cfg.seed;
    ec.svm = cfg.svm;
    ec.forest = cfg.forest;
    const auto report = evaluate_corpus(trials, cfg.arms, cfg.pipeline, ec);
    write_text(cfg.output_dir / "learning_curve.csv", curve_to_csv(report));
    write_text(cfg.output_dir / "learning_curve.svg", curve_svg(report));
    out << "feature dimension " << report.feature_dim << ", " << report.curve.size() << " steps\n";
    out << "steady-state accuracy (last " << ec.steady_steps << " steps): svm " << format_double(report.svm_steady)
        << ", mondrian " << format_double(report.mondrian_steady) << '\n';
    return report;
}

void cmd_plot(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    std::vector<GrammarMatrix> grammars = fs::is_directory(cfg.data_dir) ? load_grammars(cfg.data_dir)
                                                                        : std::vector<GrammarMatrix>{};
    if (grammars.empty()) {
        const auto trials = load_corpus(cfg.data_dir);
        const auto cal = calibration_from_json(read_text(cfg.calibration));
        grammars = encode_corpus(trials, cal, cfg.pipeline.encode);
    }
    GrammarPlotOptions opt;
    opt.level = cfg.plot_level;
    opt.axes = cfg.plot_axes;
    const auto path = cfg.output_dir / ("grammar_" + std::string(to_string(cfg.plot_level)) + ".svg");
    write_text(path, grammar_svg(grammars, opt));
    out << "plotted " << grammars.size() << " trials -> " << path.string() << '\n';
}

void cmd_synth_gen(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    const auto profile = cfg.profile ? profile_from_json(read_text(*cfg.profile)) : default_profile();
    const auto trials = generate_dataset(profile, cfg.synth_trials, cfg.seed, cfg.arms);
    fs::create_directories(cfg.output_dir);
    std::vector<CorpusEntry> entries;
    for (const auto& t : trials) {
        CorpusEntry e{t.trial_id, t.arm, cfg.output_dir / (t.trial_id + ".csv"), {}};
        e.phases = default_phase_path(e.csv);
        save_trial(t, e.csv, e.phases);
        entries.push_back(std::move(e));
    }
    write_manifest(cfg.output_dir, entries);
    write_text(cfg.output_dir / "profile.json", profile_to_json(profile));
    out << "generated " << trials.size() << " trials (" << cfg.synth_trials << " x " << cfg.arms << " arms) -> "
        << cfg.output_dir.string() << '\n';
}

}  // namespace actgram
