#include "actgram/grammar.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "actgram/error.hpp"

namespace actgram {

namespace {

std::size_t idx(Level l) { return static_cast<std::size_t>(l); }

double median_spacing(const std::vector<double>& t) {
    std::vector<double> d;
    d.reserve(t.size());
    for (std::size_t i = 1; i < t.size(); ++i) d.push_back(t[i] - t[i - 1]);
    if (d.empty()) return 0.0;
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
    return d[d.size() / 2];
}

template <typename U>
WordSeq words_of(const std::vector<U>& units) {
    WordSeq w;
    w.reserve(units.size());
    for (const auto& u : units) w.push_back(static_cast<int>(unit_label(u)));
    return w;
}

}  // namespace

std::string_view to_string(Level level) {
    static constexpr std::array<std::string_view, kNumLevels> names{"primitive", "composition", "behavior"};
    return names[idx(level)];
}

std::optional<Level> parse_level(std::string_view s) {
    for (auto l : kAllLevels) {
        if (to_string(l) == s) return l;
    }
    if (s == "mc") return Level::Composition;
    if (s == "llb") return Level::Behavior;
    return std::nullopt;
}

std::size_t alphabet_size(Level level) {
    switch (level) {
        case Level::Primitive: return kNumGradientLabels;
        case Level::Composition: return kNumMcLabels;
        case Level::Behavior: return kNumLlbLabels;
    }
    return 0;
}

std::string_view word_name(Level level, int word) {
    if (word < 0 || static_cast<std::size_t>(word) >= alphabet_size(level)) return "?";
    switch (level) {
        case Level::Primitive: return to_string(static_cast<GradientLabel>(word));
        case Level::Composition: return to_string(static_cast<McLabel>(word));
        case Level::Behavior: return to_string(static_cast<LlbLabel>(word));
    }
    return "?";
}

std::optional<int> parse_word(Level level, std::string_view name) {
    for (std::size_t w = 0; w < alphabet_size(level); ++w) {
        if (word_name(level, static_cast<int>(w)) == name) return static_cast<int>(w);
    }
    return std::nullopt;
}

EncodedCell encode_series(const AxisSeries& series, const GradientThresholds& th, const EncodeConfig& cfg) {
    FilterConfig filter = cfg.filter;
    filter.min_duration = std::max(filter.min_duration, 2.0 * median_spacing(series.times()));
    filter.validate();

    EncodedCell cell;
    auto prims = extract_primitives(series, th, cfg.segment);
    cell.counts.primitives_raw = prims.size();
    cell.primitives = refine(prims, filter);
    cell.counts.primitives = cell.primitives.size();

    auto mcs = compose(cell.primitives);
    cell.counts.compositions_raw = mcs.size();
    cell.compositions = refine(mcs, filter);
    cell.counts.compositions = cell.compositions.size();

    auto llbs = derive_behaviors(cell.compositions);
    cell.counts.behaviors_raw = llbs.size();
    cell.behaviors = refine(llbs, filter);
    cell.counts.behaviors = cell.behaviors.size();
    return cell;
}

GrammarMatrix encode_trial(const Trial& trial, const Calibration& cal, const EncodeConfig& cfg,
                           EncodeTrace* trace) {
    GrammarMatrix m;
    m.trial_id = trial.trial_id;
    m.arm = trial.arm;
    for (const auto& phase : trial.phases) {
        for (Axis axis : kAllAxes) {
            try {
                auto cell = encode_series(slice_phase(trial, phase, axis), cal.at(axis), cfg);
                m.at(Level::Primitive, axis, phase.phase) = words_of(cell.primitives);
                m.at(Level::Composition, axis, phase.phase) = words_of(cell.compositions);
                m.at(Level::Behavior, axis, phase.phase) = words_of(cell.behaviors);
                if (trace) {
                    trace->counts[static_cast<std::size_t>(axis)][static_cast<std::size_t>(phase.phase)] =
                        cell.counts;
                }
            } catch (const Error& e) {
                rethrow_with_context(e, trial.trial_id + " axis " + std::string(to_string(axis)) + " phase " +
                                            std::string(to_string(phase.phase)));
            }
        }
    }
    return m;
}

WordSeq stretch(const WordSeq& seq, std::size_t width) {
    if (seq.empty() || width == 0) return WordSeq(width, 0);
    if (seq.size() == width) return seq;
    WordSeq out(width);
    if (width == 1) {
        out[0] = seq.front();
        return out;
    }
    const double n1 = static_cast<double>(seq.size() - 1);
    const double w1 = static_cast<double>(width - 1);
    for (std::size_t j = 0; j < width; ++j) {
        const auto k = static_cast<std::size_t>(std::lround(static_cast<double>(j) * n1 / w1));
        out[j] = seq[std::min(k, seq.size() - 1)];
    }
    return out;
}

LevelPhaseWidths word_counts(const GrammarMatrix& m) {
    LevelPhaseWidths w{};
    for (Level l : kAllLevels) {
        for (Phase p : kAllPhases) {
            std::size_t mx = 0;
            for (Axis a : kAllAxes) mx = std::max(mx, m.at(l, a, p).size());
            w[idx(l)][static_cast<std::size_t>(p)] = mx;
        }
    }
    return w;
}

GrammarMatrix resample_words(const GrammarMatrix& m) {
    GrammarMatrix out = m;
    const auto w = word_counts(m);
    for (Level l : kAllLevels) {
        for (Phase p : kAllPhases) {
            for (Axis a : kAllAxes) {
                const auto& seq = m.at(l, a, p);
                if (!seq.empty()) out.at(l, a, p) = stretch(seq, w[idx(l)][static_cast<std::size_t>(p)]);
            }
        }
    }
    return out;
}

LevelPhaseWidths dataset_widths(const std::vector<GrammarMatrix>& matrices) {
    LevelPhaseWidths w{};
    for (const auto& m : matrices) {
        const auto c = word_counts(m);
        for (std::size_t l = 0; l < kNumLevels; ++l) {
            for (std::size_t p = 0; p < kNumPhases; ++p) w[l][p] = std::max(w[l][p], c[l][p]);
        }
    }
    return w;
}

int Codebook::code(Level level, int word) const {
    const auto& map = codes[idx(level)];
    auto it = map.find(word);
    return it == map.end() ? 0 : it->second;
}

Codebook build_codebook(const std::vector<GrammarMatrix>& training) {
    std::array<std::array<bool, 16>, kNumLevels> seen{};
    for (const auto& m : training) {
        for (Level l : kAllLevels) {
            for (Axis a : kAllAxes) {
                for (Phase p : kAllPhases) {
                    for (int w : m.at(l, a, p)) seen[idx(l)][static_cast<std::size_t>(w)] = true;
                }
            }
        }
    }
    Codebook cb;
    for (Level l : kAllLevels) {
        int next = 1;
        for (std::size_t w = 0; w < alphabet_size(l); ++w) {
            if (seen[idx(l)][w]) cb.codes[idx(l)][static_cast<int>(w)] = next++;
        }
    }
    return cb;
}

std::size_t FeatureLayout::columns_per_slot(Level level) const {
    return encoding == WordEncoding::Ordinal ? 1 : codebook.size(level) + 1;
}

std::size_t FeatureLayout::dimension() const {
    std::size_t d = 0;
    for (Level l : kAllLevels) d += kNumAxes * slots[idx(l)] * columns_per_slot(l);
    return d;
}

std::size_t FeatureLayout::column(Level level, Axis axis, std::size_t slot) const {
    std::size_t c = 0;
    for (Level l : kAllLevels) {
        if (l == level) break;
        c += kNumAxes * slots[idx(l)] * columns_per_slot(l);
    }
    const std::size_t block = slots[idx(level)] * columns_per_slot(level);
    return c + static_cast<std::size_t>(axis) * block + slot * columns_per_slot(level);
}

FeatureLayout make_layout(const LevelPhaseWidths& widths, Codebook codebook, WordEncoding encoding) {
    FeatureLayout layout;
    layout.widths = widths;
    layout.codebook = std::move(codebook);
    layout.encoding = encoding;
    for (Level l : kAllLevels) {
        const auto& w = widths[idx(l)];
        layout.slots[idx(l)] = *std::max_element(w.begin(), w.end());
    }
    return layout;
}

PhaseDataset vectorize(const std::vector<GrammarMatrix>& matrices, const FeatureLayout& layout) {
    PhaseDataset ds;
    const std::size_t dim = layout.dimension();
    for (const auto& m : matrices) {
        for (Phase p : kAllPhases) {
            std::vector<double> row(dim, 0.0);
            for (Level l : kAllLevels) {
                const std::size_t w = layout.widths[idx(l)][static_cast<std::size_t>(p)];
                for (Axis a : kAllAxes) {
                    const auto& seq = m.at(l, a, p);
                    if (seq.empty()) {
                        throw Error(ErrorKind::NothingEncoded, m.trial_id + ": phase " + std::string(to_string(p)) +
                                                                   " was not encoded");
                    }
                    const auto words = stretch(seq, w);
                    for (std::size_t s = 0; s < words.size(); ++s) {
                        const int code = layout.codebook.code(l, words[s]);
                        if (code == 0) ++ds.unknown_words;
                        const std::size_t col = layout.column(l, a, s);
                        if (layout.encoding == WordEncoding::Ordinal) {
                            row[col] = code;
                        } else {
                            row[col + static_cast<std::size_t>(code)] = 1.0;
                        }
                    }
                    if (layout.encoding == WordEncoding::OneHot) {
                        for (std::size_t s = words.size(); s < layout.slots[idx(l)]; ++s) {
                            row[layout.column(l, a, s)] = 1.0;
                        }
                    }
                }
            }
            ds.X.push_back(std::move(row));
            ds.y.push_back(static_cast<int>(p));
            ds.ids.push_back({m.trial_id, p});
        }
    }
    return ds;
}

PhaseDataset concat_features(const std::vector<PhaseDataset>& parts) {
    if (parts.empty()) return {};
    PhaseDataset out = parts.front();
    for (std::size_t k = 1; k < parts.size(); ++k) {
        const auto& part = parts[k];
        if (part.size() != out.size()) {
            throw Error(ErrorKind::DimensionMismatch, "concat_features: row counts differ");
        }
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (part.y[i] != out.y[i]) throw Error(ErrorKind::DimensionMismatch, "concat_features: labels differ");
            out.X[i].insert(out.X[i].end(), part.X[i].begin(), part.X[i].end());
        }
        out.unknown_words += part.unknown_words;
    }
    return out;
}

std::string grammar_to_json(const GrammarMatrix& m) {
    nlohmann::ordered_json j;
    j["trial_id"] = m.trial_id;
    j["arm"] = std::string(to_string(m.arm));
    auto& levels = j["levels"];
    for (Level l : kAllLevels) {
        auto& jl = levels[std::string(to_string(l))];
        for (Axis a : kAllAxes) {
            auto& ja = jl[std::string(to_string(a))];
            for (Phase p : kAllPhases) {
                const auto& seq = m.at(l, a, p);
                auto arr = nlohmann::ordered_json::array();
                for (int w : seq) arr.push_back(std::string(word_name(l, w)));
                ja[std::string(to_string(p))] = arr;
            }
        }
    }
    return j.dump(1) + "\n";
}

GrammarMatrix grammar_from_json(const std::string& text) {
    GrammarMatrix m;
    try {
        auto j = nlohmann::json::parse(text);
        m.trial_id = j.at("trial_id").get<std::string>();
        auto arm = parse_arm(j.at("arm").get<std::string>());
        if (!arm) throw Error(ErrorKind::BadFile, "grammar json: bad arm");
        m.arm = *arm;
        for (Level l : kAllLevels) {
            const auto& jl = j.at("levels").at(std::string(to_string(l)));
            for (Axis a : kAllAxes) {
                const auto& ja = jl.at(std::string(to_string(a)));
                for (Phase p : kAllPhases) {
                    auto& seq = m.at(l, a, p);
                    for (const auto& w : ja.at(std::string(to_string(p)))) {
                        auto word = parse_word(l, w.get<std::string>());
                        if (!word) throw Error(ErrorKind::UnknownLabel, "grammar json: unknown word " + w.dump());
                        seq.push_back(*word);
                    }
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::BadFile, std::string("grammar json: ") + e.what());
    }
    return m;
}

std::string layout_to_json(const FeatureLayout& layout) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["encoding"] = layout.encoding == WordEncoding::Ordinal ? "ordinal" : "onehot";
    j["dimension"] = layout.dimension();
    for (Level l : kAllLevels) {
        auto& jl = j["levels"][std::string(to_string(l))];
        jl["slots"] = layout.slots[idx(l)];
        for (Phase p : kAllPhases) {
            jl["widths"][std::string(to_string(p))] = layout.widths[idx(l)][static_cast<std::size_t>(p)];
        }
        jl["first_column"] = layout.column(l, Axis::Fx, 0);
        auto& cb = jl["codebook"];
        cb = nlohmann::ordered_json::object();
        for (const auto& [word, code] : layout.codebook.codes[idx(l)]) cb[std::string(word_name(l, word))] = code;
    }
    return j.dump(2) + "\n";
}

FeatureLayout layout_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        LevelPhaseWidths widths{};
        Codebook cb;
        for (Level l : kAllLevels) {
            const auto& jl = j.at("levels").at(std::string(to_string(l)));
            for (Phase p : kAllPhases) {
                widths[idx(l)][static_cast<std::size_t>(p)] =
                    jl.at("widths").at(std::string(to_string(p))).get<std::size_t>();
            }
            for (const auto& [name, code] : jl.at("codebook").items()) {
                auto word = parse_word(l, name);
                if (!word) throw Error(ErrorKind::BadFile, "layout json: unknown word " + name);
                cb.codes[idx(l)][*word] = code.get<int>();
            }
        }
        const auto enc = j.at("encoding").get<std::string>();
        return make_layout(widths, cb, enc == "onehot" ? WordEncoding::OneHot : WordEncoding::Ordinal);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::BadFile, std::string("layout json: ") + e.what());
    }
}

std::string dataset_to_csv(const PhaseDataset& ds) {
    std::ostringstream out;
    for (std::size_t c = 0; c < ds.dimension(); ++c) out << 'f' << c << ',';
    out << "class\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (double v : ds.X[i]) out << format_double(v) << ',';
        out << to_string(static_cast<Phase>(ds.y[i])) << '\n';
    }
    return out.str();
}

}  // namespace actgram
