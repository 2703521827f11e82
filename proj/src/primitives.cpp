#include "actgram/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "actgram/error.hpp"

namespace actgram {

namespace {

constexpr double kDegenerateVariance = 1e-12;

/// Running least-squares sums over a window, offset to its first sample.
class WindowFit {
public:
    WindowFit(std::span<const double> t, std::span<const double> y, std::size_t first)
        : t_(t), y_(y), t0_(t[first]), y0_(y[first]) {}

    void add(std::size_t i) {
        const double dt = t_[i] - t0_;
        const double dy = y_[i] - y0_;
        n_ += 1.0;
        st_ += dt;
        sy_ += dy;
        stt_ += dt * dt;
        sty_ += dt * dy;
        syy_ += dy * dy;
        scale_ = std::max(scale_, std::abs(y_[i]));
    }

    double sse() const {
        if (n_ < 2.0) return 0.0;
        const double syy = syy_ - sy_ * sy_ / n_;
        const double stt = stt_ - st_ * st_ / n_;
        if (stt <= 0.0) return std::max(syy, 0.0);
        const double sty = sty_ - st_ * sy_ / n_;
        return std::max(syy - sty * sty / stt, 0.0);
    }

    double r2() const {
        const double syy = syy_ - sy_ * sy_ / n_;
        const double stt = stt_ - st_ * st_ / n_;
        if (syy <= kDegenerateVariance * n_ * scale_ * scale_) return 1.0;
        if (stt <= 0.0) return 0.0;
        const double sty = sty_ - st_ * sy_ / n_;
        const double ss_res = syy - sty * sty / stt;
        return std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    }

private:
    std::span<const double> t_, y_;
    double t0_, y0_;
    double n_ = 0.0, st_ = 0.0, sy_ = 0.0, stt_ = 0.0, sty_ = 0.0, syy_ = 0.0;
    double scale_ = 0.0;
};

double window_r2(std::span<const double> t, std::span<const double> y, std::size_t first, std::size_t last) {
    WindowFit fit(t, y, first);
    for (std::size_t i = first; i <= last; ++i) fit.add(i);
    return fit.r2();
}

LinearSegment make_segment(std::span<const double> t, std::span<const double> y, std::size_t first,
                           std::size_t last) {
    const auto n = static_cast<double>(last - first + 1);
    double mt = 0.0, my = 0.0;
    for (std::size_t i = first; i <= last; ++i) {
        mt += t[i];
        my += y[i];
    }
    mt /= n;
    my /= n;
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = first; i <= last; ++i) {
        stt += (t[i] - mt) * (t[i] - mt);
        sty += (t[i] - mt) * (y[i] - my);
    }
    LinearSegment seg;
    seg.first = first;
    seg.last = last;
    seg.slope = sty / stt;
    seg.intercept = my - seg.slope * mt;
    seg.r2 = window_r2(t, y, first, last);
    return seg;
}

/// Breakpoint b in [first + min_window - 1, stop - 1] minimising the squared
/// error of two lines over [first, b] and [b, stop], where [first, b] keeps
/// the fit gate (or has exactly min_window samples). Ties go to the later b.
std::size_t best_split(std::span<const double> t, std::span<const double> y, std::size_t first, std::size_t stop,
                       std::size_t min_window, double r2_min) {
    const std::size_t len = stop - first + 1;
    std::vector<double> tail_sse(len, 0.0);
    WindowFit back(t, y, stop);
    for (std::size_t k = len; k-- > 0;) {
        back.add(first + k);
        tail_sse[k] = back.sse();
    }
    WindowFit head(t, y, first);
    std::size_t best = first + min_window - 1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t b = first; b < stop; ++b) {
        head.add(b);
        const std::size_t count = b - first + 1;
        if (count < min_window) continue;
        if (count > min_window && head.r2() < r2_min) continue;
        const double cost = head.sse() + tail_sse[b - first];
        if (cost <= best_cost) {
            best_cost = cost;
            best = b;
        }
    }
    return best;
}

/// Grows one segment from `first` while the fit gate holds. When growth stops
/// before the end of the series the segment is closed at the best two-line
/// split of the window that broke the gate. Returns the last index covered.
std::size_t grow(std::span<const double> t, std::span<const double> y, std::size_t first, std::size_t min_window,
                 double r2_min) {
    const std::size_t n = t.size();
    std::size_t last = std::min(first + min_window - 1, n - 1);
    WindowFit fit(t, y, first);
    for (std::size_t i = first; i <= last; ++i) fit.add(i);
    if (fit.r2() < r2_min) return last;  // forced cut
    while (last + 1 < n) {
        WindowFit next = fit;
        next.add(last + 1);
        if (next.r2() < r2_min) break;
        fit = next;
        ++last;
    }
    if (last + 1 < n && last + 1 > first + min_window - 1) {
        return best_split(t, y, first, last + 1, min_window, r2_min);
    }
    return last;
}

}  // namespace

std::string_view to_string(GradientLabel label) {
    static constexpr std::array<std::string_view, kNumGradientLabels> names{
        "pimp", "bpos", "mpos", "spos", "const", "sneg", "mneg", "bneg", "nimp"};
    return names[static_cast<std::size_t>(label)];
}

std::optional<GradientLabel> parse_gradient_label(std::string_view s) {
    for (auto l : kAllGradientLabels) {
        if (to_string(l) == s) return l;
    }
    return std::nullopt;
}

GradientFamily family(GradientLabel label) {
    switch (label) {
        case GradientLabel::Pimp: return GradientFamily::PositiveImpulse;
        case GradientLabel::Bpos:
        case GradientLabel::Mpos:
        case GradientLabel::Spos: return GradientFamily::Positive;
        case GradientLabel::Const: return GradientFamily::Constant;
        case GradientLabel::Sneg:
        case GradientLabel::Mneg:
        case GradientLabel::Bneg: return GradientFamily::Negative;
        case GradientLabel::Nimp: return GradientFamily::NegativeImpulse;
    }
    return GradientFamily::Constant;
}

double fit_r2(std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size() || t.size() < 2) {
        throw Error(ErrorKind::SeriesTooShort, "fit_r2 needs at least 2 paired points");
    }
    return window_r2(t, y, 0, t.size() - 1);
}

std::vector<LinearSegment> segment_axis(const AxisSeries& series, const SegmentConfig& cfg) {
    if (cfg.min_window < 2) throw Error(ErrorKind::Usage, "min_window must be at least 2");
    if (!(cfg.r2_min > 0.0 && cfg.r2_min < 1.0)) throw Error(ErrorKind::Usage, "r2_min must lie in (0, 1)");
    const auto& t = series.times();
    const auto& y = series.values();
    const std::size_t n = t.size();
    if (n < cfg.min_window) {
        throw Error(ErrorKind::SeriesTooShort, "series of " + std::to_string(n) + " samples is shorter than min_window " +
                                                   std::to_string(cfg.min_window));
    }

    std::vector<LinearSegment> out;
    std::size_t first = 0;
    while (first + 1 < n) {
        std::size_t last = grow(t, y, first, cfg.min_window, cfg.r2_min);
        const std::size_t tail = n - last;  // samples in a segment starting at `last`
        if (last + 1 < n && tail < cfg.min_window) {
            if (window_r2(t, y, first, n - 1) >= cfg.r2_min) {
                last = n - 1;
            } else {
                out.push_back(make_segment(t, y, first, last));
                std::size_t f = last;
                while (f + 1 < n) {
                    const std::size_t l = grow(t, y, f, 2, cfg.r2_min);
                    out.push_back(make_segment(t, y, f, l));
                    f = l;
                }
                break;
            }
        }
        out.push_back(make_segment(t, y, first, last));
        first = last;
    }
    return out;
}

bool GradientThresholds::valid() const {
    return std::isfinite(eps_const) && std::isfinite(g_max) && eps_const > 0.0 && cut_small > 0.0 &&
           cut_small < cut_med && cut_med < cut_big && cut_big < 1.0 && eps_const < cut_small * g_max;
}

void GradientThresholds::validate() const {
    if (!valid()) {
        throw Error(ErrorKind::CalibrationDegenerate,
                    "thresholds need 0 < eps_const < cut_small*g_max < cut_med*g_max < cut_big*g_max <= g_max "
                    "(eps_const=" + format_double(eps_const) + ", g_max=" + format_double(g_max) + ")");
    }
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw Error(ErrorKind::EmptyCorpus, "percentile of an empty set");
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

GradientThresholds calibrate_thresholds(std::span<const AxisSeries> corpus, const SegmentConfig& seg,
                                        const CutFractions& cuts) {
    if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "calibration corpus is empty");
    std::vector<double> mags;
    for (const auto& series : corpus) {
        for (const auto& s : segment_axis(series, seg)) mags.push_back(std::abs(s.slope));
    }
    GradientThresholds th;
    th.cut_small = cuts.small;
    th.cut_med = cuts.med;
    th.cut_big = cuts.big;
    th.g_max = percentile(mags, 99.0);
    th.eps_const = std::max(percentile(mags, 10.0), 0.02 * th.g_max);
    th.validate();
    return th;
}

GradientLabel classify_gradient(double slope, const GradientThresholds& th) {
    const double mag = std::abs(slope);
    if (mag <= th.eps_const) return GradientLabel::Const;
    const bool pos = slope > 0.0;
    if (mag <= th.cut_small * th.g_max) return pos ? GradientLabel::Spos : GradientLabel::Sneg;
    if (mag <= th.cut_med * th.g_max) return pos ? GradientLabel::Mpos : GradientLabel::Mneg;
    if (mag <= th.cut_big * th.g_max) return pos ? GradientLabel::Bpos : GradientLabel::Bneg;
    return pos ? GradientLabel::Pimp : GradientLabel::Nimp;
}

std::vector<Primitive> extract_primitives(const AxisSeries& series, const GradientThresholds& th,
                                          const SegmentConfig& seg) {
    const auto& t = series.times();
    const auto& y = series.values();
    std::vector<Primitive> out;
    for (const auto& s : segment_axis(series, seg)) {
        Primitive p;
        auto first = y.begin() + static_cast<std::ptrdiff_t>(s.first);
        auto last = y.begin() + static_cast<std::ptrdiff_t>(s.last) + 1;
        p.avg = std::accumulate(first, last, 0.0) / static_cast<double>(s.length());
        auto [mn, mx] = std::minmax_element(first, last);
        p.min = *mn;
        p.max = *mx;
        p.avg = std::clamp(p.avg, p.min, p.max);
        p.t_start = t[s.first];
        p.t_end = t[s.last];
        p.gradient = s.slope;
        p.label = classify_gradient(s.slope, th);
        out.push_back(p);
    }
    return out;
}

const GradientThresholds& Calibration::at(Axis axis) const {
    auto it = axes.find(axis);
    if (it == axes.end()) {
        throw Error(ErrorKind::BadFile, "calibration has no thresholds for axis " + std::string(to_string(axis)));
    }
    return it->second;
}

std::string calibration_to_json(const Calibration& cal) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    auto& axes = j["axes"];
    axes = nlohmann::ordered_json::object();
    for (const auto& [axis, th] : cal.axes) {
        axes[std::string(to_string(axis))] = {{"eps_const", th.eps_const},
                                              {"g_max", th.g_max},
                                              {"cut_small", th.cut_small},
                                              {"cut_med", th.cut_med},
                                              {"cut_big", th.cut_big}};
    }
    return j.dump(2) + "\n";
}

Calibration calibration_from_json(const std::string& text) {
    Calibration cal;
    try {
        auto j = nlohmann::json::parse(text);
        for (const auto& [name, rec] : j.at("axes").items()) {
            auto axis = parse_axis(name);
            if (!axis) throw Error(ErrorKind::BadFile, "calibration: unknown axis " + name);
            GradientThresholds th;
            th.eps_const = rec.at("eps_const").get<double>();
            th.g_max = rec.at("g_max").get<double>();
            th.cut_small = rec.at("cut_small").get<double>();
            th.cut_med = rec.at("cut_med").get<double>();
            th.cut_big = rec.at("cut_big").get<double>();
            th.validate();
            cal.axes[*axis] = th;
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::BadFile, std::string("calibration json: ") + e.what());
    }
    return cal;
}

}  // namespace actgram
