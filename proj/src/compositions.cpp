#include "actgram/compositions.hpp"

#include <algorithm>
#include <cmath>

#include "actgram/error.hpp"

namespace actgram {

namespace {

double weighted(double a, double wa, double b, double wb) {
    const double w = wa + wb;
    return w > 0.0 ? (a * wa + b * wb) / w : 0.5 * (a + b);
}

// Mean square of the fitted line over a primitive's span.
double mean_square(const Primitive& p) {
    const double rise = p.gradient * p.duration();
    return p.avg * p.avg + rise * rise / 12.0;
}

}  // namespace

std::string_view to_string(McLabel label) {
    static constexpr std::array<std::string_view, kNumMcLabels> names{"a", "i", "d", "k", "c", "u"};
    return names[static_cast<std::size_t>(label)];
}

std::optional<McLabel> parse_mc_label(std::string_view s) {
    for (auto l : kAllMcLabels) {
        if (to_string(l) == s) return l;
    }
    return std::nullopt;
}

McLabel classify_pair(GradientLabel p1, GradientLabel p2) {
    const auto f1 = family(p1);
    const auto f2 = family(p2);
    if (is_impulse(p1) || is_impulse(p2)) return McLabel::Contact;
    using F = GradientFamily;
    if ((f1 == F::Positive && f2 == F::Negative) || (f1 == F::Negative && f2 == F::Positive)) {
        return McLabel::Adjustment;
    }
    if (f1 == F::Positive && f2 == F::Positive) return McLabel::Increase;
    if (f1 == F::Negative && f2 == F::Negative) return McLabel::Decrease;
    if (f1 == F::Constant && f2 == F::Constant) return McLabel::Constant;
    return McLabel::Unstable;
}

McLabel singleton_label(GradientLabel p) {
    switch (family(p)) {
        case GradientFamily::Positive: return McLabel::Increase;
        case GradientFamily::Negative: return McLabel::Decrease;
        case GradientFamily::Constant: return McLabel::Constant;
        case GradientFamily::PositiveImpulse:
        case GradientFamily::NegativeImpulse: return McLabel::Contact;
    }
    return McLabel::Unstable;
}

std::vector<MotionComposition> compose(const std::vector<Primitive>& primitives) {
    if (primitives.empty()) throw Error(ErrorKind::EmptySequence, "compose: no primitives");
    std::vector<MotionComposition> out;
    out.reserve((primitives.size() + 1) / 2);
    std::size_t i = 0;
    for (; i + 1 < primitives.size(); i += 2) {
        const auto& a = primitives[i];
        const auto& b = primitives[i + 1];
        MotionComposition m;
        m.label = classify_pair(a.label, b.label);
        m.avg = weighted(a.avg, a.duration(), b.avg, b.duration());
        m.rms = std::sqrt(weighted(mean_square(a), a.duration(), mean_square(b), b.duration()));
        m.max_val = std::max(a.max, b.max);
        m.min_val = std::min(a.min, b.min);
        m.amplitude = m.max_val - m.min_val;
        m.p1_label = a.label;
        m.p2_label = b.label;
        m.t1_start = a.t_start;
        m.t1_end = a.t_end;
        m.t2_start = b.t_start;
        m.t2_end = b.t_end;
        m.t_avg = 0.5 * (m.t1_start + m.t2_end);
        out.push_back(m);
    }
    if (i < primitives.size()) {
        const auto& a = primitives[i];
        MotionComposition m;
        m.label = singleton_label(a.label);
        m.avg = a.avg;
        m.rms = std::sqrt(mean_square(a));
        m.max_val = a.max;
        m.min_val = a.min;
        m.amplitude = a.amplitude();
        m.p1_label = m.p2_label = a.label;
        m.t1_start = a.t_start;
        m.t2_end = a.t_end;
        m.t1_end = m.t2_start = 0.5 * (a.t_start + a.t_end);
        m.t_avg = m.t1_end;
        out.push_back(m);
    }
    return out;
}

MotionComposition merge_units(const MotionComposition& left, const MotionComposition& right, bool keep_left) {
    MotionComposition m;
    m.label = keep_left ? left.label : right.label;
    m.avg = weighted(left.avg, left.duration(), right.avg, right.duration());
    m.rms = std::sqrt(weighted(left.rms * left.rms, left.duration(), right.rms * right.rms, right.duration()));
    m.max_val = std::max(left.max_val, right.max_val);
    m.min_val = std::min(left.min_val, right.min_val);
    m.amplitude = m.max_val - m.min_val;
    m.p1_label = left.p1_label;
    m.p2_label = right.p2_label;
    m.t1_start = left.t1_start;
    m.t1_end = left.t2_end;
    m.t2_start = right.t1_start;
    m.t2_end = right.t2_end;
    m.t_avg = 0.5 * (m.t1_start + m.t2_end);
    return m;
}

Primitive merge_units(const Primitive& left, const Primitive& right, bool keep_left) {
    Primitive p;
    const auto& keeper = keep_left ? left : right;
    p.label = keeper.label;
    p.gradient = left.label == right.label
                     ? weighted(left.gradient, left.duration(), right.gradient, right.duration())
                     : keeper.gradient;
    p.max = std::max(left.max, right.max);
    p.min = std::min(left.min, right.min);
    p.avg = std::clamp(weighted(left.avg, left.duration(), right.avg, right.duration()), p.min, p.max);
    p.t_start = left.t_start;
    p.t_end = right.t_end;
    return p;
}

}  // namespace actgram
