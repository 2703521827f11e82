#include "actgram/behaviors.hpp"

#include <algorithm>

#include "actgram/error.hpp"

namespace actgram {

namespace {

double weighted(double a, double wa, double b, double wb) {
    const double w = wa + wb;
    return w > 0.0 ? (a * wa + b * wb) / w : 0.5 * (a + b);
}

bool back_and_forth(McLabel a, McLabel b) {
    return (a == McLabel::Adjustment && b == McLabel::Adjustment) ||
           (a == McLabel::Increase && b == McLabel::Decrease) || (a == McLabel::Decrease && b == McLabel::Increase);
}

}  // namespace

std::string_view to_string(LlbLabel label) {
    static constexpr std::array<std::string_view, kNumLlbLabels> names{"PS", "PL", "FX", "CT", "AL", "SH", "N"};
    return names[static_cast<std::size_t>(label)];
}

std::optional<LlbLabel> parse_llb_label(std::string_view s) {
    for (auto l : kAllLlbLabels) {
        if (to_string(l) == s) return l;
    }
    return std::nullopt;
}

LlbLabel classify_mc_pair(const MotionComposition& m1, const MotionComposition& m2) {
    const McLabel a = m1.label;
    const McLabel b = m2.label;
    if (a == b) {
        switch (a) {
            case McLabel::Increase: return LlbLabel::Push;
            case McLabel::Decrease: return LlbLabel::Pull;
            case McLabel::Constant: return LlbLabel::Fixed;
            case McLabel::Contact: return LlbLabel::Contact;
            default: break;
        }
    }
    if (back_and_forth(a, b)) {
        return m2.amplitude > m1.amplitude ? LlbLabel::Shift : LlbLabel::Alignment;
    }
    return LlbLabel::Noise;
}

LlbLabel singleton_label(McLabel m) {
    switch (m) {
        case McLabel::Increase: return LlbLabel::Push;
        case McLabel::Decrease: return LlbLabel::Pull;
        case McLabel::Constant: return LlbLabel::Fixed;
        case McLabel::Contact: return LlbLabel::Contact;
        case McLabel::Adjustment: return LlbLabel::Alignment;
        case McLabel::Unstable: return LlbLabel::Noise;
    }
    return LlbLabel::Noise;
}

std::vector<LowLevelBehavior> derive_behaviors(const std::vector<MotionComposition>& mcs) {
    if (mcs.empty()) throw Error(ErrorKind::EmptySequence, "derive_behaviors: no motion compositions");
    std::vector<LowLevelBehavior> out;
    out.reserve((mcs.size() + 1) / 2);
    std::size_t i = 0;
    for (; i + 1 < mcs.size(); i += 2) {
        const auto& a = mcs[i];
        const auto& b = mcs[i + 1];
        LowLevelBehavior llb;
        llb.label = classify_mc_pair(a, b);
        llb.avg = weighted(a.avg, a.duration(), b.avg, b.duration());
        llb.max_val = std::max(a.max_val, b.max_val);
        llb.min_val = std::min(a.min_val, b.min_val);
        llb.amplitude = llb.max_val - llb.min_val;
        llb.m1_label = a.label;
        llb.m2_label = b.label;
        llb.t1_start = a.t1_start;
        llb.t1_end = a.t2_end;
        llb.t2_start = b.t1_start;
        llb.t2_end = b.t2_end;
        llb.t_avg = 0.5 * (llb.t1_start + llb.t2_end);
        out.push_back(llb);
    }
    if (i < mcs.size()) {
        const auto& a = mcs[i];
        LowLevelBehavior llb;
        llb.label = singleton_label(a.label);
        llb.avg = a.avg;
        llb.max_val = a.max_val;
        llb.min_val = a.min_val;
        llb.amplitude = a.amplitude;
        llb.m1_label = llb.m2_label = a.label;
        llb.t1_start = a.t1_start;
        llb.t2_end = a.t2_end;
        llb.t1_end = llb.t2_start = 0.5 * (a.t1_start + a.t2_end);
        llb.t_avg = llb.t1_end;
        out.push_back(llb);
    }
    return out;
}

LowLevelBehavior merge_units(const LowLevelBehavior& left, const LowLevelBehavior& right, bool keep_left) {
    LowLevelBehavior b;
    b.label = keep_left ? left.label : right.label;
    b.avg = weighted(left.avg, left.duration(), right.avg, right.duration());
    b.max_val = std::max(left.max_val, right.max_val);
    b.min_val = std::min(left.min_val, right.min_val);
    b.amplitude = b.max_val - b.min_val;
    b.m1_label = left.m1_label;
    b.m2_label = right.m2_label;
    b.t1_start = left.t1_start;
    b.t1_end = left.t2_end;
    b.t2_start = right.t1_start;
    b.t2_end = right.t2_end;
    b.t_avg = 0.5 * (b.t1_start + b.t2_end);
    return b;
}

}  // namespace actgram
