#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "actgram/primitives.hpp"

namespace actgram {

enum class McLabel { Adjustment = 0, Increase, Decrease, Constant, Contact, Unstable };
inline constexpr std::size_t kNumMcLabels = 6;
inline constexpr std::array<McLabel, kNumMcLabels> kAllMcLabels{McLabel::Adjustment, McLabel::Increase,
                                                                McLabel::Decrease,   McLabel::Constant,
                                                                McLabel::Contact,    McLabel::Unstable};

std::string_view to_string(McLabel label);  // single letters: a i d k c u
std::optional<McLabel> parse_mc_label(std::string_view s);

/// A classified ordered pair of primitives. `max_val`/`min_val` are carried so
/// merged compositions can recompute their amplitude.
struct MotionComposition {
    McLabel label = McLabel::Constant;
    double avg = 0.0;
    double rms = 0.0;
    double amplitude = 0.0;
    GradientLabel p1_label = GradientLabel::Const;
    GradientLabel p2_label = GradientLabel::Const;
    double t1_start = 0.0;
    double t1_end = 0.0;
    double t2_start = 0.0;
    double t2_end = 0.0;
    double t_avg = 0.0;
    double max_val = 0.0;
    double min_val = 0.0;

    double duration() const { return t2_end - t1_start; }
    bool operator==(const MotionComposition&) const = default;
};

McLabel classify_pair(GradientLabel p1, GradientLabel p2);

/// Label a lone trailing primitive receives.
McLabel singleton_label(GradientLabel p);

/// Non-overlapping greedy pairing (1,2),(3,4),... A trailing primitive becomes a
/// singleton whose span is split at its midpoint.
std::vector<MotionComposition> compose(const std::vector<Primitive>& primitives);

// Hooks for the refinement filters.
inline McLabel unit_label(const MotionComposition& m) { return m.label; }
inline double unit_start(const MotionComposition& m) { return m.t1_start; }
inline double unit_end(const MotionComposition& m) { return m.t2_end; }
inline double unit_amplitude(const MotionComposition& m) { return m.amplitude; }
inline bool unit_protected(const MotionComposition& m) { return m.label == McLabel::Contact; }
MotionComposition merge_units(const MotionComposition& left, const MotionComposition& right, bool keep_left);

inline GradientLabel unit_label(const Primitive& p) { return p.label; }
inline double unit_start(const Primitive& p) { return p.t_start; }
inline double unit_end(const Primitive& p) { return p.t_end; }
inline double unit_amplitude(const Primitive& p) { return p.amplitude(); }
inline bool unit_protected(const Primitive& p) { return is_impulse(p.label); }
Primitive merge_units(const Primitive& left, const Primitive& right, bool keep_left);

}  // namespace actgram
