#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "actgram/compositions.hpp"

namespace actgram {

enum class LlbLabel { Push = 0, Pull, Fixed, Contact, Alignment, Shift, Noise };
inline constexpr std::size_t kNumLlbLabels = 7;
inline constexpr std::array<LlbLabel, kNumLlbLabels> kAllLlbLabels{
    LlbLabel::Push,      LlbLabel::Pull,  LlbLabel::Fixed, LlbLabel::Contact,
    LlbLabel::Alignment, LlbLabel::Shift, LlbLabel::Noise};

std::string_view to_string(LlbLabel label);  // PS PL FX CT AL SH N
std::optional<LlbLabel> parse_llb_label(std::string_view s);

struct LowLevelBehavior {
    LlbLabel label = LlbLabel::Fixed;
    double avg = 0.0;
    double max_val = 0.0;
    double amplitude = 0.0;
    McLabel m1_label = McLabel::Constant;
    McLabel m2_label = McLabel::Constant;
    double t1_start = 0.0;
    double t1_end = 0.0;
    double t2_start = 0.0;
    double t2_end = 0.0;
    double t_avg = 0.0;
    double min_val = 0.0;

    double duration() const { return t2_end - t1_start; }
    bool operator==(const LowLevelBehavior&) const = default;
};

/// Pairs of the same stable composition keep their meaning one level up
/// (i,i→PS  d,d→PL  k,k→FX  c,c→CT). Back-and-forth pairs, (a,a) as well as
/// (i,d) and (d,i), become a Shift when the second amplitude is strictly larger
/// and an Alignment otherwise. Everything else is Noise.
LlbLabel classify_mc_pair(const MotionComposition& m1, const MotionComposition& m2);

LlbLabel singleton_label(McLabel m);

std::vector<LowLevelBehavior> derive_behaviors(const std::vector<MotionComposition>& mcs);

inline LlbLabel unit_label(const LowLevelBehavior& b) { return b.label; }
inline double unit_start(const LowLevelBehavior& b) { return b.t1_start; }
inline double unit_end(const LowLevelBehavior& b) { return b.t2_end; }
inline double unit_amplitude(const LowLevelBehavior& b) { return b.amplitude; }
inline bool unit_protected(const LowLevelBehavior& b) { return b.label == LlbLabel::Contact; }
LowLevelBehavior merge_units(const LowLevelBehavior& left, const LowLevelBehavior& right, bool keep_left);

}  // namespace actgram
