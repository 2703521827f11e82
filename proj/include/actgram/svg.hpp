#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "actgram/grammar.hpp"
#include "actgram/pipeline.hpp"

namespace actgram {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    std::string hex() const;
    bool operator==(const Rgb&) const = default;
};

/// Fixed colour per word of the level's alphabet, indexed by word ordinal.
const std::vector<Rgb>& palette(Level level);

/// Euclidean distance in CIE L*a*b* (sRGB, D65).
double color_distance(const Rgb& a, const Rgb& b);

struct GrammarPlotOptions {
    Level level = Level::Behavior;
    std::vector<Axis> axes{kAllAxes.begin(), kAllAxes.end()};
    int cell = 10;  // px per word slot
};

/// One grid per axis: a row per trial, a column per word slot. Each phase is
/// stretched to its widest occurrence across the trials so columns line up.
/// Throws NothingEncoded when no trial holds any word.
std::string grammar_svg(const std::vector<GrammarMatrix>& matrices, const GrammarPlotOptions& opt = {});

/// Column count of each phase block in grammar_svg.
std::array<std::size_t, kNumPhases> plot_widths(const std::vector<GrammarMatrix>& matrices, Level level);

std::string curve_svg(const EvalReport& report);

}  // namespace actgram
