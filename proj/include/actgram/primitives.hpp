#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "actgram/signal_io.hpp"

namespace actgram {

/// Nine gradient bands, ordered from the steepest positive to the steepest negative.
enum class GradientLabel { Pimp = 0, Bpos, Mpos, Spos, Const, Sneg, Mneg, Bneg, Nimp };
inline constexpr std::size_t kNumGradientLabels = 9;
inline constexpr std::array<GradientLabel, kNumGradientLabels> kAllGradientLabels{
    GradientLabel::Pimp, GradientLabel::Bpos, GradientLabel::Mpos, GradientLabel::Spos, GradientLabel::Const,
    GradientLabel::Sneg, GradientLabel::Mneg, GradientLabel::Bneg, GradientLabel::Nimp};

std::string_view to_string(GradientLabel label);  // "pimp", "bpos", ..., "const", ..., "nimp"
std::optional<GradientLabel> parse_gradient_label(std::string_view s);

enum class GradientFamily { Positive, Negative, Constant, PositiveImpulse, NegativeImpulse };
GradientFamily family(GradientLabel label);
inline bool is_impulse(GradientLabel l) { return l == GradientLabel::Pimp || l == GradientLabel::Nimp; }

struct SegmentConfig {
    double r2_min = 0.70;
    std::size_t min_window = 5;
};

/// Least-squares line over samples [first, last] (inclusive). Adjacent segments
/// share their boundary sample, so segment spans tile the series in time.
struct LinearSegment {
    std::size_t first = 0;
    std::size_t last = 0;
    double slope = 0.0;
    double intercept = 0.0;  // value at t = 0
    double r2 = 1.0;

    std::size_t length() const { return last - first + 1; }
};

/// R² of the least-squares line through the given points. Windows whose total
/// variance is negligible against the value scale count as a perfect fit.
double fit_r2(std::span<const double> t, std::span<const double> y);

/// Growing-window piecewise-linear segmentation. A window of `min_window` samples
/// is extended one sample at a time while its fit keeps R² >= r2_min; the first
/// violation closes it at the previous sample. An initial window that already
/// fails is emitted as a forced cut. A tail too short for its own window is
/// absorbed when the fit allows, otherwise segmented with two-sample seeds.
std::vector<LinearSegment> segment_axis(const AxisSeries& series, const SegmentConfig& cfg = {});

struct GradientThresholds {
    double eps_const = 0.0;
    double g_max = 0.0;
    double cut_small = 0.25;
    double cut_med = 0.50;
    double cut_big = 0.75;

    bool valid() const;
    void validate() const;  // throws CalibrationDegenerate
    bool operator==(const GradientThresholds&) const = default;
};

struct CutFractions {
    double small = 0.25;
    double med = 0.50;
    double big = 0.75;
};

/// Percentile with linear interpolation between order statistics; q in [0, 100].
double percentile(std::vector<double> values, double q);

/// g_max is the 99th percentile of |slope| over all corpus segments, eps_const the
/// larger of the 10th percentile and 2% of g_max.
GradientThresholds calibrate_thresholds(std::span<const AxisSeries> corpus, const SegmentConfig& seg = {},
                                        const CutFractions& cuts = {});

GradientLabel classify_gradient(double slope, const GradientThresholds& th);

struct Primitive {
    GradientLabel label = GradientLabel::Const;
    double avg = 0.0;
    double max = 0.0;
    double min = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
    double gradient = 0.0;

    double duration() const { return t_end - t_start; }
    double amplitude() const { return max - min; }
    bool operator==(const Primitive&) const = default;
};

std::vector<Primitive> extract_primitives(const AxisSeries& series, const GradientThresholds& th,
                                          const SegmentConfig& seg = {});

/// Per-axis thresholds as written by `calibrate`.
struct Calibration {
    std::map<Axis, GradientThresholds> axes;

    const GradientThresholds& at(Axis axis) const;
};

std::string calibration_to_json(const Calibration& cal);
Calibration calibration_from_json(const std::string& text);

}  // namespace actgram
