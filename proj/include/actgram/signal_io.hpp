#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace actgram {

enum class Axis { Fx = 0, Fy, Fz, Mx, My, Mz };
inline constexpr std::size_t kNumAxes = 6;
inline constexpr std::array<Axis, kNumAxes> kAllAxes{Axis::Fx, Axis::Fy, Axis::Fz,
                                                     Axis::Mx, Axis::My, Axis::Mz};

enum class Phase { Approach = 0, Rotation, Insertion, Mating };
inline constexpr std::size_t kNumPhases = 4;
inline constexpr std::array<Phase, kNumPhases> kAllPhases{Phase::Approach, Phase::Rotation,
                                                          Phase::Insertion, Phase::Mating};

enum class Arm { Right, Left };

std::string_view to_string(Axis axis);      // "Fx" ... "Mz"
std::string_view to_string(Phase phase);    // "approach" ... "mating"
std::string_view to_string(Arm arm);        // "right" / "left"
std::optional<Axis> parse_axis(std::string_view s);   // case-insensitive
std::optional<Phase> parse_phase(std::string_view s);
std::optional<Arm> parse_arm(std::string_view s);

/// One synchronized wrench reading. Forces in N, moments in N·m.
struct WrenchSample {
    double t = 0.0;
    std::array<double, kNumAxes> wrench{};

    double operator[](Axis axis) const { return wrench[static_cast<std::size_t>(axis)]; }
    double& operator[](Axis axis) { return wrench[static_cast<std::size_t>(axis)]; }

    bool operator==(const WrenchSample&) const = default;
};

/// Single-axis view of a trial; times strictly increasing, at least two samples.
class AxisSeries {
public:
    AxisSeries(Axis axis, std::vector<double> times, std::vector<double> values);

    Axis axis() const noexcept { return axis_; }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return times_.size(); }

    bool operator==(const AxisSeries&) const = default;

private:
    Axis axis_;
    std::vector<double> times_;
    std::vector<double> values_;
};

struct PhaseSpec {
    Phase phase = Phase::Approach;
    double t_start = 0.0;
    double t_end = 0.0;

    bool operator==(const PhaseSpec&) const = default;
};

struct Trial {
    std::string trial_id;
    Arm arm = Arm::Right;
    std::vector<WrenchSample> samples;
    std::vector<PhaseSpec> phases;

    bool operator==(const Trial&) const = default;

    /// Throws Error on any violated invariant (time order, phase layout, empty phases).
    void validate() const;
    const PhaseSpec& phase(Phase p) const;
    AxisSeries axis_series(Axis axis) const;
};

/// How a trial is located on disk. The phase sidecar defaults to "<stem>.phases.csv".
struct TrialFormat {
    std::optional<std::filesystem::path> phase_file;
    std::optional<std::string> trial_id;
    Arm arm = Arm::Right;
};

std::filesystem::path default_phase_path(const std::filesystem::path& trial_csv);

Trial load_trial(const std::filesystem::path& trial_csv, const TrialFormat& format = {});

/// Writes the trial CSV and its phase sidecar. Values use the shortest
/// representation that parses back to the same double, so load∘save is exact.
void save_trial(const Trial& trial, const std::filesystem::path& trial_csv,
                const std::optional<std::filesystem::path>& phase_file = std::nullopt);

/// Samples with t_start <= t < t_end on one axis.
AxisSeries slice_phase(const Trial& trial, const PhaseSpec& phase, Axis axis);

std::string format_double(double v);
double parse_double(std::string_view cell, std::string_view context);

}  // namespace actgram
