#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "actgram/signal_io.hpp"

namespace actgram {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const Range&) const = default;
};

/// One piece of a per-axis signal template. A piece lasts `seconds` when that
/// is positive, otherwise it takes a `weight` share of the phase time left over.
struct Piece {
    enum class Kind { Hold, Ramp, Impulse, Oscillation };

    Kind kind = Kind::Hold;
    double weight = 1.0;
    Range seconds{0.0, 0.0};
    Range size{0.0, 0.0};       // ramp delta, impulse height, oscillation amplitude
    Range frequency{0.0, 0.0};  // oscillation, Hz
    double decay = 0.0;         // oscillation, 1/s
    bool operator==(const Piece&) const = default;
};

struct PhaseTemplate {
    Phase phase = Phase::Approach;
    Range duration{2.0, 5.0};
    std::array<std::vector<Piece>, kNumAxes> axes;
    bool operator==(const PhaseTemplate&) const = default;
};

struct TaskProfile {
    double rate_hz = 200.0;
    Axis dominant_axis = Axis::Fz;
    std::array<Range, kNumAxes> noise_stdev{};
    std::array<double, kNumAxes> initial{};
    std::vector<PhaseTemplate> phases;
    double reaction_time_constant = 0.05;  // seconds, low-pass of the reacting arm
    bool operator==(const TaskProfile&) const = default;

    /// Throws InvalidProfile.
    void validate() const;
};

/// Four-phase snap assembly profile used throughout the tests and the CLI.
TaskProfile default_profile();

Trial generate_trial(const TaskProfile& profile, std::uint64_t seed, const std::string& trial_id = "trial");

/// arms == 1: n trials. arms == 2: 2n trials ordered (right_0, left_0, right_1, ...);
/// the left arm reacts with a low-pass filtered, sign-inverted copy of the
/// right arm's wrench plus its own noise.
std::vector<Trial> generate_dataset(const TaskProfile& profile, std::size_t n_trials, std::uint64_t base_seed,
                                    int arms = 1);

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t index);

std::string profile_to_json(const TaskProfile& profile);
TaskProfile profile_from_json(const std::string& text);

}  // namespace actgram
