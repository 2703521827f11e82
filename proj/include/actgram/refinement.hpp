#pragma once

#include <concepts>
#include <cstddef>
#include <vector>

namespace actgram {

struct FilterConfig {
    double min_duration_ratio = 0.1;  // fraction of the mean neighbour duration
    double amp_ratio = 5.0;
    int max_cycles = 3;
    double min_duration = 0.0;  // absolute floor in seconds (two sample periods when encoding)

    void validate() const;
};

/// A time-ordered labeled unit the filters can work on. Each layer provides
/// these hooks as free functions next to its type.
template <typename U>
concept RefinableUnit = requires(const U& u) {
    { unit_label(u) == unit_label(u) } -> std::convertible_to<bool>;
    { unit_start(u) } -> std::convertible_to<double>;
    { unit_end(u) } -> std::convertible_to<double>;
    { unit_amplitude(u) } -> std::convertible_to<double>;
    { unit_protected(u) } -> std::convertible_to<bool>;
    { merge_units(u, u, true) } -> std::same_as<U>;
};

template <RefinableUnit U>
double unit_duration(const U& u) {
    return unit_end(u) - unit_start(u);
}

/// Adjacent units with the same label become one.
template <RefinableUnit U>
std::vector<U> merge_repeats(const std::vector<U>& seq) {
    std::vector<U> out;
    out.reserve(seq.size());
    for (const auto& u : seq) {
        if (!out.empty() && unit_label(out.back()) == unit_label(u)) {
            out.back() = merge_units(out.back(), u, true);
        } else {
            out.push_back(u);
        }
    }
    return out;
}

/// A unit much shorter than its neighbours is absorbed by the
/// longer one. Impulse/contact units are never absorbed.
template <RefinableUnit U>
std::vector<U> absorb_short(std::vector<U> seq, const FilterConfig& cfg) {
    std::size_t i = 0;
    while (seq.size() > 1 && i < seq.size()) {
        const auto& u = seq[i];
        const bool has_left = i > 0;
        const bool has_right = i + 1 < seq.size();
        double nb = 0.0;
        int count = 0;
        if (has_left) nb += unit_duration(seq[i - 1]), ++count;
        if (has_right) nb += unit_duration(seq[i + 1]), ++count;
        nb /= count;
        const double d = unit_duration(u);
        const bool negligible = d < cfg.min_duration_ratio * nb || d < cfg.min_duration;
        if (!negligible || unit_protected(u)) {
            ++i;
            continue;
        }
        const bool into_left =
            has_left && (!has_right || unit_duration(seq[i - 1]) >= unit_duration(seq[i + 1]));
        if (into_left) {
            seq[i - 1] = merge_units(seq[i - 1], u, true);
            seq.erase(seq.begin() + static_cast<std::ptrdiff_t>(i));
            i -= 1;
        } else {
            seq[i + 1] = merge_units(u, seq[i + 1], false);
            seq.erase(seq.begin() + static_cast<std::ptrdiff_t>(i));
        }
    }
    return seq;
}

/// Of two adjacent units, one with amplitude at least
/// `amp_ratio` times the other swallows it, unless either is an impulse/contact.
template <RefinableUnit U>
std::vector<U> absorb_weak(std::vector<U> seq, const FilterConfig& cfg) {
    std::size_t i = 0;
    while (i + 1 < seq.size()) {
        const auto& a = seq[i];
        const auto& b = seq[i + 1];
        if (unit_protected(a) || unit_protected(b)) {
            ++i;
            continue;
        }
        const double aa = unit_amplitude(a);
        const double ab = unit_amplitude(b);
        const bool left_wins = aa > 0.0 && aa >= cfg.amp_ratio * ab;
        const bool right_wins = !left_wins && ab > 0.0 && ab >= cfg.amp_ratio * aa;
        if (!left_wins && !right_wins) {
            ++i;
            continue;
        }
        seq[i] = merge_units(a, b, left_wins);
        seq.erase(seq.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        if (i > 0) --i;
    }
    return seq;
}

/// One filtering cycle: repeats, duration, amplitude, then repeats again so the
/// output never holds adjacent duplicates.
template <RefinableUnit U>
std::vector<U> filter_once(const std::vector<U>& seq, const FilterConfig& cfg) {
    auto out = merge_repeats(seq);
    out = absorb_short(std::move(out), cfg);
    out = absorb_weak(std::move(out), cfg);
    return merge_repeats(out);
}

template <typename U>
struct RefineResult {
    std::vector<U> units;
    int cycles = 0;
    bool fixpoint = false;
};

/// Runs filter_once until nothing changes or `max_cycles` cycles have run.
template <RefinableUnit U>
RefineResult<U> refine_traced(const std::vector<U>& seq, const FilterConfig& cfg) {
    RefineResult<U> r;
    r.units = seq;
    for (int c = 0; c < cfg.max_cycles; ++c) {
        auto next = filter_once(r.units, cfg);
        ++r.cycles;
        // filters only ever merge, so an unchanged length means an unchanged sequence
        if (next.size() == r.units.size()) {
            r.fixpoint = true;
            break;
        }
        r.units = std::move(next);
    }
    return r;
}

template <RefinableUnit U>
std::vector<U> refine(const std::vector<U>& seq, const FilterConfig& cfg) {
    return refine_traced(seq, cfg).units;
}

}  // namespace actgram
