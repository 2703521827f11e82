#include "actgram/signal_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "actgram/error.hpp"

namespace actgram {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t pos = 0;
    while (true) {
        auto comma = line.find(',', pos);
        cells.push_back(trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return cells;
}

std::vector<std::string> read_lines(const std::filesystem::path& path, ErrorKind missing) {
    std::ifstream in(path);
    if (!in) throw Error(missing, "cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        lines.push_back(line);
    }
    return lines;
}

std::vector<PhaseSpec> load_phases(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorKind::MissingPhaseFile, "phase sidecar not found: " + path.string());
    }
    auto lines = read_lines(path, ErrorKind::MissingPhaseFile);
    if (lines.empty() || lower(trim(lines.front())) != "phase_id,t_start,t_end") {
        throw Error(ErrorKind::MalformedRow, path.string() + ": expected header phase_id,t_start,t_end");
    }
    std::vector<PhaseSpec> phases;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto cells = split_row(lines[i]);
        const std::string ctx = path.string() + ":" + std::to_string(i + 1);
        if (cells.size() != 3) throw Error(ErrorKind::MalformedRow, ctx + ": expected 3 cells");
        auto phase = parse_phase(cells[0]);
        if (!phase) throw Error(ErrorKind::MalformedRow, ctx + ": unknown phase '" + std::string(cells[0]) + "'");
        phases.push_back({*phase, parse_double(cells[1], ctx), parse_double(cells[2], ctx)});
    }
    return phases;
}

}  // namespace

std::string_view to_string(Axis axis) {
    static constexpr std::array<std::string_view, kNumAxes> names{"Fx", "Fy", "Fz", "Mx", "My", "Mz"};
    return names[static_cast<std::size_t>(axis)];
}

std::string_view to_string(Phase phase) {
    static constexpr std::array<std::string_view, kNumPhases> names{"approach", "rotation", "insertion",
                                                                    "mating"};
    return names[static_cast<std::size_t>(phase)];
}

std::string_view to_string(Arm arm) { return arm == Arm::Right ? "right" : "left"; }

std::optional<Axis> parse_axis(std::string_view s) {
    const auto l = lower(trim(s));
    for (Axis a : kAllAxes) {
        if (lower(to_string(a)) == l) return a;
    }
    return std::nullopt;
}

std::optional<Phase> parse_phase(std::string_view s) {
    const auto l = lower(trim(s));
    for (Phase p : kAllPhases) {
        if (to_string(p) == l) return p;
    }
    return std::nullopt;
}

std::optional<Arm> parse_arm(std::string_view s) {
    const auto l = lower(trim(s));
    if (l == "right" || l == "r") return Arm::Right;
    if (l == "left" || l == "l") return Arm::Left;
    return std::nullopt;
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw Error(ErrorKind::Invariant, "cannot format double");
    return std::string(buf.data(), ptr);
}

double parse_double(std::string_view cell, std::string_view context) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw Error(ErrorKind::MalformedRow,
                    std::string(context) + ": non-numeric cell '" + std::string(cell) + "'");
    }
    return v;
}

AxisSeries::AxisSeries(Axis axis, std::vector<double> times, std::vector<double> values)
    : axis_(axis), times_(std::move(times)), values_(std::move(values)) {
    if (times_.size() != values_.size()) {
        throw Error(ErrorKind::Invariant, "axis series: times/values length mismatch");
    }
    if (times_.size() < 2) throw Error(ErrorKind::EmptyPhase, "axis series needs at least 2 samples");
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1])) {
            throw Error(ErrorKind::NonMonotoneTime, "axis series times must be strictly increasing");
        }
    }
}

void Trial::validate() const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!std::isfinite(s.t) || s.t < 0.0) {
            throw Error(ErrorKind::MalformedRow, trial_id + ": bad timestamp at row " + std::to_string(i));
        }
        for (double v : s.wrench) {
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::MalformedRow, trial_id + ": non-finite value at row " + std::to_string(i));
            }
        }
        if (i > 0 && !(s.t > samples[i - 1].t)) {
            throw Error(ErrorKind::NonMonotoneTime,
                        trial_id + ": time not strictly increasing at row " + std::to_string(i));
        }
    }
    for (std::size_t k = 0; k < phases.size(); ++k) {
        const auto& p = phases[k];
        if (!(p.t_start < p.t_end)) {
            throw Error(ErrorKind::InvalidPhase, trial_id + ": phase " + std::string(to_string(p.phase)) +
                                                     " has t_start >= t_end");
        }
        if (k > 0) {
            const auto& prev = phases[k - 1];
            if (p.t_start != prev.t_end || static_cast<int>(p.phase) <= static_cast<int>(prev.phase)) {
                throw Error(ErrorKind::InvalidPhase,
                            trial_id + ": phases must be ordered, distinct and contiguous");
            }
        }
        auto in_window = std::count_if(samples.begin(), samples.end(), [&](const WrenchSample& s) {
            return s.t >= p.t_start && s.t < p.t_end;
        });
        if (in_window < 2) {
            throw Error(ErrorKind::EmptyPhase,
                        trial_id + ": phase " + std::string(to_string(p.phase)) + " has fewer than 2 samples");
        }
    }
}

const PhaseSpec& Trial::phase(Phase p) const {
    for (const auto& entry : phases) {
        if (entry.phase == p) return entry;
    }
    throw Error(ErrorKind::InvalidPhase, trial_id + ": no phase " + std::string(to_string(p)));
}

AxisSeries Trial::axis_series(Axis axis) const {
    std::vector<double> t, v;
    t.reserve(samples.size());
    v.reserve(samples.size());
    for (const auto& s : samples) {
        t.push_back(s.t);
        v.push_back(s[axis]);
    }
    return AxisSeries(axis, std::move(t), std::move(v));
}

std::filesystem::path default_phase_path(const std::filesystem::path& trial_csv) {
    auto p = trial_csv;
    p.replace_extension(".phases.csv");
    return p;
}

Trial load_trial(const std::filesystem::path& trial_csv, const TrialFormat& format) {
    auto lines = read_lines(trial_csv, ErrorKind::BadFile);
    if (lines.empty() || lower(trim(lines.front())) != "t,fx,fy,fz,mx,my,mz") {
        throw Error(ErrorKind::MalformedRow, trial_csv.string() + ": expected header t,fx,fy,fz,mx,my,mz");
    }
    Trial trial;
    trial.trial_id = format.trial_id.value_or(trial_csv.stem().string());
    trial.arm = format.arm;
    trial.samples.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto cells = split_row(lines[i]);
        const std::string ctx = trial_csv.string() + ":" + std::to_string(i + 1);
        if (cells.size() != 1 + kNumAxes) throw Error(ErrorKind::MalformedRow, ctx + ": expected 7 cells");
        WrenchSample s;
        s.t = parse_double(cells[0], ctx);
        for (std::size_t a = 0; a < kNumAxes; ++a) s.wrench[a] = parse_double(cells[a + 1], ctx);
        if (!trial.samples.empty() && !(s.t > trial.samples.back().t)) {
            throw Error(ErrorKind::NonMonotoneTime, ctx + ": time not strictly increasing");
        }
        trial.samples.push_back(s);
    }
    trial.phases = load_phases(format.phase_file.value_or(default_phase_path(trial_csv)));
    trial.validate();
    return trial;
}

void save_trial(const Trial& trial, const std::filesystem::path& trial_csv,
                const std::optional<std::filesystem::path>& phase_file) {
    {
        std::ofstream out(trial_csv, std::ios::binary);
        if (!out) throw Error(ErrorKind::BadFile, "cannot write " + trial_csv.string());
        out << "t,fx,fy,fz,mx,my,mz\n";
        for (const auto& s : trial.samples) {
            out << format_double(s.t);
            for (double v : s.wrench) out << ',' << format_double(v);
            out << '\n';
        }
    }
    const auto phase_path = phase_file.value_or(default_phase_path(trial_csv));
    std::ofstream out(phase_path, std::ios::binary);
    if (!out) throw Error(ErrorKind::BadFile, "cannot write " + phase_path.string());
    out << "phase_id,t_start,t_end\n";
    for (const auto& p : trial.phases) {
        out << to_string(p.phase) << ',' << format_double(p.t_start) << ',' << format_double(p.t_end) << '\n';
    }
}

AxisSeries slice_phase(const Trial& trial, const PhaseSpec& phase, Axis axis) {
    std::vector<double> t, v;
    for (const auto& s : trial.samples) {
        if (s.t >= phase.t_start && s.t < phase.t_end) {
            t.push_back(s.t);
            v.push_back(s[axis]);
        }
    }
    if (t.size() < 2) {
        throw Error(ErrorKind::EmptyPhase, trial.trial_id + ": phase " + std::string(to_string(phase.phase)) +
                                               " window holds fewer than 2 samples");
    }
    return AxisSeries(axis, std::move(t), std::move(v));
}

}  // namespace actgram
