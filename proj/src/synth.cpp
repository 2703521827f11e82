#include "actgram/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include <json.hpp>

#include "actgram/error.hpp"

namespace actgram {

namespace {

using Kind = Piece::Kind;

double draw(const Range& r, std::mt19937_64& rng) {
    if (r.hi <= r.lo) return r.lo;
    std::uniform_real_distribution<double> u(r.lo, r.hi);
    return u(rng);
}

Piece hold(double weight = 1.0) {
    Piece p;
    p.kind = Kind::Hold;
    p.weight = weight;
    return p;
}

Piece ramp(double weight, Range delta) {
    Piece p;
    p.kind = Kind::Ramp;
    p.weight = weight;
    p.size = delta;
    return p;
}

Piece impulse(Range seconds, Range height) {
    Piece p;
    p.kind = Kind::Impulse;
    p.weight = 0.0;
    p.seconds = seconds;
    p.size = height;
    return p;
}

Piece oscillation(double weight, Range amplitude, Range freq, double decay) {
    Piece p;
    p.kind = Kind::Oscillation;
    p.weight = weight;
    p.size = amplitude;
    p.frequency = freq;
    p.decay = decay;
    return p;
}

/// A piece with its parameters drawn, placed on the time axis.
struct PlacedPiece {
    Kind kind;
    double start;
    double end;
    double level;  // value at start
    double size;
    double frequency;
    double decay;

    double value(double t) const {
        const double u = t - start;
        const double len = end - start;
        switch (kind) {
            case Kind::Hold: return level;
            case Kind::Ramp: return level + size * std::clamp(u / len, 0.0, 1.0);
            case Kind::Impulse: {
                const double x = std::clamp(u / len, 0.0, 1.0);
                return level + size * (x < 0.5 ? 2.0 * x : 2.0 * (1.0 - x));
            }
            case Kind::Oscillation:
                return level + size * std::exp(-decay * u) * std::sin(2.0 * std::numbers::pi * frequency * u);
        }
        return level;
    }

    double end_level() const { return kind == Kind::Ramp ? level + size : level; }
};

struct CleanTrial {
    std::vector<double> times;
    std::array<std::vector<double>, kNumAxes> values;
    std::vector<PhaseSpec> phases;
};

CleanTrial generate_clean(const TaskProfile& profile, std::mt19937_64& rng) {
    CleanTrial out;
    std::array<double, kNumAxes> level = profile.initial;
    std::size_t index = 0;
    auto time_of = [&](std::size_t k) { return static_cast<double>(k) / profile.rate_hz; };

    for (const auto& tmpl : profile.phases) {
        const double duration = draw(tmpl.duration, rng);
        const auto n = static_cast<std::size_t>(std::llround(duration * profile.rate_hz));
        const double t0 = time_of(index);
        const double t1 = time_of(index + n);
        std::array<std::vector<PlacedPiece>, kNumAxes> placed;
        for (std::size_t a = 0; a < kNumAxes; ++a) {
            const auto& pieces = tmpl.axes[a];
            std::vector<double> fixed(pieces.size(), 0.0);
            double fixed_total = 0.0, weight_total = 0.0;
            for (std::size_t i = 0; i < pieces.size(); ++i) {
                if (pieces[i].seconds.hi > 0.0) {
                    fixed[i] = draw(pieces[i].seconds, rng);
                    fixed_total += fixed[i];
                } else {
                    weight_total += pieces[i].weight;
                }
            }
            const double flexible = std::max(0.0, (t1 - t0) - fixed_total);
            double start = t0;
            for (std::size_t i = 0; i < pieces.size(); ++i) {
                const auto& p = pieces[i];
                const double len = fixed[i] > 0.0 ? fixed[i] : flexible * p.weight / weight_total;
                PlacedPiece pp{p.kind, start, start + len, level[a], draw(p.size, rng), draw(p.frequency, rng),
                               p.decay};
                level[a] = pp.end_level();
                placed[a].push_back(pp);
                start += len;
            }
        }
        for (std::size_t k = index; k < index + n; ++k) {
            const double t = time_of(k);
            out.times.push_back(t);
            for (std::size_t a = 0; a < kNumAxes; ++a) {
                const auto& pieces = placed[a];
                std::size_t i = 0;
                while (i + 1 < pieces.size() && t >= pieces[i].end) ++i;
                out.values[a].push_back(pieces[i].value(t));
            }
        }
        out.phases.push_back({tmpl.phase, t0, t1});
        index += n;
    }
    return out;
}

Trial assemble(const CleanTrial& clean, const std::array<std::vector<double>, kNumAxes>& values,
               const std::string& id, Arm arm) {
    Trial trial;
    trial.trial_id = id;
    trial.arm = arm;
    trial.phases = clean.phases;
    trial.samples.resize(clean.times.size());
    for (std::size_t k = 0; k < clean.times.size(); ++k) {
        trial.samples[k].t = clean.times[k];
        for (std::size_t a = 0; a < kNumAxes; ++a) trial.samples[k].wrench[a] = values[a][k];
    }
    return trial;
}

void add_noise(std::array<std::vector<double>, kNumAxes>& values, const TaskProfile& profile, std::mt19937_64& rng) {
    for (std::size_t a = 0; a < kNumAxes; ++a) {
        const double sd = draw(profile.noise_stdev[a], rng);
        if (sd <= 0.0) continue;
        std::normal_distribution<double> noise(0.0, sd);
        for (double& v : values[a]) v += noise(rng);
    }
}

std::string kind_name(Kind k) {
    switch (k) {
        case Kind::Hold: return "hold";
        case Kind::Ramp: return "ramp";
        case Kind::Impulse: return "impulse";
        case Kind::Oscillation: return "oscillation";
    }
    return "hold";
}

Kind parse_kind(const std::string& s) {
    if (s == "hold") return Kind::Hold;
    if (s == "ramp") return Kind::Ramp;
    if (s == "impulse") return Kind::Impulse;
    if (s == "oscillation") return Kind::Oscillation;
    throw Error(ErrorKind::InvalidProfile, "unknown piece kind '" + s + "'");
}

nlohmann::ordered_json range_json(const Range& r) { return nlohmann::ordered_json::array({r.lo, r.hi}); }
Range range_from(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

void TaskProfile::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidProfile, msg); };
    if (!(rate_hz > 0.0)) fail("rate_hz must be positive");
    if (phases.size() != kNumPhases) fail("profile needs exactly four phases");
    for (std::size_t k = 0; k < phases.size(); ++k) {
        const auto& ph = phases[k];
        if (ph.phase != kAllPhases[k]) fail("phases must run approach, rotation, insertion, mating");
        if (!(ph.duration.lo > 0.0) || ph.duration.hi < ph.duration.lo) {
            fail(std::string(to_string(ph.phase)) + ": duration range must be positive");
        }
        for (std::size_t a = 0; a < kNumAxes; ++a) {
            const auto& pieces = ph.axes[a];
            if (pieces.empty()) fail(std::string(to_string(ph.phase)) + ": empty template for an axis");
            double fixed = 0.0, weight = 0.0;
            for (const auto& p : pieces) {
                if (p.seconds.hi > 0.0) {
                    if (p.seconds.lo <= 0.0 || p.seconds.hi < p.seconds.lo) fail("piece seconds range invalid");
                    fixed += p.seconds.hi;
                } else {
                    if (!(p.weight > 0.0)) fail("flexible piece needs a positive weight");
                    weight += p.weight;
                }
                if (p.size.hi < p.size.lo || p.frequency.hi < p.frequency.lo || p.decay < 0.0) {
                    fail("piece parameter range invalid");
                }
            }
            if (weight <= 0.0) fail("every axis template needs at least one flexible piece");
            if (fixed >= 0.5 * ph.duration.lo) fail("fixed-length pieces leave too little phase time");
        }
    }
    for (const auto& r : noise_stdev) {
        if (r.lo < 0.0 || r.hi < r.lo) fail("noise stdev range invalid");
    }
    const auto& dominant = phases[static_cast<std::size_t>(Phase::Insertion)].axes[static_cast<std::size_t>(dominant_axis)];
    bool has_impulse = false;
    for (const auto& p : dominant) has_impulse |= p.kind == Kind::Impulse;
    if (!has_impulse) fail("insertion template needs an impulse on the dominant axis");
    if (!(reaction_time_constant >= 0.0)) fail("reaction_time_constant must be non-negative");
}

TaskProfile default_profile() {
    TaskProfile p;
    p.rate_hz = 200.0;
    p.dominant_axis = Axis::Fz;
    for (std::size_t a = 0; a < 3; ++a) p.noise_stdev[a] = {0.05, 0.3};
    for (std::size_t a = 3; a < kNumAxes; ++a) p.noise_stdev[a] = {0.01, 0.03};
    p.initial = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};

    constexpr auto Fx = static_cast<std::size_t>(Axis::Fx);
    constexpr auto Fy = static_cast<std::size_t>(Axis::Fy);
    constexpr auto Fz = static_cast<std::size_t>(Axis::Fz);
    constexpr auto Mx = static_cast<std::size_t>(Axis::Mx);
    constexpr auto My = static_cast<std::size_t>(Axis::My);
    constexpr auto Mz = static_cast<std::size_t>(Axis::Mz);

    // guarded approach: free motion, ending on first contact
    PhaseTemplate approach;
    approach.phase = Phase::Approach;
    approach.duration = {2.0, 3.0};
    approach.axes[Fx] = {hold()};
    approach.axes[Fy] = {hold()};
    approach.axes[Fz] = {hold(0.85), ramp(0.15, {-4.0, -2.0})};
    approach.axes[Mx] = {hold()};
    approach.axes[My] = {hold()};
    approach.axes[Mz] = {hold()};

    // rotational alignment: torque builds and releases while the part pivots
    PhaseTemplate rotation;
    rotation.phase = Phase::Rotation;
    rotation.duration = {3.0, 4.5};
    rotation.axes[Fx] = {ramp(0.4, {1.0, 2.5}), hold(0.2), ramp(0.4, {-2.5, -1.0})};
    rotation.axes[Fy] = {hold()};
    rotation.axes[Fz] = {hold()};
    rotation.axes[Mx] = {oscillation(1.0, {0.3, 0.6}, {1.0, 2.0}, 0.5)};
    rotation.axes[My] = {ramp(0.4, {0.5, 1.0}), hold(0.3), ramp(0.3, {-1.0, -0.5})};
    rotation.axes[Mz] = {hold()};

    // snap insertion: press down, snap through, release
    PhaseTemplate insertion;
    insertion.phase = Phase::Insertion;
    insertion.duration = {3.5, 5.0};
    insertion.axes[Fx] = {hold(0.5), impulse({0.04, 0.08}, {2.0, 4.0}), hold(0.5)};
    insertion.axes[Fy] = {hold()};
    insertion.axes[Fz] = {ramp(0.5, {-15.0, -8.0}), impulse({0.04, 0.08}, {-20.0, -10.0}), ramp(0.2, {5.0, 10.0}),
                          hold(0.3)};
    insertion.axes[Mx] = {hold(0.5), oscillation(0.5, {0.2, 0.4}, {2.0, 4.0}, 2.0)};
    insertion.axes[My] = {ramp(0.5, {-0.6, -0.3}), ramp(0.5, {0.3, 0.6})};
    insertion.axes[Mz] = {hold()};

    // mating: hold the parts together, then unload
    PhaseTemplate mating;
    mating.phase = Phase::Mating;
    mating.duration = {2.0, 3.5};
    mating.axes[Fx] = {hold()};
    mating.axes[Fy] = {hold()};
    mating.axes[Fz] = {hold(0.5), ramp(0.5, {2.0, 5.0})};
    mating.axes[Mx] = {hold()};
    mating.axes[My] = {hold()};
    mating.axes[Mz] = {hold(0.6), ramp(0.4, {0.1, 0.3})};

    p.phases = {approach, rotation, insertion, mating};
    return p;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t index) {
    std::uint64_t x = base_seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL * (index + 1);
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Trial generate_trial(const TaskProfile& profile, std::uint64_t seed, const std::string& trial_id) {
    profile.validate();
    std::mt19937_64 rng(seed);
    const auto clean = generate_clean(profile, rng);
    auto values = clean.values;
    add_noise(values, profile, rng);
    return assemble(clean, values, trial_id, Arm::Right);
}

std::vector<Trial> generate_dataset(const TaskProfile& profile, std::size_t n_trials, std::uint64_t base_seed,
                                    int arms) {
    profile.validate();
    if (n_trials < 1) throw Error(ErrorKind::InvalidProfile, "need at least one trial");
    if (arms != 1 && arms != 2) throw Error(ErrorKind::InvalidProfile, "arms must be 1 or 2");
    std::vector<Trial> out;
    for (std::size_t i = 0; i < n_trials; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "trial_%03zu", i);
        std::mt19937_64 rng(trial_seed(base_seed, i));
        const auto clean = generate_clean(profile, rng);
        auto right = clean.values;
        add_noise(right, profile, rng);
        if (arms == 1) {
            out.push_back(assemble(clean, right, id, Arm::Right));
            continue;
        }
        out.push_back(assemble(clean, right, std::string(id) + "_R", Arm::Right));

        auto left = clean.values;
        const double dt = 1.0 / profile.rate_hz;
        const double tau = profile.reaction_time_constant;
        const double alpha = tau > 0.0 ? dt / (tau + dt) : 1.0;
        for (std::size_t a = 0; a < kNumAxes; ++a) {
            double state = -clean.values[a].front();
            for (std::size_t k = 0; k < left[a].size(); ++k) {
                state += alpha * (-clean.values[a][k] - state);
                left[a][k] = state;
            }
        }
        add_noise(left, profile, rng);
        out.push_back(assemble(clean, left, std::string(id) + "_L", Arm::Left));
    }
    return out;
}

std::string profile_to_json(const TaskProfile& profile) {
    nlohmann::ordered_json j;
    j["rate_hz"] = profile.rate_hz;
    j["dominant_axis"] = std::string(to_string(profile.dominant_axis));
    j["reaction_time_constant"] = profile.reaction_time_constant;
    for (Axis a : kAllAxes) {
        const auto i = static_cast<std::size_t>(a);
        j["noise_stdev"][std::string(to_string(a))] = range_json(profile.noise_stdev[i]);
        j["initial"][std::string(to_string(a))] = profile.initial[i];
    }
    auto& phases = j["phases"];
    phases = nlohmann::ordered_json::array();
    for (const auto& ph : profile.phases) {
        nlohmann::ordered_json jp;
        jp["phase"] = std::string(to_string(ph.phase));
        jp["duration"] = range_json(ph.duration);
        for (Axis a : kAllAxes) {
            auto arr = nlohmann::ordered_json::array();
            for (const auto& p : ph.axes[static_cast<std::size_t>(a)]) {
                nlohmann::ordered_json jpc;
                jpc["kind"] = kind_name(p.kind);
                if (p.seconds.hi > 0.0) jpc["seconds"] = range_json(p.seconds);
                else jpc["weight"] = p.weight;
                if (p.kind != Kind::Hold) jpc["size"] = range_json(p.size);
                if (p.kind == Kind::Oscillation) {
                    jpc["frequency"] = range_json(p.frequency);
                    jpc["decay"] = p.decay;
                }
                arr.push_back(jpc);
            }
            jp["axes"][std::string(to_string(a))] = arr;
        }
        phases.push_back(jp);
    }
    return j.dump(2) + "\n";
}

TaskProfile profile_from_json(const std::string& text) {
    TaskProfile profile;
    try {
        auto j = nlohmann::json::parse(text);
        profile.rate_hz = j.value("rate_hz", 200.0);
        if (j.contains("dominant_axis")) {
            auto ax = parse_axis(j.at("dominant_axis").get<std::string>());
            if (!ax) throw Error(ErrorKind::InvalidProfile, "unknown dominant_axis");
            profile.dominant_axis = *ax;
        }
        profile.reaction_time_constant = j.value("reaction_time_constant", 0.05);
        for (Axis a : kAllAxes) {
            const auto i = static_cast<std::size_t>(a);
            const std::string name(to_string(a));
            if (j.contains("noise_stdev")) profile.noise_stdev[i] = range_from(j.at("noise_stdev").at(name));
            if (j.contains("initial")) profile.initial[i] = j.at("initial").at(name).get<double>();
        }
        for (const auto& jp : j.at("phases")) {
            PhaseTemplate ph;
            auto phase = parse_phase(jp.at("phase").get<std::string>());
            if (!phase) throw Error(ErrorKind::InvalidProfile, "unknown phase in profile");
            ph.phase = *phase;
            ph.duration = range_from(jp.at("duration"));
            for (Axis a : kAllAxes) {
                for (const auto& jpc : jp.at("axes").at(std::string(to_string(a)))) {
                    Piece p;
                    p.kind = parse_kind(jpc.at("kind").get<std::string>());
                    if (jpc.contains("seconds")) {
                        p.seconds = range_from(jpc.at("seconds"));
                        p.weight = 0.0;
                    } else {
                        p.weight = jpc.value("weight", 1.0);
                    }
                    if (jpc.contains("size")) p.size = range_from(jpc.at("size"));
                    if (jpc.contains("frequency")) p.frequency = range_from(jpc.at("frequency"));
                    p.decay = jpc.value("decay", 0.0);
                    ph.axes[static_cast<std::size_t>(a)].push_back(p);
                }
            }
            profile.phases.push_back(ph);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidProfile, std::string("profile json: ") + e.what());
    }
    profile.validate();
    return profile;
}

}  // namespace actgram
