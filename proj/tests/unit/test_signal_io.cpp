#include <doctest.h>

#include <cmath>
#include <fstream>
#include <unistd.h>

#include "actgram/signal_io.hpp"
#include "actgram/synth.hpp"
#include "helpers.hpp"

using namespace actgram;
using testutil::TempDir;

namespace {

void write(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

Trial uniform_trial(double rate, double seconds) {
    Trial t;
    t.trial_id = "u";
    const auto n = static_cast<std::size_t>(std::llround(rate * seconds));
    for (std::size_t i = 0; i < n; ++i) {
        WrenchSample s;
        s.t = static_cast<double>(i) / rate;
        for (std::size_t a = 0; a < kNumAxes; ++a) s.wrench[a] = std::sin(s.t + static_cast<double>(a));
        t.samples.push_back(s);
    }
    t.phases = {{Phase::Approach, 0.0, 1.0}, {Phase::Rotation, 1.0, 2.0}, {Phase::Insertion, 2.0, 6.0},
                {Phase::Mating, 6.0, seconds}};
    return t;
}

}  // namespace

TEST_CASE("three-row file loads as three samples") {
    TempDir dir;
    write(dir / "a.csv", "t,fx,fy,fz,mx,my,mz\n0.0,1,2,3,4,5,6\n0.005,1,2,3,4,5,6\n0.010,1,2,3,4,5,6\n");
    write(dir / "a.phases.csv", "phase_id,t_start,t_end\napproach,0.0,0.015\n");
    const auto trial = load_trial(dir / "a.csv");
    CHECK(trial.samples.size() == 3);
    CHECK(trial.trial_id == "a");
    CHECK(trial.samples[1].t == 0.005);
    CHECK(trial.samples[2][Axis::Mz] == 6.0);
}

TEST_CASE("repeated timestamp is rejected") {
    TempDir dir;
    write(dir / "a.csv", "t,fx,fy,fz,mx,my,mz\n0.0,1,2,3,4,5,6\n0.0,1,2,3,4,5,6\n");
    write(dir / "a.phases.csv", "phase_id,t_start,t_end\napproach,0.0,1\n");
    CHECK(testutil::error_kind_of([&] { load_trial(dir / "a.csv"); }) == testutil::kind(ErrorKind::NonMonotoneTime));
}

TEST_CASE("load errors carry their kind") {
    TempDir dir;
    write(dir / "bad.csv", "t,fx,fy,fz,mx,my,mz\n0.0,1,x,3,4,5,6\n");
    write(dir / "bad.phases.csv", "phase_id,t_start,t_end\napproach,0,1\n");
    CHECK(testutil::error_kind_of([&] { load_trial(dir / "bad.csv"); }) == testutil::kind(ErrorKind::MalformedRow));

    write(dir / "nophase.csv", "t,fx,fy,fz,mx,my,mz\n0.0,1,2,3,4,5,6\n0.1,1,2,3,4,5,6\n");
    CHECK(testutil::error_kind_of([&] { load_trial(dir / "nophase.csv"); }) ==
          testutil::kind(ErrorKind::MissingPhaseFile));

    write(dir / "thin.csv", "t,fx,fy,fz,mx,my,mz\n0.0,1,2,3,4,5,6\n0.1,1,2,3,4,5,6\n0.2,1,2,3,4,5,6\n");
    write(dir / "thin.phases.csv", "phase_id,t_start,t_end\napproach,0,0.05\nrotation,0.05,0.3\n");
    CHECK(testutil::error_kind_of([&] { load_trial(dir / "thin.csv"); }) == testutil::kind(ErrorKind::EmptyPhase));

    write(dir / "order.csv", "t,fx,fy,fz,mx,my,mz\n0.0,1,2,3,4,5,6\n0.1,1,2,3,4,5,6\n0.2,1,2,3,4,5,6\n0.3,1,2,3,4,5,6\n");
    write(dir / "order.phases.csv", "phase_id,t_start,t_end\nrotation,0,0.15\napproach,0.15,0.4\n");
    CHECK(testutil::error_kind_of([&] { load_trial(dir / "order.csv"); }) == testutil::kind(ErrorKind::InvalidPhase));
}

TEST_CASE("synthetic trial survives save and load bit for bit") {
    TempDir dir;
    const auto trial = generate_trial(default_profile(), 7, "rt");
    save_trial(trial, dir / "rt.csv");
    const auto back = load_trial(dir / "rt.csv");
    CHECK(back == trial);

    // a second save of the loaded trial gives the same bytes
    save_trial(back, dir / "rt2.csv");
    std::ifstream a(dir / "rt.csv"), b(dir / "rt2.csv");
    std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
}

TEST_CASE("format_double round trips awkward values") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.005, 1e-17, -0.0}) {
        CHECK(parse_double(format_double(v), "x") == v);
    }
}

TEST_CASE("slice over the whole trial equals the axis series") {
    auto trial = uniform_trial(200.0, 10.0);
    const PhaseSpec all{Phase::Approach, 0.0, 10.0};
    for (Axis a : kAllAxes) CHECK(slice_phase(trial, all, a) == trial.axis_series(a));
}

TEST_CASE("one second window at 200 Hz holds 200 samples") {
    const auto trial = uniform_trial(200.0, 10.0);
    const auto s = slice_phase(trial, trial.phase(Phase::Rotation), Axis::Fx);
    // oracle: enumerate sample indices k with 1 <= k/200 < 2
    std::size_t expected = 0;
    for (std::size_t k = 0; k < 2000; ++k) {
        const double t = static_cast<double>(k) / 200.0;
        expected += t >= 1.0 && t < 2.0;
    }
    CHECK(expected == 200);
    CHECK(s.size() == expected);
    CHECK(s.times().front() == 1.0);
}

TEST_CASE("zero length window is an empty phase") {
    const auto trial = uniform_trial(200.0, 10.0);
    CHECK(testutil::error_kind_of([&] { slice_phase(trial, {Phase::Approach, 3.0, 3.0}, Axis::Fx); }) ==
          testutil::kind(ErrorKind::EmptyPhase));
}

TEST_CASE("phase slices partition the covered window") {
    const auto trial = uniform_trial(200.0, 10.0);
    for (Axis a : kAllAxes) {
        std::vector<double> t, v;
        for (const auto& p : trial.phases) {
            const auto s = slice_phase(trial, p, a);
            t.insert(t.end(), s.times().begin(), s.times().end());
            v.insert(v.end(), s.values().begin(), s.values().end());
        }
        const auto full = trial.axis_series(a);
        CHECK(t == full.times());
        CHECK(v == full.values());
    }
}

TEST_CASE("axis and phase names parse back") {
    for (Axis a : kAllAxes) CHECK(parse_axis(to_string(a)) == a);
    for (Phase p : kAllPhases) CHECK(parse_phase(to_string(p)) == p);
    CHECK(parse_axis("fz") == Axis::Fz);
    CHECK_FALSE(parse_phase("landing").has_value());
}
