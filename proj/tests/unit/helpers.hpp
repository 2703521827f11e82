#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <string>
#include <unistd.h>
#include <vector>

#include "actgram/error.hpp"
#include "actgram/signal_io.hpp"

namespace testutil {

/// Fresh directory removed on scope exit.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("actgram_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Series from a function sampled at `rate` Hz over n samples starting at t0.
inline actgram::AxisSeries sampled(std::size_t n, double rate, const std::function<double(double)>& f,
                                   double t0 = 0.0, actgram::Axis axis = actgram::Axis::Fz) {
    std::vector<double> t(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = t0 + static_cast<double>(i) / rate;
        v[i] = f(t[i]);
    }
    return actgram::AxisSeries(axis, std::move(t), std::move(v));
}

/// Error kind thrown by f, or nullopt-like sentinel when nothing is thrown.
template <typename F>
int error_kind_of(F&& f) {
    try {
        f();
    } catch (const actgram::Error& e) {
        return static_cast<int>(e.kind());
    }
    return -1;
}

inline int kind(actgram::ErrorKind k) { return static_cast<int>(k); }

}  // namespace testutil
