#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "topicforge/common/rng.hpp"

namespace fixtures {

inline constexpr const char* amzn_bars =
    "Date,Open,High,Low,Close,Adj Close,Volume,Stock Name\n"
    "2021-09-30,165.80,166.39,163.70,164.25,164.25,56848000,AMZN\n"
    "2021-10-01,164.45,165.46,162.80,164.16,164.16,56712000,AMZN\n"
    "2021-10-04,163.97,164.00,158.81,159.49,159.49,90462000,AMZN\n"
    "2021-10-05,160.23,163.04,160.12,161.05,161.05,65384000,AMZN\n"
    "2021-10-06,160.68,163.22,159.93,163.10,163.10,50660000,AMZN\n"
    "2021-10-07,164.58,166.29,164.15,165.12,165.12,48182000,AMZN\n"
    "2021-10-08,165.85,166.07,164.41,164.43,164.43,39964000,AMZN\n"
    "2021-10-11,163.75,164.63,161.90,162.32,162.32,40684000,AMZN\n"
    "2021-10-12,162.85,163.38,161.81,162.37,162.37,36392000,AMZN\n";

inline constexpr std::array<double, 9> amzn_closes = {164.25, 164.16, 159.49, 161.05, 163.10,
                                                        165.12, 164.43, 162.32, 162.37};

struct Blobs {
    std::vector<std::vector<double>> points;
    std::vector<int> truth;  // -1 for uniform noise points
};

/// Three isotropic Gaussian blobs of 50 points (sigma 1) whose centres sit
/// 10 sigma apart, optionally followed by uniform noise over a wide box.
inline Blobs blobs(std::uint64_t seed, std::size_t dim = 2, std::size_t noise = 0) {
    topicforge::Rng rng(seed);
    Blobs b;
    const double side = 10.0;
    for (int c = 0; c < 3; ++c) {
        std::vector<double> centre(dim, 0.0);
        // Equilateral triangle in the first two coordinates.
        centre[0] = side * std::cos(2.0 * M_PI * c / 3.0) / std::sqrt(3.0);
        if (dim > 1) centre[1] = side * std::sin(2.0 * M_PI * c / 3.0) / std::sqrt(3.0);
        for (int i = 0; i < 50; ++i) {
            std::vector<double> p(dim);
            for (std::size_t d = 0; d < dim; ++d) p[d] = centre[d] + rng.normal();
            b.points.push_back(std::move(p));
            b.truth.push_back(c);
        }
    }
    for (std::size_t i = 0; i < noise; ++i) {
        std::vector<double> p(dim);
        for (std::size_t d = 0; d < dim; ++d) p[d] = rng.uniform(-25.0, 25.0);
        b.points.push_back(std::move(p));
        b.truth.push_back(-1);
    }
    return b;
}

/// Adjusted Rand index from the contingency table.
inline double ari(const std::vector<int>& a, const std::vector<int>& b) {
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> ra, rb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[{a[i], b[i]}] += 1;
        ra[a[i]] += 1;
        rb[b[i]] += 1;
    }
    auto c2 = [](double n) { return n * (n - 1) / 2.0; };
    double sj = 0, sa = 0, sb = 0;
    for (auto& [k, v] : joint) sj += c2(v);
    for (auto& [k, v] : ra) sa += c2(v);
    for (auto& [k, v] : rb) sb += c2(v);
    const double expected = sa * sb / c2(static_cast<double>(a.size()));
    const double maximum = 0.5 * (sa + sb);
    if (maximum == expected) return 1.0;
    return (sj - expected) / (maximum - expected);
}

inline double rel_err(double analytic, double numeric, double floor = 1e-8) {
    return std::fabs(analytic - numeric) / std::max({std::fabs(analytic), std::fabs(numeric), floor});
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("topicforge_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

struct Run {
    int code = -1;
    std::string output;  // stdout and stderr interleaved
};

inline Run run(const std::string& command) {
    Run r;
    FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace fixtures
