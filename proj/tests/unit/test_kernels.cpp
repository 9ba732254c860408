#include <doctest.h>

#include <cmath>
#include <vector>

#include "topicforge/common/rng.hpp"
#include "topicforge/kernels.hpp"

using namespace topicforge;

TEST_SUITE("kernels") {

TEST_CASE("scalar and avx2 kernels agree on every length and alignment") {
    if (!kernels::supported(kernels::Isa::avx2)) {
        MESSAGE("AVX2 unavailable; equivalence skipped");
        return;
    }
    const auto& s = kernels::table(kernels::Isa::scalar);
    const auto& v = kernels::table(kernels::Isa::avx2);
    Rng rng(3);
    for (std::size_t n = 0; n <= 67; ++n) {
        for (std::size_t offset = 0; offset < 3; ++offset) {
            std::vector<double> a(n + offset), b(n + offset);
            for (auto& x : a) x = rng.uniform(-2, 2);
            for (auto& x : b) x = rng.uniform(-2, 2);
            const double* pa = a.data() + offset;
            const double* pb = b.data() + offset;
            const double scale = 1.0 + static_cast<double>(n);
            CHECK(std::fabs(s.dot(pa, pb, n) - v.dot(pa, pb, n)) <= 1e-12 * scale);
            CHECK(std::fabs(s.squared_distance(pa, pb, n) - v.squared_distance(pa, pb, n)) <= 1e-12 * scale);
            std::vector<double> ys(b.begin() + offset, b.end()), yv = ys;
            s.axpy(0.37, pa, ys.data(), n);
            v.axpy(0.37, pa, yv.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(ys[i] - yv[i]) <= 1e-15 * (1 + std::fabs(ys[i])));
        }
    }
}

TEST_CASE("scalar kernels match their definitions") {
    const std::vector<double> a = {1, 2, 3}, b = {4, -5, 6};
    CHECK(kernels::scalar::dot(a.data(), b.data(), 3) == 12.0);
    CHECK(kernels::scalar::squared_distance(a.data(), b.data(), 3) == 9.0 + 49.0 + 9.0);
    std::vector<double> y = b;
    kernels::scalar::axpy(2.0, a.data(), y.data(), 3);
    CHECK(y == std::vector<double>{6, -1, 12});
}

TEST_CASE("selection switches the active table") {
    const auto before = kernels::active();
    kernels::select(kernels::Isa::scalar);
    CHECK(kernels::active() == kernels::Isa::scalar);
    CHECK(kernels::name(kernels::Isa::scalar) == "scalar");
    kernels::select(before);
}

}
