#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops. Each kernel has a scalar reference version and,
// on x86-64, an AVX2+FMA version; the active table is chosen once at startup
// from CPU features (override with TOPICFORGE_SIMD=scalar|avx2).

namespace topicforge::kernels {

enum class Isa { scalar, avx2 };

struct Table {
    double (*dot)(const double* a, const double* b, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    double (*squared_distance)(const double* a, const double* b, std::size_t n);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
}  // namespace avx2

bool supported(Isa isa);
const Table& table(Isa isa);  // throws if unsupported

Isa active();
/// Switches the process-wide table. Not thread-safe; call before work starts.
void select(Isa isa);
std::string_view name(Isa isa);

const Table& current();

inline double dot(std::span<const double> a, std::span<const double> b) {
    return current().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    current().axpy(alpha, x.data(), y.data(), x.size());
}
inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    return current().squared_distance(a.data(), b.data(), a.size());
}

}  // namespace topicforge::kernels
