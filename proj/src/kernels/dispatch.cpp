#include <cstdlib>
#include <string>

#include "topicforge/common/error.hpp"
#include "topicforge/kernels.hpp"

namespace topicforge::kernels {

namespace {

constexpr Table scalar_table{&scalar::dot, &scalar::axpy, &scalar::squared_distance};
#if defined(TOPICFORGE_HAVE_AVX2)
constexpr Table avx2_table{&avx2::dot, &avx2::axpy, &avx2::squared_distance};
#endif

Isa detect() {
    if (const char* env = std::getenv("TOPICFORGE_SIMD")) {
        std::string v = env;
        if (v == "scalar") return Isa::scalar;
        if (v == "avx2" && supported(Isa::avx2)) return Isa::avx2;
    }
    return supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

Isa& active_isa() {
    static Isa isa = detect();
    return isa;
}

const Table*& active_table() {
    static const Table* t = &table(active_isa());
    return t;
}

}  // namespace

#if !defined(TOPICFORGE_HAVE_AVX2)
namespace avx2 {
double dot(const double*, const double*, std::size_t) { throw Error("avx2 kernels not built"); }
void axpy(double, const double*, double*, std::size_t) { throw Error("avx2 kernels not built"); }
double squared_distance(const double*, const double*, std::size_t) { throw Error("avx2 kernels not built"); }
}  // namespace avx2
#endif

bool supported(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(TOPICFORGE_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

const Table& table(Isa isa) {
    if (!supported(isa)) throw Error("kernel set not supported on this CPU: " + std::string(name(isa)));
#if defined(TOPICFORGE_HAVE_AVX2)
    if (isa == Isa::avx2) return avx2_table;
#endif
    return scalar_table;
}

Isa active() { return active_isa(); }

void select(Isa isa) {
    const Table& t = table(isa);
    active_isa() = isa;
    active_table() = &t;
}

std::string_view name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

const Table& current() { return *active_table(); }

}  // namespace topicforge::kernels
