#include "sfksd/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string_view>

namespace sfksd::simd {

namespace {

bool cpu_supports(Level level) {
    switch (level) {
    case Level::Scalar:
        return true;
    case Level::Avx2:
#if defined(SFKSD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    case Level::Neon:
#if defined(SFKSD_HAVE_NEON)
        return true;  // mandatory on aarch64
#else
        return false;
#endif
    }
    return false;
}

Level detect() {
    if (const char *env = std::getenv("SFKSD_SIMD")) {
        const std::string_view v(env);
        if (v == "scalar") return Level::Scalar;
        if (v == "avx2" && cpu_supports(Level::Avx2)) return Level::Avx2;
        if (v == "neon" && cpu_supports(Level::Neon)) return Level::Neon;
    }
    if (cpu_supports(Level::Avx2)) return Level::Avx2;
    if (cpu_supports(Level::Neon)) return Level::Neon;
    return Level::Scalar;
}

std::atomic<Level> &current() {
    static std::atomic<Level> level{detect()};
    return level;
}

}  // namespace

std::string to_string(Level level) {
    switch (level) {
    case Level::Scalar:
        return "scalar";
    case Level::Avx2:
        return "avx2";
    case Level::Neon:
        return "neon";
    }
    return "unknown";
}

std::vector<Level> available_levels() {
    std::vector<Level> out{Level::Scalar};
    for (Level l : {Level::Avx2, Level::Neon})
        if (cpu_supports(l)) out.push_back(l);
    return out;
}

Level active_level() { return current().load(std::memory_order_relaxed); }

void set_level(Level level) {
    if (!cpu_supports(level))
        throw std::invalid_argument("SIMD level " + to_string(level) + " is not available");
    current().store(level, std::memory_order_relaxed);
}

const KernelTable &table_for(Level level) {
    switch (level) {
#if defined(SFKSD_HAVE_AVX2)
    case Level::Avx2:
        return avx2_table();
#endif
#if defined(SFKSD_HAVE_NEON)
    case Level::Neon:
        return neon_table();
#endif
    default:
        return scalar_table();
    }
}

const KernelTable &active() { return table_for(active_level()); }

}  // namespace sfksd::simd
