#pragma once

// Inner loops shared by the Stein Gram matrix, the RBF Gram matrix, the
// wild bootstrap and the MMD permutation test. Every kernel has a scalar
// reference implementation; vector variants are selected at runtime and
// must agree with the reference to within a few ulps.

#include <cstddef>
#include <string>
#include <vector>

namespace sfksd::simd {

enum class Level { Scalar, Avx2, Neon };

std::string to_string(Level level);

/// Structure-of-arrays view of n points in d dimensions: cols[j][s] is
/// coordinate j of point s.
struct SoaView {
    const double *const *cols = nullptr;
    int dim = 0;
};

/// Arguments for one row of the diagonal-auxiliary RBF Stein kernel
///   h(x_r, x_s) = k * sum_i [ u_i^r u_i^s + c1 D_i (u_i^r g_i^s - u_i^s g_i^r)
///                             + g_i^r g_i^s (c1 - c2 D_i^2) ],
/// with D = x_r - x_s, k = exp(-|D|^2 / bw), c1 = 2/bw, c2 = 4/bw^2.
struct SteinRowArgs {
    SoaView x;
    SoaView u;
    SoaView g;
    const double *xr = nullptr;
    const double *ur = nullptr;
    const double *gr = nullptr;
    double inv_bandwidth_sq = 1.0;
    std::size_t begin = 0;
    std::size_t end = 0;
    double *out = nullptr;  // out[s - begin]
};

struct KernelTable {
    double (*dot)(const double *a, const double *b, std::size_t n);
    /// out[s - begin] = |x_s - xr|^2
    void (*sqdist_row)(SoaView x, const double *xr, std::size_t begin, std::size_t end,
                       double *out);
    /// out[s - begin] = exp(-|x_s - xr|^2 * inv_bandwidth_sq)
    void (*rbf_row)(SoaView x, const double *xr, double inv_bandwidth_sq, std::size_t begin,
                    std::size_t end, double *out);
    void (*stein_rbf_row)(const SteinRowArgs &args);
};

const KernelTable &scalar_table();
#if defined(SFKSD_HAVE_AVX2)
const KernelTable &avx2_table();
#endif
#if defined(SFKSD_HAVE_NEON)
const KernelTable &neon_table();
#endif

/// Levels compiled in and supported by the running CPU, scalar first.
std::vector<Level> available_levels();

/// Currently selected level. Chosen once from CPU features; the
/// SFKSD_SIMD environment variable (scalar|avx2|neon) overrides it.
Level active_level();

/// Forces a level; throws std::invalid_argument if it is unavailable.
void set_level(Level level);

const KernelTable &table_for(Level level);
const KernelTable &active();

}  // namespace sfksd::simd
