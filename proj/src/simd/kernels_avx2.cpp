#include "sfksd/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace sfksd::simd {

namespace {

// exp on four doubles: Cody-Waite reduction x = n ln2 + r, |r| <= ln2/2,
// then a degree-12 Taylor polynomial (truncation error < 2e-16 relative).
inline __m256d exp4(__m256d x) {
    const __m256d lo = _mm256_set1_pd(-708.0);
    const __m256d hi = _mm256_set1_pd(708.0);
    x = _mm256_max_pd(_mm256_min_pd(x, hi), lo);

    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    static constexpr double c[] = {
        1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
        1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,     1.0 / 120.0,
        1.0 / 24.0,        1.0 / 6.0,        0.5,             1.0,
        1.0};
    __m256d p = _mm256_set1_pd(c[0]);
    for (int k = 1; k < 13; ++k) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[k]));

    // 2^n via the exponent field.
    const __m128i ni = _mm256_cvtpd_epi32(n);
    __m256i e = _mm256_cvtepi32_epi64(ni);
    e = _mm256_add_epi64(e, _mm256_set1_epi64x(1023));
    e = _mm256_slli_epi64(e, 52);
    return _mm256_mul_pd(p, _mm256_castsi256_pd(e));
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double *a, const double *b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

inline __m256d sqdist4(SoaView x, const double *xr, std::size_t s) {
    __m256d acc = _mm256_setzero_pd();
    for (int j = 0; j < x.dim; ++j) {
        const __m256d d = _mm256_sub_pd(_mm256_set1_pd(xr[j]), _mm256_loadu_pd(x.cols[j] + s));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    return acc;
}

void sqdist_row(SoaView x, const double *xr, std::size_t begin, std::size_t end, double *out) {
    std::size_t s = begin;
    for (; s + 4 <= end; s += 4) _mm256_storeu_pd(out + (s - begin), sqdist4(x, xr, s));
    scalar_table().sqdist_row(x, xr, s, end, out + (s - begin));
}

void rbf_row(SoaView x, const double *xr, double inv_bw, std::size_t begin, std::size_t end,
             double *out) {
    const __m256d neg_inv = _mm256_set1_pd(-inv_bw);
    std::size_t s = begin;
    for (; s + 4 <= end; s += 4)
        _mm256_storeu_pd(out + (s - begin), exp4(_mm256_mul_pd(sqdist4(x, xr, s), neg_inv)));
    scalar_table().rbf_row(x, xr, inv_bw, s, end, out + (s - begin));
}

void stein_rbf_row(const SteinRowArgs &a) {
    const double c1s = 2.0 * a.inv_bandwidth_sq;
    const __m256d c1 = _mm256_set1_pd(c1s);
    const __m256d c2 = _mm256_set1_pd(c1s * c1s);
    const __m256d neg_inv = _mm256_set1_pd(-a.inv_bandwidth_sq);
    const int d = a.x.dim;
    std::size_t s = a.begin;
    for (; s + 4 <= a.end; s += 4) {
        __m256d r2 = _mm256_setzero_pd();
        __m256d acc = _mm256_setzero_pd();
        for (int i = 0; i < d; ++i) {
            const __m256d ur = _mm256_set1_pd(a.ur[i]);
            const __m256d gr = _mm256_set1_pd(a.gr[i]);
            const __m256d delta =
                _mm256_sub_pd(_mm256_set1_pd(a.xr[i]), _mm256_loadu_pd(a.x.cols[i] + s));
            const __m256d us = _mm256_loadu_pd(a.u.cols[i] + s);
            const __m256d gs = _mm256_loadu_pd(a.g.cols[i] + s);
            r2 = _mm256_fmadd_pd(delta, delta, r2);
            __m256d term = _mm256_mul_pd(ur, us);
            const __m256d cross = _mm256_fmsub_pd(ur, gs, _mm256_mul_pd(us, gr));
            term = _mm256_fmadd_pd(_mm256_mul_pd(c1, delta), cross, term);
            const __m256d curv = _mm256_fnmadd_pd(c2, _mm256_mul_pd(delta, delta), c1);
            term = _mm256_fmadd_pd(_mm256_mul_pd(gr, gs), curv, term);
            acc = _mm256_add_pd(acc, term);
        }
        _mm256_storeu_pd(a.out + (s - a.begin), _mm256_mul_pd(exp4(_mm256_mul_pd(r2, neg_inv)), acc));
    }
    if (s < a.end) {
        SteinRowArgs tail = a;
        tail.begin = s;
        tail.out = a.out + (s - a.begin);
        scalar_table().stein_rbf_row(tail);
    }
}

}  // namespace

const KernelTable &avx2_table() {
    static const KernelTable table{&dot, &sqdist_row, &rbf_row, &stein_rbf_row};
    return table;
}

}  // namespace sfksd::simd
