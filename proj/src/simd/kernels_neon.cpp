#include "sfksd/simd/kernels.hpp"

#include <arm_neon.h>

namespace sfksd::simd {

namespace {

// Same reduction and polynomial as the AVX2 variant, two lanes at a time.
inline float64x2_t exp2v(float64x2_t x) {
    x = vmaxq_f64(vminq_f64(x, vdupq_n_f64(708.0)), vdupq_n_f64(-708.0));
    const float64x2_t n = vrndnq_f64(vmulq_f64(x, vdupq_n_f64(1.4426950408889634074)));
    float64x2_t r = vfmsq_f64(x, n, vdupq_n_f64(6.93145751953125e-1));
    r = vfmsq_f64(r, n, vdupq_n_f64(1.42860682030941723212e-6));

    static constexpr double c[] = {
        1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
        1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,     1.0 / 120.0,
        1.0 / 24.0,        1.0 / 6.0,        0.5,             1.0,
        1.0};
    float64x2_t p = vdupq_n_f64(c[0]);
    for (int k = 1; k < 13; ++k) p = vfmaq_f64(vdupq_n_f64(c[k]), p, r);

    int64x2_t e = vcvtq_s64_f64(n);
    e = vshlq_n_s64(vaddq_s64(e, vdupq_n_s64(1023)), 52);
    return vmulq_f64(p, vreinterpretq_f64_s64(e));
}

double dot(const double *a, const double *b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

inline float64x2_t sqdist2(SoaView x, const double *xr, std::size_t s) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (int j = 0; j < x.dim; ++j) {
        const float64x2_t d = vsubq_f64(vdupq_n_f64(xr[j]), vld1q_f64(x.cols[j] + s));
        acc = vfmaq_f64(acc, d, d);
    }
    return acc;
}

void sqdist_row(SoaView x, const double *xr, std::size_t begin, std::size_t end, double *out) {
    std::size_t s = begin;
    for (; s + 2 <= end; s += 2) vst1q_f64(out + (s - begin), sqdist2(x, xr, s));
    scalar_table().sqdist_row(x, xr, s, end, out + (s - begin));
}

void rbf_row(SoaView x, const double *xr, double inv_bw, std::size_t begin, std::size_t end,
             double *out) {
    const float64x2_t neg_inv = vdupq_n_f64(-inv_bw);
    std::size_t s = begin;
    for (; s + 2 <= end; s += 2)
        vst1q_f64(out + (s - begin), exp2v(vmulq_f64(sqdist2(x, xr, s), neg_inv)));
    scalar_table().rbf_row(x, xr, inv_bw, s, end, out + (s - begin));
}

void stein_rbf_row(const SteinRowArgs &a) {
    const double c1s = 2.0 * a.inv_bandwidth_sq;
    const float64x2_t c1 = vdupq_n_f64(c1s);
    const float64x2_t c2 = vdupq_n_f64(c1s * c1s);
    const float64x2_t neg_inv = vdupq_n_f64(-a.inv_bandwidth_sq);
    const int d = a.x.dim;
    std::size_t s = a.begin;
    for (; s + 2 <= a.end; s += 2) {
        float64x2_t r2 = vdupq_n_f64(0.0);
        float64x2_t acc = vdupq_n_f64(0.0);
        for (int i = 0; i < d; ++i) {
            const float64x2_t ur = vdupq_n_f64(a.ur[i]);
            const float64x2_t gr = vdupq_n_f64(a.gr[i]);
            const float64x2_t delta = vsubq_f64(vdupq_n_f64(a.xr[i]), vld1q_f64(a.x.cols[i] + s));
            const float64x2_t us = vld1q_f64(a.u.cols[i] + s);
            const float64x2_t gs = vld1q_f64(a.g.cols[i] + s);
            r2 = vfmaq_f64(r2, delta, delta);
            float64x2_t term = vmulq_f64(ur, us);
            const float64x2_t cross = vfmsq_f64(vmulq_f64(ur, gs), us, gr);
            term = vfmaq_f64(term, vmulq_f64(c1, delta), cross);
            const float64x2_t curv = vfmsq_f64(c1, c2, vmulq_f64(delta, delta));
            term = vfmaq_f64(term, vmulq_f64(gr, gs), curv);
            acc = vaddq_f64(acc, term);
        }
        vst1q_f64(a.out + (s - a.begin), vmulq_f64(exp2v(vmulq_f64(r2, neg_inv)), acc));
    }
    if (s < a.end) {
        SteinRowArgs tail = a;
        tail.begin = s;
        tail.out = a.out + (s - a.begin);
        scalar_table().stein_rbf_row(tail);
    }
}

}  // namespace

const KernelTable &neon_table() {
    static const KernelTable table{&dot, &sqdist_row, &rbf_row, &stein_rbf_row};
    return table;
}

}  // namespace sfksd::simd
