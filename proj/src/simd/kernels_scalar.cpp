#include "sfksd/simd/kernels.hpp"

#include <cmath>

namespace sfksd::simd {

namespace {

double dot(const double *a, const double *b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void sqdist_row(SoaView x, const double *xr, std::size_t begin, std::size_t end, double *out) {
    for (std::size_t s = begin; s < end; ++s) {
        double acc = 0.0;
        for (int j = 0; j < x.dim; ++j) {
            const double d = xr[j] - x.cols[j][s];
            acc += d * d;
        }
        out[s - begin] = acc;
    }
}

void rbf_row(SoaView x, const double *xr, double inv_bw, std::size_t begin, std::size_t end,
             double *out) {
    sqdist_row(x, xr, begin, end, out);
    for (std::size_t s = begin; s < end; ++s) out[s - begin] = std::exp(-out[s - begin] * inv_bw);
}

void stein_rbf_row(const SteinRowArgs &a) {
    const double c1 = 2.0 * a.inv_bandwidth_sq;
    const double c2 = c1 * c1;
    const int d = a.x.dim;
    for (std::size_t s = a.begin; s < a.end; ++s) {
        double r2 = 0.0;
        double acc = 0.0;
        for (int i = 0; i < d; ++i) {
            const double delta = a.xr[i] - a.x.cols[i][s];
            const double us = a.u.cols[i][s];
            const double gs = a.g.cols[i][s];
            r2 += delta * delta;
            acc += a.ur[i] * us + c1 * delta * (a.ur[i] * gs - us * a.gr[i]) +
                   a.gr[i] * gs * (c1 - c2 * delta * delta);
        }
        a.out[s - a.begin] = std::exp(-r2 * a.inv_bandwidth_sq) * acc;
    }
}

}  // namespace

const KernelTable &scalar_table() {
    static const KernelTable table{&dot, &sqdist_row, &rbf_row, &stein_rbf_row};
    return table;
}

}  // namespace sfksd::simd
