#pragma once

#include "sfksd/auxiliary.hpp"
#include "sfksd/kernel.hpp"
#include "sfksd/model.hpp"

namespace sfksd {

/// Target model, RKHS kernel and standardisation function that together
/// define the Stein kernel h_{q,g}.
struct SteinKernelSpec {
    SteinKernelSpec(DensityModel model, SmoothKernel kernel, Auxiliary aux);

    DensityModel model;
    SmoothKernel kernel;
    Auxiliary aux;
};

/// h(x, y) = < T K(x, .), T K(y, .) > with the full inner-product expansion,
/// evaluated through the kernel's derivative blocks.
double stein_kernel_eval(const SteinKernelSpec &spec, const Eigen::Ref<const Vector> &x,
                         const Eigen::Ref<const Vector> &y);

/// H(r, s) = h(x_r, x_s). Each unordered pair is evaluated once; the result
/// is exactly symmetric and independent of `threads`.
Matrix gram_matrix(const SteinKernelSpec &spec, const SampleMatrix &samples, unsigned threads = 1);

/// Mean of the off-diagonal entries.
double u_statistic(const Matrix &H);

/// Mean of all entries.
double v_statistic(const Matrix &H);

}  // namespace sfksd
