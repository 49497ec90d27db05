#include "sfksd/stein.hpp"

#include "sfksd/parallel.hpp"
#include "sfksd/simd/kernels.hpp"

#include <cmath>
#include <vector>

namespace sfksd {

namespace {

// u_i = g_i s_i + dg_i/dx^i  (diagonal)  or  u = G^T s + col_div  (matrix).
struct DiagonalFeatures {
    Matrix u;  // n x d
    Matrix g;  // n x d
};

struct MatrixFeatures {
    Matrix u;                // n x d
    std::vector<Matrix> G;   // n of d x d
};

DiagonalFeatures diagonal_features(const DensityModel &model, const DiagonalAux &aux,
                                   const SampleMatrix &samples) {
    const auto n = samples.rows();
    const int d = model.dim();
    DiagonalFeatures f{Matrix(n, d), Matrix(n, d)};
    Vector g(d), div(d);
    for (Eigen::Index r = 0; r < n; ++r) {
        const Vector x = samples.row(r).transpose();
        try {
            require_interior(model.domain(), x);
            aux.eval(x, g, div);
        } catch (const DomainError &e) {
            throw DomainError(e.what(), r);
        }
        f.u.row(r) = (g.cwiseProduct(model.score(x)) + div).transpose();
        f.g.row(r) = g.transpose();
    }
    return f;
}

MatrixFeatures matrix_features(const DensityModel &model, const MatrixAux &aux,
                               const SampleMatrix &samples) {
    const auto n = samples.rows();
    const int d = model.dim();
    MatrixFeatures f{Matrix(n, d), std::vector<Matrix>(static_cast<std::size_t>(n), Matrix(d, d))};
    Vector div(d);
    for (Eigen::Index r = 0; r < n; ++r) {
        const Vector x = samples.row(r).transpose();
        Matrix &G = f.G[static_cast<std::size_t>(r)];
        try {
            require_interior(model.domain(), x);
            aux.eval(x, G, div);
        } catch (const DomainError &e) {
            throw DomainError(e.what(), r);
        }
        f.u.row(r) = (G.transpose() * model.score(x) + div).transpose();
    }
    return f;
}

std::vector<const double *> columns(const Matrix &m) {
    std::vector<const double *> cols(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) cols[j] = m.col(j).data();
    return cols;
}

void mirror_upper(Matrix &H) {
    for (Eigen::Index r = 0; r < H.rows(); ++r)
        for (Eigen::Index s = r + 1; s < H.cols(); ++s) H(s, r) = H(r, s);
}

Matrix gram_diagonal_rbf(const SampleMatrix &samples, const DiagonalFeatures &f, double bw,
                         unsigned threads) {
    const auto n = static_cast<std::size_t>(samples.rows());
    const int d = static_cast<int>(samples.cols());
    const auto xc = columns(samples);
    const auto uc = columns(f.u);
    const auto gc = columns(f.g);
    const auto &table = simd::active();
    Matrix H(samples.rows(), samples.rows());
    parallel_for(n, threads, [&](std::size_t r) {
        std::vector<double> xr(d), ur(d), gr(d), row(n - r);
        for (int i = 0; i < d; ++i) {
            xr[i] = xc[i][r];
            ur[i] = uc[i][r];
            gr[i] = gc[i][r];
        }
        simd::SteinRowArgs args;
        args.x = {xc.data(), d};
        args.u = {uc.data(), d};
        args.g = {gc.data(), d};
        args.xr = xr.data();
        args.ur = ur.data();
        args.gr = gr.data();
        args.inv_bandwidth_sq = 1.0 / bw;
        args.begin = r;
        args.end = n;
        args.out = row.data();
        table.stein_rbf_row(args);
        for (std::size_t s = r; s < n; ++s)
            H(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) = row[s - r];
    });
    mirror_upper(H);
    return H;
}

// Closed form of the matrix-auxiliary Stein kernel for the RBF kernel:
//   h = k [ u(x).u(y) + c1 (u(x).G(y)^T D - u(y).G(x)^T D)
//           + c1 <G(x), G(y)>_F - c2 (G(x)^T D).(G(y)^T D) ].
Matrix gram_matrix_rbf(const SampleMatrix &samples, const MatrixFeatures &f, double bw,
                       unsigned threads) {
    const auto n = samples.rows();
    const double c1 = 2.0 / bw;
    const double c2 = c1 * c1;
    Matrix H(n, n);
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t ru) {
        const auto r = static_cast<Eigen::Index>(ru);
        const Matrix &Gx = f.G[ru];
        for (Eigen::Index s = r; s < n; ++s) {
            const Matrix &Gy = f.G[static_cast<std::size_t>(s)];
            const Vector delta = (samples.row(r) - samples.row(s)).transpose();
            const double k = std::exp(-delta.squaredNorm() / bw);
            const Vector a = Gy.transpose() * delta;
            const Vector b = Gx.transpose() * delta;
            const double ux_uy = f.u.row(r).dot(f.u.row(s));
            const double cross = f.u.row(r).dot(a) - f.u.row(s).dot(b);
            const double curv = c1 * Gx.cwiseProduct(Gy).sum() - c2 * b.dot(a);
            H(r, s) = k * (ux_uy + c1 * cross + curv);
        }
    });
    mirror_upper(H);
    return H;
}

}  // namespace

SteinKernelSpec::SteinKernelSpec(DensityModel model_, SmoothKernel kernel_, Auxiliary aux_)
    : model(std::move(model_)), kernel(std::move(kernel_)), aux(std::move(aux_)) {
    if (aux_dim(aux) != model.dim())
        throw ConstructionError("auxiliary dimension does not match model dimension");
}

double stein_kernel_eval(const SteinKernelSpec &spec, const Eigen::Ref<const Vector> &x,
                         const Eigen::Ref<const Vector> &y) {
    require_interior(spec.model.domain(), x);
    require_interior(spec.model.domain(), y);
    const int d = spec.model.dim();
    const double k = spec.kernel.eval(x, y);
    const Vector kx = spec.kernel.grad_x(x, y);
    const Vector ky = spec.kernel.grad_y(x, y);
    const Matrix kxy = spec.kernel.mixed_second(x, y);
    const Vector sx = spec.model.score(x);
    const Vector sy = spec.model.score(y);

    if (const auto *diag = std::get_if<DiagonalAux>(&spec.aux)) {
        Vector gx(d), dx(d), gy(d), dy(d);
        diag->eval(x, gx, dx);
        diag->eval(y, gy, dy);
        const Vector ux = gx.cwiseProduct(sx) + dx;
        const Vector uy = gy.cwiseProduct(sy) + dy;
        double h = 0.0;
        for (int i = 0; i < d; ++i)
            h += ux[i] * uy[i] * k + ux[i] * gy[i] * ky[i] + uy[i] * gx[i] * kx[i] +
                 gx[i] * gy[i] * kxy(i, i);
        return h;
    }

    const auto &mat = std::get<MatrixAux>(spec.aux);
    Matrix Gx(d, d), Gy(d, d);
    Vector cx(d), cy(d);
    mat.eval(x, Gx, cx);
    mat.eval(y, Gy, cy);
    const Vector ux = Gx.transpose() * sx + cx;
    const Vector uy = Gy.transpose() * sy + cy;
    double h = 0.0;
    for (int i = 0; i < d; ++i) {
        h += ux[i] * uy[i] * k;
        h += ux[i] * Gy.col(i).dot(ky);
        h += uy[i] * Gx.col(i).dot(kx);
        h += Gx.col(i).dot(kxy * Gy.col(i));
    }
    return h;
}

Matrix gram_matrix(const SteinKernelSpec &spec, const SampleMatrix &samples, unsigned threads) {
    if (samples.cols() != spec.model.dim())
        throw std::invalid_argument("sample dimension does not match model dimension");
    const auto n = samples.rows();
    const auto bw = spec.kernel.rbf_bandwidth_sq();

    if (const auto *diag = std::get_if<DiagonalAux>(&spec.aux)) {
        const auto f = diagonal_features(spec.model, *diag, samples);
        if (bw) return gram_diagonal_rbf(samples, f, *bw, threads);
    } else {
        const auto f = matrix_features(spec.model, std::get<MatrixAux>(spec.aux), samples);
        if (bw) return gram_matrix_rbf(samples, f, *bw, threads);
    }

    Matrix H(n, n);
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t ru) {
        const auto r = static_cast<Eigen::Index>(ru);
        for (Eigen::Index s = r; s < n; ++s)
            H(r, s) = stein_kernel_eval(spec, samples.row(r).transpose(), samples.row(s).transpose());
    });
    mirror_upper(H);
    return H;
}

double u_statistic(const Matrix &H) {
    const auto n = H.rows();
    if (n < 2 || H.cols() != n) throw std::invalid_argument("u_statistic needs a square matrix with n >= 2");
    const double off = H.sum() - H.trace();
    return off / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double v_statistic(const Matrix &H) {
    const auto n = H.rows();
    if (n < 1 || H.cols() != n) throw std::invalid_argument("v_statistic needs a square matrix with n >= 1");
    return H.mean();
}

}  // namespace sfksd
