#include "chdl/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace chdl {

Mat partial_trace(const Mat& M, const SubsystemShape& shape, int traced_factor) {
    const int n = shape.total();
    if (M.rows() != M.cols() || M.rows() != n)
        throw std::invalid_argument("partial_trace: matrix dimension does not match shape");
    if (traced_factor < 0 || traced_factor >= static_cast<int>(shape.factors.size()))
        throw std::invalid_argument("partial_trace: traced factor out of range");

    const int dt = shape.factors[traced_factor];
    // Split indices as (left, traced, right) with row-major strides.
    int left = 1, right = 1;
    for (int k = 0; k < traced_factor; ++k) left *= shape.factors[k];
    for (int k = traced_factor + 1; k < static_cast<int>(shape.factors.size()); ++k)
        right *= shape.factors[k];

    Mat out = Mat::Zero(left * right, left * right);
    for (int la = 0; la < left; ++la)
        for (int ra = 0; ra < right; ++ra)
            for (int lb = 0; lb < left; ++lb)
                for (int rb = 0; rb < right; ++rb) {
                    Complex s = 0.0;
                    for (int t = 0; t < dt; ++t)
                        s += M((la * dt + t) * right + ra, (lb * dt + t) * right + rb);
                    out(la * right + ra, lb * right + rb) = s;
                }
    return out;
}

PolarResult polar_decompose(const Mat& A, const NumericPolicy& pol) {
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double cutoff = pol.tol_rank * std::max(1.0, s.size() ? s(0) : 0.0);
    Mat W = Mat::Zero(A.rows(), A.cols());
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) > cutoff)
            W += svd.matrixU().col(k) * svd.matrixV().col(k).adjoint();
    Mat P = svd.matrixV() * s.asDiagonal() * svd.matrixV().adjoint();
    return {std::move(W), std::move(P)};
}

bool is_hermitian(const Mat& A, double tol) {
    if (A.rows() != A.cols()) return false;
    return (A - A.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, A.cwiseAbs().maxCoeff());
}

void fix_phases(Mat& vectors, double tol) {
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
            const Complex v = vectors(i, j);
            if (std::abs(v) > tol) {
                vectors.col(j) *= std::conj(v) / std::abs(v);
                break;
            }
        }
    }
}

EigResult hermitian_eig(const Mat& A, const NumericPolicy& pol) {
    if (!is_hermitian(A, pol.tol_hermitian))
        throw std::invalid_argument("hermitian_eig: input is not Hermitian within tolerance");
    Eigen::SelfAdjointEigenSolver<Mat> es((A + A.adjoint()) / 2.0);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eig: eigensolver failed");
    EigResult r{es.eigenvalues(), es.eigenvectors()};
    fix_phases(r.vectors);
    return r;
}

double trace_norm(const Mat& A) {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(A);
    return svd.singularValues().sum();
}

double operator_norm(const Mat& A) {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(A);
    return svd.singularValues()(0);
}

Mat sqrt_psd(const Mat& A, const NumericPolicy& pol) {
    EigResult eig = hermitian_eig(A, pol);
    const double scale = std::max(1.0, std::abs(eig.values(eig.values.size() - 1)));
    RealVec vals = eig.values;
    for (Eigen::Index k = 0; k < vals.size(); ++k) {
        if (vals(k) < pol.psd_hard_floor * scale)
            throw std::invalid_argument("sqrt_psd: matrix has a genuinely negative eigenvalue");
        vals(k) = vals(k) > 0 ? std::sqrt(vals(k)) : 0.0;
    }
    return eig.vectors * vals.asDiagonal() * eig.vectors.adjoint();
}

int psd_rank(const Mat& A, double tol, const NumericPolicy& pol) {
    EigResult eig = hermitian_eig(A, pol);
    int r = 0;
    for (Eigen::Index k = 0; k < eig.values.size(); ++k)
        if (eig.values(k) > tol) ++r;
    return r;
}

}  // namespace chdl
