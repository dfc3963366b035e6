#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

#include "chdl/policy.hpp"

namespace chdl {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;

/// Ordered list of tensor factor dimensions annotating a matrix dimension.
struct SubsystemShape {
    std::vector<int> factors;

    int total() const {
        int n = 1;
        for (int f : factors) n *= f;
        return n;
    }
};

/// Kronecker product; block (i,j) of the result equals A(i,j) * B.
template <typename DerivedA, typename DerivedB>
Mat tensor_product(const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& B) {
    Mat out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = Complex(A(i, j)) * B;
    return out;
}

/// Trace out one tensor factor of a square matrix whose dimension factors as `shape`.
Mat partial_trace(const Mat& M, const SubsystemShape& shape, int traced_factor);

struct PolarResult {
    Mat W;  // partial isometry vanishing on ker|A|
    Mat P;  // |A| = sqrt(A*A), positive semidefinite
};

/// A = W * P.  W is the smallest partial isometry: its initial space is Ran|A|.
PolarResult polar_decompose(const Mat& A, const NumericPolicy& pol = default_policy());

struct EigResult {
    RealVec values;  // ascending
    Mat vectors;     // columns, orthonormal, deterministic phase
};

/// Eigendecomposition of a Hermitian matrix.  Rejects inputs with
/// ||A - A*|| beyond the policy tolerance.
EigResult hermitian_eig(const Mat& A, const NumericPolicy& pol = default_policy());

double trace_norm(const Mat& A);
double operator_norm(const Mat& A);

/// Principal square root of a positive semidefinite matrix.  Eigenvalues in
/// [psd_hard_floor, 0) are clamped to zero; anything lower is an error.
Mat sqrt_psd(const Mat& A, const NumericPolicy& pol = default_policy());

bool is_hermitian(const Mat& A, double tol);

/// Rank of a projector-like PSD matrix counted by eigenvalues above tol.
int psd_rank(const Mat& A, double tol, const NumericPolicy& pol = default_policy());

/// Multiply each eigenvector column by a phase making its first nonvanishing
/// component real positive.  Used wherever a basis must be reproducible.
void fix_phases(Mat& vectors, double tol = 1e-12);

}  // namespace chdl
