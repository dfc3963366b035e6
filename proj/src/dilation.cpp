#include "chdl/dilation.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

namespace chdl {

PartialIsometry PartialIsometry::make(Mat W, const NumericPolicy& pol) {
    Mat P = W.adjoint() * W;
    if (!is_hermitian(P, pol.tol_isometry) || (P * P - P).cwiseAbs().maxCoeff() > pol.tol_isometry)
        throw std::invalid_argument("PartialIsometry: W*W is not a projector");
    return PartialIsometry{std::move(W)};
}

namespace {

// Orthonormal basis of the kernel of a projector, ordered by the deterministic
// eigendecomposition (ascending eigenvalues, fixed phases).
Mat projector_kernel_basis(const Mat& P, const NumericPolicy& pol) {
    EigResult eig = hermitian_eig(P, pol);
    int k = 0;
    while (k < eig.values.size() && eig.values(k) < 0.5) ++k;
    return eig.vectors.leftCols(k);
}

// The optimal contraction from the convex solve is either a polar factor
// (partial isometry, whose kernel block we align deterministically by unitary
// completion) or, after dual polishing, a general interior contraction that is
// already optimal and must be used as-is.
Mat aligned_contraction(const Mat& C, const NumericPolicy& pol) {
    Mat P = C.adjoint() * C;
    if ((P * P - P).cwiseAbs().maxCoeff() <= pol.tol_isometry)
        return complete_to_unitary(PartialIsometry::make(C, pol), pol);
    return C;
}

}  // namespace

Mat complete_to_unitary(const PartialIsometry& w, const NumericPolicy& pol) {
    if (w.W.rows() != w.W.cols())
        throw std::invalid_argument("complete_to_unitary: operator must be square");
    Mat P = w.initial_projector();
    Mat Q = w.final_projector();
    Mat kerP = projector_kernel_basis(P, pol);
    Mat kerQ = projector_kernel_basis(Q, pol);
    if (kerP.cols() != kerQ.cols())
        throw std::invalid_argument("complete_to_unitary: kernel dimensions differ");
    Mat U = w.W;
    for (Eigen::Index k = 0; k < kerP.cols(); ++k)
        U += kerQ.col(k) * kerP.col(k).adjoint();
    return U;
}

Mat stack_env(const Mat& top, const Mat& bottom, int dim_out, int dim_env) {
    const Eigen::Index cols = top.cols();
    Mat out = Mat::Zero(static_cast<Eigen::Index>(dim_out) * 2 * dim_env, cols);
    for (int b = 0; b < dim_out; ++b)
        for (int e = 0; e < dim_env; ++e) {
            out.row(static_cast<Eigen::Index>(b) * 2 * dim_env + e) =
                top.row(static_cast<Eigen::Index>(b) * dim_env + e);
            out.row(static_cast<Eigen::Index>(b) * 2 * dim_env + dim_env + e) =
                bottom.row(static_cast<Eigen::Index>(b) * dim_env + e);
        }
    return out;
}

CommonDilation common_dilation(const Channel& phi, const Channel& psi, const EnergyObservable& obs,
                               const NumericPolicy& pol) {
    EcBuresResult res = ec_bures_channels(phi, psi, obs, pol);
    const int dB = phi.dim_out(), dE = res.dim_env;

    Mat C = aligned_contraction(res.optimal_C, pol);
    Mat S = sqrt_psd(Mat::Identity(dE, dE) - C.adjoint() * C, pol);

    const Mat I_B = Mat::Identity(dB, dB);
    CommonDilation cd;
    cd.dim_out = dB;
    cd.dim_env = 2 * dE;
    cd.V_phi = stack_env(res.V_phi, Mat::Zero(res.V_phi.rows(), res.V_phi.cols()), dB, dE);
    cd.V_psi = stack_env(tensor_product(I_B, C) * res.V_psi, tensor_product(I_B, S) * res.V_psi, dB, dE);
    cd.beta = res.value;
    cd.achieved = e_norm(cd.V_phi - cd.V_psi, obs, pol).value;
    cd.residual = std::abs(cd.achieved - cd.beta);
    return cd;
}

StinespringRep fixed_rep_approximation(const StinespringRep& v_phi, int dim_in, int dim_out,
                                       const Channel& psi, const EnergyObservable& obs, double eps,
                                       const NumericPolicy& pol) {
    (void)eps;
    const int dE = v_phi.dim_env;
    std::vector<Mat> kb = minimal_kraus(psi, pol);
    if (static_cast<int>(kb.size()) > dE)
        throw std::invalid_argument("fixed_rep_approximation: Choi rank of Psi exceeds the environment");
    while (static_cast<int>(kb.size()) < dE) kb.push_back(Mat::Zero(dim_out, dim_in));
    Mat V_psi = kraus_to_stinespring(dim_in, dim_out, kb).V;

    EcBuresResult res = ec_bures_core(v_phi.V, V_psi, dim_out, dE, obs, pol);
    // The rotation applied to the environment must be unitary so that the
    // result stays an isometry: complete a partial-isometry contraction
    // deterministically, or take the unitary polar factor of an interior one.
    Mat C = res.optimal_C;
    Mat P = C.adjoint() * C;
    Mat U;
    if ((P * P - P).cwiseAbs().maxCoeff() <= pol.tol_isometry) {
        U = complete_to_unitary(PartialIsometry::make(C, pol), pol);
    } else {
        Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
        U = svd.matrixU() * svd.matrixV().adjoint();
    }
    Mat V = tensor_product(Mat::Identity(dim_out, dim_out), U) * V_psi;
    return StinespringRep{dE, std::move(V)};
}

std::vector<Mat> unitary_sequence_udc(const std::vector<Mat>& Vs, const Mat& V0, const Mat& U0,
                                      const NumericPolicy& pol) {
    const Eigen::Index n = V0.rows();
    Mat P = V0.adjoint() * V0;
    Mat Q0 = V0 * V0.adjoint();
    Mat R0 = Mat::Identity(n, n) - Q0;
    if ((U0 * P - V0).cwiseAbs().maxCoeff() > pol.tol_isometry * 10)
        throw std::invalid_argument("unitary_sequence_udc: U0 P != V0");

    std::string bad;
    std::vector<Mat> out;
    out.reserve(Vs.size());
    for (size_t i = 0; i < Vs.size(); ++i) {
        const Mat& Vn = Vs[i];
        if ((Vn.adjoint() * Vn - P).cwiseAbs().maxCoeff() > 1e-8)
            throw std::invalid_argument("unitary_sequence_udc: V_" + std::to_string(i + 1) +
                                        " does not share the initial projector");
        Mat Rn = Mat::Identity(n, n) - Vn * Vn.adjoint();
        if (operator_norm(Rn - R0) >= 1.0) {
            bad += (bad.empty() ? "" : ",") + std::to_string(i + 1);
            out.push_back(Mat());
            continue;
        }
        Mat Wn = Vn * V0.adjoint();
        Mat Tn = Rn * R0;
        Mat Wbar = polar_decompose(Tn, pol).W;  // initial space R0(H)
        out.push_back((Wn + Wbar) * U0);
    }
    if (!bad.empty())
        throw std::runtime_error("unitary_sequence_udc: ||R_n - R_0|| >= 1 at indices " + bad);
    return out;
}

UnitaryDilation universal_unitary_dilation(const Channel& phi, const NumericPolicy& pol) {
    StinespringRep s = phi.stinespring();
    const int dA = phi.dim_in(), dB = phi.dim_out(), dE = s.dim_env;
    const int dD = dB * dE, dEp = dA * dE;
    const Eigen::Index N = static_cast<Eigen::Index>(dA) * dD;

    // Partial map: phi (x) |0>_D  ->  embedding of V phi into B (x) (A (x) E)
    // with the A-slot pinned to |0>.
    Mat W = Mat::Zero(N, N);
    for (int a = 0; a < dA; ++a)
        for (int b = 0; b < dB; ++b)
            for (int e = 0; e < dE; ++e)
                W(static_cast<Eigen::Index>(b) * dEp + e, static_cast<Eigen::Index>(a) * dD) =
                    s.V(static_cast<Eigen::Index>(b) * dE + e, a);

    UnitaryDilation ud;
    ud.U = complete_to_unitary(PartialIsometry::make(W, pol), pol);
    ud.sigma0 = Mat::Zero(dD, dD);
    ud.sigma0(0, 0) = 1.0;
    ud.dim_D = dD;
    ud.dim_Eprime = dEp;
    ud.dim_env = dE;
    return ud;
}

Channel channel_from_unitary_dilation(const UnitaryDilation& ud, int dim_in, int dim_out,
                                      const NumericPolicy& pol) {
    // The induced Stinespring isometry is U restricted to H_A (x) |0>_D.
    Mat V(ud.U.rows(), dim_in);
    for (int a = 0; a < dim_in; ++a)
        V.col(a) = ud.U.col(static_cast<Eigen::Index>(a) * ud.dim_D);
    return Channel::from_stinespring(dim_in, dim_out, ud.dim_Eprime, std::move(V), pol);
}

}  // namespace chdl
