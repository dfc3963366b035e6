#include "chdl/channel.hpp"

#include <cmath>

namespace chdl {

DensityMatrix DensityMatrix::make(Mat m, const NumericPolicy& pol) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("DensityMatrix: not square");
    if (!is_hermitian(m, pol.tol_hermitian))
        throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(m.trace().real() - 1.0) > 1e-8 || std::abs(m.trace().imag()) > 1e-8)
        throw std::invalid_argument("DensityMatrix: trace is not 1");
    Eigen::SelfAdjointEigenSolver<Mat> es((m + m.adjoint()) / 2.0);
    if (es.eigenvalues().minCoeff() < -1e-8)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue");
    return DensityMatrix{std::move(m)};
}

StinespringRep kraus_to_stinespring(int dim_in, int dim_out, const std::vector<Mat>& ops) {
    const int m = static_cast<int>(ops.size());
    Mat V = Mat::Zero(static_cast<Eigen::Index>(dim_out) * m, dim_in);
    for (int i = 0; i < m; ++i)
        for (int b = 0; b < dim_out; ++b)
            V.row(static_cast<Eigen::Index>(b) * m + i) = ops[i].row(b);
    return {m, std::move(V)};
}

std::vector<Mat> stinespring_to_kraus(int dim_in, int dim_out, const StinespringRep& rep) {
    std::vector<Mat> ops(rep.dim_env, Mat::Zero(dim_out, dim_in));
    for (int i = 0; i < rep.dim_env; ++i)
        for (int b = 0; b < dim_out; ++b)
            ops[i].row(b) = rep.V.row(static_cast<Eigen::Index>(b) * rep.dim_env + i);
    return ops;
}

Channel Channel::from_kraus(int dim_in, int dim_out, std::vector<Mat> ops, const NumericPolicy& pol) {
    if (ops.empty()) throw std::invalid_argument("Channel: empty Kraus list");
    Mat sum = Mat::Zero(dim_in, dim_in);
    for (const Mat& a : ops) {
        if (a.rows() != dim_out || a.cols() != dim_in)
            throw std::invalid_argument("Channel: Kraus operator has wrong shape");
        sum += a.adjoint() * a;
    }
    if ((sum - Mat::Identity(dim_in, dim_in)).cwiseAbs().maxCoeff() > pol.tol_isometry)
        throw std::invalid_argument("Channel: Kraus operators do not sum to identity");
    Channel ch;
    ch.dim_in_ = dim_in;
    ch.dim_out_ = dim_out;
    ch.rep_ = KrausRep{std::move(ops)};
    return ch;
}

Channel Channel::from_stinespring(int dim_in, int dim_out, int dim_env, Mat V, const NumericPolicy& pol) {
    if (V.rows() != static_cast<Eigen::Index>(dim_out) * dim_env || V.cols() != dim_in)
        throw std::invalid_argument("Channel: Stinespring matrix has wrong shape");
    if ((V.adjoint() * V - Mat::Identity(dim_in, dim_in)).cwiseAbs().maxCoeff() > pol.tol_isometry)
        throw std::invalid_argument("Channel: V is not an isometry");
    Channel ch;
    ch.dim_in_ = dim_in;
    ch.dim_out_ = dim_out;
    ch.rep_ = StinespringRep{dim_env, std::move(V)};
    return ch;
}

Channel Channel::from_choi(int dim_in, int dim_out, Mat choi, const NumericPolicy& pol) {
    if (choi.rows() != static_cast<Eigen::Index>(dim_in) * dim_out || choi.rows() != choi.cols())
        throw std::invalid_argument("Channel: Choi matrix has wrong shape");
    EigResult eig = hermitian_eig(choi, pol);
    if (eig.values.minCoeff() < -pol.tol_isometry)
        throw std::invalid_argument("Channel: Choi matrix is not PSD");
    Mat marg = partial_trace(choi, {{dim_in, dim_out}}, 1);
    if ((marg - Mat::Identity(dim_in, dim_in)).cwiseAbs().maxCoeff() > pol.tol_isometry)
        throw std::invalid_argument("Channel: Choi marginal is not the identity");
    Channel ch;
    ch.dim_in_ = dim_in;
    ch.dim_out_ = dim_out;
    ch.rep_ = ChoiRep{std::move(choi)};
    return ch;
}

Channel Channel::identity(int dim) {
    return from_kraus(dim, dim, {Mat::Identity(dim, dim)});
}

Channel Channel::depolarizing(int dim) {
    std::vector<Mat> ops;
    const double w = 1.0 / std::sqrt(static_cast<double>(dim));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            Mat a = Mat::Zero(dim, dim);
            a(i, j) = w;
            ops.push_back(std::move(a));
        }
    return from_kraus(dim, dim, std::move(ops));
}

Channel Channel::unitary(const Mat& U, const NumericPolicy& pol) {
    return from_kraus(static_cast<int>(U.cols()), static_cast<int>(U.rows()), {U}, pol);
}

const char* Channel::repr_name() const {
    if (std::holds_alternative<KrausRep>(rep_)) return "kraus";
    if (std::holds_alternative<StinespringRep>(rep_)) return "stinespring";
    return "choi";
}

std::vector<Mat> choi_to_kraus(int dim_in, int dim_out, const Mat& choi, double cutoff) {
    NumericPolicy pol;
    EigResult eig = hermitian_eig(choi, pol);
    std::vector<Mat> ops;
    for (Eigen::Index k = eig.values.size() - 1; k >= 0; --k) {
        if (eig.values(k) <= cutoff) continue;
        const double w = std::sqrt(eig.values(k));
        Mat a(dim_out, dim_in);
        for (int i = 0; i < dim_in; ++i)
            for (int b = 0; b < dim_out; ++b)
                a(b, i) = w * eig.vectors(static_cast<Eigen::Index>(i) * dim_out + b, k);
        ops.push_back(std::move(a));
    }
    if (ops.empty()) ops.push_back(Mat::Zero(dim_out, dim_in));
    return ops;
}

std::vector<Mat> Channel::kraus() const {
    if (const auto* k = std::get_if<KrausRep>(&rep_)) return k->ops;
    if (const auto* s = std::get_if<StinespringRep>(&rep_))
        return stinespring_to_kraus(dim_in_, dim_out_, *s);
    const auto& c = std::get<ChoiRep>(rep_);
    return choi_to_kraus(dim_in_, dim_out_, c.mat, 1e-12);
}

StinespringRep Channel::stinespring() const {
    if (const auto* s = std::get_if<StinespringRep>(&rep_)) return *s;
    return kraus_to_stinespring(dim_in_, dim_out_, kraus());
}

DensityMatrix apply(const Channel& ch, const DensityMatrix& rho, const NumericPolicy& pol) {
    if (rho.dim() != ch.dim_in())
        throw std::invalid_argument("apply: state dimension mismatch");
    Mat out = Mat::Zero(ch.dim_out(), ch.dim_out());
    for (const Mat& a : ch.kraus()) out += a * rho.mat * a.adjoint();
    (void)pol;
    return DensityMatrix::unchecked(std::move(out));
}

Mat dual_apply(const Channel& ch, const Mat& B) {
    if (B.rows() != ch.dim_out() || B.cols() != ch.dim_out())
        throw std::invalid_argument("dual_apply: observable dimension mismatch");
    Mat out = Mat::Zero(ch.dim_in(), ch.dim_in());
    for (const Mat& a : ch.kraus()) out += a.adjoint() * B * a;
    return out;
}

Channel complementary(const Channel& ch, const NumericPolicy& pol) {
    // Kraus operators of the complementary map: (B_e)_{i a} = (A_i)_{e-th row
    // sliced differently}; hat(Phi)(rho)_{ij} = Tr(A_i rho A_j*), realized as
    // Tr_B V rho V* with the same isometry.
    StinespringRep s = ch.stinespring();
    const int dB = ch.dim_out(), dE = s.dim_env, dA = ch.dim_in();
    // Swap the roles of output and environment: W row index e*dB + b.
    Mat W(static_cast<Eigen::Index>(dE) * dB, dA);
    for (int b = 0; b < dB; ++b)
        for (int e = 0; e < dE; ++e)
            W.row(static_cast<Eigen::Index>(e) * dB + b) = s.V.row(static_cast<Eigen::Index>(b) * dE + e);
    return Channel::from_stinespring(dA, dE, dB, std::move(W), pol);
}

Mat choi_matrix(const Channel& ch) {
    if (const auto* c = std::get_if<ChoiRep>(&ch.rep_)) return c->mat;
    const int dA = ch.dim_in(), dB = ch.dim_out();
    Mat C = Mat::Zero(static_cast<Eigen::Index>(dA) * dB, static_cast<Eigen::Index>(dA) * dB);
    for (const Mat& a : ch.kraus()) {
        // vectorize: |a>> with index i*dB + b equal to a(b, i)
        Vec v(static_cast<Eigen::Index>(dA) * dB);
        for (int i = 0; i < dA; ++i)
            for (int b = 0; b < dB; ++b)
                v(static_cast<Eigen::Index>(i) * dB + b) = a(b, i);
        C += v * v.adjoint();
    }
    return C;
}

namespace {

// Gram matrix of the vectorized Kraus operators.  The Choi matrix factors as
// F F* with F the stacked vectorizations, so its nonzero spectrum equals the
// Gram spectrum -- a k x k problem instead of (d_A d_B)^2.
Mat kraus_gram(const std::vector<Mat>& ops) {
    const int k = static_cast<int>(ops.size());
    Mat G(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) G(i, j) = (ops[i].adjoint() * ops[j]).trace();
    return G;
}

}  // namespace

int choi_rank(const Channel& ch, const NumericPolicy& pol) {
    if (ch.repr_name() == std::string("choi"))
        return psd_rank(choi_matrix(ch), pol.tol_rank, pol);
    return psd_rank(kraus_gram(ch.kraus()), pol.tol_rank, pol);
}

double choi_distance(const Channel& a, const Channel& b) {
    return trace_norm(choi_matrix(a) - choi_matrix(b));
}

ChannelDiagnostics validate(const Channel& ch, const NumericPolicy& pol) {
    ChannelDiagnostics d;
    Mat sum = Mat::Zero(ch.dim_in(), ch.dim_in());
    for (const Mat& a : ch.kraus()) sum += a.adjoint() * a;
    d.normalization_residual = (sum - Mat::Identity(ch.dim_in(), ch.dim_in())).cwiseAbs().maxCoeff();

    if (ch.repr_name() == std::string("choi")) {
        Mat C = choi_matrix(ch);
        Eigen::SelfAdjointEigenSolver<Mat> es((C + C.adjoint()) / 2.0);
        d.choi_psd_residual = std::max(0.0, -es.eigenvalues().minCoeff());
        Mat marg = partial_trace(C, {{ch.dim_in(), ch.dim_out()}}, 1);
        d.choi_trace_residual =
            (marg - Mat::Identity(ch.dim_in(), ch.dim_in())).cwiseAbs().maxCoeff();
    } else {
        // Choi = F F* for operator-sum representations: the PSD residual is the
        // (clamped) most negative Gram eigenvalue and the output marginal is
        // the transposed normalization sum -- no (d_A d_B)^2 eigenproblem.
        Eigen::SelfAdjointEigenSolver<Mat> es(kraus_gram(ch.kraus()));
        d.choi_psd_residual = std::max(0.0, -es.eigenvalues().minCoeff());
        d.choi_trace_residual = d.normalization_residual;
    }

    d.pass = d.normalization_residual <= pol.tol_isometry && d.choi_psd_residual <= pol.tol_isometry &&
             d.choi_trace_residual <= pol.tol_isometry;
    if (!d.pass) {
        d.detail = "normalization=" + std::to_string(d.normalization_residual) +
                   " choi_psd=" + std::to_string(d.choi_psd_residual) +
                   " choi_trace=" + std::to_string(d.choi_trace_residual);
    }
    return d;
}

std::vector<Mat> minimal_kraus(const Channel& ch, const NumericPolicy& pol) {
    return choi_to_kraus(ch.dim_in(), ch.dim_out(), choi_matrix(ch), pol.tol_rank);
}

}  // namespace chdl
