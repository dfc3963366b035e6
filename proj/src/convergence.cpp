#include "chdl/convergence.hpp"

#include <random>

#include "chdl/dilation.hpp"

namespace chdl {

ProbeSet ProbeSet::defaults(int dim, std::uint64_t seed, const NumericPolicy& pol) {
    (void)pol;
    ProbeSet p;
    for (int i = 0; i < dim; ++i) {
        Vec e = Vec::Zero(dim);
        e(i) = 1.0;
        p.states.push_back(DensityMatrix::unchecked(e * e.adjoint()));
        p.state_names.push_back("basis_" + std::to_string(i));
        p.vectors.push_back(e);
        p.vector_names.push_back("basis_" + std::to_string(i));
    }
    p.states.push_back(DensityMatrix::unchecked(Mat::Identity(dim, dim) / dim));
    p.state_names.push_back("maximally_mixed");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int r = 0; r < 5; ++r) {
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v(i) = Complex(gauss(rng), gauss(rng));
        v.normalize();
        p.states.push_back(DensityMatrix::unchecked(v * v.adjoint()));
        p.state_names.push_back("random_" + std::to_string(r));
        p.vectors.push_back(v);
        p.vector_names.push_back("random_" + std::to_string(r));
    }
    return p;
}

Report strong_convergence_report(const ChannelSequence& seq, const ProbeSet& probes, int n_max,
                                 const NumericPolicy& pol) {
    (void)pol;
    Report rep;
    for (int n = 1; n <= n_max; ++n) {
        Channel ch = seq.generator(n);
        double worst = 0;
        for (size_t s = 0; s < probes.states.size(); ++s) {
            const double gap =
                trace_norm(apply(ch, probes.states[s]).mat - apply(seq.limit, probes.states[s]).mat);
            rep.push_back({n, probes.state_names[s], "forward_gap", gap});
            worst = std::max(worst, gap);
        }
        rep.push_back({n, "max", "forward_gap_max", worst});
    }
    return rep;
}

Report dual_convergence_report(const ChannelSequence& seq, const Mat& B,
                               const std::vector<Vec>& vectors, int n_max,
                               const NumericPolicy& pol) {
    (void)pol;
    if (B.rows() != seq.limit.dim_out() || B.cols() != seq.limit.dim_out())
        throw std::invalid_argument("dual_convergence_report: observable dimension mismatch");
    Mat limit_dual = dual_apply(seq.limit, B);
    Report rep;
    for (int n = 1; n <= n_max; ++n) {
        Mat d = dual_apply(seq.generator(n), B) - limit_dual;
        for (size_t v = 0; v < vectors.size(); ++v)
            rep.push_back({n, "vector_" + std::to_string(v), "dual_gap", (d * vectors[v]).norm()});
    }
    return rep;
}

Channel counterexample_family(int m, int n, const NumericPolicy& pol) {
    if (n < 0 || n > m) throw std::invalid_argument("counterexample_family: index out of range");
    const int d = m + 1;  // tau_1..tau_m span H_0, psi = e_{m+1}
    Mat P0 = Mat::Identity(d, d);
    P0(d - 1, d - 1) = 0.0;
    Mat Pbar = Mat::Zero(d, d);
    Pbar(d - 1, d - 1) = 1.0;
    if (n == 0) return Channel::from_kraus(d, d, {P0, Pbar}, pol);
    Mat Vn = P0;
    Vn(n - 1, n - 1) = 0.0;
    Vn(d - 1, n - 1) = 1.0;  // |psi><tau_n|
    return Channel::from_kraus(d, d, {Vn, Pbar}, pol);
}

ChannelSequence counterexample_sequence(int m, const NumericPolicy& pol) {
    return ChannelSequence{counterexample_family(m, 0, pol),
                           [m, pol](int n) { return counterexample_family(m, n, pol); }, m};
}

Report kraus_convergence_check(const std::vector<std::vector<Mat>>& kraus_per_index,
                               const ProbeSet& probes, const NumericPolicy& pol) {
    if (kraus_per_index.size() < 2)
        throw std::invalid_argument("kraus_convergence_check: need a limit and at least one index");
    const auto& limit = kraus_per_index[0];
    const int dA = static_cast<int>(limit[0].cols());
    for (size_t n = 0; n < kraus_per_index.size(); ++n) {
        Mat sum = Mat::Zero(dA, dA);
        for (const Mat& a : kraus_per_index[n]) sum += a.adjoint() * a;
        if ((sum - Mat::Identity(dA, dA)).cwiseAbs().maxCoeff() > 1e-8)
            throw std::invalid_argument("kraus_convergence_check: normalization failure at index " +
                                        std::to_string(n));
    }

    Report rep;
    for (size_t n = 1; n < kraus_per_index.size(); ++n) {
        const auto& fam = kraus_per_index[n];
        if (fam.size() != limit.size())
            throw std::invalid_argument("kraus_convergence_check: family sizes differ");
        double op_gap = 0;
        for (size_t i = 0; i < fam.size(); ++i)
            for (const Vec& v : probes.vectors)
                op_gap = std::max(op_gap, ((fam[i] - limit[i]) * v).norm());
        rep.push_back({static_cast<int>(n), "max", "operator_gap", op_gap});

        Channel chn = Channel::from_kraus(dA, static_cast<int>(limit[0].rows()),
                                          std::vector<Mat>(fam), pol);
        Channel ch0 = Channel::from_kraus(dA, static_cast<int>(limit[0].rows()),
                                          std::vector<Mat>(limit), pol);
        double ch_gap = 0;
        for (const DensityMatrix& s : probes.states)
            ch_gap = std::max(ch_gap, trace_norm(apply(chn, s).mat - apply(ch0, s).mat));
        rep.push_back({static_cast<int>(n), "max", "channel_gap", ch_gap});
    }
    return rep;
}

ConvergingDilation converging_stinespring_sequence(const ChannelSequence& seq,
                                                   const EnergyObservable& obs, int n_max,
                                                   const NumericPolicy& pol) {
    const int dB = seq.limit.dim_out();
    int d_env = choi_rank(seq.limit, pol);
    std::vector<Channel> members;
    for (int n = 1; n <= n_max; ++n) {
        members.push_back(seq.generator(n));
        d_env = std::max(d_env, choi_rank(members.back(), pol));
    }

    auto padded = [&](const Channel& ch) {
        std::vector<Mat> k = minimal_kraus(ch, pol);
        while (static_cast<int>(k.size()) < d_env)
            k.push_back(Mat::Zero(ch.dim_out(), ch.dim_in()));
        return kraus_to_stinespring(ch.dim_in(), ch.dim_out(), k).V;
    };

    Mat V0 = padded(seq.limit);
    const Mat I_B = Mat::Identity(dB, dB);

    ConvergingDilation cd;
    cd.dim_env = 2 * d_env;
    cd.V0_tilde = stack_env(V0, Mat::Zero(V0.rows(), V0.cols()), dB, d_env);
    for (const Channel& ch : members) {
        Mat Vn = padded(ch);
        EcBuresResult res = ec_bures_core(V0, Vn, dB, d_env, obs, pol);
        Mat C = complete_to_unitary(PartialIsometry::make(res.optimal_C, pol), pol);
        Mat S = sqrt_psd(Mat::Identity(d_env, d_env) - C.adjoint() * C, pol);
        Mat Vt = stack_env(tensor_product(I_B, C) * Vn, tensor_product(I_B, S) * Vn, dB, d_env);
        const double gap = e_norm(Vt - cd.V0_tilde, obs, pol).value;
        cd.isometries.push_back(StinespringRep{cd.dim_env, Vt});
        cd.enorm_gaps.push_back(gap);
        cd.opnorm_gaps.push_back(operator_norm(Vt - cd.V0_tilde));
        cd.residuals.push_back(std::abs(gap - res.value));
    }
    return cd;
}

}  // namespace chdl
