#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chdl/convergence.hpp"
#include "chdl/dilation.hpp"
#include "test_util.hpp"

using namespace chdl;
using namespace chdl::testutil;

namespace {

ChannelSequence constant_sequence(const Channel& ch, int n_max) {
    return ChannelSequence{ch, [ch](int) { return ch; }, n_max};
}

Mat rotation(double theta) {
    Mat R(2, 2);
    R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return R;
}

ChannelSequence rotation_sequence(int n_max) {
    return ChannelSequence{Channel::identity(2),
                           [](int n) { return Channel::unitary(rotation(std::pow(2.0, -n))); },
                           n_max};
}

EnergyObservable number_obs(int dim, double E) {
    Mat H = Mat::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) H(k, k) = k;
    return EnergyObservable::make(H, E);
}

double max_metric(const Report& rep, int n, const std::string& metric) {
    double v = -1;
    for (const ReportRow& r : rep)
        if (r.n == n && r.metric == metric) v = std::max(v, r.value);
    return v;
}

}  // namespace

TEST_CASE("ProbeSet::defaults contents") {
    ProbeSet p = ProbeSet::defaults(3, 7);
    CHECK(p.states.size() == 3 + 1 + 5);
    CHECK(p.vectors.size() == 3 + 5);
    for (const Vec& v : p.vectors) CHECK(std::abs(v.norm() - 1.0) < 1e-10);
    ProbeSet q = ProbeSet::defaults(3, 7);
    for (size_t i = 0; i < p.states.size(); ++i)
        CHECK((p.states[i].mat - q.states[i].mat).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("strong_convergence_report: constant sequence is identically zero") {
    auto g = rng(91);
    Channel ch = random_channel(2, 2, 2, g);
    Report rep = strong_convergence_report(constant_sequence(ch, 5), ProbeSet::defaults(2, 1), 5);
    for (const ReportRow& r : rep) CHECK(r.value < 1e-12);
}

TEST_CASE("counterexample_family: structure and validation") {
    for (int m : {4, 8, 64}) {
        for (int n = 0; n <= std::min(m, 3); ++n) {
            Channel ch = counterexample_family(m, n);
            CHECK(ch.dim_in() == m + 1);
            CHECK(validate(ch).pass);
            CHECK(choi_rank(ch) == 2);
        }
    }
    CHECK_THROWS_AS(counterexample_family(4, 5), std::invalid_argument);
    CHECK_THROWS_AS(counterexample_family(4, -1), std::invalid_argument);
}

TEST_CASE("counterexample_family: forward gaps vanish on fixed probes, Theta(1/m) on mixed") {
    const int m = 8;
    ChannelSequence seq = counterexample_sequence(m);
    // tau_1 is fixed by V_n for every n >= 2: forward gap exactly 0.
    Vec tau1 = Vec::Zero(m + 1);
    tau1(0) = 1.0;
    DensityMatrix rho1 = DensityMatrix::unchecked(tau1 * tau1.adjoint());
    for (int n = 2; n <= m; ++n) {
        Channel chn = seq.generator(n);
        CHECK(trace_norm(apply(chn, rho1).mat - apply(seq.limit, rho1).mat) < 1e-12);
    }
    // Maximally mixed on H_0: gap Theta(1/m), decreasing in m.
    auto mixed_gap = [](int mm) {
        ChannelSequence s = counterexample_sequence(mm);
        Mat rho = Mat::Zero(mm + 1, mm + 1);
        for (int i = 0; i < mm; ++i) rho(i, i) = 1.0 / mm;
        DensityMatrix d = DensityMatrix::unchecked(rho);
        return trace_norm(apply(s.generator(2), d).mat - apply(s.limit, d).mat);
    };
    const double g8 = mixed_gap(8), g16 = mixed_gap(16), g32 = mixed_gap(32);
    CHECK(g16 < g8);
    CHECK(g32 < g16);
    CHECK(g8 > 0.5 / 8);
    CHECK(g8 < 4.0 / 8);
}

TEST_CASE("counterexample_family: dual action on |psi><tau_1|") {
    const int m = 8;
    ChannelSequence seq = counterexample_sequence(m);
    Mat B = Mat::Zero(m + 1, m + 1);
    B(m, 0) = 1.0;  // |psi><tau_1|
    // Limit: dual of {P0, Pbar} annihilates the off-block |psi><tau_1|.
    CHECK(dual_apply(seq.limit, B).cwiseAbs().maxCoeff() < 1e-12);
    for (int n = 2; n <= m; ++n) {
        Mat dn = dual_apply(seq.generator(n), B);
        Mat expected = Mat::Zero(m + 1, m + 1);
        expected(n - 1, 0) = 1.0;  // |tau_n><tau_1|
        CHECK((dn - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("dual_convergence_report: counterexample dichotomy and constant zeros") {
    const int m = 8;
    ChannelSequence seq = counterexample_sequence(m);
    Mat B = Mat::Zero(m + 1, m + 1);
    B(m, 0) = 1.0;
    Vec tau1 = Vec::Zero(m + 1);
    tau1(0) = 1.0;
    Report rep = dual_convergence_report(seq, B, {tau1}, m);
    for (const ReportRow& r : rep)
        if (r.n >= 2) CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));

    auto g = rng(92);
    Channel ch = random_channel(2, 2, 2, g);
    Report zero = dual_convergence_report(constant_sequence(ch, 4), random_matrix(2, 2, g),
                                          {random_unit_vector(2, g)}, 4);
    for (const ReportRow& r : zero) CHECK(r.value < 1e-12);
}

TEST_CASE("dual_convergence_report: strongly converging unitary family decays") {
    auto g = rng(93);
    ChannelSequence seq = rotation_sequence(20);
    Mat B = random_hermitian(2, g);
    std::vector<Vec> vecs = {random_unit_vector(2, g), random_unit_vector(2, g)};
    Report rep = dual_convergence_report(seq, B, vecs, 20);
    double at20 = 0;
    for (const ReportRow& r : rep)
        if (r.n == 20) at20 = std::max(at20, r.value);
    CHECK(at20 < 1e-4);
}

TEST_CASE("kraus_convergence_check: constant lists and counterexample joint decay") {
    auto g = rng(94);
    std::vector<Mat> limit = random_channel(2, 2, 2, g).kraus();
    Report rep = kraus_convergence_check({limit, limit, limit}, ProbeSet::defaults(2, 2));
    for (const ReportRow& r : rep) CHECK(r.value < 1e-12);

    // Counterexample Kraus pairs with probes in H_0 only: both tables decay to
    // zero for n past every probe index.
    const int m = 6;
    std::vector<std::vector<Mat>> fams;
    for (int n = 0; n <= m; ++n) fams.push_back(counterexample_family(m, n).kraus());
    ProbeSet probes;
    for (int i = 0; i < 2; ++i) {  // probes supported on tau_1, tau_2
        Vec e = Vec::Zero(m + 1);
        e(i) = 1.0;
        probes.vectors.push_back(e);
        probes.states.push_back(DensityMatrix::unchecked(e * e.adjoint()));
        probes.state_names.push_back("tau_" + std::to_string(i + 1));
        probes.vector_names.push_back("tau_" + std::to_string(i + 1));
    }
    Report rep2 = kraus_convergence_check(fams, probes);
    for (int n = 3; n <= m; ++n) {
        CHECK(max_metric(rep2, n, "operator_gap") < 1e-12);
        CHECK(max_metric(rep2, n, "channel_gap") < 1e-12);
    }

    // Rotation family: geometric decay in both tables.
    std::vector<std::vector<Mat>> rots;
    rots.push_back({Mat::Identity(2, 2)});
    for (int n = 1; n <= 10; ++n) rots.push_back({rotation(std::pow(2.0, -n))});
    Report rep3 = kraus_convergence_check(rots, ProbeSet::defaults(2, 3));
    for (int n = 2; n <= 10; ++n) {
        CHECK(max_metric(rep3, n, "operator_gap") <
              0.75 * max_metric(rep3, n - 1, "operator_gap"));
        CHECK(max_metric(rep3, n, "channel_gap") <
              0.75 * max_metric(rep3, n - 1, "channel_gap"));
    }

    // Normalization failure detected.
    std::vector<Mat> bad = limit;
    for (Mat& a : bad) a *= 0.9;
    CHECK_THROWS_AS(kraus_convergence_check({limit, bad}, ProbeSet::defaults(2, 2)),
                    std::invalid_argument);
}

TEST_CASE("converging_stinespring_sequence: constant sequence reproduces V0") {
    auto g = rng(95);
    Channel ch = random_channel(2, 2, 2, g);
    EnergyObservable obs = number_obs(2, 0.5);
    ConvergingDilation cd = converging_stinespring_sequence(constant_sequence(ch, 3), obs, 3);
    for (size_t i = 0; i < cd.isometries.size(); ++i) {
        CHECK(cd.enorm_gaps[i] < 1e-6);
        CHECK(cd.residuals[i] < 1e-6);
    }
}

TEST_CASE("converging_stinespring_sequence: counterexample E-norm gaps vs operator norms") {
    const int m = 8;
    EnergyObservable obs = number_obs(m + 1, 2.0);
    ChannelSequence seq = counterexample_sequence(m);
    ConvergingDilation cd = converging_stinespring_sequence(seq, obs, m);
    REQUIRE(static_cast<int>(cd.enorm_gaps.size()) == m);
    for (int n = 1; n <= m; ++n) {
        // Each V_n is an isometry reconstructing Phi_n.
        const Mat& V = cd.isometries[n - 1].V;
        CHECK((V.adjoint() * V - Mat::Identity(m + 1, m + 1)).cwiseAbs().maxCoeff() < 1e-8);
        Channel rec = Channel::from_stinespring(m + 1, m + 1, cd.dim_env, V);
        CHECK(choi_distance(rec, seq.generator(n)) < 1e-6);
        CHECK(cd.residuals[n - 1] < 1e-6);
        // E-norm gap below the operator-norm gap (sup over a subset of states).
        CHECK(cd.enorm_gaps[n - 1] <= cd.opnorm_gaps[n - 1] + 1e-9);
    }
    // Theorem 2A chain per index: 0.5 * ecd_lower <= beta = e_norm gap.
    // (Any see-saw output is a valid lower bound; one restart keeps this fast.)
    for (int n : {2, m}) {
        DiamondBracket br = ec_diamond_norm(seq.limit, seq.generator(n), obs, 1);
        CHECK(0.5 * br.lower <= cd.enorm_gaps[n - 1] + 1e-6);
    }
    // E-norm gaps decay along the tail while operator-norm gaps stay order 1.
    CHECK(cd.enorm_gaps[m - 1] < cd.enorm_gaps[1]);
    CHECK(cd.opnorm_gaps[m - 1] > 0.5);
}

TEST_CASE("converging_stinespring_sequence: rotation family gaps bounded by operator norms") {
    EnergyObservable obs = number_obs(2, 0.5);
    ConvergingDilation cd = converging_stinespring_sequence(rotation_sequence(6), obs, 6);
    for (int n = 1; n <= 6; ++n) {
        CHECK(cd.enorm_gaps[n - 1] <= cd.opnorm_gaps[n - 1] + 1e-9);
        CHECK(cd.residuals[n - 1] < 1e-6);
    }
    CHECK(cd.enorm_gaps[5] < 1e-1);
}
