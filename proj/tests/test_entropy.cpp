#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chdl/entropy.hpp"
#include "test_util.hpp"

using namespace chdl;
using namespace chdl::testutil;

namespace {

DensityMatrix basis_state(int dim, int k) {
    Mat m = Mat::Zero(dim, dim);
    m(k, k) = 1.0;
    return DensityMatrix::unchecked(std::move(m));
}

DiscreteEnsemble random_ensemble(int dim, int count, std::mt19937_64& g) {
    std::vector<double> w(count);
    std::uniform_real_distribution<double> uni(0.1, 1.0);
    double sum = 0;
    for (double& x : w) {
        x = uni(g);
        sum += x;
    }
    for (double& x : w) x /= sum;
    std::vector<DensityMatrix> states;
    for (int i = 0; i < count; ++i) states.push_back(random_state(dim, g));
    return DiscreteEnsemble::make(std::move(w), std::move(states));
}

}  // namespace

TEST_CASE("DiscreteEnsemble::make validation and average") {
    CHECK_THROWS_AS(DiscreteEnsemble::make({0.5, 0.6}, {basis_state(2, 0), basis_state(2, 1)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(DiscreteEnsemble::make({1.0}, {}), std::invalid_argument);
    DiscreteEnsemble mu =
        DiscreteEnsemble::make({0.25, 0.75}, {basis_state(2, 0), basis_state(2, 1)});
    Mat avg = mu.average().mat;
    CHECK(avg(0, 0).real() == doctest::Approx(0.25));
    CHECK(avg(1, 1).real() == doctest::Approx(0.75));
}

TEST_CASE("von_neumann_entropy: closed forms and bounds") {
    CHECK(von_neumann_entropy(basis_state(3, 1)) == doctest::Approx(0.0));
    for (int d : {2, 3, 4})
        CHECK(von_neumann_entropy(DensityMatrix::unchecked(Mat::Identity(d, d) / d)) ==
              doctest::Approx(std::log(d)).epsilon(1e-12));
    Mat diag = Mat::Zero(2, 2);
    diag(0, 0) = 0.25;
    diag(1, 1) = 0.75;
    const double expected = -0.25 * std::log(0.25) - 0.75 * std::log(0.75);
    CHECK(von_neumann_entropy(DensityMatrix::unchecked(diag)) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(von_neumann_entropy(DensityMatrix::unchecked(diag), LogBase::Bits) ==
          doctest::Approx(expected / std::log(2.0)).epsilon(1e-12));

    auto g = rng(101);
    for (int t = 0; t < 10; ++t) {
        const double h = von_neumann_entropy(random_state(3, g));
        CHECK(h >= 0.0);
        CHECK(h <= std::log(3.0) + 1e-12);
    }
}

TEST_CASE("relative_entropy: closed forms, support convention, positivity") {
    auto g = rng(102);
    DensityMatrix rho = random_state(3, g);
    CHECK(relative_entropy(rho, rho) == doctest::Approx(0.0).epsilon(1e-9));

    CHECK(std::isinf(relative_entropy(basis_state(2, 0), basis_state(2, 1))));

    // Commuting diagonal pair reduces to classical KL divergence.
    Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
    a(0, 0) = 0.3;
    a(1, 1) = 0.7;
    b(0, 0) = 0.6;
    b(1, 1) = 0.4;
    const double kl = 0.3 * std::log(0.3 / 0.6) + 0.7 * std::log(0.7 / 0.4);
    CHECK(relative_entropy(DensityMatrix::unchecked(a), DensityMatrix::unchecked(b)) ==
          doctest::Approx(kl).epsilon(1e-12));

    for (int t = 0; t < 10; ++t) {
        DensityMatrix r = random_state(3, g), s = random_state(3, g);
        CHECK(relative_entropy(r, s) >= -1e-12);
    }
}

TEST_CASE("holevo_chi: closed forms and both formulas") {
    DiscreteEnsemble same = DiscreteEnsemble::make(
        {0.5, 0.5}, {basis_state(2, 0), basis_state(2, 0)});
    CHECK(holevo_chi(same) == doctest::Approx(0.0));

    DiscreteEnsemble orth = DiscreteEnsemble::make(
        {0.5, 0.5}, {basis_state(2, 0), basis_state(2, 1)});
    CHECK(holevo_chi(orth) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(holevo_chi(orth, LogBase::Bits) == doctest::Approx(1.0).epsilon(1e-12));

    // chi = sum p_i H(rho_i || rho_bar) (first form) matches the entropy form,
    // and chi + sum p_i H(rho_i) = H(rho_bar).
    auto g = rng(103);
    for (int t = 0; t < 10; ++t) {
        DiscreteEnsemble mu = random_ensemble(3, 4, g);
        const double chi = holevo_chi(mu);
        double form1 = 0;
        DensityMatrix avg = mu.average();
        for (size_t i = 0; i < mu.weights.size(); ++i)
            form1 += mu.weights[i] * relative_entropy(mu.states[i], avg);
        CHECK(chi == doctest::Approx(form1).epsilon(1e-9));
        double avg_h = 0;
        for (size_t i = 0; i < mu.weights.size(); ++i)
            avg_h += mu.weights[i] * von_neumann_entropy(mu.states[i]);
        CHECK(chi + avg_h == doctest::Approx(von_neumann_entropy(avg)).epsilon(1e-9));
    }
}

TEST_CASE("entropic_disturbance: unitary, depolarizing, dephasing closed forms") {
    auto g = rng(104);
    DiscreteEnsemble mu = random_ensemble(2, 3, g);
    CHECK(entropic_disturbance(Channel::unitary(random_unitary(2, g)), mu) ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(entropic_disturbance(Channel::depolarizing(2), mu) ==
          doctest::Approx(holevo_chi(mu)).epsilon(1e-9));

    // Qubit dephasing on {1/2 |0><0|, 1/2 |+><+|}.
    Mat plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    DiscreteEnsemble pair = DiscreteEnsemble::make(
        {0.5, 0.5}, {basis_state(2, 0), DensityMatrix::unchecked(plus)});
    Mat P0 = Mat::Zero(2, 2), P1 = Mat::Zero(2, 2);
    P0(0, 0) = 1.0;
    P1(1, 1) = 1.0;
    Channel dephase = Channel::from_kraus(2, 2, {P0, P1});
    Mat d0 = Mat::Zero(2, 2), d1 = Mat::Zero(2, 2);
    d0(0, 0) = 1.0;
    d1(0, 0) = 0.5;
    d1(1, 1) = 0.5;
    DiscreteEnsemble image = DiscreteEnsemble::make(
        {0.5, 0.5}, {DensityMatrix::unchecked(d0), DensityMatrix::unchecked(d1)});
    CHECK(entropic_disturbance(dephase, pair) ==
          doctest::Approx(holevo_chi(pair) - holevo_chi(image)).epsilon(1e-10));
}

TEST_CASE("entropic_disturbance: data-processing monotonicity on random pairs") {
    auto g = rng(105);
    for (int t = 0; t < 50; ++t) {
        Channel ch = random_channel(2, 2, 2, g);
        DiscreteEnsemble mu = random_ensemble(2, 3, g);
        CHECK(entropic_disturbance(ch, mu) >= -1e-9);
    }
}

TEST_CASE("image_ensemble and isometric invariance of chi") {
    auto g = rng(106);
    DiscreteEnsemble mu = random_ensemble(2, 3, g);
    // Isometric embedding into C^3 via a 3x2 isometry as a channel.
    Mat Viso = random_isometry(3, 2, g);
    Channel embed = Channel::from_stinespring(2, 3, 1, Viso);
    CHECK(holevo_chi(image_ensemble(embed, mu)) == doctest::Approx(holevo_chi(mu)).epsilon(1e-9));
}

TEST_CASE("lsc_experiment: constant family has margin zero") {
    auto g = rng(107);
    Channel ch = random_channel(2, 2, 2, g);
    DiscreteEnsemble mu = random_ensemble(2, 3, g);
    ChannelSequence seq{ch, [ch](int) { return ch; }, 4};
    std::vector<DiscreteEnsemble> ensembles(5, mu);
    LscReport rep = lsc_experiment(seq, ensembles, 4);
    CHECK(rep.margin == doctest::Approx(0.0));
    CHECK(!rep.defect);
    for (double v : rep.values) CHECK(v == doctest::Approx(rep.limit_value).epsilon(1e-12));
}

TEST_CASE("lsc_experiment: counterexample family and complementary variant") {
    const int m = 6;
    ChannelSequence seq = counterexample_sequence(m);
    // Fixed ensemble supported on H_0.
    std::vector<DensityMatrix> states = {basis_state(m + 1, 0), basis_state(m + 1, 1)};
    DiscreteEnsemble mu = DiscreteEnsemble::make({0.5, 0.5}, states);
    std::vector<DiscreteEnsemble> ensembles(m + 1, mu);
    LscReport rep = lsc_experiment(seq, ensembles, m);
    CHECK(rep.margin <= 1e-7);
    CHECK(!rep.defect);

    ChannelSequence comp{complementary(seq.limit),
                         [&seq](int n) { return complementary(seq.generator(n)); }, m};
    LscReport rep2 = lsc_experiment(comp, ensembles, m);
    CHECK(rep2.margin <= 1e-7);
    CHECK(!rep2.defect);
}

TEST_CASE("reversibility_chi_test: unitary passes, depolarizing fails with log 2") {
    auto g = rng(108);
    std::vector<DensityMatrix> states = {basis_state(2, 0), basis_state(2, 1)};
    std::vector<std::vector<double>> dists = {{0.5, 0.5}, {0.3, 0.7}, {0.9, 0.1}};

    ReversibilityReport ok = reversibility_chi_test(Channel::unitary(random_unitary(2, g)),
                                                    states, dists);
    CHECK(ok.preserved);
    for (double gp : ok.gaps) CHECK(std::abs(gp) < 1e-9);

    ReversibilityReport bad = reversibility_chi_test(Channel::depolarizing(2), states,
                                                     {{0.5, 0.5}}, LogBase::Bits);
    CHECK(!bad.preserved);
    CHECK(bad.gaps[0] == doctest::Approx(1.0).epsilon(1e-9));

    Mat Viso = random_isometry(4, 2, g);
    Channel embed = Channel::from_stinespring(2, 4, 1, Viso);
    ReversibilityReport emb = reversibility_chi_test(embed, states, dists);
    CHECK(emb.preserved);
}
