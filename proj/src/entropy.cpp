#include "chdl/entropy.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace chdl {

namespace {

double log_scale(LogBase base) { return base == LogBase::Bits ? 1.0 / std::log(2.0) : 1.0; }

}  // namespace

DiscreteEnsemble DiscreteEnsemble::make(std::vector<double> weights,
                                        std::vector<DensityMatrix> states,
                                        const NumericPolicy& pol) {
    if (weights.size() != states.size() || weights.empty())
        throw std::invalid_argument("DiscreteEnsemble: weights and states must pair up");
    double sum = 0;
    for (double w : weights) {
        if (w < -pol.tol_trace) throw std::invalid_argument("DiscreteEnsemble: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-8)
        throw std::invalid_argument("DiscreteEnsemble: weights do not sum to 1");
    const int d = states[0].dim();
    for (const auto& s : states)
        if (s.dim() != d) throw std::invalid_argument("DiscreteEnsemble: state dimensions differ");
    return DiscreteEnsemble{std::move(weights), std::move(states)};
}

DensityMatrix DiscreteEnsemble::average() const {
    Mat avg = Mat::Zero(dim(), dim());
    for (size_t i = 0; i < weights.size(); ++i) avg += weights[i] * states[i].mat;
    return DensityMatrix::unchecked(std::move(avg));
}

double von_neumann_entropy(const DensityMatrix& rho, LogBase base, const NumericPolicy& pol) {
    EigResult eig = hermitian_eig(rho.mat, pol);
    double h = 0;
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
        const double x = eig.values(k);
        if (x > pol.tol_support) h -= x * std::log(x);
    }
    return std::max(0.0, h) * log_scale(base);
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma, LogBase base,
                        const NumericPolicy& pol) {
    if (rho.dim() != sigma.dim())
        throw std::invalid_argument("relative_entropy: dimension mismatch");
    EigResult er = hermitian_eig(rho.mat, pol);
    EigResult es = hermitian_eig(sigma.mat, pol);

    // Support containment: any rho-eigenvector with positive weight must lie
    // in the span of sigma's positive eigenvectors.
    for (Eigen::Index k = 0; k < er.values.size(); ++k) {
        if (er.values(k) <= pol.tol_support) continue;
        double mass_outside = 0;
        for (Eigen::Index j = 0; j < es.values.size(); ++j)
            if (es.values(j) <= pol.tol_support)
                mass_outside += std::norm((es.vectors.col(j).adjoint() * er.vectors.col(k))(0));
        if (mass_outside > 1e-9) return std::numeric_limits<double>::infinity();
    }

    // sum_i <i| rho log rho - rho log sigma |i> in rho's eigenbasis.
    double h = 0;
    for (Eigen::Index k = 0; k < er.values.size(); ++k) {
        const double p = er.values(k);
        if (p <= pol.tol_support) continue;
        h += p * std::log(p);
        for (Eigen::Index j = 0; j < es.values.size(); ++j) {
            const double q = es.values(j);
            if (q <= pol.tol_support) continue;
            h -= p * std::log(q) * std::norm((es.vectors.col(j).adjoint() * er.vectors.col(k))(0));
        }
    }
    return std::max(0.0, h) * log_scale(base);
}

double holevo_chi(const DiscreteEnsemble& mu, LogBase base, const NumericPolicy& pol) {
    double h = von_neumann_entropy(mu.average(), base, pol);
    for (size_t i = 0; i < mu.weights.size(); ++i)
        h -= mu.weights[i] * von_neumann_entropy(mu.states[i], base, pol);
    return std::max(0.0, h);
}

DiscreteEnsemble image_ensemble(const Channel& phi, const DiscreteEnsemble& mu,
                                const NumericPolicy& pol) {
    std::vector<DensityMatrix> out;
    out.reserve(mu.states.size());
    for (const auto& s : mu.states) out.push_back(apply(phi, s, pol));
    return DiscreteEnsemble{mu.weights, std::move(out)};
}

double entropic_disturbance(const Channel& phi, const DiscreteEnsemble& mu, LogBase base,
                            const NumericPolicy& pol) {
    if (mu.dim() != phi.dim_in())
        throw std::invalid_argument("entropic_disturbance: ensemble dimension mismatch");
    return holevo_chi(mu, base, pol) - holevo_chi(image_ensemble(phi, mu, pol), base, pol);
}

LscReport lsc_experiment(const ChannelSequence& seq, const std::vector<DiscreteEnsemble>& ensembles,
                         int n_max, LogBase base, double tolerance, const NumericPolicy& pol) {
    if (static_cast<int>(ensembles.size()) < n_max + 1)
        throw std::invalid_argument("lsc_experiment: need ensembles for indices 0..n_max");
    LscReport rep;
    rep.limit_value = entropic_disturbance(seq.limit, ensembles[0], base, pol);
    double min_tail = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= n_max; ++n) {
        const double v = entropic_disturbance(seq.generator(n), ensembles[n], base, pol);
        rep.values.push_back(v);
        min_tail = std::min(min_tail, v);
    }
    rep.margin = std::max(0.0, rep.limit_value - min_tail);
    rep.defect = rep.margin > tolerance;
    return rep;
}

ReversibilityReport reversibility_chi_test(const Channel& phi,
                                           const std::vector<DensityMatrix>& states,
                                           const std::vector<std::vector<double>>& distributions,
                                           LogBase base, double tolerance,
                                           const NumericPolicy& pol) {
    ReversibilityReport rep;
    for (const auto& p : distributions) {
        if (p.size() != states.size())
            throw std::invalid_argument("reversibility_chi_test: distribution length mismatch");
        DiscreteEnsemble mu = DiscreteEnsemble::make(p, states, pol);
        const double gap = entropic_disturbance(phi, mu, base, pol);
        rep.gaps.push_back(gap);
        if (std::abs(gap) > tolerance) rep.preserved = false;
    }
    return rep;
}

}  // namespace chdl
