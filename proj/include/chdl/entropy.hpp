#pragma once

#include <vector>

#include "chdl/channel.hpp"
#include "chdl/convergence.hpp"

namespace chdl {

enum class LogBase { Nats, Bits };

/// Probability weights with density matrices of equal dimension.
struct DiscreteEnsemble {
    std::vector<double> weights;
    std::vector<DensityMatrix> states;

    static DiscreteEnsemble make(std::vector<double> weights, std::vector<DensityMatrix> states,
                                 const NumericPolicy& pol = default_policy());
    DensityMatrix average() const;
    int dim() const { return states.empty() ? 0 : states[0].dim(); }
};

double von_neumann_entropy(const DensityMatrix& rho, LogBase base = LogBase::Nats,
                           const NumericPolicy& pol = default_policy());

/// Quantum relative entropy; +infinity when supp(rho) is not contained in supp(sigma).
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                        LogBase base = LogBase::Nats, const NumericPolicy& pol = default_policy());

/// H(avg) - sum p_i H(rho_i); always finite in finite dimension.
double holevo_chi(const DiscreteEnsemble& mu, LogBase base = LogBase::Nats,
                  const NumericPolicy& pol = default_policy());

/// chi(mu) - chi(Phi(mu)); nonnegative by data processing.
double entropic_disturbance(const Channel& phi, const DiscreteEnsemble& mu,
                            LogBase base = LogBase::Nats,
                            const NumericPolicy& pol = default_policy());

DiscreteEnsemble image_ensemble(const Channel& phi, const DiscreteEnsemble& mu,
                                const NumericPolicy& pol = default_policy());

struct LscReport {
    std::vector<double> values;  // disturbance per index n = 1..n_max
    double limit_value = 0;      // disturbance at (Phi_0, mu_0)
    double margin = 0;           // max(0, limit_value - min tail value)
    bool defect = false;         // margin beyond tolerance
};

/// Finite fingerprint of lower semicontinuity: tail disturbances must not dip
/// below the limit value.  ensembles[n] pairs with the n-th channel (index 0 =
/// limit).
LscReport lsc_experiment(const ChannelSequence& seq, const std::vector<DiscreteEnsemble>& ensembles,
                         int n_max, LogBase base = LogBase::Nats, double tolerance = 1e-7,
                         const NumericPolicy& pol = default_policy());

struct ReversibilityReport {
    bool preserved = true;       // chi equality held for every distribution
    std::vector<double> gaps;    // chi(mu) - chi(Phi(mu)) per distribution
};

/// Necessary-condition battery for channel reversibility on a state family:
/// chi preservation for every supplied weighting.  A finite battery can refute
/// reversibility but never certify it.
ReversibilityReport reversibility_chi_test(const Channel& phi,
                                           const std::vector<DensityMatrix>& states,
                                           const std::vector<std::vector<double>>& distributions,
                                           LogBase base = LogBase::Nats, double tolerance = 1e-8,
                                           const NumericPolicy& pol = default_policy());

}  // namespace chdl
