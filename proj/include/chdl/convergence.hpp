#pragma once

#include <functional>
#include <string>
#include <vector>

#include "chdl/channel.hpp"
#include "chdl/energy.hpp"

namespace chdl {

/// Indexed family n -> Phi_n (n >= 1) with a limit candidate Phi_0.
struct ChannelSequence {
    Channel limit;
    std::function<Channel(int)> generator;
    int max_index = 0;
};

/// Finite witnesses for the strong topologies.
struct ProbeSet {
    std::vector<DensityMatrix> states;
    std::vector<Mat> observables;
    std::vector<Vec> vectors;
    std::vector<std::string> state_names;
    std::vector<std::string> vector_names;

    /// Basis states, the maximally mixed state, and 5 seeded random pure states.
    static ProbeSet defaults(int dim, std::uint64_t seed,
                             const NumericPolicy& pol = default_policy());
};

struct ReportRow {
    int n = 0;
    std::string probe;
    std::string metric;
    double value = 0;
};
using Report = std::vector<ReportRow>;

/// Per (n, rho) trace-norm gap ||Phi_n(rho) - Phi_0(rho)||_1, plus a per-n
/// "max" summary row.
Report strong_convergence_report(const ChannelSequence& seq, const ProbeSet& probes, int n_max,
                                 const NumericPolicy& pol = default_policy());

/// Per (n, phi) Heisenberg-picture gap ||(Phi_n* - Phi_0*)(B) phi||.
Report dual_convergence_report(const ChannelSequence& seq, const Mat& B,
                               const std::vector<Vec>& vectors, int n_max,
                               const NumericPolicy& pol = default_policy());

/// The strong-convergence counterexample on C^{m+1}: Phi_n has Kraus pair
/// {V_n, Pbar_0} with V_n fixing every tau_i except tau_n, which it sends to
/// psi.  n = 0 returns the limit {P_0, Pbar_0}.
Channel counterexample_family(int m, int n, const NumericPolicy& pol = default_policy());
ChannelSequence counterexample_sequence(int m, const NumericPolicy& pol = default_policy());

/// Checks that per-operator strong convergence of Kraus families (on probe
/// vectors) is accompanied by channel strong convergence (on probe states).
/// kraus_per_index[0] is the limit family.
Report kraus_convergence_check(const std::vector<std::vector<Mat>>& kraus_per_index,
                               const ProbeSet& probes,
                               const NumericPolicy& pol = default_policy());

struct ConvergingDilation {
    std::vector<StinespringRep> isometries;  // per index n = 1..n_max
    Mat V0_tilde;                            // fixed limit isometry on the doubled environment
    int dim_env = 0;
    std::vector<double> enorm_gaps;          // e_norm(V_n - V0_tilde) = beta_E(Phi_n, Phi_0)
    std::vector<double> opnorm_gaps;         // ||V_n - V0_tilde|| for the bounded-set caveat
    std::vector<double> residuals;           // |achieved - beta| per index
};

/// Per-index common dilation against a fixed doubled-environment limit
/// isometry; the E-norm gaps realize the channel Bures distances.
ConvergingDilation converging_stinespring_sequence(const ChannelSequence& seq,
                                                   const EnergyObservable& obs, int n_max,
                                                   const NumericPolicy& pol = default_policy());

}  // namespace chdl
