#pragma once

#include "chdl/channel.hpp"
#include "chdl/linalg.hpp"

namespace chdl {

/// Positive semidefinite Hamiltonian H with an energy bound E > E0 defining
/// the feasible state set { rho : Tr H rho <= E }.
struct EnergyObservable {
    Mat H;
    double E = 0;
    double E0 = 0;  // smallest eigenvalue of H

    static EnergyObservable make(Mat H, double E, const NumericPolicy& pol = default_policy());
    int dim() const { return static_cast<int>(H.rows()); }
    bool feasible(const Mat& rho, double slack = 1e-10) const {
        return (H * rho).trace().real() <= E + slack;
    }
};

struct ConstrainedMax {
    double value = 0;          // dual optimum min_{l>=0} [ l E + lmax(K - l H) ]
    double lambda = 0;         // dual minimizer
    Mat witness;               // feasible state, mixture of <= 2 eigenvectors
    double witness_value = 0;  // Tr(K witness) <= value
};

/// max Tr(K rho) over density matrices with Tr(H rho) <= E, K Hermitian.
/// Strong duality holds since E > E0 yields a strictly feasible state.
ConstrainedMax constrained_eig_max(const Mat& K, const Mat& H, double E, double E0,
                                   const NumericPolicy& pol = default_policy());

struct EnormResult {
    double value = 0;   // ||A||_E
    double lambda = 0;  // optimal dual multiplier
    Mat witness;        // feasible state achieving (numerically) the supremum
};

/// Operator E-norm: sup sqrt(Tr A rho A*) over the feasible state set.
EnormResult e_norm(const Mat& A, const EnergyObservable& obs,
                   const NumericPolicy& pol = default_policy());

/// Independent brute-force lower bound on ||A||_E^2: maximizes over two-point
/// mixtures drawn from an eigenvector/random candidate pool.  Never consults
/// the dual path.  Dimension capped at 4.
double e_norm_primal_oracle(const Mat& A, const EnergyObservable& obs, int grid_resolution,
                            std::uint64_t seed = 1, const NumericPolicy& pol = default_policy());

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma,
                const NumericPolicy& pol = default_policy());
double bures_states(const DensityMatrix& rho, const DensityMatrix& sigma,
                    const NumericPolicy& pol = default_policy());

struct EcBuresResult {
    double value = 0;          // beta_E(Phi, Psi)
    Mat witness_rho;           // minimizing feasible input state
    Mat optimal_C;             // contraction achieving the common-dilation infimum
    Mat V_phi, V_psi;          // common Stinespring isometries used (env = dim_env)
    int dim_env = 0;
    double min_trace_norm = 0; // min_rho ||Tr_B(V_psi rho V_phi*)||_1
    double fw_gap = 0;         // final Frank-Wolfe duality gap
    int iterations = 0;
};

/// Energy-constrained Bures distance between channels, computed by minimizing
/// rho -> ||Tr_B(V_psi rho V_phi*)||_1 over the feasible set (Frank-Wolfe with
/// an energy-constrained eigenvalue problem as linearization oracle).
EcBuresResult ec_bures_channels(const Channel& phi, const Channel& psi, const EnergyObservable& obs,
                                const NumericPolicy& pol = default_policy());

/// Same computation on explicitly given common Stinespring isometries.
EcBuresResult ec_bures_core(const Mat& V_phi, const Mat& V_psi, int dim_out, int dim_env,
                            const EnergyObservable& obs, const NumericPolicy& pol = default_policy());

struct DiamondBracket {
    double lower = 0;  // best see-saw value, a certified lower bound
    double upper = 0;  // 2 * beta_E
};

/// Energy-constrained diamond norm of Phi - Psi, reported as a bracket.
DiamondBracket ec_diamond_norm(const Channel& phi, const Channel& psi, const EnergyObservable& obs,
                               int restarts = -1, const NumericPolicy& pol = default_policy());

/// Unconstrained diamond norm via a vacuous constraint (H = I, E = 2).
DiamondBracket diamond_norm_unconstrained(const Channel& phi, const Channel& psi,
                                          int restarts = -1,
                                          const NumericPolicy& pol = default_policy());

/// Pad both channels to a common environment of dimension max(Choi ranks);
/// returns the two isometries and the environment dimension.
struct CommonRep {
    Mat V_phi, V_psi;
    int dim_env = 0;
};
CommonRep common_representation(const Channel& phi, const Channel& psi,
                                const NumericPolicy& pol = default_policy());

}  // namespace chdl
