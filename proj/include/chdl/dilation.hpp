#pragma once

#include "chdl/channel.hpp"
#include "chdl/energy.hpp"

namespace chdl {

/// Operator W with W*W a projector.  Initial space Ran(W*W), final space Ran(WW*).
struct PartialIsometry {
    Mat W;

    static PartialIsometry make(Mat W, const NumericPolicy& pol = default_policy());
    Mat initial_projector() const { return W.adjoint() * W; }
    Mat final_projector() const { return W * W.adjoint(); }
};

/// Unitary U with U P = W, built by mapping a deterministic orthonormal basis
/// of ker(W*W) onto one of ker(WW*).  Requires equal kernel dimensions.
Mat complete_to_unitary(const PartialIsometry& w, const NumericPolicy& pol = default_policy());

struct CommonDilation {
    Mat V_phi, V_psi;   // isometries into B (x) (E1 + E2), shared environment
    int dim_out = 0;
    int dim_env = 0;    // doubled environment dimension (2 * base env)
    double beta = 0;    // beta_E(Phi, Psi) from the convex solve
    double achieved = 0;  // e_norm(V_phi - V_psi), should equal beta
    double residual = 0;  // |achieved - beta|
};

/// Common Stinespring pair achieving the energy-constrained Bures distance:
/// V_phi = V (+) 0 on the doubled environment and V_psi built from the optimal
/// contraction of the convex minimax solve.
CommonDilation common_dilation(const Channel& phi, const Channel& psi, const EnergyObservable& obs,
                               const NumericPolicy& pol = default_policy());

/// Re-represents Psi on the *given* environment of V_phi so that the E-norm
/// gap is at most 2 beta_E(Phi, Psi) + eps.  Requires Choi rank of Psi <= dim_env.
StinespringRep fixed_rep_approximation(const StinespringRep& v_phi, int dim_in, int dim_out,
                                       const Channel& psi, const EnergyObservable& obs,
                                       double eps = 1e-6,
                                       const NumericPolicy& pol = default_policy());

/// Lemma-style converging unitary completions: given partial isometries V_n
/// sharing the initial projector of V_0 and a unitary U_0 with U_0 P = V_0,
/// returns unitaries U_n with U_n P = V_n, converging whenever V_n does.
/// Requires ||R_n - R_0|| < 1 with R_n = I - V_n V_n*.
std::vector<Mat> unitary_sequence_udc(const std::vector<Mat>& Vs, const Mat& V0, const Mat& U0,
                                      const NumericPolicy& pol = default_policy());

struct UnitaryDilation {
    Mat U;          // unitary from A (x) D onto B (x) E'
    Mat sigma0;     // pure state on D
    int dim_D = 0;  // B * E
    int dim_Eprime = 0;  // A * E
    int dim_env = 0;     // E of the underlying Stinespring isometry
};

/// Phi(rho) = Tr_E' U (rho (x) sigma0) U* with D = B*E, E' = A*E.
UnitaryDilation universal_unitary_dilation(const Channel& phi,
                                           const NumericPolicy& pol = default_policy());

/// Reconstructs the channel encoded by a unitary dilation (for validation).
Channel channel_from_unitary_dilation(const UnitaryDilation& ud, int dim_in, int dim_out,
                                      const NumericPolicy& pol = default_policy());

/// Interleaves two (dB*dE x dA) blocks into one isometry into B (x) (E1 + E2).
Mat stack_env(const Mat& top, const Mat& bottom, int dim_out, int dim_env);

}  // namespace chdl
