#pragma once

#include <cstdint>

namespace chdl {

// Every approximation threshold used anywhere in the library lives here, so
// that a run can be audited (and reproduced) from one record.
struct NumericPolicy {
    double tol_hermitian = 1e-10;   // Hermiticity check for eigensolver inputs
    double tol_psd = 1e-10;         // eigenvalue clamping floor for matrix square roots
    double psd_hard_floor = -1e-6;  // eigenvalues below this are genuine indefiniteness
    double tol_isometry = 1e-9;     // V*V = I residual for Stinespring isometries
    double tol_trace = 1e-10;       // trace-one check for density matrices
    double tol_choi = 1e-8;         // canonical channel equality (Choi trace distance)
    double tol_rank = 1e-8;         // eigenvalue threshold for Choi rank / kernel dims
    double tol_support = 1e-10;     // support detection in relative entropy
    double eig_cluster = 1e-7;      // width of the top eigenspace used for witnesses
    double fw_gap_tol = 1e-12;      // Frank-Wolfe duality-gap stopping criterion
    int fw_max_iters = 5000;
    int golden_iters = 90;          // golden-section iterations (0.618^90 ~ 2e-19 shrinkage)
    int seesaw_restarts = 8;
    int seesaw_max_iters = 200;
    double seesaw_tol = 1e-12;
    std::uint64_t seed = 0;
};

inline const NumericPolicy& default_policy() {
    static const NumericPolicy p{};
    return p;
}

}  // namespace chdl
