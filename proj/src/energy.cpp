#include "chdl/energy.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <functional>
#include <limits>
#include <cmath>
#include <random>

namespace chdl {

namespace {

template <class F>
double golden_min(F&& f, double a, double b, int iters, double* xmin = nullptr) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters && (b - a) > 0; ++i) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    const double x = fc < fd ? c : d;
    if (xmin) *xmin = x;
    return std::min(fc, fd);
}

double lambda_max(const Mat& A) {
    Eigen::SelfAdjointEigenSolver<Mat> es((A + A.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

}  // namespace

EnergyObservable EnergyObservable::make(Mat H, double E, const NumericPolicy& pol) {
    if (H.rows() != H.cols()) throw std::invalid_argument("EnergyObservable: H not square");
    if (!is_hermitian(H, pol.tol_hermitian))
        throw std::invalid_argument("EnergyObservable: H not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es((H + H.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    const double e0 = es.eigenvalues().minCoeff();
    if (e0 < -pol.tol_hermitian)
        throw std::invalid_argument("EnergyObservable: H not positive semidefinite");
    if (!(E > e0))
        throw std::invalid_argument("EnergyObservable: energy bound must exceed the ground energy");
    return EnergyObservable{std::move(H), E, e0};
}

ConstrainedMax constrained_eig_max(const Mat& K, const Mat& H, double E, double E0,
                                   const NumericPolicy& pol) {
    const Eigen::Index n = K.rows();
    EigResult eh = hermitian_eig(H, pol);
    const double hmax = eh.values.maxCoeff();

    ConstrainedMax out;
    if (E >= hmax) {  // constraint inactive: plain top eigenvalue
        EigResult ek = hermitian_eig(K, pol);
        out.value = ek.values(n - 1);
        out.lambda = 0;
        out.witness = ek.vectors.col(n - 1) * ek.vectors.col(n - 1).adjoint();
        out.witness_value = out.value;
        return out;
    }

    EigResult ek = hermitian_eig(K, pol);
    const double spread = ek.values(n - 1) - ek.values(0);
    const double lam_cap = spread / (E - E0) + 1.0;

    auto g = [&](double lam) { return lam * E + lambda_max(K - lam * H); };
    double lam_star = 0;
    double dual = golden_min(g, 0.0, lam_cap, pol.golden_iters, &lam_star);
    // The dual is convex with minimum possibly at the boundary lambda = 0.
    if (g(0.0) <= dual) {
        dual = g(0.0);
        lam_star = 0;
    }
    out.value = dual;
    out.lambda = lam_star;

    // Witness: mixture of <= 2 H-eigenvectors inside the near-top eigenspace of
    // K - lambda* H, tuned to saturate the energy constraint when it binds.
    Mat M = K - lam_star * H;
    EigResult em = hermitian_eig(M, pol);
    const double top = em.values(n - 1);
    const double ctol = pol.eig_cluster * std::max(1.0, std::abs(top));
    std::vector<Eigen::Index> cluster;
    for (Eigen::Index k = 0; k < n; ++k)
        if (em.values(k) >= top - ctol) cluster.push_back(k);

    Mat B(n, static_cast<Eigen::Index>(cluster.size()));
    for (size_t j = 0; j < cluster.size(); ++j) B.col(j) = em.vectors.col(cluster[j]);
    Mat Hc = B.adjoint() * H * B;
    EigResult ec = hermitian_eig((Hc + Hc.adjoint()) / 2.0, pol);

    double best = -std::numeric_limits<double>::infinity();
    Mat best_rho;
    auto consider = [&](const Mat& rho) {
        const double en = (H * rho).trace().real();
        if (en > E + 1e-9) return;
        const double v = (K * rho).trace().real();
        if (v > best) {
            best = v;
            best_rho = rho;
        }
    };
    std::vector<Vec> ys;
    std::vector<double> energies;
    for (Eigen::Index j = 0; j < ec.values.size(); ++j) {
        Vec y = B * ec.vectors.col(j);
        y.normalize();
        ys.push_back(y);
        energies.push_back((y.adjoint() * H * y)(0).real());
    }
    for (size_t j = 0; j < ys.size(); ++j)
        if (energies[j] <= E + 1e-12) consider(ys[j] * ys[j].adjoint());
    for (size_t i = 0; i < ys.size(); ++i)
        for (size_t j = 0; j < ys.size(); ++j) {
            if (!(energies[i] < E && E < energies[j])) continue;
            const double p = (E - energies[i]) / (energies[j] - energies[i]);
            consider((1 - p) * ys[i] * ys[i].adjoint() + p * ys[j] * ys[j].adjoint());
        }
    if (best_rho.size() == 0) {
        // No feasible vector in the cluster: mix the lowest-energy cluster
        // vector with the global ground state of H.
        Vec gvec = eh.vectors.col(0);
        size_t jl = 0;
        for (size_t j = 1; j < ys.size(); ++j)
            if (energies[j] < energies[jl]) jl = j;
        const double eg = (gvec.adjoint() * H * gvec)(0).real();
        double p = (E - eg) / std::max(energies[jl] - eg, 1e-300);
        p = std::clamp(p, 0.0, 1.0);
        best_rho = (1 - p) * gvec * gvec.adjoint() + p * ys[jl] * ys[jl].adjoint();
        best = (K * best_rho).trace().real();
    }
    out.witness = best_rho;
    out.witness_value = best;
    return out;
}

EnormResult e_norm(const Mat& A, const EnergyObservable& obs, const NumericPolicy& pol) {
    if (A.cols() != obs.H.rows())
        throw std::invalid_argument("e_norm: operator columns must match the Hamiltonian dimension");
    Mat K = A.adjoint() * A;
    ConstrainedMax cm = constrained_eig_max(K, obs.H, obs.E, obs.E0, pol);
    EnormResult r;
    r.value = std::sqrt(std::max(0.0, cm.value));
    r.lambda = cm.lambda;
    r.witness = cm.witness;
    return r;
}

double e_norm_primal_oracle(const Mat& A, const EnergyObservable& obs, int grid_resolution,
                            std::uint64_t seed, const NumericPolicy& pol) {
    const int n = static_cast<int>(obs.H.rows());
    if (n > 4) throw std::invalid_argument("e_norm_primal_oracle: dimension capped at 4");
    if (A.cols() != n) throw std::invalid_argument("e_norm_primal_oracle: dimension mismatch");
    Mat K = A.adjoint() * A;
    const Mat& H = obs.H;
    const double E = obs.E;

    auto pool_value = [&](const std::vector<Vec>& pool) {
        std::vector<double> ks(pool.size()), es(pool.size());
        for (size_t i = 0; i < pool.size(); ++i) {
            ks[i] = (pool[i].adjoint() * K * pool[i])(0).real();
            es[i] = (pool[i].adjoint() * H * pool[i])(0).real();
        }
        double best = 0.0;
        for (size_t i = 0; i < pool.size(); ++i) {
            if (es[i] <= E + 1e-12) best = std::max(best, ks[i]);
            for (size_t j = 0; j < pool.size(); ++j) {
                if (!(es[i] < E && E < es[j])) continue;
                const double p = (E - es[i]) / (es[j] - es[i]);
                best = std::max(best, (1 - p) * ks[i] + p * ks[j]);
            }
        }
        return best;
    };

    EigResult ek = hermitian_eig(K, pol);
    EigResult eh = hermitian_eig(H, pol);
    const double spread = ek.values(n - 1) - ek.values(0);
    double lam_cap = spread / (E - obs.E0) + 1.0;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vec> fixed;
    for (int k = 0; k < n; ++k) fixed.push_back(ek.vectors.col(k));
    for (int k = 0; k < n; ++k) fixed.push_back(eh.vectors.col(k));
    for (int r = 0; r < 24; ++r) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
        v.normalize();
        fixed.push_back(v);
    }

    // Sweep a multiplier grid, collecting eigenvectors of K - lam H; refine
    // the grid around the best multiplier twice.
    double best = pool_value(fixed);
    double lo = 0.0, hi = lam_cap;
    for (int pass = 0; pass < 3; ++pass) {
        double best_lam = lo;
        for (int gidx = 0; gidx <= grid_resolution; ++gidx) {
            const double lam = lo + (hi - lo) * gidx / std::max(1, grid_resolution);
            EigResult em = hermitian_eig(K - lam * H, pol);
            std::vector<Vec> pool = fixed;
            for (int k = 0; k < n; ++k) pool.push_back(em.vectors.col(k));
            const double v = pool_value(pool);
            if (v > best) {
                best = v;
                best_lam = lam;
            }
        }
        const double step = (hi - lo) / std::max(1, grid_resolution);
        lo = std::max(0.0, best_lam - 2 * step);
        hi = best_lam + 2 * step;
    }
    return best;
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma, const NumericPolicy& pol) {
    if (rho.dim() != sigma.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
    Mat sr = sqrt_psd(rho.mat, pol);
    Mat inner = sr * sigma.mat * sr;
    Eigen::SelfAdjointEigenSolver<Mat> es((inner + inner.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    double s = 0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
        s += std::sqrt(std::max(0.0, es.eigenvalues()(k)));
    return std::clamp(s * s, 0.0, 1.0);
}

double bures_states(const DensityMatrix& rho, const DensityMatrix& sigma, const NumericPolicy& pol) {
    return std::sqrt(std::max(0.0, 2.0 * (1.0 - std::sqrt(fidelity(rho, sigma, pol)))));
}

CommonRep common_representation(const Channel& phi, const Channel& psi, const NumericPolicy& pol) {
    std::vector<Mat> ka = minimal_kraus(phi, pol);
    std::vector<Mat> kb = minimal_kraus(psi, pol);
    const int d_env = static_cast<int>(std::max(ka.size(), kb.size()));
    const Mat zero = Mat::Zero(phi.dim_out(), phi.dim_in());
    while (static_cast<int>(ka.size()) < d_env) ka.push_back(zero);
    while (static_cast<int>(kb.size()) < d_env) kb.push_back(zero);
    CommonRep rep;
    rep.dim_env = d_env;
    rep.V_phi = kraus_to_stinespring(phi.dim_in(), phi.dim_out(), ka).V;
    rep.V_psi = kraus_to_stinespring(psi.dim_in(), psi.dim_out(), kb).V;
    return rep;
}

namespace {

Mat env_cross_block(const Mat& V_psi, const Mat& rho, const Mat& V_phi, int dim_out, int dim_env) {
    Mat Z = V_psi * rho * V_phi.adjoint();
    return partial_trace(Z, {{dim_out, dim_env}}, 0);
}

}  // namespace

EcBuresResult ec_bures_core(const Mat& V_phi, const Mat& V_psi, int dim_out, int dim_env,
                            const EnergyObservable& obs, const NumericPolicy& pol) {
    const int dA = static_cast<int>(V_phi.cols());
    if (V_psi.cols() != dA || V_phi.rows() != V_psi.rows())
        throw std::invalid_argument("ec_bures_core: isometry shape mismatch");
    if (obs.dim() != dA)
        throw std::invalid_argument("ec_bures_core: Hamiltonian dimension mismatch");

    EigResult eh = hermitian_eig(obs.H, pol);
    Vec ground = eh.vectors.col(0);

    struct Atom {
        Mat rho;
        double w;
    };
    std::vector<Atom> atoms;
    atoms.push_back({ground * ground.adjoint(), 1.0});
    {
        Mat mm = Mat::Identity(dA, dA) / dA;
        if (obs.feasible(mm)) {
            atoms[0].w = 0.5;
            atoms.push_back({std::move(mm), 0.5});
        }
    }
    Mat rho = Mat::Zero(dA, dA);
    for (const Atom& a : atoms) rho += a.w * a.rho;

    // The trace norm is nonsmooth where singular values collide or vanish, so
    // Frank-Wolfe runs on the smoothed surrogate sum_i sqrt(sigma_i^2 + mu^2)
    // (convex, differentiable, uniform bias <= dim_env * mu) with mu annealed
    // toward zero; this keeps every linearization gap a valid certificate.
    const Mat I_B = Mat::Identity(dim_out, dim_out);
    auto smooth_tn = [&](const Mat& M, double mu) {
        Eigen::JacobiSVD<Mat> svd(M);
        double s = 0;
        for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
            s += std::sqrt(svd.singularValues()(k) * svd.singularValues()(k) + mu * mu);
        return s;
    };
    double f = 0, gap = 0;
    int it = 0;
    bool budget_left = true;
    for (double mu = 1e-2; mu >= 1e-11 && budget_left; mu /= 10.0) {
        const double level_tol = std::max(0.1 * mu, pol.fw_gap_tol);
        double best_gap = std::numeric_limits<double>::infinity();
        int stalled = 0;
        for (;; ++it) {
            if (it >= pol.fw_max_iters) {
                budget_left = false;
                break;
            }
            Mat M = env_cross_block(V_psi, rho, V_phi, dim_out, dim_env);
            Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
            f = svd.singularValues().sum();
            // d/dM of the surrogate: U diag(sigma / sqrt(sigma^2 + mu^2)) W*.
            Mat D = Mat::Zero(dim_env, dim_env);
            for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
                const double sv = svd.singularValues()(k);
                D += (sv / std::sqrt(sv * sv + mu * mu)) * svd.matrixU().col(k) *
                     svd.matrixV().col(k).adjoint();
            }
            Mat X = V_phi.adjoint() * tensor_product(I_B, D.adjoint()) * V_psi;
            Mat G = (X + X.adjoint()) / 2.0;

            ConstrainedMax cm = constrained_eig_max(-G, obs.H, obs.E, obs.E0, pol);
            gap = (G * rho).trace().real() + cm.value;  // certified FW gap at this mu
            if (gap < level_tol * std::max(1.0, f)) break;
            // The achievable gap is floored by the accuracy of the LMO witness;
            // stop the level once it no longer shrinks.
            if (gap < 0.9 * best_gap) {
                best_gap = gap;
                stalled = 0;
            } else if (++stalled > 60) {
                break;
            }

            // Pairwise step: move mass from the worst active atom toward the
            // linearization minimizer (avoids the zig-zag of plain FW).
            const Mat& s = cm.witness;
            size_t ai = 0;
            double away = -std::numeric_limits<double>::infinity();
            for (size_t k = 0; k < atoms.size(); ++k) {
                const double v = (G * atoms[k].rho).trace().real();
                if (v > away) {
                    away = v;
                    ai = k;
                }
            }
            const double gmax = atoms[ai].w;
            Mat Md = env_cross_block(V_psi, s - atoms[ai].rho, V_phi, dim_out, dim_env);
            auto h = [&](double gamma) { return smooth_tn(M + gamma * Md, mu); };
            double gstar = 0;
            golden_min(h, 0.0, gmax, 80, &gstar);
            if (gstar <= 0) gstar = std::min(gmax, 1e-12);

            rho += gstar * (s - atoms[ai].rho);
            rho = (rho + rho.adjoint()) / 2.0;
            atoms[ai].w -= gstar;
            bool merged = false;
            for (Atom& a : atoms)
                if ((a.rho - s).cwiseAbs().maxCoeff() < 1e-12) {
                    a.w += gstar;
                    merged = true;
                    break;
                }
            if (!merged) atoms.push_back({s, gstar});
            std::erase_if(atoms, [](const Atom& a) { return a.w <= 1e-14; });
        }
    }

    // Pairwise Frank-Wolfe can crawl when the minimizer sits at a nonsmooth
    // point (colliding or vanishing singular values).  For small problems,
    // polish both sides of the saddle with the ellipsoid method, which is
    // linearly convergent for nonsmooth convex programs in low dimension:
    //   primal  min_rho ||M(rho)||_1 over the feasible set,
    //   dual    max_D   min_rho Re Tr(D* M(rho)) over contractions D,
    // giving a certified two-sided bracket on the optimum.
    bool polished = false;
    double h_best = -std::numeric_limits<double>::infinity();
    Mat D_best;
    const int np = dA * dA - 1;
    const int nd = 2 * dim_env * dim_env;
    if (gap > 5e-7 * std::max(1.0, f) && np <= 8 && nd <= 18) {
        // Orthonormal traceless Hermitian basis of the input space.
        std::vector<Mat> basis;
        for (int i = 0; i < dA; ++i)
            for (int j = i + 1; j < dA; ++j) {
                Mat S = Mat::Zero(dA, dA), A = Mat::Zero(dA, dA);
                S(i, j) = S(j, i) = 1.0 / std::sqrt(2.0);
                A(i, j) = Complex(0, -1.0 / std::sqrt(2.0));
                A(j, i) = Complex(0, 1.0 / std::sqrt(2.0));
                basis.push_back(S);
                basis.push_back(A);
            }
        for (int k = 1; k < dA; ++k) {
            Mat Dk = Mat::Zero(dA, dA);
            for (int i = 0; i < k; ++i) Dk(i, i) = 1.0;
            Dk(k, k) = -k;
            basis.push_back(Dk / std::sqrt(double(k) * (k + 1)));
        }

        using RVec = Eigen::VectorXd;
        auto ellipsoid_min =
            [](int n, RVec x, double radius, int iters,
               const std::function<bool(const RVec&, double*, RVec*)>& oracle, RVec* best_x) {
                Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) * radius * radius;
                double best = std::numeric_limits<double>::infinity();
                double fv = 0;
                RVec g(n);
                for (int k = 0; k < iters; ++k) {
                    if (oracle(x, &fv, &g) && fv < best) {
                        best = fv;
                        *best_x = x;
                    }
                    RVec Pg = P * g;
                    const double denom = std::sqrt(std::max(0.0, g.dot(Pg)));
                    if (!(denom > 1e-300) || !std::isfinite(denom)) break;
                    Pg /= denom;
                    x -= Pg / (n + 1);
                    P = (double(n) * n / (double(n) * n - 1.0)) *
                        (P - (2.0 / (n + 1)) * (Pg * Pg.transpose()));
                    P = 0.5 * (P + P.transpose());
                }
                return best;
            };

        auto rho_of = [&](const RVec& u) {
            Mat r = Mat::Identity(dA, dA) / double(dA);
            for (int i = 0; i < np; ++i) r += u(i) * basis[i];
            return r;
        };
        auto primal_oracle = [&](const RVec& u, double* fv, RVec* g) {
            Mat r = rho_of(u);
            EigResult er = hermitian_eig(r, pol);
            if (er.values.minCoeff() < 0) {  // positivity cut
                Vec v = er.vectors.col(0);
                for (int i = 0; i < np; ++i) (*g)(i) = -(v.adjoint() * basis[i] * v)(0).real();
                return false;
            }
            if ((obs.H * r).trace().real() > obs.E) {  // energy cut
                for (int i = 0; i < np; ++i) (*g)(i) = (obs.H * basis[i]).trace().real();
                return false;
            }
            Mat Mr = env_cross_block(V_psi, r, V_phi, dim_out, dim_env);
            Eigen::JacobiSVD<Mat> sv(Mr, Eigen::ComputeFullU | Eigen::ComputeFullV);
            *fv = sv.singularValues().sum();
            Mat Dp = sv.matrixU() * sv.matrixV().adjoint();  // full polar: valid subgradient
            Mat X = V_phi.adjoint() * tensor_product(I_B, Dp.adjoint()) * V_psi;
            Mat Gr = (X + X.adjoint()) / 2.0;
            for (int i = 0; i < np; ++i) (*g)(i) = (Gr * basis[i]).trace().real();
            return true;
        };
        RVec u0(np);
        for (int i = 0; i < np; ++i) u0(i) = (rho * basis[i]).trace().real();
        RVec u_best = u0;
        const double fp =
            ellipsoid_min(np, u0, 2.0, std::max(600, 42 * np * (np + 1)), primal_oracle, &u_best);
        if (fp < f) rho = rho_of(u_best);

        auto D_of = [&](const RVec& u) {
            Mat D(dim_env, dim_env);
            int idx = 0;
            for (int i = 0; i < dim_env; ++i)
                for (int j = 0; j < dim_env; ++j, idx += 2) D(i, j) = Complex(u(idx), u(idx + 1));
            return D;
        };
        auto dual_oracle = [&](const RVec& u, double* fv, RVec* g) {
            Mat D = D_of(u);
            Eigen::JacobiSVD<Mat> sv(D, Eigen::ComputeThinU | Eigen::ComputeThinV);
            if (sv.singularValues()(0) > 1.0) {  // contraction cut
                Vec u1 = sv.matrixU().col(0), v1 = sv.matrixV().col(0);
                int idx = 0;
                for (int i = 0; i < dim_env; ++i)
                    for (int j = 0; j < dim_env; ++j, idx += 2) {
                        const Complex w = std::conj(u1(i)) * v1(j);
                        (*g)(idx) = w.real();
                        (*g)(idx + 1) = -w.imag();
                    }
                return false;
            }
            Mat X = V_phi.adjoint() * tensor_product(I_B, D.adjoint()) * V_psi;
            Mat Gd = (X + X.adjoint()) / 2.0;
            ConstrainedMax cm = constrained_eig_max(-Gd, obs.H, obs.E, obs.E0, pol);
            *fv = cm.value;  // = -h(D); minimizing this maximizes the dual
            Mat Mw = env_cross_block(V_psi, cm.witness, V_phi, dim_out, dim_env);
            int idx = 0;
            for (int i = 0; i < dim_env; ++i)
                for (int j = 0; j < dim_env; ++j, idx += 2) {
                    (*g)(idx) = -Mw(i, j).real();
                    (*g)(idx + 1) = -Mw(i, j).imag();
                }
            return true;
        };
        {
            Mat Mr = env_cross_block(V_psi, rho, V_phi, dim_out, dim_env);
            Eigen::JacobiSVD<Mat> sv(Mr, Eigen::ComputeFullU | Eigen::ComputeFullV);
            Mat D0m = sv.matrixU() * sv.matrixV().adjoint();
            RVec d0(nd);
            int idx = 0;
            for (int i = 0; i < dim_env; ++i)
                for (int j = 0; j < dim_env; ++j, idx += 2) {
                    d0(idx) = D0m(i, j).real();
                    d0(idx + 1) = D0m(i, j).imag();
                }
            RVec d_best = d0;
            const double neg_h =
                ellipsoid_min(nd, d0, 2.0 * std::sqrt(double(dim_env)) + 1.0,
                              std::min(12000, std::max(600, 42 * nd * (nd + 1))), dual_oracle,
                              &d_best);
            h_best = -neg_h;
            D_best = D_of(d_best);
            polished = true;
        }
    }

    Mat M = env_cross_block(V_psi, rho, V_phi, dim_out, dim_env);
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    f = svd.singularValues().sum();
    const double cut = pol.tol_rank * std::max(1.0, svd.singularValues()(0));
    Mat Dpi = Mat::Zero(dim_env, dim_env);
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
        if (svd.singularValues()(k) > cut)
            Dpi += svd.matrixU().col(k) * svd.matrixV().col(k).adjoint();
    if (polished) {
        gap = std::max(0.0, f - h_best);  // certified primal-dual bracket width
        Dpi = D_best;
    }

    EcBuresResult res;
    res.min_trace_norm = f;
    res.value = std::sqrt(std::max(0.0, 2.0 - 2.0 * f));
    res.witness_rho = rho;
    res.optimal_C = Dpi.adjoint();
    res.V_phi = V_phi;
    res.V_psi = V_psi;
    res.dim_env = dim_env;
    res.fw_gap = gap;
    res.iterations = it;
    return res;
}

EcBuresResult ec_bures_channels(const Channel& phi, const Channel& psi, const EnergyObservable& obs,
                                const NumericPolicy& pol) {
    if (phi.dim_in() != psi.dim_in() || phi.dim_out() != psi.dim_out())
        throw std::invalid_argument("ec_bures_channels: channels must share dimensions");
    CommonRep rep = common_representation(phi, psi, pol);
    return ec_bures_core(rep.V_phi, rep.V_psi, phi.dim_out(), rep.dim_env, obs, pol);
}

namespace {

struct ExtendedKraus {
    std::vector<Mat> phi, psi;  // operators tensored with the reference identity
};

ExtendedKraus extended_kraus(const Channel& phi, const Channel& psi, int dim_ref) {
    ExtendedKraus ek;
    const Mat I_R = Mat::Identity(dim_ref, dim_ref);
    for (const Mat& a : phi.kraus()) ek.phi.push_back(tensor_product(a, I_R));
    for (const Mat& a : psi.kraus()) ek.psi.push_back(tensor_product(a, I_R));
    return ek;
}

Mat difference_output(const ExtendedKraus& ek, const Mat& rho) {
    Mat X = Mat::Zero(ek.phi[0].rows(), ek.phi[0].rows());
    for (const Mat& a : ek.phi) X += a * rho * a.adjoint();
    for (const Mat& a : ek.psi) X -= a * rho * a.adjoint();
    return X;
}

}  // namespace

DiamondBracket ec_diamond_norm(const Channel& phi, const Channel& psi, const EnergyObservable& obs,
                               int restarts, const NumericPolicy& pol) {
    if (phi.dim_in() != psi.dim_in() || phi.dim_out() != psi.dim_out())
        throw std::invalid_argument("ec_diamond_norm: channels must share dimensions");
    if (obs.dim() != phi.dim_in())
        throw std::invalid_argument("ec_diamond_norm: Hamiltonian dimension mismatch");
    if (restarts < 0) restarts = pol.seesaw_restarts;

    const int dA = phi.dim_in();
    const int N = dA * dA;  // reference of input size
    Mat Ht = tensor_product(obs.H, Mat::Identity(dA, dA));
    ExtendedKraus ek = extended_kraus(phi, psi, dA);

    EigResult eh = hermitian_eig(Ht, pol);
    Vec ground = eh.vectors.col(0);

    std::mt19937_64 rng(pol.seed + 7919);
    std::normal_distribution<double> gauss(0.0, 1.0);

    double lower = 0.0;
    for (int r = 0; r <= restarts; ++r) {
        Mat rho;
        if (r == 0) {
            // maximally entangled start, pulled into the feasible set
            Vec x = Vec::Zero(N);
            for (int i = 0; i < dA; ++i) x(static_cast<Eigen::Index>(i) * dA + i) = 1.0 / std::sqrt(dA);
            const double ex = (x.adjoint() * Ht * x)(0).real();
            double t = ex <= obs.E ? 1.0 : (obs.E - obs.E0) / (ex - obs.E0);
            rho = t * x * x.adjoint() + (1 - t) * ground * ground.adjoint();
        } else {
            Vec x(N);
            for (int i = 0; i < N; ++i) x(i) = Complex(gauss(rng), gauss(rng));
            x.normalize();
            const double ex = (x.adjoint() * Ht * x)(0).real();
            double t = ex <= obs.E ? 1.0 : (obs.E - obs.E0) / (ex - obs.E0);
            rho = t * x * x.adjoint() + (1 - t) * ground * ground.adjoint();
        }

        double value = 0;
        for (int it = 0; it < pol.seesaw_max_iters; ++it) {
            Mat X = difference_output(ek, rho);
            EigResult ex = hermitian_eig((X + X.adjoint()) / 2.0, pol);
            double v = ex.values.cwiseAbs().sum();
            Mat O = Mat::Zero(X.rows(), X.cols());
            for (Eigen::Index k = 0; k < ex.values.size(); ++k)
                O += (ex.values(k) >= 0 ? 1.0 : -1.0) * ex.vectors.col(k) * ex.vectors.col(k).adjoint();
            if (v <= value + pol.seesaw_tol * std::max(1.0, value)) {
                value = std::max(value, v);
                break;
            }
            value = v;
            Mat G = Mat::Zero(N, N);
            for (const Mat& a : ek.phi) G += a.adjoint() * O * a;
            for (const Mat& a : ek.psi) G -= a.adjoint() * O * a;
            G = (G + G.adjoint()) / 2.0;
            ConstrainedMax cm = constrained_eig_max(G, Ht, obs.E, obs.E0, pol);
            rho = cm.witness;
        }
        lower = std::max(lower, value);
    }

    DiamondBracket br;
    br.lower = lower;
    br.upper = 2.0 * ec_bures_channels(phi, psi, obs, pol).value;
    return br;
}

DiamondBracket diamond_norm_unconstrained(const Channel& phi, const Channel& psi, int restarts,
                                          const NumericPolicy& pol) {
    EnergyObservable obs = EnergyObservable::make(Mat::Identity(phi.dim_in(), phi.dim_in()), 2.0, pol);
    return ec_diamond_norm(phi, psi, obs, restarts, pol);
}

}  // namespace chdl
