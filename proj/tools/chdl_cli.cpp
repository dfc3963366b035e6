// Command-line front end: loads matrices, channels, and ensembles from JSON,
// runs the library computations, and emits deterministic JSON/CSV reports with
// full provenance (seed, tolerances, iteration counts, thread cap).

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "chdl/convergence.hpp"
#include "chdl/dilation.hpp"
#include "chdl/entropy.hpp"
#include "chdl/io.hpp"

namespace {

constexpr const char* kVersion = "chdl 1.0.0";

constexpr int kExitParse = 2;        // unreadable/invalid input
constexpr int kExitInfeasible = 3;   // energy bound E <= E0
constexpr int kExitNoConverge = 4;   // solver failed to reach its tolerance

using chdl::Mat;
using json = nlohmann::ordered_json;

struct Options {
    std::uint64_t seed = 0;
    double tol = 0;   // 0 = library default
    int iters = 0;    // 0 = library default
    chdl::LogBase log_base = chdl::LogBase::Nats;
    std::string out;
};

chdl::NumericPolicy make_policy(const Options& opt) {
    chdl::NumericPolicy pol;
    pol.seed = opt.seed;
    if (opt.tol > 0) {
        pol.fw_gap_tol = opt.tol;
        pol.seesaw_tol = opt.tol;
    }
    if (opt.iters > 0) {
        pol.fw_max_iters = opt.iters;
        pol.seesaw_max_iters = opt.iters;
    }
    return pol;
}

int thread_cap() {
    if (const char* env = std::getenv("CHDL_NUM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

json provenance(const Options& opt, const chdl::NumericPolicy& pol) {
    json p;
    p["version"] = kVersion;
    p["seed"] = opt.seed;
    p["log_base"] = opt.log_base == chdl::LogBase::Bits ? "bits" : "nats";
    p["num_threads"] = thread_cap();
    json q;
    q["tol_isometry"] = pol.tol_isometry;
    q["tol_choi"] = pol.tol_choi;
    q["tol_rank"] = pol.tol_rank;
    q["eig_cluster"] = pol.eig_cluster;
    q["fw_gap_tol"] = pol.fw_gap_tol;
    q["fw_max_iters"] = pol.fw_max_iters;
    q["golden_iters"] = pol.golden_iters;
    q["seesaw_restarts"] = pol.seesaw_restarts;
    q["seesaw_max_iters"] = pol.seesaw_max_iters;
    p["policy"] = std::move(q);
    return p;
}

void emit(const json& doc, const Options& opt) {
    const std::string text = doc.dump(2) + "\n";
    if (!opt.out.empty()) {
        std::ofstream f(opt.out);
        if (!f) throw std::runtime_error("cannot open output file: " + opt.out);
        f << text;
    } else {
        std::cout << text;
    }
}

json report_json(const chdl::Report& rep) {
    json rows = json::array();
    for (const chdl::ReportRow& r : rep) {
        json row;
        row["n"] = r.n;
        row["probe_id"] = r.probe;
        row["metric"] = r.metric;
        row["value"] = r.value;
        rows.push_back(std::move(row));
    }
    return rows;
}

chdl::EnergyObservable load_obs(const std::string& h_file, double E,
                                const chdl::NumericPolicy& pol) {
    Mat H = chdl::mat_from_json(chdl::load_json_file(h_file));
    return chdl::EnergyObservable::make(std::move(H), E, pol);
}

int run(int argc, char** argv) {
    CLI::App app{"Numerical toolkit for finite-dimensional quantum channels: "
                 "energy-constrained metrics, Stinespring dilations, strong-convergence "
                 "experiments, and entropic quantities"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may appear after the subcommand

    Options opt;
    app.add_option("--seed", opt.seed, "random seed recorded in every report");
    app.add_option("--tol", opt.tol, "override solver stopping tolerances");
    app.add_option("--iters", opt.iters, "override solver iteration caps");
    app.add_option("--out", opt.out, "write the report to a file instead of stdout");
    bool bits = false;
    app.add_flag("--log-base-bits,--bits", bits, "report entropies in bits (default nats)");

    // enorm
    auto* c_enorm = app.add_subcommand("enorm", "operator E-norm of a matrix");
    std::string a_file, h_file, phi_file, psi_file, ens_file;
    double E = 0;
    int sweep = 0;
    c_enorm->add_option("matrix", a_file, "operator JSON file")->required();
    c_enorm->add_option("hamiltonian", h_file, "Hamiltonian JSON file")->required();
    c_enorm->add_option("energy", E, "energy bound E")->required();
    c_enorm->add_option("--sweep", sweep, "also evaluate an E-grid of this many points");

    // bures
    auto* c_bures = app.add_subcommand("bures", "energy-constrained Bures distance");
    c_bures->add_option("phi", phi_file, "first channel JSON file")->required();
    c_bures->add_option("psi", psi_file, "second channel JSON file")->required();
    c_bures->add_option("hamiltonian", h_file, "Hamiltonian JSON file")->required();
    c_bures->add_option("energy", E, "energy bound E")->required();

    // diamond
    auto* c_diamond = app.add_subcommand("diamond", "diamond-norm bracket of a channel difference");
    int restarts = -1;
    std::string dia_h;
    double dia_E = 0;
    c_diamond->add_option("phi", phi_file)->required();
    c_diamond->add_option("psi", psi_file)->required();
    c_diamond->add_option("--hamiltonian", dia_h, "energy constraint Hamiltonian (default none)");
    c_diamond->add_option("--energy", dia_E, "energy bound (with --hamiltonian)");
    c_diamond->add_option("--restarts", restarts, "see-saw restarts");

    // dilate
    auto* c_dilate = app.add_subcommand("dilate", "optimal common Stinespring dilation");
    c_dilate->add_option("phi", phi_file)->required();
    c_dilate->add_option("psi", psi_file)->required();
    c_dilate->add_option("hamiltonian", h_file)->required();
    c_dilate->add_option("energy", E)->required();

    // udc
    auto* c_udc = app.add_subcommand(
        "udc", "converging unitary completions of partial isometries sharing an initial projector");
    std::string udc_file;
    c_udc->add_option("input", udc_file, "JSON file {\"V0\": matrix, \"Vs\": [matrix...]}")
        ->required();

    // counterexample
    auto* c_cex = app.add_subcommand("counterexample",
                                     "strong-convergence counterexample forward/dual dichotomy");
    int m = 16, n_max = 0;
    c_cex->add_option("m", m, "truncation parameter")->required();
    c_cex->add_option("--n-max", n_max, "largest sequence index (default m)");

    // disturbance
    auto* c_dist = app.add_subcommand("disturbance", "entropic disturbance of an ensemble");
    c_dist->add_option("channel", phi_file)->required();
    c_dist->add_option("ensemble", ens_file)->required();

    // converge
    auto* c_conv = app.add_subcommand("converge", "convergence report for a built-in family");
    std::string family = "rotation";
    c_conv->add_option("family", family, "rotation | counterexample:<m>")->required();
    c_conv->add_option("--n-max", n_max, "largest sequence index");

    // validate
    auto* c_val = app.add_subcommand("validate", "validate a channel file");
    c_val->add_option("channel", phi_file)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitParse;
    }

    opt.log_base = bits ? chdl::LogBase::Bits : chdl::LogBase::Nats;
    chdl::NumericPolicy pol = make_policy(opt);
    json doc;
    doc["provenance"] = provenance(opt, pol);

    if (*c_enorm) {
        Mat A = chdl::mat_from_json(chdl::load_json_file(a_file));
        chdl::EnergyObservable obs = load_obs(h_file, E, pol);
        chdl::EnormResult r = chdl::e_norm(A, obs, pol);
        doc["command"] = "enorm";
        doc["value"] = r.value;
        doc["lambda"] = r.lambda;
        doc["witness"] = chdl::mat_to_json(r.witness);
        if (sweep > 0) {
            json grid = json::array();
            for (int k = 1; k <= sweep; ++k) {
                const double Ek = obs.E0 + (E - obs.E0) * k / sweep;
                chdl::EnergyObservable ok = chdl::EnergyObservable::make(obs.H, Ek, pol);
                json row;
                row["E"] = Ek;
                const double v = chdl::e_norm(A, ok, pol).value;
                row["value"] = v;
                row["value_sq"] = v * v;
                grid.push_back(std::move(row));
            }
            doc["sweep"] = std::move(grid);
        }
        emit(doc, opt);
        return 0;
    }

    if (*c_bures) {
        chdl::Channel phi = chdl::channel_from_json(chdl::load_json_file(phi_file), pol);
        chdl::Channel psi = chdl::channel_from_json(chdl::load_json_file(psi_file), pol);
        chdl::EnergyObservable obs = load_obs(h_file, E, pol);
        chdl::EcBuresResult r = chdl::ec_bures_channels(phi, psi, obs, pol);
        doc["command"] = "bures";
        doc["value"] = r.value;
        doc["min_trace_norm"] = r.min_trace_norm;
        doc["fw_gap"] = r.fw_gap;
        doc["iterations"] = r.iterations;
        emit(doc, opt);
        return r.fw_gap <= 1e-5 * std::max(1.0, r.min_trace_norm) ? 0 : kExitNoConverge;
    }

    if (*c_diamond) {
        chdl::Channel phi = chdl::channel_from_json(chdl::load_json_file(phi_file), pol);
        chdl::Channel psi = chdl::channel_from_json(chdl::load_json_file(psi_file), pol);
        chdl::DiamondBracket br =
            dia_h.empty() ? chdl::diamond_norm_unconstrained(phi, psi, restarts, pol)
                          : chdl::ec_diamond_norm(phi, psi, load_obs(dia_h, dia_E, pol), restarts,
                                                  pol);
        doc["command"] = "diamond";
        doc["lower"] = br.lower;
        doc["upper"] = br.upper;
        emit(doc, opt);
        return 0;
    }

    if (*c_dilate) {
        chdl::Channel phi = chdl::channel_from_json(chdl::load_json_file(phi_file), pol);
        chdl::Channel psi = chdl::channel_from_json(chdl::load_json_file(psi_file), pol);
        chdl::EnergyObservable obs = load_obs(h_file, E, pol);
        chdl::CommonDilation cd = chdl::common_dilation(phi, psi, obs, pol);
        doc["command"] = "dilate";
        doc["beta"] = cd.beta;
        doc["achieved"] = cd.achieved;
        doc["residual"] = cd.residual;
        doc["dim_env"] = cd.dim_env;
        doc["V_phi"] = chdl::mat_to_json(cd.V_phi);
        doc["V_psi"] = chdl::mat_to_json(cd.V_psi);
        const int dA = phi.dim_in();
        const Mat I = Mat::Identity(dA, dA);
        doc["isometry_residual_phi"] =
            (cd.V_phi.adjoint() * cd.V_phi - I).cwiseAbs().maxCoeff();
        doc["isometry_residual_psi"] =
            (cd.V_psi.adjoint() * cd.V_psi - I).cwiseAbs().maxCoeff();
        doc["reconstruction_phi"] = chdl::choi_distance(
            phi, chdl::Channel::from_stinespring(dA, cd.dim_out, cd.dim_env, cd.V_phi, pol));
        doc["reconstruction_psi"] = chdl::choi_distance(
            psi, chdl::Channel::from_stinespring(dA, cd.dim_out, cd.dim_env, cd.V_psi, pol));
        emit(doc, opt);
        return cd.residual <= 1e-5 ? 0 : kExitNoConverge;
    }

    if (*c_udc) {
        json in = chdl::load_json_file(udc_file);
        Mat V0 = chdl::mat_from_json(in.at("V0"));
        std::vector<Mat> Vs;
        for (const auto& v : in.at("Vs")) Vs.push_back(chdl::mat_from_json(v));
        Mat U0 = chdl::complete_to_unitary(chdl::PartialIsometry::make(V0, pol), pol);
        std::vector<Mat> Us = chdl::unitary_sequence_udc(Vs, V0, U0, pol);
        doc["command"] = "udc";
        doc["U0"] = chdl::mat_to_json(U0);
        json list = json::array();
        Mat P = V0.adjoint() * V0;
        for (size_t i = 0; i < Us.size(); ++i) {
            json row;
            row["n"] = i + 1;
            row["U"] = chdl::mat_to_json(Us[i]);
            row["unitarity_residual"] =
                (Us[i].adjoint() * Us[i] - Mat::Identity(Us[i].cols(), Us[i].cols()))
                    .cwiseAbs()
                    .maxCoeff();
            row["action_residual"] = (Us[i] * P - Vs[i]).cwiseAbs().maxCoeff();
            row["gap_to_U0"] = chdl::operator_norm(Us[i] - U0);
            list.push_back(std::move(row));
        }
        doc["sequence"] = std::move(list);
        emit(doc, opt);
        return 0;
    }

    if (*c_cex) {
        if (n_max <= 0) n_max = m;
        chdl::ChannelSequence seq = chdl::counterexample_sequence(m, pol);
        chdl::ProbeSet probes;  // probes on a fixed low-energy subspace
        const int d = m + 1;
        for (int i = 0; i < std::min(m, 4); ++i) {
            chdl::Vec e = chdl::Vec::Zero(d);
            e(i) = 1.0;
            probes.states.push_back(chdl::DensityMatrix::unchecked(e * e.adjoint()));
            probes.state_names.push_back("tau_" + std::to_string(i + 1));
        }
        chdl::Report rep = chdl::strong_convergence_report(seq, probes, n_max, pol);
        Mat B = Mat::Zero(d, d);
        B(d - 1, 0) = 1.0;  // |psi><tau_1|
        chdl::Vec tau1 = chdl::Vec::Zero(d);
        tau1(0) = 1.0;
        chdl::Report dual = chdl::dual_convergence_report(seq, B, {tau1}, n_max, pol);
        rep.insert(rep.end(), dual.begin(), dual.end());
        doc["command"] = "counterexample";
        doc["m"] = m;
        doc["rows"] = report_json(rep);
        emit(doc, opt);
        if (!opt.out.empty()) chdl::write_report_csv(opt.out + ".csv", rep);
        return 0;
    }

    if (*c_dist) {
        chdl::Channel phi = chdl::channel_from_json(chdl::load_json_file(phi_file), pol);
        chdl::DiscreteEnsemble mu = chdl::ensemble_from_json(chdl::load_json_file(ens_file), pol);
        doc["command"] = "disturbance";
        doc["chi_input"] = chdl::holevo_chi(mu, opt.log_base, pol);
        doc["chi_output"] =
            chdl::holevo_chi(chdl::image_ensemble(phi, mu, pol), opt.log_base, pol);
        doc["disturbance"] = chdl::entropic_disturbance(phi, mu, opt.log_base, pol);
        emit(doc, opt);
        return 0;
    }

    if (*c_conv) {
        chdl::ChannelSequence seq = [&] {
            if (family.rfind("counterexample:", 0) == 0) {
                const int mm = std::stoi(family.substr(family.find(':') + 1));
                return chdl::counterexample_sequence(mm, pol);
            }
            if (family == "rotation") {
                return chdl::ChannelSequence{
                    chdl::Channel::identity(2),
                    [](int n) {
                        const double th = std::pow(2.0, -n);
                        Mat R(2, 2);
                        R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
                        return chdl::Channel::unitary(R);
                    },
                    20};
            }
            throw std::runtime_error("unknown family: " + family);
        }();
        if (n_max <= 0) n_max = seq.max_index;
        chdl::ProbeSet probes = chdl::ProbeSet::defaults(seq.limit.dim_in(), opt.seed, pol);
        chdl::Report rep = chdl::strong_convergence_report(seq, probes, n_max, pol);
        doc["command"] = "converge";
        doc["family"] = family;
        doc["rows"] = report_json(rep);
        emit(doc, opt);
        if (!opt.out.empty()) chdl::write_report_csv(opt.out + ".csv", rep);
        return 0;
    }

    if (*c_val) {
        chdl::Channel ch = chdl::channel_from_json(chdl::load_json_file(phi_file), pol);
        chdl::ChannelDiagnostics d = chdl::validate(ch, pol);
        doc["command"] = "validate";
        doc["pass"] = d.pass;
        doc["normalization_residual"] = d.normalization_residual;
        doc["choi_psd_residual"] = d.choi_psd_residual;
        doc["choi_trace_residual"] = d.choi_trace_residual;
        doc["choi_rank"] = chdl::choi_rank(ch, pol);
        emit(doc, opt);
        return d.pass ? 0 : 1;
    }

    return kExitParse;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        // Infeasible energy bounds are a dedicated failure mode.
        if (msg.find("energy bound") != std::string::npos) return kExitInfeasible;
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
}
