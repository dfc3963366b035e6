#pragma once

#include <string>
#include <variant>
#include <vector>

#include "chdl/linalg.hpp"

namespace chdl {

/// Unit-trace positive semidefinite matrix.
struct DensityMatrix {
    Mat mat;

    static DensityMatrix make(Mat m, const NumericPolicy& pol = default_policy());
    /// Skips validation; for intermediate values known valid by construction.
    static DensityMatrix unchecked(Mat m) { return DensityMatrix{std::move(m)}; }
    int dim() const { return static_cast<int>(mat.rows()); }
};

struct KrausRep {
    std::vector<Mat> ops;  // each dim_out x dim_in
};

struct StinespringRep {
    int dim_env = 0;
    Mat V;  // (dim_out * dim_env) x dim_in isometry, row index b*dim_env + e
};

struct ChoiRep {
    Mat mat;  // (dim_in * dim_out) square, row index a*dim_out + b, unnormalized
};

/// CPTP map stored in whichever representation it was built from.
/// Conversions are value-returning; a Channel is never mutated after creation.
class Channel {
public:
    static Channel from_kraus(int dim_in, int dim_out, std::vector<Mat> ops,
                              const NumericPolicy& pol = default_policy());
    static Channel from_stinespring(int dim_in, int dim_out, int dim_env, Mat V,
                                    const NumericPolicy& pol = default_policy());
    static Channel from_choi(int dim_in, int dim_out, Mat choi,
                             const NumericPolicy& pol = default_policy());

    static Channel identity(int dim);
    static Channel depolarizing(int dim);  // completely depolarizing, output I/d
    static Channel unitary(const Mat& U, const NumericPolicy& pol = default_policy());

    int dim_in() const { return dim_in_; }
    int dim_out() const { return dim_out_; }
    const char* repr_name() const;

    std::vector<Mat> kraus() const;
    StinespringRep stinespring() const;

private:
    Channel() = default;
    int dim_in_ = 0, dim_out_ = 0;
    std::variant<KrausRep, StinespringRep, ChoiRep> rep_;
    friend Mat choi_matrix(const Channel&);
};

DensityMatrix apply(const Channel& ch, const DensityMatrix& rho,
                    const NumericPolicy& pol = default_policy());
/// Heisenberg-picture dual map: Tr Phi(rho) B = Tr Phi*(B) rho.
Mat dual_apply(const Channel& ch, const Mat& B);
/// Environment-output channel of the same dilation: rho -> Tr_B V rho V*.
Channel complementary(const Channel& ch, const NumericPolicy& pol = default_policy());

Mat choi_matrix(const Channel& ch);
int choi_rank(const Channel& ch, const NumericPolicy& pol = default_policy());

/// Trace-norm distance of Choi matrices, the canonical channel equality test.
double choi_distance(const Channel& a, const Channel& b);

struct ChannelDiagnostics {
    bool pass = true;
    double normalization_residual = 0;  // ||sum A_i* A_i - I|| or ||V*V - I||
    double choi_psd_residual = 0;       // most negative Choi eigenvalue, clamped at 0
    double choi_trace_residual = 0;     // ||Tr_B Choi - I_A||
    std::string detail;
};

ChannelDiagnostics validate(const Channel& ch, const NumericPolicy& pol = default_policy());

/// Standard isometric extension: V|phi> = sum_i A_i|phi> (x) |tau_i>.
StinespringRep kraus_to_stinespring(int dim_in, int dim_out, const std::vector<Mat>& ops);
/// Environment-basis slices of V: <psi|A_i|phi> = <psi (x) tau_i|V|phi>.
std::vector<Mat> stinespring_to_kraus(int dim_in, int dim_out, const StinespringRep& rep);

/// Minimal Kraus list (Choi eigendecomposition, rank many operators).
std::vector<Mat> minimal_kraus(const Channel& ch, const NumericPolicy& pol = default_policy());

}  // namespace chdl
