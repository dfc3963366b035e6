#include "chdl/io.hpp"

#include <cstdio>
#include <fstream>

namespace chdl {

using nlohmann::json;

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat mat_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw std::invalid_argument("matrix JSON must be a nested array");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != cols)
            throw std::invalid_argument("matrix JSON rows have unequal length");
        for (Eigen::Index k = 0; k < cols; ++k) {
            const auto& e = j[i][k];
            if (e.is_number()) {
                m(i, k) = Complex(e.get<double>(), 0.0);
            } else if (e.is_array() && e.size() == 2) {
                m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
            } else {
                throw std::invalid_argument("matrix entry must be a number or an [re, im] pair");
            }
        }
    }
    return m;
}

json channel_to_json(const Channel& ch) {
    json j;
    j["dim_in"] = ch.dim_in();
    j["dim_out"] = ch.dim_out();
    j["repr"] = "kraus";
    json data = json::array();
    for (const Mat& a : ch.kraus()) data.push_back(mat_to_json(a));
    j["data"] = std::move(data);
    return j;
}

Channel channel_from_json(const json& j, const NumericPolicy& pol) {
    const int dim_in = j.at("dim_in").get<int>();
    const int dim_out = j.at("dim_out").get<int>();
    const std::string repr = j.at("repr").get<std::string>();
    if (repr == "kraus") {
        std::vector<Mat> ops;
        for (const auto& a : j.at("data")) ops.push_back(mat_from_json(a));
        return Channel::from_kraus(dim_in, dim_out, std::move(ops), pol);
    }
    if (repr == "stinespring") {
        const int dim_env = j.at("dim_env").get<int>();
        return Channel::from_stinespring(dim_in, dim_out, dim_env, mat_from_json(j.at("data")), pol);
    }
    if (repr == "choi")
        return Channel::from_choi(dim_in, dim_out, mat_from_json(j.at("data")), pol);
    throw std::invalid_argument("channel repr must be kraus, stinespring or choi");
}

json ensemble_to_json(const DiscreteEnsemble& mu) {
    json j;
    j["weights"] = mu.weights;
    json states = json::array();
    for (const auto& s : mu.states) states.push_back(mat_to_json(s.mat));
    j["states"] = std::move(states);
    return j;
}

DiscreteEnsemble ensemble_from_json(const json& j, const NumericPolicy& pol) {
    std::vector<double> weights = j.at("weights").get<std::vector<double>>();
    std::vector<DensityMatrix> states;
    for (const auto& s : j.at("states")) states.push_back(DensityMatrix::make(mat_from_json(s), pol));
    return DiscreteEnsemble::make(std::move(weights), std::move(states), pol);
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string report_to_csv(const Report& rep) {
    std::string out = "n,probe_id,metric,value\n";
    for (const ReportRow& r : rep)
        out += std::to_string(r.n) + "," + r.probe + "," + r.metric + "," + format_double(r.value) + "\n";
    return out;
}

void write_report_csv(const std::string& path, const Report& rep) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << report_to_csv(rep);
}

}  // namespace chdl
