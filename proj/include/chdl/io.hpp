#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "chdl/channel.hpp"
#include "chdl/convergence.hpp"
#include "chdl/entropy.hpp"

namespace chdl {

// Complex entries serialize as [re, im] pairs, matrices as row-major nested
// arrays; lossless at double precision.

nlohmann::json mat_to_json(const Mat& m);
Mat mat_from_json(const nlohmann::json& j);

/// {"dim_in", "dim_out", "repr": "kraus"|"stinespring"|"choi", "data", ["dim_env"]}
nlohmann::json channel_to_json(const Channel& ch);
Channel channel_from_json(const nlohmann::json& j, const NumericPolicy& pol = default_policy());

/// {"weights": [...], "states": [matrix...]}
nlohmann::json ensemble_to_json(const DiscreteEnsemble& mu);
DiscreteEnsemble ensemble_from_json(const nlohmann::json& j,
                                    const NumericPolicy& pol = default_policy());

nlohmann::json load_json_file(const std::string& path);

/// Floats with 17 significant digits, '.' decimal, no locale.
std::string format_double(double x);

void write_report_csv(const std::string& path, const Report& rep);
std::string report_to_csv(const Report& rep);

}  // namespace chdl
