#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "truncpoly/mle.hpp"
#include "truncpoly/verify.hpp"

namespace truncpoly {

using Json = nlohmann::ordered_json;

// all emitted JSON artifacts carry this version tag
inline constexpr const char* kSchemaVersion = "1";

Json poly_to_json(const PolyCoeffs& p);
PolyCoeffs poly_from_json(const Json& j);

// d = 1 interval unions only; {"d": 1, "intervals": [[a, b], ...]}
Json set_to_json(const SurvivalSet& S);
SurvivalSet set_from_json(const Json& j);

// CLI set grammar: "cube", or an interval union like "[0,0.5]" or
// "[0,0.3]U[0.6,1]" (d = 1 only)
SurvivalSet parse_set_spec(const std::string& spec, int d);

std::string quad_mode_name(QuadMode mode);
QuadMode quad_mode_from_name(const std::string& name);
Json quad_to_json(const QuadratureSpec& spec);
QuadratureSpec quad_from_json(const Json& j);

// config file keys: degree, bound_C, steps, step_size, seed, averaging,
// quadrature.mode, quadrature.resolution. Unknown keys are an error.
FitConfig fit_config_from_json(const Json& j);
Json fit_config_to_json(const FitConfig& cfg);

Json fit_report_to_json(const FitReport& report);
Json check_report_to_json(const CheckReport& report);

void write_text_file(const std::string& path, const std::string& body);
// one row per point, header x1..xd
void write_samples_csv(const std::string& path, const Mat& points);
// arbitrary numeric table with a mandatory header row
void write_table_csv(const std::string& path, const std::vector<std::string>& columns,
                     const Mat& rows);

std::string format_double(double v);  // shortest exact round-trip form

}  // namespace truncpoly
