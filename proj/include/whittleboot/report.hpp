#pragma once

#include "whittleboot/bootstrap.hpp"
#include "whittleboot/simulation.hpp"
#include "whittleboot/sunspot.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace whittleboot {

using Json = nlohmann::ordered_json;

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Vector vector_from_json(const Json& j);
Matrix matrix_from_json(const Json& j);

Json fit_report(const ParamEstimate& fit, const ParamEstimate& centre, double bandwidth,
                const SpectralFamily& family, const Variant& variant, Eigen::Index n);

/// Quantiles (1, 2.5, 5, 50, 95, 97.5, 99 %), 95% percentile CIs and diagnostics.
Json bootstrap_summary(const BootstrapResult& result, const SpectralFamily& family,
                       const BootstrapConfig& config);

/// B rows, m columns, header L1..Lm.
void write_samples_csv(const BootstrapDistribution& dist, std::ostream& out);

Json experiment_summary(const ExperimentResult& result, const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const Json& j);

Json sunspot_report(const SunspotAnalysis& a);

/// Canonical text form used for every report file.
std::string dump(const Json& j);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace whittleboot
