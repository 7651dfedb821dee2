#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <span>
#include <vector>

#include "ipp/envdata.hpp"
#include "ipp/estimator.hpp"
#include "ipp/evaluate.hpp"
#include "ipp/lambda_select.hpp"

namespace ipp {

using Json = nlohmann::ordered_json;

Json to_json(const ModelParams& params);
ModelParams params_from_json(const Json& j);

Json to_json(const ScmSpec& spec);
ScmSpec spec_from_json(const Json& j);

Json to_json(const FitPath& path);
FitPath fitpath_from_json(const Json& j);

Json to_json(const LambdaChoice& choice);

/// {"version", "seed", "config"} block embedded in every output file.
Json make_metadata(std::uint64_t seed, const Json& config);

/// Pretty-printed JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

/// Long format lambda,field,value; field names like beta0, beta3, gamma1,
/// risk_env2, penalty, objective, pooled_risk.
void write_fitpath_csv(std::ostream& out, const FitPath& path);
void write_replication_csv(std::ostream& out, std::span<const ReplicationSummary> summaries);
/// Tidy lambda,intervention,metric,value with metrics mean_score and se.
void write_risk_table_csv(std::ostream& out, std::span<const InterventionRisk> table);

/// "# " followed by compact metadata JSON and a newline.
void write_csv_metadata(std::ostream& out, const Json& metadata);

}  // namespace ipp
