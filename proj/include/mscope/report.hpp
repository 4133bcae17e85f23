#pragma once

#include "mscope/analysis.hpp"

#include <json.hpp>

#include <string>

namespace mscope::report {

/// Formats a double with 17 significant digits ("nan"/"inf" for non-finite values).
std::string number(double v);

/// Serializes `doc` like nlohmann's dump(indent) but writes every float with 17 significant digits.
std::string dump_json(const nlohmann::json& doc, int indent = 2);

nlohmann::json to_json(const IdEstimate& est);
nlohmann::json to_json(const MapcEstimate& est, bool per_point = false);
nlohmann::json to_json(const RunManifest& run);
nlohmann::json to_json(const LayerProfile& profile);
nlohmann::json to_json(const AggregateProfile& agg);
nlohmann::json to_json(const std::vector<CorrelationRow>& rows);
nlohmann::json to_json(const Histogram& h);

/// Reads a profile written by to_json(LayerProfile). Per-point arrays are not restored.
LayerProfile profile_from_json(const nlohmann::json& doc);

std::string id_csv(const IdEstimate& est);
std::string mapc_csv(const MapcEstimate& est, std::size_t d, std::size_t ambient_dim);
/// index,id,id_std,mapc,mapc_std; a single run reports zero spread.
std::string profile_csv(const LayerProfile& profile);
std::string aggregate_csv(const AggregateProfile& agg);
std::string correlation_csv(const std::vector<CorrelationRow>& rows);
std::string histogram_csv(const Histogram& h);

} // namespace mscope::report
