#pragma once

#include "anaflow/extension.hpp"
#include "anaflow/flowseries.hpp"
#include "anaflow/oracle.hpp"
#include "anaflow/seminorms.hpp"
#include "anaflow/timevarying.hpp"

#include <json.hpp>

#include <string>

namespace anaflow {

using Json = nlohmann::json;

/// Serializer with every float printed at 17 significant digits and object
/// keys in sorted order, so identical inputs give byte-identical documents.
std::string dump_deterministic(const Json& j, int indent = 2);

/// Non-finite doubles become the strings "inf"/"-inf"/"nan" (JSON has no
/// number form for them).
Json json_number(double v);

Json stepfield_to_json(const StepField& X);
StepField stepfield_from_json(const Json& j);

Json box_to_json(const CompactBox& K);
CompactBox box_from_json(const Json& j);

Json to_json(const SeminormValue& v);
Json to_json(const DomainEstimate& e);
Json to_json(const IntegrabilityReport& r);
Json to_json(const CommonMajorant& m);
Json to_json(const FlowCertificate& c);
Json to_json(const ExperimentReport& r);

/// CSV rows (point, t, x..., residual_bound), 17 significant digits.
std::string trajectory_csv(int dim, const std::vector<int>& point_ids,
                           const std::vector<double>& ts,
                           const std::vector<std::vector<double>>& xs,
                           const std::vector<double>& residuals);

/// CSV rows (t, m, M).
std::string integrability_csv(const IntegrabilityReport& r);

}  // namespace anaflow
