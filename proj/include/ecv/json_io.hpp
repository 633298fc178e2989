#pragma once

#include <initializer_list>
#include <string>

#include "json.hpp"

#include "ecv/baselines.hpp"
#include "ecv/dataset.hpp"
#include "ecv/predictors.hpp"
#include "ecv/tuning.hpp"

namespace ecv {

using Json = nlohmann::ordered_json;

/// Throws InvalidParameter naming the first key of `j` not in `allowed`.
void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const std::string& context);

Json to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const Json& j, SyntheticSpec defaults = {});

/// {"kind": "ridge", "lambda": 0.1}, {"kind": "tree", "min_node_size": 5, ...}
Json to_json(const PredictorSpec& spec);
PredictorSpec predictor_spec_from_json(const Json& j);

Json to_json(const CenteringSpec& spec);
Json to_json(const EcvConfig& cfg);
EcvConfig ecv_config_from_json(const Json& j, EcvConfig defaults = {});

/// Selection trace: choice, flags, grid, and per-k components. Doubles are
/// emitted with full round-trip precision by the serializer.
Json to_json(const TuneResult& result);

} // namespace ecv
