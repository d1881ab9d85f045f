// JSON (de)serialization for the config structs behind `--config` files and
// effective_config.json echoes. Keys are kebab-case, mirroring the CLI
// flags; loaders reject unknown keys.
#pragma once

#include "json.hpp"
#include "umauc/bagdata.hpp"
#include "umauc/baseline.hpp"
#include "umauc/trainer.hpp"

namespace umauc {

nlohmann::json train_config_to_json(const TrainConfig& cfg);
// Overwrites only the fields present in j; throws on unknown keys.
void train_config_from_json(const nlohmann::json& j, TrainConfig& cfg);

nlohmann::json pairwise_config_to_json(const PairwiseConfig& cfg);
void pairwise_config_from_json(const nlohmann::json& j, PairwiseConfig& cfg);

nlohmann::json pool_spec_to_json(const GaussianPoolSpec& spec);
void pool_spec_from_json(const nlohmann::json& j, GaussianPoolSpec& spec);

}  // namespace umauc
