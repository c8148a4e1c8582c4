#pragma once

#include <memory>
#include <json.hpp>
#include <string>

#include "poicalib/bpr.hpp"
#include "poicalib/lore.hpp"
#include "poicalib/usg.hpp"

namespace poicalib {

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON container: {format_version, model, hyperparameters,
/// train_digest, parameters}. BPR stores its factor matrices; USG stores the
/// fitted power law; neighbour lists, transition graph and densities are
/// rebuilt from the train split, which the digest pins.
nlohmann::json save_model(const Recommender& model, const std::string& train_digest);

/// Throws a data error if the container's train digest differs from
/// `train_digest` or the format is unknown.
std::unique_ptr<Recommender> load_model(const nlohmann::json& doc,
                                        std::shared_ptr<const TrainData> data,
                                        const std::string& train_digest);

nlohmann::json hyperparameters(const Recommender& model);

}  // namespace poicalib
