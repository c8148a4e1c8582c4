#include "poicalib/model_io.hpp"

#include "poicalib/error.hpp"

namespace poicalib {
namespace {

nlohmann::json matrix_json(const FactorMatrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()},
          {"values", std::vector<double>(m.values().begin(), m.values().end())}};
}

FactorMatrix matrix_from(const nlohmann::json& j) {
  FactorMatrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto values = j.at("values").get<std::vector<double>>();
  if (values.size() != m.values().size()) throw data_error("recommend", "corrupt factor matrix");
  std::copy(values.begin(), values.end(), m.values().begin());
  return m;
}

}  // namespace

nlohmann::json hyperparameters(const Recommender& model) {
  if (auto* bpr = dynamic_cast<const BprModel*>(&model)) {
    const auto& c = bpr->config();
    return {{"dim", c.dim},          {"learning_rate", c.learning_rate},
            {"regularization", c.regularization}, {"batch_size", c.batch_size},
            {"epochs", c.epochs},    {"init_std", c.init_std}};
  }
  if (auto* usg = dynamic_cast<const UsgModel*>(&model)) {
    const auto& c = usg->config();
    return {{"beta", c.beta}, {"alpha", c.alpha}, {"neighbors", c.neighbors},
            {"histogram_bins", c.histogram_bins}};
  }
  if (auto* lore = dynamic_cast<const LoreModel*>(&model)) {
    const auto& c = lore->config();
    return {{"decay", c.decay}, {"min_bandwidth_deg", c.min_bandwidth_deg},
            {"geo_floor", c.geo_floor}};
  }
  throw data_error("train", "unknown model type");
}

nlohmann::json save_model(const Recommender& model, const std::string& train_digest) {
  nlohmann::json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["model"] = std::string(model.tag());
  doc["hyperparameters"] = hyperparameters(model);
  doc["train_digest"] = train_digest;
  if (auto* bpr = dynamic_cast<const BprModel*>(&model)) {
    doc["parameters"] = {{"user_factors", matrix_json(bpr->user_factors())},
                         {"item_factors", matrix_json(bpr->item_factors())}};
  } else if (auto* usg = dynamic_cast<const UsgModel*>(&model)) {
    const auto& law = usg->power_law();
    doc["parameters"] = {{"power_law",
                          {{"a", law.a}, {"b", law.b}, {"min_distance_km", law.min_distance_km},
                           {"enabled", law.enabled}}}};
  } else {
    doc["parameters"] = nlohmann::json::object();
  }
  return doc;
}

std::unique_ptr<Recommender> load_model(const nlohmann::json& doc,
                                        std::shared_ptr<const TrainData> data,
                                        const std::string& train_digest) {
  try {
    if (doc.at("format_version").get<int>() != kModelFormatVersion)
      throw data_error("recommend", "unsupported model format version");
    if (doc.at("train_digest").get<std::string>() != train_digest)
      throw data_error("recommend", "model was fitted on a different train split");
    const auto tag = doc.at("model").get<std::string>();
    const auto& h = doc.at("hyperparameters");
    const auto& p = doc.at("parameters");
    if (tag == "bpr") {
      BprConfig c;
      c.dim = h.at("dim");
      c.learning_rate = h.at("learning_rate");
      c.regularization = h.at("regularization");
      c.batch_size = h.at("batch_size");
      c.epochs = h.at("epochs");
      c.init_std = h.at("init_std");
      return std::make_unique<BprModel>(std::move(data), c, matrix_from(p.at("user_factors")),
                                        matrix_from(p.at("item_factors")));
    }
    if (tag == "usg") {
      UsgConfig c;
      c.beta = h.at("beta");
      c.alpha = h.at("alpha");
      c.neighbors = h.at("neighbors");
      c.histogram_bins = h.at("histogram_bins");
      const auto& law_json = p.at("power_law");
      PowerLaw law{law_json.at("a"), law_json.at("b"), law_json.at("min_distance_km"),
                   law_json.at("enabled")};
      return std::make_unique<UsgModel>(std::move(data), c, law);
    }
    if (tag == "lore") {
      LoreConfig c;
      c.decay = h.at("decay");
      c.min_bandwidth_deg = h.at("min_bandwidth_deg");
      c.geo_floor = h.at("geo_floor");
      return std::make_unique<LoreModel>(std::move(data), c);
    }
    throw data_error("recommend", "unknown model tag '" + tag + "'");
  } catch (const nlohmann::json::exception& e) {
    throw data_error("recommend", std::string("corrupt model container: ") + e.what());
  }
}

}  // namespace poicalib
