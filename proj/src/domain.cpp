#include "secretprot/domain.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace secretprot {

using nlohmann::json;

SecretMap make_secret_map(std::vector<ExampleRecord> examples,
                          std::vector<SecretSpec> secrets) {
  std::unordered_map<std::string, int> secret_index;
  for (size_t j = 0; j < secrets.size(); ++j) {
    const SecretSpec& s = secrets[j];
    if (s.id.empty()) throw std::invalid_argument("secret id must be nonempty");
    if (!(s.prior_p > 0.0 && s.prior_p < 1.0))
      throw std::invalid_argument("secret " + s.id + ": prior must be in (0,1)");
    if (!(s.posterior_r > s.prior_p && s.posterior_r <= 1.0))
      throw std::invalid_argument("secret " + s.id +
                                  ": posterior must exceed prior");
    if (!secret_index.emplace(s.id, static_cast<int>(j)).second)
      throw std::invalid_argument("duplicate secret id " + s.id);
  }

  std::unordered_set<std::string> example_ids;
  std::vector<std::vector<int>> incidence(secrets.size());
  for (size_t i = 0; i < examples.size(); ++i) {
    const ExampleRecord& e = examples[i];
    if (e.id.empty()) throw std::invalid_argument("example id must be nonempty");
    if (!example_ids.insert(e.id).second)
      throw std::invalid_argument("duplicate example id " + e.id);
    for (const std::string& sid : e.secret_ids) {
      auto it = secret_index.find(sid);
      if (it == secret_index.end())
        throw std::invalid_argument("example " + e.id + ": unknown secret " + sid);
      incidence[it->second].push_back(static_cast<int>(i));
    }
  }
  for (size_t j = 0; j < incidence.size(); ++j) {
    auto& list = incidence[j];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    if (list.empty())
      std::cerr << "warning: secret " << secrets[j].id
                << " appears in no example; its constraint is vacuous\n";
  }
  return SecretMap{std::move(examples), std::move(secrets), std::move(incidence)};
}

SecretMap load_dataset(const std::string& manifest_path,
                       const std::string& secrets_path) {
  std::ifstream manifest(manifest_path);
  if (!manifest) throw std::invalid_argument("cannot open " + manifest_path);
  std::vector<ExampleRecord> examples;
  std::string line;
  size_t lineno = 0;
  while (std::getline(manifest, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw std::invalid_argument(manifest_path + ":" + std::to_string(lineno) +
                                  ": " + e.what());
    }
    ExampleRecord rec;
    rec.id = obj.at("id").get<std::string>();
    if (obj.contains("secrets"))
      rec.secret_ids = obj.at("secrets").get<std::vector<std::string>>();
    if (obj.contains("payload"))
      rec.payload = obj.at("payload").get<std::vector<double>>();
    examples.push_back(std::move(rec));
  }

  std::ifstream sf(secrets_path);
  if (!sf) throw std::invalid_argument("cannot open " + secrets_path);
  json sarr;
  try {
    sf >> sarr;
  } catch (const json::exception& e) {
    throw std::invalid_argument(secrets_path + ": " + e.what());
  }
  if (!sarr.is_array())
    throw std::invalid_argument(secrets_path + ": expected a JSON array");
  std::vector<SecretSpec> secrets;
  for (const auto& s : sarr) {
    secrets.push_back(SecretSpec{s.at("id").get<std::string>(),
                                 s.at("p").get<double>(),
                                 s.at("r").get<double>()});
  }
  return make_secret_map(std::move(examples), std::move(secrets));
}

SecretMap filter_secretless(const SecretMap& map) {
  std::vector<ExampleRecord> kept;
  kept.reserve(map.examples.size());
  for (const ExampleRecord& e : map.examples)
    if (!e.secret_ids.empty()) kept.push_back(e);
  return make_secret_map(std::move(kept), map.secrets);
}

RunConfig load_config(const std::string& config_path) {
  std::ifstream f(config_path);
  if (!f) throw std::invalid_argument("cannot open " + config_path);
  json obj;
  try {
    f >> obj;
  } catch (const json::exception& e) {
    throw std::invalid_argument(config_path + ": " + e.what());
  }
  RunConfig cfg;
  cfg.batch_target = obj.at("batch_target").get<double>();
  cfg.rounds = obj.at("rounds").get<long>();
  cfg.clip_norm = obj.at("clip_norm").get<double>();
  cfg.lp_constant = obj.at("lp_constant").get<double>();
  cfg.seed = obj.at("seed").get<std::int64_t>();
  cfg.drop_secretless = obj.value("drop_secretless", false);
  if (cfg.batch_target <= 0 || cfg.rounds <= 0 || cfg.clip_norm <= 0 ||
      cfg.lp_constant <= 0)
    throw std::invalid_argument(config_path +
                                ": numeric fields must be strictly positive");
  return cfg;
}

}  // namespace secretprot
