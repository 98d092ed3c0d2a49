// Data model for datasets, secrets and protection targets.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace secretprot {

struct ExampleRecord {
  std::string id;
  std::vector<std::string> secret_ids;
  std::vector<double> payload;  // opaque to everything except the trainer
};

// Per-secret protection target: prior reconstruction probability p and the
// posterior bound r the mechanism must certify, 0 < p < r <= 1.
struct SecretSpec {
  std::string id;
  double prior_p = 0.0;
  double posterior_r = 0.0;
};

// Bipartite incidence between examples and secrets. incidence[j] holds the
// sorted indices of the examples containing secrets[j].
struct SecretMap {
  std::vector<ExampleRecord> examples;
  std::vector<SecretSpec> secrets;
  std::vector<std::vector<int>> incidence;
};

struct RunConfig {
  double batch_target = 0.0;
  long rounds = 0;
  double clip_norm = 0.0;
  double lp_constant = 0.0;
  std::int64_t seed = 0;
  bool drop_secretless = false;
};

// Builds incidence from the records and validates all invariants. Throws
// std::invalid_argument on duplicate ids, unknown secret references or
// targets with p >= r.
SecretMap make_secret_map(std::vector<ExampleRecord> examples,
                          std::vector<SecretSpec> secrets);

// Loads a JSONL example manifest plus a JSON secrets file.
SecretMap load_dataset(const std::string& manifest_path,
                       const std::string& secrets_path);

// Returns a map containing only examples with nonempty secret_ids,
// incidence re-indexed. Idempotent.
SecretMap filter_secretless(const SecretMap& map);

RunConfig load_config(const std::string& config_path);

}  // namespace secretprot
