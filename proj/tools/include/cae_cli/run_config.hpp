#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cae/autoencoder.hpp"
#include "cae/cle.hpp"
#include "cae/corpus.hpp"
#include "cae/training.hpp"

namespace cae::cli {

struct EvaluationConfig {
  std::filesystem::path ground_truth;  // empty: no retrieval scoring
  std::vector<std::size_t> k{1, 5};
  std::string split = "all";  // columns embedded and queried: all|train|val|test
  std::size_t elbow_k_min = 1;
  std::size_t elbow_k_max = 10;
  std::size_t pca_dims = 2;
  std::size_t kmeans_restarts = 5;
  bool bow_baseline = true;
};

// Everything a pipeline run needs. Relative paths in a config file resolve
// against the file's directory.
struct RunConfig {
  std::filesystem::path corpus_root;
  char delimiter = ',';
  bool skip_invalid_tables = false;  // skip unparseable files with a warning
  std::uint64_t seed = 0;
  cle::EncodingConfig encoding;
  ModelConfig model;
  train::TrainConfig training;
  corpus::SplitRatios split;
  EvaluationConfig evaluation;
  std::vector<std::size_t> stats_cutoffs{50, 100, 250, 500, 1000};
  std::filesystem::path output_dir = "cae_out";
  std::filesystem::path checkpoint;  // empty: <output_dir>/model.cae

  std::filesystem::path checkpoint_path() const;
  std::filesystem::path out(const std::string& name) const { return output_dir / name; }

  // Applies a variant name: concat-linear, concat-conv, alt-linear, alt-conv.
  void set_variant(const std::string& variant);
  std::string variant() const;

  // Throws InvalidArgument naming the offending field.
  void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const RunConfig& config);

std::vector<std::size_t> parse_k_list(const std::string& text);

}  // namespace cae::cli
