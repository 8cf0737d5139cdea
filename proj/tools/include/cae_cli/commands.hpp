#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cae_cli/run_config.hpp"

namespace cae::cli {

struct CommandOptions {
  bool force = false;  // allow replacing existing artifacts
  bool quiet = false;  // no progress on stderr
  std::vector<std::filesystem::path> include_runs;  // report: other runs' output dirs
};

// Each command writes its artifacts under config.output_dir, re-reads them to
// validate, and throws on any failure.
void cmd_stats(const RunConfig& config, const CommandOptions& options);     // stats.json
void cmd_encode(const RunConfig& config, const CommandOptions& options);    // manifest.json, encoded.cle
void cmd_train(const RunConfig& config, const CommandOptions& options);     // model.cae, loss.csv, dumps/
void cmd_embed(const RunConfig& config, const CommandOptions& options);     // embeddings.emb
void cmd_topk(const RunConfig& config, const CommandOptions& options);      // topk.json
void cmd_cluster(const RunConfig& config, const CommandOptions& options);   // cluster.json
void cmd_report(const RunConfig& config, const CommandOptions& options);    // report.json, report.txt

struct GenerateOptions {
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  std::size_t bench_tables = 10;
  std::size_t train_tables = 25;
  bool force = false;
};

// Synthetic twin corpus: <out>/corpus/{train,bench}/..., <out>/pairs.csv and a
// ready-to-use <out>/config.json.
void cmd_generate(const GenerateOptions& options);

}  // namespace cae::cli
