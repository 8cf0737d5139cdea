#include <fmt/format.h>

#include <CLI11.hpp>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>

#include "cae/error.hpp"
#include "cae_cli/commands.hpp"
#include "cae_cli/run_config.hpp"

namespace {

struct Flags {
  std::string config;
  std::string corpus;
  std::string variant;
  std::optional<std::size_t> cutoff;
  std::optional<std::uint64_t> seed;
  std::string k;
  std::string out;
  std::string ground_truth;
  std::string checkpoint;
  std::optional<std::size_t> epochs;
  bool force = false;
  bool quiet = false;
  std::vector<std::string> include;
};

void add_run_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON run configuration");
  sub->add_option("--corpus", f.corpus, "Corpus root directory (overrides the config)");
  sub->add_option("--variant", f.variant, "Model variant")
      ->check(CLI::IsMember({"concat-linear", "concat-conv", "alt-linear", "alt-conv"}));
  sub->add_option("--cutoff", f.cutoff, "Encoding cutoff L (default 250)");
  sub->add_option("--seed", f.seed, "Master seed; all sub-seeds derive from it");
  sub->add_option("--k", f.k, "Comma-separated k values (default 1,5)");
  sub->add_option("--out", f.out, "Output directory");
  sub->add_option("--ground-truth", f.ground_truth, "CSV of query_id,target_id pairs");
  sub->add_option("--checkpoint", f.checkpoint, "Checkpoint path (default <out>/model.cae)");
  sub->add_option("--epochs", f.epochs, "Training epochs (default 100)");
  sub->add_flag("--force", f.force, "Overwrite existing artifacts");
  sub->add_flag("--quiet", f.quiet, "No progress output");
}

cae::cli::RunConfig build_config(const Flags& f) {
  cae::cli::RunConfig c = f.config.empty() ? cae::cli::RunConfig{} : cae::cli::load_run_config(f.config);
  if (!f.corpus.empty()) c.corpus_root = f.corpus;
  if (!f.variant.empty()) c.set_variant(f.variant);
  if (f.cutoff) c.encoding.cutoff = *f.cutoff;
  c.model.cutoff = c.encoding.cutoff;
  if (f.seed) c.seed = *f.seed;
  if (!f.k.empty()) c.evaluation.k = cae::cli::parse_k_list(f.k);
  if (!f.out.empty()) c.output_dir = f.out;
  if (!f.ground_truth.empty()) c.evaluation.ground_truth = f.ground_truth;
  if (!f.checkpoint.empty()) c.checkpoint = f.checkpoint;
  if (f.epochs) c.training.epochs = *f.epochs;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Column similarity with character-level autoencoders"};
  app.require_subcommand(1);

  using Command = void (*)(const cae::cli::RunConfig&, const cae::cli::CommandOptions&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands{
      {"stats", "Text length statistics and cutoff coverage", cae::cli::cmd_stats},
      {"encode", "Split the corpus and cache character-level encodings", cae::cli::cmd_encode},
      {"train", "Train an autoencoder variant", cae::cli::cmd_train},
      {"embed", "Embed columns with a trained checkpoint", cae::cli::cmd_embed},
      {"topk", "Cosine top-k retrieval and accuracy against ground truth", cae::cli::cmd_topk},
      {"cluster", "Elbow scan, k-means and PCA of the embeddings", cae::cli::cmd_cluster},
      {"report", "Merge retrieval and clustering results", cae::cli::cmd_report},
  };

  Flags flags;
  std::map<CLI::App*, Command> dispatch;
  for (const auto& [name, help, fn] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_run_flags(sub, flags);
    dispatch[sub] = fn;
  }
  app.get_subcommand("report")->add_option("--include", flags.include, "Other run directories to list in the table");

  cae::cli::GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic twin-column corpus with ground truth");
  generate->add_option("--out", gen.out_dir, "Output directory")->required();
  generate->add_option("--seed", gen.seed, "Seed");
  generate->add_option("--tables", gen.bench_tables, "Original tables (6 columns each, one twin table each)");
  generate->add_option("--train-tables", gen.train_tables, "Additional unlabeled tables");
  generate->add_flag("--force", gen.force, "Overwrite existing files");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      cae::cli::cmd_generate(gen);
      return 0;
    }
    for (const auto& [sub, fn] : dispatch) {
      if (!sub->parsed()) continue;
      const auto config = build_config(flags);
      cae::cli::CommandOptions options;
      options.force = flags.force;
      options.quiet = flags.quiet;
      for (const auto& dir : flags.include) options.include_runs.emplace_back(dir);
      fn(config, options);
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
