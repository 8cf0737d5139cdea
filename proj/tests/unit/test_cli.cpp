#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "cae/analysis/embedding_store.hpp"
#include "cae/binary_io.hpp"
#include "cae/error.hpp"
#include "cae/random.hpp"
#include "cae_cli/commands.hpp"
#include "cae_cli/run_config.hpp"

using namespace cae;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("cae_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  const auto bytes = io::read_file(p);
  return {bytes.begin(), bytes.end()};
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

cli::CommandOptions quiet(bool force = false) {
  cli::CommandOptions o;
  o.quiet = true;
  o.force = force;
  return o;
}

// Small generated corpus and a config that trains in well under a second.
cli::RunConfig small_run(const fs::path& root, const std::string& out) {
  if (!fs::exists(root / "config.json")) {
    cli::GenerateOptions g;
    g.out_dir = root;
    g.seed = 4;
    g.bench_tables = 2;
    g.train_tables = 3;
    cli::cmd_generate(g);
  }
  auto c = cli::load_run_config(root / "config.json");
  c.set_variant("alt-linear");
  c.encoding.cutoff = 16;
  c.model.cutoff = 16;
  c.model.hidden_widths = {32};
  c.model.latent_dim = 8;
  c.training.epochs = 3;
  c.training.dump_epochs = {3};
  c.output_dir = root / out;
  c.validate();
  return c;
}

void run_pipeline(const cli::RunConfig& c, bool force = false) {
  const auto o = quiet(force);
  cli::cmd_stats(c, o);
  cli::cmd_encode(c, o);
  cli::cmd_train(c, o);
  cli::cmd_embed(c, o);
  cli::cmd_topk(c, o);
  cli::cmd_cluster(c, o);
  cli::cmd_report(c, o);
}

}  // namespace

TEST(RunConfig, JsonResolvesRelativePathsAndVariant) {
  const auto j = nlohmann::json::parse(R"({
    "corpus": {"root": "tables", "delimiter": "\t"},
    "seed": 9,
    "variant": "concat-conv",
    "encoding": {"cutoff": 64},
    "evaluation": {"ground_truth": "gt.csv", "k": [1, 3]},
    "output_dir": "runs/a"
  })");
  const auto c = cli::run_config_from_json(j, "/data/exp");
  EXPECT_EQ(c.corpus_root, fs::path("/data/exp/tables"));
  EXPECT_EQ(c.delimiter, '\t');
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.variant(), "concat-conv");
  EXPECT_EQ(c.encoding.mode, cle::Mode::Concatenated);
  EXPECT_EQ(c.model.architecture, Architecture::Conv);
  EXPECT_EQ(c.encoding.cutoff, 64u);
  EXPECT_EQ(c.model.cutoff, 64u);
  EXPECT_EQ(c.evaluation.ground_truth, fs::path("/data/exp/gt.csv"));
  EXPECT_EQ(c.evaluation.k, (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(c.output_dir, fs::path("/data/exp/runs/a"));
  EXPECT_EQ(c.checkpoint_path(), fs::path("/data/exp/runs/a/model.cae"));
}

TEST(RunConfig, JsonRoundTrip) {
  cli::RunConfig c;
  c.corpus_root = "/x/corpus";
  c.seed = 17;
  c.set_variant("alt-linear");
  c.encoding.cutoff = c.model.cutoff = 100;
  c.training.epochs = 7;
  c.evaluation.k = {2, 4};
  c.output_dir = "/x/out";
  const auto back = cli::run_config_from_json(nlohmann::json::parse(cli::to_json(c).dump()), "/elsewhere");
  EXPECT_EQ(back.corpus_root, c.corpus_root);
  EXPECT_EQ(back.seed, 17u);
  EXPECT_EQ(back.variant(), "alt-linear");
  EXPECT_EQ(back.model, c.model);
  EXPECT_EQ(back.encoding, c.encoding);
  EXPECT_EQ(back.training.epochs, 7u);
  EXPECT_EQ(back.evaluation.k, c.evaluation.k);
  EXPECT_EQ(back.output_dir, c.output_dir);
}

TEST(RunConfig, RejectsBadValues) {
  cli::RunConfig c;
  c.corpus_root = "/x";
  EXPECT_THROW(c.set_variant("alt-transformer"), InvalidArgument);
  c.split = {0.5, 0.2, 0.2};
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.split = {};
  c.encoding.cutoff = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  EXPECT_EQ(cli::parse_k_list("1,5,10"), (std::vector<std::size_t>{1, 5, 10}));
  EXPECT_THROW(cli::parse_k_list("0"), InvalidArgument);
  EXPECT_THROW(cli::parse_k_list("1,x"), InvalidArgument);
  EXPECT_THROW(cli::parse_k_list(""), InvalidArgument);
}

TEST(Pipeline, ProducesValidArtifactsAndRefusesOverwrite) {
  const auto root = fresh_dir("pipeline");
  const auto c = small_run(root, "out");
  run_pipeline(c);
  for (const char* name : {"stats.json", "manifest.json", "encoded.cle", "model.cae", "loss.csv", "embeddings.emb",
                           "topk.json", "cluster.json", "report.json", "report.txt"}) {
    EXPECT_TRUE(fs::exists(c.out(name))) << name;
  }
  const auto report = read_json(c.out("report.json"));
  for (const char* key : {"model", "encoding", "top1", "top5", "pairs_evaluated", "per_pair_ranks", "wcss_curve",
                          "chosen_k", "pca_points", "baselines"}) {
    EXPECT_TRUE(report.contains(key)) << key;
  }
  EXPECT_EQ(report["pairs_evaluated"].get<int>(), 12);
  EXPECT_EQ(report["baselines"]["word2vec"], "not implemented");
  const double top1 = report["top1"].get<double>();
  EXPECT_GE(top1, 0.0);
  EXPECT_LE(top1, 1.0);
  EXPECT_EQ(report["encoding"]["cutoff"].get<int>(), 16);

  const auto loss = slurp(c.out("loss.csv"));
  EXPECT_EQ(loss.rfind("epoch,train_loss,val_loss\n", 0), 0u);
  EXPECT_EQ(std::count(loss.begin(), loss.end(), '\n'), 4);

  EXPECT_THROW(cli::cmd_train(c, quiet()), IoError);
  EXPECT_THROW(cli::cmd_embed(c, quiet()), IoError);
}

TEST(Pipeline, RerunWithForceIsByteIdentical) {
  const auto root = fresh_dir("rerun");
  auto c = small_run(root, "a");
  run_pipeline(c);
  const auto first_model = io::read_file(c.out("model.cae"));
  const auto first_report = slurp(c.out("report.json"));
  run_pipeline(c, true);
  EXPECT_EQ(io::read_file(c.out("model.cae")), first_model);
  EXPECT_EQ(slurp(c.out("report.json")), first_report);

  auto other = small_run(root, "b");
  other.seed = c.seed + 1;
  cli::cmd_train(other, quiet());
  EXPECT_NE(io::read_file(other.out("model.cae")), first_model);
}

TEST(Pipeline, EmbedRejectsCheckpointWithOtherEncoding) {
  const auto root = fresh_dir("mismatch");
  auto c = small_run(root, "out");
  cli::cmd_train(c, quiet());
  c.encoding.mode = cle::Mode::Concatenated;
  EXPECT_THROW(cli::cmd_embed(c, quiet()), InvalidArgument);
}

TEST(Pipeline, PlantedDuplicatesRetrieveAtRankOne) {
  const auto root = fresh_dir("planted");
  auto c = small_run(root, "out");
  cli::cmd_train(c, quiet());
  analysis::EmbeddingStore store(6);
  Rng rng(3);
  std::string pairs = "query_id,target_id\n";
  for (int i = 0; i < 10; ++i) {
    std::vector<float> v(6);
    for (auto& x : v) x = static_cast<float>(rng.normal());
    store.add("orig/" + std::to_string(i), v);
    store.add("copy/" + std::to_string(i), v);
    pairs += "orig/" + std::to_string(i) + ",copy/" + std::to_string(i) + "\n";
  }
  analysis::save_store(c.out("embeddings.emb"), store);
  io::write_text_file(root / "planted.csv", pairs);
  c.evaluation.ground_truth = root / "planted.csv";
  c.evaluation.bow_baseline = false;
  cli::cmd_topk(c, quiet());
  const auto j = read_json(c.out("topk.json"));
  EXPECT_DOUBLE_EQ(j["top1"].get<double>(), 1.0);
  EXPECT_EQ(j["pairs_evaluated"].get<int>(), 10);
  EXPECT_TRUE(j["baselines"]["bow"].is_null());
}

TEST(Pipeline, ClusterFindsThreeBlobs) {
  const auto root = fresh_dir("blobs");
  auto c = small_run(root, "out");
  cli::cmd_train(c, quiet());
  analysis::EmbeddingStore store(3);
  Rng rng(5);
  const float centers[3][3] = {{10, 0, 0}, {0, 10, 0}, {0, 0, 10}};
  for (int b = 0; b < 3; ++b)
    for (int i = 0; i < 20; ++i) {
      std::vector<float> v(3);
      for (int d = 0; d < 3; ++d) v[d] = centers[b][d] + static_cast<float>(0.3 * rng.normal());
      store.add("blob" + std::to_string(b) + "/" + std::to_string(i), v);
    }
  analysis::save_store(c.out("embeddings.emb"), store);
  cli::cmd_cluster(c, quiet());
  const auto j = read_json(c.out("cluster.json"));
  EXPECT_EQ(j["chosen_k"].get<int>(), 3);
  const auto& a = j["assignment"];
  for (int b = 0; b < 3; ++b)
    for (int i = 1; i < 20; ++i)
      EXPECT_EQ(a["blob" + std::to_string(b) + "/" + std::to_string(i)], a["blob" + std::to_string(b) + "/0"]);
  EXPECT_EQ(j["pca_points"].size(), 60u);
  EXPECT_EQ(j["wcss_curve"].size(), 10u);
}

TEST(Pipeline, TopkRejectsKLargerThanStore) {
  const auto root = fresh_dir("bigk");
  auto c = small_run(root, "out");
  cli::cmd_train(c, quiet());
  cli::cmd_embed(c, quiet());
  c.evaluation.k = {1, 100000};
  EXPECT_THROW(cli::cmd_topk(c, quiet()), InvalidArgument);
}
