#include "cae_cli/commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "cae/analysis/bow.hpp"
#include "cae/analysis/embedding_store.hpp"
#include "cae/analysis/kmeans.hpp"
#include "cae/analysis/pca.hpp"
#include "cae/analysis/similarity.hpp"
#include "cae/binary_io.hpp"
#include "cae/checkpoint.hpp"
#include "cae/error.hpp"
#include "cae/random.hpp"
#include "cae/synthetic.hpp"

namespace cae::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

template <typename... Args>
void progress(const CommandOptions& o, fmt::format_string<Args...> f, Args&&... args) {
  if (o.quiet) return;
  fmt::print(stderr, f, std::forward<Args>(args)...);
  std::fputc('\n', stderr);
}

void ensure_writable(const fs::path& p, bool force) {
  if (fs::exists(p) && !force) throw IoError(p.string() + " already exists (pass --force to overwrite)");
}

// Writes through a temporary file so a failed run never leaves a partial artifact.
void write_artifact(const fs::path& p, std::span<const std::uint8_t> bytes, bool force) {
  ensure_writable(p, force);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  io::write_file(tmp, bytes);
  fs::rename(tmp, p);
}

void write_artifact(const fs::path& p, std::string_view text, bool force) {
  write_artifact(p, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()), force);
}

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

Json read_json(const fs::path& p) {
  if (!fs::exists(p)) throw IoError("missing artifact " + p.string());
  const auto bytes = io::read_file(p);
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(p.string() + " is not valid JSON: " + e.what());
  }
}

struct LoadedCorpus {
  corpus::Corpus corpus;
  corpus::CorpusManifest manifest;
};

LoadedCorpus load(const RunConfig& c, const CommandOptions& o) {
  std::vector<std::string> rejected;
  LoadedCorpus l;
  l.corpus = corpus::load_corpus(c.corpus_root, c.delimiter, c.skip_invalid_tables ? &rejected : nullptr);
  for (const auto& r : rejected) progress(o, "warning: skipped {}", r);
  l.manifest = corpus::split_corpus(corpus::make_manifest(l.corpus), c.split, seeds::derive(c.seed, seeds::kSplit));
  progress(o, "corpus: {} tables, {} columns", l.corpus.tables.size(), l.corpus.column_count());
  return l;
}

std::vector<const corpus::Column*> split_columns(const LoadedCorpus& l, const std::string& split) {
  if (split == "all") return l.corpus.columns();
  std::vector<const corpus::Column*> out;
  for (const auto& id : l.manifest.columns_in(corpus::split_from_string(split))) {
    out.push_back(l.corpus.find_column(id));
  }
  return out;
}

std::string crc_hex(std::uint32_t crc) { return fmt::format("{:08x}", crc); }

Json model_info(const Checkpoint& ck) {
  Json j;
  j["variant"] = fmt::format("{}-{}", ck.encoding.mode == cle::Mode::Alternative ? "alt" : "concat",
                             to_string(ck.model.config().architecture));
  j["checkpoint_crc"] = crc_hex(ck.crc);
  j["config"] = to_json(ck.model.config());
  j["epochs_run"] = ck.training.epochs_run;
  j["final_train_loss"] = ck.training.final_train_loss;
  j["final_val_loss"] = ck.training.final_val_loss ? Json(*ck.training.final_val_loss) : Json(nullptr);
  j["seed"] = ck.training.seed;
  return j;
}

Json encoding_info(const cle::EncodingConfig& e) {
  return Json{{"mode", std::string(cle::to_string(e.mode))}, {"cutoff", e.cutoff}};
}

Checkpoint load_model(const RunConfig& c) {
  const auto path = c.checkpoint_path();
  if (!fs::exists(path)) throw IoError("missing checkpoint " + path.string() + " (run train first)");
  return load_checkpoint(path);
}

std::string pct(const Json& v) { return v.is_null() ? "n/a" : fmt::format("{:.2f}%", 100.0 * v.get<double>()); }

std::string variant_label(const std::string& variant) {
  static const std::map<std::string, std::string> kNames{{"alt-conv", "Alternative Conv AE"},
                                                         {"alt-linear", "Alternative Linear AE"},
                                                         {"concat-conv", "Concatenated Conv AE"},
                                                         {"concat-linear", "Concatenated Linear AE"}};
  const auto it = kNames.find(variant);
  return it == kNames.end() ? variant : it->second;
}

}  // namespace

void cmd_stats(const RunConfig& c, const CommandOptions& o) {
  const auto l = load(c, o);
  std::set<std::size_t> cutoffs(c.stats_cutoffs.begin(), c.stats_cutoffs.end());
  cutoffs.insert(c.encoding.cutoff);
  const auto stats = corpus::length_stats(l.corpus, {cutoffs.begin(), cutoffs.end()});
  Json j;
  j["corpus_root"] = c.corpus_root.generic_string();
  j["tables"] = l.corpus.tables.size();
  j["stats"] = corpus::stats_to_json(stats);
  const auto path = c.out("stats.json");
  write_artifact(path, json_text(j), o.force);
  read_json(path);

  fmt::print("Text length statistics ({} columns)\n", stats.count);
  fmt::print("  mean {:.2f}  std {:.2f}  min {}  max {}\n", stats.mean, stats.std_dev, stats.min, stats.max);
  for (const auto& [cut, cov] : stats.coverage_at) fmt::print("  coverage at L={:<6} {:.2f}%\n", cut, 100.0 * cov);
}

void cmd_encode(const RunConfig& c, const CommandOptions& o) {
  const auto l = load(c, o);
  const auto manifest_path = c.out("manifest.json");
  const auto encoded_path = c.out("encoded.cle");
  ensure_writable(manifest_path, o.force);
  ensure_writable(encoded_path, o.force);
  const auto columns = l.corpus.columns();
  const auto matrices = cle::encode_columns(columns, c.encoding);
  write_artifact(manifest_path, json_text(corpus::manifest_to_json(l.manifest)), o.force);
  write_artifact(encoded_path, cle::serialize_encoded(matrices), o.force);

  corpus::manifest_from_json(read_json(manifest_path));
  if (cle::read_encoded(encoded_path).size() != matrices.size()) {
    throw FormatError("encoded cache " + encoded_path.string() + " failed validation");
  }
  progress(o, "encoded {} columns ({}, L={})", matrices.size(), cle::to_string(c.encoding.mode), c.encoding.cutoff);
}

void cmd_train(const RunConfig& c, const CommandOptions& o) {
  const auto model_path = c.checkpoint_path();
  const auto loss_path = c.out("loss.csv");
  const auto dump_dir = c.out("dumps");
  ensure_writable(model_path, o.force);
  ensure_writable(loss_path, o.force);
  ensure_writable(dump_dir, o.force);

  const auto l = load(c, o);
  const auto train_cols = split_columns(l, "train");
  const auto val_cols = split_columns(l, "val");
  if (train_cols.empty()) throw InvalidArgument("the training split is empty");
  const auto train_set = cle::encode_columns(train_cols, c.encoding);
  const auto val_set = cle::encode_columns(val_cols, c.encoding);

  auto model = build_autoencoder(c.model, seeds::derive(c.seed, seeds::kInit));
  progress(o, "training {} ({} parameters) on {} columns, validating on {}", c.variant(), model.parameter_count(),
           train_set.size(), val_set.size());

  fs::remove_all(dump_dir);
  auto tc = c.training;
  tc.seed = seeds::derive(c.seed, seeds::kTrain);
  tc.dump_dir = dump_dir;
  const auto history = train::train(model, train_set, val_set, tc, [&](std::size_t e, double tl, double vl) {
    if (e == 1 || e % 10 == 0 || e == tc.epochs) progress(o, "epoch {:>4}/{}  train {:.6g}  val {:.6g}", e, tc.epochs, tl, vl);
  });

  TrainingMetadata meta;
  meta.epochs_run = history.train_loss.size();
  meta.final_train_loss = history.train_loss.back();
  if (!history.val_loss.empty()) meta.final_val_loss = history.val_loss.back();
  meta.seed = c.seed;
  write_artifact(model_path, serialize_checkpoint(model, c.encoding, meta), o.force);
  write_artifact(loss_path, train::loss_history_csv(history), o.force);
  load_checkpoint(model_path);
  progress(o, "wrote {}", model_path.string());
}

void cmd_embed(const RunConfig& c, const CommandOptions& o) {
  const auto path = c.out("embeddings.emb");
  ensure_writable(path, o.force);
  const auto ck = load_model(c);
  if (ck.encoding != c.encoding) {
    throw InvalidArgument(fmt::format("checkpoint was trained on {} encoding with L={}, but the config asks for {} with L={}",
                                      cle::to_string(ck.encoding.mode), ck.encoding.cutoff,
                                      cle::to_string(c.encoding.mode), c.encoding.cutoff));
  }
  const auto l = load(c, o);
  const auto columns = split_columns(l, c.evaluation.split);
  if (columns.empty()) throw InvalidArgument("no columns in evaluation split '" + c.evaluation.split + "'");
  const auto matrices = cle::encode_columns(columns, ck.encoding);
  const auto store = analysis::make_store(ck.model.encode_all(matrices), {crc_hex(ck.crc), ck.encoding});
  const auto bytes = analysis::serialize_store(store);
  write_artifact(path, bytes, o.force);
  if (analysis::load_store(path).size() != store.size()) throw FormatError("embedding store failed validation");
  progress(o, "embedded {} columns into {} dimensions", store.size(), store.dim());
}

void cmd_topk(const RunConfig& c, const CommandOptions& o) {
  const auto path = c.out("topk.json");
  ensure_writable(path, o.force);
  const auto ck = load_model(c);
  const auto store = analysis::load_store(c.out("embeddings.emb"));
  const std::size_t n = store.size();
  for (auto k : c.evaluation.k) {
    if (k < 1 || k + 1 > n) throw InvalidArgument(fmt::format("k={} is outside 1..{} for a store of {} columns", k, n - 1, n));
  }
  const std::size_t max_k = *std::max_element(c.evaluation.k.begin(), c.evaluation.k.end());

  Json j;
  j["model"] = model_info(ck);
  j["encoding"] = encoding_info(ck.encoding);
  j["store_size"] = n;
  j["k"] = c.evaluation.k;

  std::vector<std::string> queries;
  analysis::GroundTruthPairs truth;
  if (!c.evaluation.ground_truth.empty()) {
    truth = analysis::load_ground_truth(c.evaluation.ground_truth);
    analysis::validate_ground_truth(truth, store);
    for (const auto& [q, t] : truth.pairs) queries.push_back(q);
  } else {
    queries = store.ids();
  }

  auto score = [&](const analysis::EmbeddingStore& s, Json& out) {
    const auto r = analysis::evaluate_retrieval(s, truth);
    Json acc;
    for (auto k : c.evaluation.k) acc[std::to_string(k)] = r.accuracy_at(k);
    out["accuracy"] = acc;
    out["top1"] = r.accuracy_at(1);
    out["top5"] = r.accuracy_at(5);
    return r;
  };

  if (!truth.pairs.empty()) {
    j["ground_truth"] = c.evaluation.ground_truth.generic_string();
    const auto r = score(store, j);
    j["pairs_evaluated"] = r.pairs_evaluated;
    Json ranks = Json::array();
    for (std::size_t i = 0; i < truth.pairs.size(); ++i) {
      ranks.push_back({{"query", truth.pairs[i].first}, {"target", truth.pairs[i].second}, {"rank", r.ranks[i]}});
    }
    j["per_pair_ranks"] = std::move(ranks);
  } else {
    j["ground_truth"] = nullptr;
    j["accuracy"] = nullptr;
    j["top1"] = nullptr;
    j["top5"] = nullptr;
    j["pairs_evaluated"] = 0;
    j["per_pair_ranks"] = Json::array();
  }

  Json neighbors = Json::array();
  for (const auto& q : queries) {
    Json list = Json::array();
    for (const auto& nb : analysis::topk_query(store, q, max_k)) {
      list.push_back({{"column_id", nb.column_id}, {"similarity", nb.similarity}});
    }
    neighbors.push_back({{"query", q}, {"neighbors", std::move(list)}});
  }
  j["neighbors"] = std::move(neighbors);

  Json baselines;
  if (c.evaluation.bow_baseline && !truth.pairs.empty()) {
    const auto l = load(c, o);
    std::vector<const corpus::Column*> columns;
    for (const auto& id : store.ids()) {
      const auto* col = l.corpus.find_column(id);
      if (!col) throw InvalidArgument("store column " + id + " is not in the corpus");
      columns.push_back(col);
    }
    const auto dict = analysis::BowDictionary::build(split_columns(l, "train"));
    const auto bow = analysis::bow_store(columns, dict);
    Json b;
    b["dictionary_size"] = dict.size();
    score(bow, b);
    std::size_t empty = 0;
    for (const auto& [id, v] : bow.entries()) empty += std::all_of(v.begin(), v.end(), [](float x) { return x == 0.0f; });
    b["all_oov_columns"] = empty;
    baselines["bow"] = std::move(b);
  } else {
    baselines["bow"] = nullptr;
  }
  baselines["word2vec"] = "not implemented";
  j["baselines"] = std::move(baselines);

  write_artifact(path, json_text(j), o.force);
  read_json(path);
  if (!truth.pairs.empty()) {
    progress(o, "top-1 {}  top-5 {}  ({} pairs)", pct(j["top1"]), pct(j["top5"]), truth.pairs.size());
  }
}

void cmd_cluster(const RunConfig& c, const CommandOptions& o) {
  const auto path = c.out("cluster.json");
  ensure_writable(path, o.force);
  const auto ck = load_model(c);
  const auto store = analysis::load_store(c.out("embeddings.emb"));
  const std::size_t k_max = std::min(c.evaluation.elbow_k_max, store.size());
  if (k_max < c.evaluation.elbow_k_min + 2) {
    throw InvalidArgument(fmt::format("store of {} columns is too small for an elbow scan from k={}", store.size(),
                                      c.evaluation.elbow_k_min));
  }
  analysis::KMeansOptions km;
  km.seed = seeds::derive(c.seed, seeds::kCluster);
  km.restarts = c.evaluation.kmeans_restarts;
  const auto elbow = analysis::elbow_scan(store, c.evaluation.elbow_k_min, k_max, km);
  const auto clusters = analysis::kmeans(store, elbow.chosen_k, km);
  const auto proj = analysis::pca_project(store, std::min(c.evaluation.pca_dims, store.dim()));

  Json j;
  j["model"] = model_info(ck);
  j["encoding"] = encoding_info(ck.encoding);
  Json curve = Json::array();
  for (const auto& [k, w] : elbow.curve) curve.push_back({{"k", k}, {"wcss", w}});
  j["wcss_curve"] = std::move(curve);
  j["chosen_k"] = elbow.chosen_k;
  j["wcss"] = clusters.wcss;
  Json assignment;
  for (const auto& [id, a] : clusters.assignment) assignment[id] = a;
  j["assignment"] = std::move(assignment);
  j["pca"] = {{"explained_variance", proj.result.explained_variance}, {"degenerate", proj.result.degenerate}};
  Json points = Json::array();
  for (const auto& [id, coords] : proj.points) points.push_back({{"column_id", id}, {"coords", coords}});
  j["pca_points"] = std::move(points);

  write_artifact(path, json_text(j), o.force);
  read_json(path);
  progress(o, "elbow at k={} over k={}..{}", elbow.chosen_k, c.evaluation.elbow_k_min, k_max);
}

void cmd_report(const RunConfig& c, const CommandOptions& o) {
  const auto json_path = c.out("report.json");
  const auto text_path = c.out("report.txt");
  ensure_writable(json_path, o.force);
  ensure_writable(text_path, o.force);
  const auto topk = read_json(c.out("topk.json"));
  const auto cluster = read_json(c.out("cluster.json"));

  Json j;
  j["model"] = topk.at("model");
  j["encoding"] = topk.at("encoding");
  j["top1"] = topk.at("top1");
  j["top5"] = topk.at("top5");
  j["pairs_evaluated"] = topk.at("pairs_evaluated");
  j["per_pair_ranks"] = topk.at("per_pair_ranks");
  j["wcss_curve"] = cluster.at("wcss_curve");
  j["chosen_k"] = cluster.at("chosen_k");
  j["pca_points"] = cluster.at("pca_points");
  j["accuracy"] = topk.at("accuracy");
  j["baselines"] = topk.at("baselines");

  Json variants = Json::array();
  auto add_variant = [&](const Json& t) {
    variants.push_back({{"variant", t.at("model").at("variant")},
                        {"checkpoint_crc", t.at("model").at("checkpoint_crc")},
                        {"top1", t.at("top1")},
                        {"top5", t.at("top5")}});
  };
  add_variant(topk);
  for (const auto& dir : o.include_runs) add_variant(read_json(dir / "topk.json"));
  j["variants"] = std::move(variants);

  std::string txt;
  txt += fmt::format("Column similarity report\n");
  txt += fmt::format("variant {}  encoding {} (L={})  checkpoint {}\n", j["model"]["variant"].get<std::string>(),
                     j["encoding"]["mode"].get<std::string>(), j["encoding"]["cutoff"].get<std::size_t>(),
                     j["model"]["checkpoint_crc"].get<std::string>());
  txt += fmt::format("pairs evaluated: {}\n\n", j["pairs_evaluated"].get<std::size_t>());

  txt += "Top-k performance of CAE models\n";
  txt += fmt::format("{:<28}{:>10}{:>10}\n", "Model", "Top-1", "Top-5");
  for (const auto& v : j["variants"]) {
    txt += fmt::format("{:<28}{:>10}{:>10}\n", variant_label(v["variant"].get<std::string>()), pct(v["top1"]),
                       pct(v["top5"]));
  }
  txt += "\nComparison with baselines\n";
  txt += fmt::format("{:<28}{:>10}{:>10}\n", "Method", "Top-1", "Top-5");
  txt += fmt::format("{:<28}{:>10}{:>10}\n", "CAE (" + variant_label(j["model"]["variant"].get<std::string>()) + ")",
                     pct(j["top1"]), pct(j["top5"]));
  const auto& bow = j["baselines"]["bow"];
  if (bow.is_null()) {
    txt += fmt::format("{:<28}{:>20}\n", "BoW", "not evaluated");
  } else {
    txt += fmt::format("{:<28}{:>10}{:>10}\n", "BoW", pct(bow["top1"]), pct(bow["top5"]));
  }
  txt += fmt::format("{:<28}{:>20}\n", "Word2Vec", "not implemented");

  txt += fmt::format("\nClustering: elbow at k={}\n", j["chosen_k"].get<std::size_t>());
  txt += fmt::format("{:>4}  {}\n", "k", "WCSS");
  for (const auto& p : j["wcss_curve"]) txt += fmt::format("{:>4}  {:.6g}\n", p["k"].get<std::size_t>(), p["wcss"].get<double>());

  write_artifact(json_path, json_text(j), o.force);
  write_artifact(text_path, txt, o.force);
  const auto back = read_json(json_path);
  for (const char* key : {"model", "encoding", "top1", "top5", "pairs_evaluated", "per_pair_ranks", "wcss_curve",
                          "chosen_k", "pca_points"}) {
    if (!back.contains(key)) throw FormatError(std::string("report is missing field ") + key);
  }
  fmt::print("{}", txt);
}

void cmd_generate(const GenerateOptions& g) {
  if (g.out_dir.empty()) throw InvalidArgument("generate needs an output directory");
  const auto corpus_dir = g.out_dir / "corpus";
  ensure_writable(corpus_dir, g.force);
  ensure_writable(g.out_dir / "pairs.csv", g.force);
  ensure_writable(g.out_dir / "config.json", g.force);
  fs::remove_all(corpus_dir);

  synthetic::Options bench;
  bench.tables = g.bench_tables;
  bench.seed = seeds::derive(g.seed, seeds::kSynthetic);
  const auto twins = synthetic::make_twin_benchmark(bench);
  synthetic::Options train = bench;
  train.tables = g.train_tables;
  train.seed = bench.seed + 1;
  synthetic::write_tables(corpus_dir, twins.tables);
  synthetic::write_tables(corpus_dir, synthetic::make_corpus(train));
  write_artifact(g.out_dir / "pairs.csv", analysis::ground_truth_csv(twins.pairs), g.force);

  Json config;
  config["corpus"] = {{"root", "corpus"}, {"delimiter", ","}};
  config["seed"] = g.seed;
  config["variant"] = "alt-conv";
  config["evaluation"] = {{"ground_truth", "pairs.csv"}, {"k", {1, 5}}, {"split", "all"}};
  config["output_dir"] = "out";
  write_artifact(g.out_dir / "config.json", json_text(config), g.force);
}

}  // namespace cae::cli
