#include "cae_cli/run_config.hpp"

#include <fstream>
#include <sstream>

#include "cae/error.hpp"

namespace cae::cli {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

char delimiter_from(const std::string& s) {
  if (s == "\\t" || s == "tab" || s == "\t") return '\t';
  if (s.size() != 1) throw InvalidArgument("delimiter must be a single character, got '" + s + "'");
  return s[0];
}

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::filesystem::path RunConfig::checkpoint_path() const {
  return checkpoint.empty() ? output_dir / "model.cae" : checkpoint;
}

void RunConfig::set_variant(const std::string& variant) {
  if (variant == "concat-linear" || variant == "concat-conv" || variant == "alt-linear" || variant == "alt-conv") {
    encoding.mode = variant.starts_with("alt") ? cle::Mode::Alternative : cle::Mode::Concatenated;
    model.architecture = variant.ends_with("conv") ? Architecture::Conv : Architecture::Linear;
    return;
  }
  throw InvalidArgument("unknown variant '" + variant + "' (expected concat-linear, concat-conv, alt-linear or alt-conv)");
}

std::string RunConfig::variant() const {
  return std::string(encoding.mode == cle::Mode::Alternative ? "alt-" : "concat-") +
         (model.architecture == Architecture::Conv ? "conv" : "linear");
}

void RunConfig::validate() const {
  if (corpus_root.empty()) throw InvalidArgument("config: corpus root is not set");
  if (!std::filesystem::is_directory(corpus_root)) {
    throw InvalidArgument("config: corpus root does not exist: " + corpus_root.string());
  }
  if (!evaluation.ground_truth.empty() && !std::filesystem::is_regular_file(evaluation.ground_truth)) {
    throw InvalidArgument("config: ground truth file does not exist: " + evaluation.ground_truth.string());
  }
  encoding.validate();
  if (model.cutoff != encoding.cutoff) throw InvalidArgument("config: model cutoff differs from encoding cutoff");
  model.validate();
  training.validate();
  corpus::split_sizes(3, split);  // ratio checks
  if (evaluation.k.empty()) throw InvalidArgument("config: k list is empty");
  for (auto k : evaluation.k)
    if (k < 1) throw InvalidArgument("config: k values must be >= 1");
  if (evaluation.split != "all") corpus::split_from_string(evaluation.split);
  if (evaluation.elbow_k_min < 1 || evaluation.elbow_k_max < evaluation.elbow_k_min + 2) {
    throw InvalidArgument("config: elbow range needs k_min >= 1 and at least 3 values");
  }
  if (evaluation.pca_dims < 1) throw InvalidArgument("config: pca_dims must be >= 1");
  if (evaluation.kmeans_restarts < 1) throw InvalidArgument("config: kmeans_restarts must be >= 1");
  for (auto c : stats_cutoffs)
    if (c < 1) throw InvalidArgument("config: stats cutoffs must be >= 1");
}

RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base) {
  RunConfig c;
  try {
    if (j.contains("corpus")) {
      const auto& cj = j.at("corpus");
      c.corpus_root = resolve(base, cj.value("root", std::string()));
      c.delimiter = delimiter_from(cj.value("delimiter", std::string(",")));
      read_opt(cj, "skip_invalid", c.skip_invalid_tables);
    }
    read_opt(j, "seed", c.seed);
    if (j.contains("output_dir")) c.output_dir = resolve(base, j.at("output_dir").get<std::string>());
    if (j.contains("checkpoint")) c.checkpoint = resolve(base, j.at("checkpoint").get<std::string>());
    if (j.contains("variant")) c.set_variant(j.at("variant").get<std::string>());
    if (j.contains("encoding")) {
      const auto& e = j.at("encoding");
      read_opt(e, "cutoff", c.encoding.cutoff);
      if (e.contains("mode")) c.encoding.mode = cle::mode_from_string(e.at("mode").get<std::string>());
    }
    if (j.contains("model")) {
      const auto& m = j.at("model");
      if (m.contains("architecture")) {
        c.model.architecture = architecture_from_string(m.at("architecture").get<std::string>());
      }
      read_opt(m, "latent_dim", c.model.latent_dim);
      read_opt(m, "hidden_widths", c.model.hidden_widths);
      read_opt(m, "channels", c.model.channels);
      read_opt(m, "dropout", c.model.dropout);
      if (m.contains("latent_activation")) {
        c.model.latent_activation = activation_from_string(m.at("latent_activation").get<std::string>());
      }
      if (m.contains("output_activation")) {
        c.model.output_activation = activation_from_string(m.at("output_activation").get<std::string>());
      }
    }
    if (j.contains("training")) {
      const auto& t = j.at("training");
      read_opt(t, "learning_rate", c.training.learning_rate);
      read_opt(t, "epochs", c.training.epochs);
      read_opt(t, "batch_size", c.training.batch_size);
      read_opt(t, "dump_epochs", c.training.dump_epochs);
      read_opt(t, "dump_samples", c.training.dump_samples);
    }
    if (j.contains("split")) {
      const auto& s = j.at("split");
      read_opt(s, "train", c.split.train);
      read_opt(s, "val", c.split.val);
      read_opt(s, "test", c.split.test);
    }
    if (j.contains("evaluation")) {
      const auto& e = j.at("evaluation");
      if (e.contains("ground_truth")) c.evaluation.ground_truth = resolve(base, e.at("ground_truth").get<std::string>());
      read_opt(e, "k", c.evaluation.k);
      read_opt(e, "split", c.evaluation.split);
      read_opt(e, "elbow_k_min", c.evaluation.elbow_k_min);
      read_opt(e, "elbow_k_max", c.evaluation.elbow_k_max);
      read_opt(e, "pca_dims", c.evaluation.pca_dims);
      read_opt(e, "kmeans_restarts", c.evaluation.kmeans_restarts);
      read_opt(e, "bow_baseline", c.evaluation.bow_baseline);
    }
    if (j.contains("stats")) read_opt(j.at("stats"), "cutoffs", c.stats_cutoffs);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  c.model.cutoff = c.encoding.cutoff;
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(j, path.parent_path());
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["corpus"] = {{"root", c.corpus_root.string()},
                 {"delimiter", std::string(1, c.delimiter)},
                 {"skip_invalid", c.skip_invalid_tables}};
  j["seed"] = c.seed;
  j["variant"] = c.variant();
  j["encoding"] = {{"cutoff", c.encoding.cutoff}, {"mode", std::string(cle::to_string(c.encoding.mode))}};
  j["model"] = cae::to_json(c.model);
  j["training"] = {{"learning_rate", c.training.learning_rate},
                   {"epochs", c.training.epochs},
                   {"batch_size", c.training.batch_size},
                   {"dump_epochs", c.training.dump_epochs},
                   {"dump_samples", c.training.dump_samples}};
  j["split"] = {{"train", c.split.train}, {"val", c.split.val}, {"test", c.split.test}};
  j["evaluation"] = {{"ground_truth", c.evaluation.ground_truth.string()},
                     {"k", c.evaluation.k},
                     {"split", c.evaluation.split},
                     {"elbow_k_min", c.evaluation.elbow_k_min},
                     {"elbow_k_max", c.evaluation.elbow_k_max},
                     {"pca_dims", c.evaluation.pca_dims},
                     {"kmeans_restarts", c.evaluation.kmeans_restarts},
                     {"bow_baseline", c.evaluation.bow_baseline}};
  j["stats"] = {{"cutoffs", c.stats_cutoffs}};
  j["output_dir"] = c.output_dir.string();
  return j;
}

std::vector<std::size_t> parse_k_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || v == 0) throw InvalidArgument("invalid k value '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw InvalidArgument("empty k list");
  return out;
}

}  // namespace cae::cli
