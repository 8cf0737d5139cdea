#include "cae/autoencoder.hpp"

#include <algorithm>
#include <cmath>

#include "cae/error.hpp"

namespace cae {

std::string_view to_string(Architecture a) { return a == Architecture::Linear ? "linear" : "conv"; }

Architecture architecture_from_string(std::string_view s) {
  if (s == "linear") return Architecture::Linear;
  if (s == "conv" || s == "convolutional") return Architecture::Conv;
  throw InvalidArgument("unknown architecture '" + std::string(s) + "'");
}

std::string_view to_string(Activation a) { return a == Activation::ReLU ? "relu" : "none"; }

Activation activation_from_string(std::string_view s) {
  if (s == "none" || s == "linear") return Activation::None;
  if (s == "relu") return Activation::ReLU;
  throw InvalidArgument("unknown activation '" + std::string(s) + "'");
}

void ModelConfig::validate() const {
  if (cutoff < 1) throw InvalidArgument("model cutoff must be >= 1");
  if (latent_dim < 1) throw InvalidArgument("latent dimension must be >= 1");
  if (latent_dim > input_size()) throw InvalidArgument("latent dimension exceeds 8*L");
  if (std::any_of(hidden_widths.begin(), hidden_widths.end(), [](std::size_t w) { return w == 0; })) {
    throw InvalidArgument("hidden widths must be positive");
  }
  if (architecture == Architecture::Conv && channels < 1) throw InvalidArgument("conv channels must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw InvalidArgument("dropout rate must lie in [0, 1)");
}

nlohmann::ordered_json to_json(const ModelConfig& c) {
  nlohmann::ordered_json j;
  j["architecture"] = std::string(to_string(c.architecture));
  j["cutoff"] = c.cutoff;
  j["latent_dim"] = c.latent_dim;
  j["hidden_widths"] = c.hidden_widths;
  j["channels"] = c.channels;
  j["dropout"] = c.dropout;
  j["latent_activation"] = std::string(to_string(c.latent_activation));
  j["output_activation"] = std::string(to_string(c.output_activation));
  return j;
}

ModelConfig model_config_from_json(const nlohmann::ordered_json& j) {
  ModelConfig c;
  try {
    c.architecture = architecture_from_string(j.at("architecture").get<std::string>());
    c.cutoff = j.at("cutoff").get<std::size_t>();
    c.latent_dim = j.at("latent_dim").get<std::size_t>();
    c.hidden_widths = j.at("hidden_widths").get<std::vector<std::size_t>>();
    c.channels = j.at("channels").get<std::size_t>();
    c.dropout = j.at("dropout").get<double>();
    c.latent_activation = activation_from_string(j.value("latent_activation", std::string("none")));
    c.output_activation = activation_from_string(j.value("output_activation", std::string("none")));
    c.validate();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid model config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("invalid model config: ") + e.what());
  }
  return c;
}

Autoencoder::Autoencoder(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  const std::size_t in = config_.input_size();
  const std::size_t k = config_.latent_dim;
  const auto& hidden = config_.hidden_widths;

  if (config_.architecture == Architecture::Linear) {
    std::size_t prev = in;
    for (std::size_t h : hidden) {
      encoder_.emplace<nn::Dense<float>>(prev, h);
      encoder_.emplace<nn::ReLU<float>>();
      encoder_.emplace<nn::Dropout<float>>(config_.dropout);
      prev = h;
    }
    encoder_.emplace<nn::Dense<float>>(prev, k);
    if (config_.latent_activation == Activation::ReLU) encoder_.emplace<nn::ReLU<float>>();

    prev = k;
    for (auto it = hidden.rbegin(); it != hidden.rend(); ++it) {
      decoder_.emplace<nn::Dense<float>>(prev, *it);
      decoder_.emplace<nn::ReLU<float>>();
      prev = *it;
    }
    decoder_.emplace<nn::Dense<float>>(prev, in);
  } else {
    const std::size_t C = config_.channels, L = config_.cutoff;
    encoder_.emplace<nn::Reshape<float>>(nn::Shape{1, cle::kBits, L});
    encoder_.emplace<nn::Conv3x3Same<float>>(1, C);
    encoder_.emplace<nn::ReLU<float>>();
    encoder_.emplace<nn::Conv3x3Same<float>>(C, C);
    encoder_.emplace<nn::ReLU<float>>();
    encoder_.emplace<nn::Reshape<float>>(nn::Shape{C * in});
    std::size_t prev = C * in;
    for (std::size_t h : hidden) {
      encoder_.emplace<nn::Dense<float>>(prev, h);
      encoder_.emplace<nn::ReLU<float>>();
      prev = h;
    }
    encoder_.emplace<nn::Dense<float>>(prev, k);
    if (config_.latent_activation == Activation::ReLU) encoder_.emplace<nn::ReLU<float>>();

    prev = k;
    for (auto it = hidden.rbegin(); it != hidden.rend(); ++it) {
      decoder_.emplace<nn::Dense<float>>(prev, *it);
      decoder_.emplace<nn::ReLU<float>>();
      prev = *it;
    }
    decoder_.emplace<nn::Dense<float>>(prev, C * in);
    decoder_.emplace<nn::Reshape<float>>(nn::Shape{C, cle::kBits, L});
    decoder_.emplace<nn::Conv3x3Same<float>>(C, C);
    decoder_.emplace<nn::ReLU<float>>();
    decoder_.emplace<nn::Conv3x3Same<float>>(C, 1);
    decoder_.emplace<nn::Reshape<float>>(nn::Shape{in});
  }
  if (config_.output_activation == Activation::ReLU) decoder_.emplace<nn::ReLU<float>>();
}

void Autoencoder::initialize(std::uint64_t seed) {
  Rng rng(seed);
  encoder_.init(rng);
  decoder_.init(rng);
}

void Autoencoder::check_input(const nn::Tensor& batch) const {
  if (batch.rank() != 2 || batch.dim(1) != config_.input_size()) {
    throw ShapeError("autoencoder expects [N, " + std::to_string(config_.input_size()) + "], got " +
                     nn::shape_string(batch.shape()));
  }
}

nn::Tensor Autoencoder::forward(const nn::Tensor& batch, nn::Mode mode, Rng* rng) {
  check_input(batch);
  return decoder_.forward(encoder_.forward(batch, mode, rng), mode, rng);
}

void Autoencoder::backward(const nn::Tensor& grad_reconstruction) {
  encoder_.backward(decoder_.backward(grad_reconstruction));
}

nn::Tensor Autoencoder::encode_batch(const nn::Tensor& batch) const {
  check_input(batch);
  return encoder_.infer(batch);
}

nn::Tensor Autoencoder::decode_batch(const nn::Tensor& latent) const {
  if (latent.rank() != 2 || latent.dim(1) != config_.latent_dim) {
    throw ShapeError("decoder expects [N, " + std::to_string(config_.latent_dim) + "], got " +
                     nn::shape_string(latent.shape()));
  }
  return decoder_.infer(latent);
}

nn::Tensor Autoencoder::reconstruct_batch(const nn::Tensor& batch) const {
  return decode_batch(encode_batch(batch));
}

LatentEmbedding Autoencoder::encode(const cle::ColumnMatrix& m) const {
  if (m.config.cutoff != config_.cutoff || m.values.size() != config_.input_size()) {
    throw ShapeError("column matrix " + m.column_id + " has L=" + std::to_string(m.config.cutoff) +
                     ", model expects L=" + std::to_string(config_.cutoff));
  }
  nn::Tensor x({1, config_.input_size()}, m.values);
  auto z = encode_batch(x);
  for (float v : z.values()) {
    if (!std::isfinite(v)) throw NumericError("non-finite embedding for " + m.column_id + " (corrupt parameters?)");
  }
  return {m.column_id, std::move(z.values())};
}

std::vector<LatentEmbedding> Autoencoder::encode_all(std::span<const cle::ColumnMatrix> matrices,
                                                     std::size_t batch_size) const {
  std::vector<LatentEmbedding> out;
  out.reserve(matrices.size());
  batch_size = std::max<std::size_t>(batch_size, 1);
  for (std::size_t start = 0; start < matrices.size(); start += batch_size) {
    const auto chunk = matrices.subspan(start, std::min(batch_size, matrices.size() - start));
    for (const auto& m : chunk) {
      if (m.config.cutoff != config_.cutoff) throw ShapeError("column matrix " + m.column_id + " has the wrong L");
    }
    const auto z = encode_batch(stack_matrices(chunk));
    const std::size_t k = config_.latent_dim;
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      LatentEmbedding e{chunk[i].column_id, std::vector<float>(z.data() + i * k, z.data() + (i + 1) * k)};
      for (float v : e.values) {
        if (!std::isfinite(v)) throw NumericError("non-finite embedding for " + e.column_id);
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

nn::Tensor Autoencoder::decode(const LatentEmbedding& z) const {
  if (z.values.size() != config_.latent_dim) throw ShapeError("latent vector has the wrong dimension");
  auto y = decode_batch(nn::Tensor({1, config_.latent_dim}, z.values));
  y.reshape({cle::kBits, config_.cutoff});
  return y;
}

std::vector<nn::Param<float>> Autoencoder::params() {
  auto p = encoder_.params();
  for (auto& e : p) e.name = "encoder." + e.name;
  for (auto& d : decoder_.params()) {
    d.name = "decoder." + d.name;
    p.push_back(std::move(d));
  }
  return p;
}

std::size_t Autoencoder::parameter_count() { return encoder_.parameter_count() + decoder_.parameter_count(); }

void Autoencoder::zero_grad() {
  encoder_.zero_grad();
  decoder_.zero_grad();
}

bool Autoencoder::has_non_finite_parameters() {
  for (const auto& p : params()) {
    for (float v : p.value->values())
      if (!std::isfinite(v)) return true;
  }
  return false;
}

Autoencoder build_linear_ae(const ModelConfig& config, std::uint64_t seed) {
  if (config.architecture != Architecture::Linear) throw InvalidArgument("build_linear_ae needs a linear config");
  Autoencoder ae(config);
  ae.initialize(seed);
  return ae;
}

Autoencoder build_conv_ae(const ModelConfig& config, std::uint64_t seed) {
  if (config.architecture != Architecture::Conv) throw InvalidArgument("build_conv_ae needs a conv config");
  Autoencoder ae(config);
  ae.initialize(seed);
  return ae;
}

Autoencoder build_autoencoder(const ModelConfig& config, std::uint64_t seed) {
  return config.architecture == Architecture::Linear ? build_linear_ae(config, seed) : build_conv_ae(config, seed);
}

nn::Tensor stack_matrices(std::span<const cle::ColumnMatrix> matrices) {
  std::vector<const cle::ColumnMatrix*> ptrs;
  ptrs.reserve(matrices.size());
  for (const auto& m : matrices) ptrs.push_back(&m);
  return stack_matrices(std::span<const cle::ColumnMatrix* const>(ptrs));
}

nn::Tensor stack_matrices(std::span<const cle::ColumnMatrix* const> matrices) {
  if (matrices.empty()) throw InvalidArgument("cannot stack an empty set of column matrices");
  const std::size_t width = matrices.front()->values.size();
  nn::Tensor batch({matrices.size(), width});
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    if (matrices[i]->values.size() != width) throw ShapeError("column matrices differ in shape");
    std::copy(matrices[i]->values.begin(), matrices[i]->values.end(), batch.data() + i * width);
  }
  return batch;
}

}  // namespace cae
