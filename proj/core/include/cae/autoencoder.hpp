#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cae/cle.hpp"
#include "cae/nn/sequential.hpp"

namespace cae {

enum class Architecture : std::uint8_t { Linear, Conv };

std::string_view to_string(Architecture a);
Architecture architecture_from_string(std::string_view s);

enum class Activation : std::uint8_t { None, ReLU };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view s);

struct ModelConfig {
  Architecture architecture = Architecture::Conv;
  std::size_t cutoff = 250;  // input is 8 x cutoff
  std::size_t latent_dim = 100;
  std::vector<std::size_t> hidden_widths{512};
  std::size_t channels = 16;
  double dropout = 0.2;  // Linear encoder only
  Activation latent_activation = Activation::None;
  Activation output_activation = Activation::None;

  std::size_t input_size() const { return cle::kBits * cutoff; }
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

nlohmann::ordered_json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::ordered_json& j);

struct LatentEmbedding {
  std::string column_id;
  std::vector<float> values;
};

// Encoder/decoder pair. Both take and return flat [N, 8L] batches; the conv
// variant reshapes internally.
class Autoencoder {
 public:
  explicit Autoencoder(ModelConfig config);

  Autoencoder(Autoencoder&&) noexcept = default;
  Autoencoder& operator=(Autoencoder&&) noexcept = default;

  const ModelConfig& config() const { return config_; }

  nn::Sequential<float>& encoder() { return encoder_; }
  nn::Sequential<float>& decoder() { return decoder_; }

  // Glorot-uniform initialization from a seed.
  void initialize(std::uint64_t seed);

  // Full pass, recording activations for backward().
  nn::Tensor forward(const nn::Tensor& batch, nn::Mode mode, Rng* rng = nullptr);
  void backward(const nn::Tensor& grad_reconstruction);

  // Inference. Dropout disabled; no cached state is kept.
  nn::Tensor encode_batch(const nn::Tensor& batch) const;
  nn::Tensor decode_batch(const nn::Tensor& latent) const;
  nn::Tensor reconstruct_batch(const nn::Tensor& batch) const;

  LatentEmbedding encode(const cle::ColumnMatrix& m) const;
  std::vector<LatentEmbedding> encode_all(std::span<const cle::ColumnMatrix> matrices,
                                          std::size_t batch_size = 64) const;
  nn::Tensor decode(const LatentEmbedding& z) const;  // [8, L]

  std::vector<nn::Param<float>> params();
  std::size_t parameter_count();
  void zero_grad();
  bool has_non_finite_parameters();

 private:
  void check_input(const nn::Tensor& batch) const;

  ModelConfig config_;
  nn::Sequential<float> encoder_;
  nn::Sequential<float> decoder_;
};

// Dense(8L->h) ReLU Dropout ... Dense(->k) | Dense(k->h) ReLU ... Dense(->8L).
Autoencoder build_linear_ae(const ModelConfig& config, std::uint64_t seed);

// Conv(1->C) ReLU Conv(C->C) ReLU Flatten Dense(->h) ReLU Dense(->k) |
// Dense(k->h) ReLU Dense(->C*8L) Reshape Conv(C->C) ReLU Conv(C->1).
Autoencoder build_conv_ae(const ModelConfig& config, std::uint64_t seed);

Autoencoder build_autoencoder(const ModelConfig& config, std::uint64_t seed);

// Stacks column matrices into a [N, 8L] batch.
nn::Tensor stack_matrices(std::span<const cle::ColumnMatrix> matrices);
nn::Tensor stack_matrices(std::span<const cle::ColumnMatrix* const> matrices);

}  // namespace cae
