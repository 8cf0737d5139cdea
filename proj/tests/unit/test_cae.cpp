#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "../support/gradcheck.hpp"
#include "cae/autoencoder.hpp"
#include "cae/binary_io.hpp"
#include "cae/checkpoint.hpp"
#include "cae/error.hpp"
#include "cae/random.hpp"
#include "cae/training.hpp"

using namespace cae;

namespace {

ModelConfig small_config(Architecture arch, std::size_t L = 12, std::size_t k = 6) {
  ModelConfig c;
  c.architecture = arch;
  c.cutoff = L;
  c.latent_dim = k;
  c.hidden_widths = {32};
  c.channels = 4;
  return c;
}

std::vector<cle::ColumnMatrix> random_matrices(std::size_t n, std::size_t L, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<cle::ColumnMatrix> out;
  for (std::size_t i = 0; i < n; ++i) {
    cle::ColumnMatrix m;
    m.column_id = "t/c" + std::to_string(i);
    m.config = {L, cle::Mode::Alternative};
    m.values.resize(8 * L);
    for (auto& v : m.values) v = static_cast<float>(rng.uniform01());
    out.push_back(std::move(m));
  }
  return out;
}

void zero_all(Autoencoder& model) {
  for (auto& p : model.params()) p.value->fill(0.0f);
}

std::filesystem::path temp_path(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(BuildLinear, DefaultParameterCount) {
  ModelConfig c;
  c.architecture = Architecture::Linear;
  auto model = build_linear_ae(c, 1);
  // 2000->512->100 and 100->512->2000, weights plus biases.
  EXPECT_EQ(model.parameter_count(), 2000u * 512 + 512 + 512 * 100 + 100 + 100 * 512 + 512 + 512 * 2000 + 2000);
  EXPECT_EQ(model.parameter_count(), 2153524u);
}

TEST(BuildConv, DefaultShapes) {
  ModelConfig c;
  auto model = build_conv_ae(c, 1);
  EXPECT_EQ(model.parameter_count(), 32908469u);
  bool found_flatten = false;
  for (std::size_t i = 0; i < model.encoder().size(); ++i) {
    if (auto* d = dynamic_cast<nn::Dense<float>*>(&model.encoder().layer(i))) {
      if (!found_flatten) {
        EXPECT_EQ(d->in_features(), 16u * 8 * 250);
      }
      found_flatten = true;
    }
  }
  EXPECT_TRUE(found_flatten);
  nn::Tensor x({1, 2000}, 0.5f);
  EXPECT_EQ(model.encode_batch(x).shape(), (nn::Shape{1, 100}));
}

TEST(Build, OutputShapeEqualsInputShapeForAllVariants) {
  for (auto arch : {Architecture::Linear, Architecture::Conv}) {
    for (std::size_t L : {1u, 5u, 12u}) {
      auto model = build_autoencoder(small_config(arch, L, 4), 3);
      nn::Tensor x({3, 8 * L}, 0.25f);
      EXPECT_EQ(model.reconstruct_batch(x).shape(), x.shape());
      EXPECT_EQ(model.decode({"z", std::vector<float>(4, 0.1f)}).shape(), (nn::Shape{8, L}));
    }
  }
}

TEST(Build, SeedDeterminesInitialParameters) {
  for (auto arch : {Architecture::Linear, Architecture::Conv}) {
    auto a = build_autoencoder(small_config(arch), 7);
    auto b = build_autoencoder(small_config(arch), 7);
    auto c = build_autoencoder(small_config(arch), 8);
    auto pa = a.params(), pb = b.params(), pc = c.params();
    bool any_diff = false;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      EXPECT_EQ(*pa[i].value, *pb[i].value);
      any_diff |= !(*pa[i].value == *pc[i].value);
    }
    EXPECT_TRUE(any_diff);
  }
}

TEST(Build, RejectsBadConfig) {
  auto c = small_config(Architecture::Linear);
  c.latent_dim = 0;
  EXPECT_THROW(build_autoencoder(c, 1), InvalidArgument);
  c = small_config(Architecture::Linear);
  c.dropout = 1.0;
  EXPECT_THROW(build_autoencoder(c, 1), InvalidArgument);
  EXPECT_THROW(build_conv_ae(small_config(Architecture::Linear), 1), InvalidArgument);
}

TEST(Encode, ZeroWeightsGiveBias) {
  auto model = build_autoencoder(small_config(Architecture::Linear), 1);
  zero_all(model);
  auto params = model.params();
  // Last encoder parameter is the latent bias.
  std::size_t latent_bias = 0;
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params[i].name.starts_with("encoder")) latent_bias = i;
  for (std::size_t j = 0; j < 6; ++j) (*params[latent_bias].value)[j] = static_cast<float>(j) - 2.5f;
  cle::ColumnMatrix m{"t/c", {12, cle::Mode::Alternative}, std::vector<float>(96, 0.0f)};
  const auto z = model.encode(m);
  EXPECT_EQ(z.values, (std::vector<float>{-2.5f, -1.5f, -0.5f, 0.5f, 1.5f, 2.5f}));
}

TEST(Decode, ZeroLatentThroughZeroDecoderGivesBias) {
  auto model = build_autoencoder(small_config(Architecture::Linear), 1);
  zero_all(model);
  auto params = model.params();
  auto& out_bias = *params.back().value;
  for (std::size_t i = 0; i < out_bias.size(); ++i) out_bias[i] = static_cast<float>(i) * 0.01f;
  const auto y = model.decode({"z", std::vector<float>(6, 0.0f)});
  EXPECT_EQ(y.values(), out_bias.values());
}

TEST(Encode, DropoutFreeAndDeterministic) {
  auto model = build_autoencoder(small_config(Architecture::Linear), 2);
  const auto ms = random_matrices(3, 12, 4);
  const auto a = model.encode(ms[0]);
  EXPECT_EQ(a.values, model.encode(ms[0]).values);
  EXPECT_EQ(a.values.size(), 6u);
  auto copy = ms[0];
  copy.column_id = "other";
  EXPECT_EQ(model.encode(copy).values, a.values);
  const auto all = model.encode_all(ms, 2);
  ASSERT_EQ(all.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto single = model.encode(ms[i]).values;
    for (std::size_t j = 0; j < single.size(); ++j) EXPECT_NEAR(all[i].values[j], single[j], 1e-5);
  }
}

TEST(Encode, DefaultLatentDimension) {
  ModelConfig c;
  c.architecture = Architecture::Linear;
  auto model = build_autoencoder(c, 1);
  cle::ColumnMatrix m{"t/c", {}, std::vector<float>(2000, 0.5f)};
  EXPECT_EQ(model.encode(m).values.size(), 100u);
}

TEST(Encode, WrongCutoffRejected) {
  auto model = build_autoencoder(small_config(Architecture::Linear), 1);
  cle::ColumnMatrix m{"t/c", {13, cle::Mode::Alternative}, std::vector<float>(104, 0.0f)};
  EXPECT_THROW(model.encode(m), ShapeError);
}

TEST(Autoencoder, DoubleGradientCheckOfFullLinearModel) {
  // The float model's structure rebuilt in double precision.
  nn::Sequential<double> net;
  net.emplace<nn::Dense<double>>(16, 8);
  net.emplace<nn::ReLU<double>>();
  net.emplace<nn::Dropout<double>>(0.2);
  net.emplace<nn::Dense<double>>(8, 3);
  net.emplace<nn::Dense<double>>(3, 8);
  net.emplace<nn::ReLU<double>>();
  net.emplace<nn::Dense<double>>(8, 16);
  Rng rng(21);
  net.init(rng);
  const auto x = cae::testing::random_tensor({4, 16}, 22);
  net.zero_grad();
  net.backward(nn::mse_loss(x, net.forward(x, nn::Mode::Eval)).grad);
  const double h = 1e-5;
  for (auto& p : net.params()) {
    const auto analytic = p.grad->values();
    for (std::size_t i = 0; i < p.value->size(); ++i) {
      double& slot = (*p.value)[i];
      const double saved = slot;
      slot = saved + h;
      const double up = nn::mse_value(x, net.forward(x, nn::Mode::Eval));
      slot = saved - h;
      const double down = nn::mse_value(x, net.forward(x, nn::Mode::Eval));
      slot = saved;
      const double numeric = (up - down) / (2 * h);
      EXPECT_LT(std::abs(analytic[i] - numeric) / std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6}), 1e-3)
          << p.name << "[" << i << "]";
    }
  }
}

TEST(Overfit, FiveSamplesReduceLossHundredfold) {
  for (auto arch : {Architecture::Linear, Architecture::Conv}) {
    auto config = small_config(arch, 10, 8);
    config.hidden_widths = {64};
    config.dropout = 0.0;
    auto model = build_autoencoder(config, 5);
    const auto samples = random_matrices(5, 10, 6);
    const double initial = train::evaluate_reconstruction(model, samples);
    const auto losses = train::train_steps(model, samples, 2000, 1e-3, 5, 7);
    EXPECT_EQ(losses.size(), 2000u);
    EXPECT_LT(train::evaluate_reconstruction(model, samples), initial / 100.0) << to_string(arch);
  }
}

TEST(Overfit, TenSamplesDecodeWithinTolerance) {
  auto config = small_config(Architecture::Conv, 10, 16);
  config.hidden_widths = {64};
  auto model = build_autoencoder(config, 9);
  const auto samples = random_matrices(10, 10, 10);
  train::train_steps(model, samples, 2000, 1e-3, 10, 11);
  for (const auto& m : samples) {
    const auto recon = model.decode(model.encode(m));
    for (std::size_t i = 0; i < m.values.size(); ++i) EXPECT_LT(std::abs(recon[i] - m.values[i]), 0.05f);
  }
}

TEST(Overfit, IdentityCapableLinearModel) {
  auto config = small_config(Architecture::Linear, 2, 16);
  config.hidden_widths = {64};
  config.dropout = 0.0;
  auto model = build_autoencoder(config, 12);
  const auto samples = random_matrices(4, 2, 13);
  train::train_steps(model, samples, 3000, 1e-3, 4, 14);
  EXPECT_LT(train::evaluate_reconstruction(model, samples), 1e-6);
}

TEST(Checkpoint, RoundTripPreservesParametersAndEmbeddings) {
  for (auto arch : {Architecture::Linear, Architecture::Conv}) {
    auto model = build_autoencoder(small_config(arch), 31);
    const cle::EncodingConfig enc{12, cle::Mode::Concatenated};
    const TrainingMetadata meta{3, 0.25, 0.5, 99};
    const auto path = temp_path("cae_test_model.cae");
    save_checkpoint(path, model, enc, meta);
    auto loaded = load_checkpoint(path);
    EXPECT_EQ(loaded.model.config(), model.config());
    EXPECT_EQ(loaded.encoding, enc);
    EXPECT_EQ(loaded.training, meta);
    auto pa = model.params(), pb = loaded.model.params();
    ASSERT_EQ(pa.size(), pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(*pa[i].value, *pb[i].value);
    for (const auto& m : random_matrices(4, 12, 32)) EXPECT_EQ(model.encode(m).values, loaded.model.encode(m).values);
    EXPECT_EQ(serialize_checkpoint(loaded.model, enc, meta), io::read_file(path));
  }
}

TEST(Checkpoint, CorruptionIsRejected) {
  auto model = build_autoencoder(small_config(Architecture::Linear), 1);
  const auto bytes = serialize_checkpoint(model, {12, cle::Mode::Alternative}, {});

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  try {
    deserialize_checkpoint(bad_magic);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("not a CAE checkpoint"), std::string::npos);
  }

  auto newer = bytes;
  newer[4] = 2;
  try {
    deserialize_checkpoint(newer);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("version 2"), std::string::npos);
  }

  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    auto flipped = bytes;
    const auto pos = 6 + rng.uniform_index(flipped.size() - 6);
    flipped[pos] ^= static_cast<std::uint8_t>(1u << rng.uniform_index(8));
    EXPECT_THROW(deserialize_checkpoint(flipped), FormatError);
  }
  auto truncated = bytes;
  truncated.resize(bytes.size() / 2);
  EXPECT_THROW(deserialize_checkpoint(truncated), FormatError);
  EXPECT_THROW(deserialize_checkpoint(std::span<const std::uint8_t>(bytes.data(), 3)), FormatError);
}

TEST(Checkpoint, RejectsMismatchedEncoding) {
  auto model = build_autoencoder(small_config(Architecture::Linear), 1);
  EXPECT_THROW(serialize_checkpoint(model, {13, cle::Mode::Alternative}, {}), InvalidArgument);
}

TEST(Checkpoint, MissingFileIsIoError) { EXPECT_THROW(load_checkpoint("/nonexistent/x.cae"), IoError); }

TEST(ModelConfigJson, RoundTrip) {
  auto c = small_config(Architecture::Conv);
  c.latent_activation = Activation::ReLU;
  EXPECT_EQ(model_config_from_json(to_json(c)), c);
  auto j = to_json(c);
  j["architecture"] = "transformer";
  EXPECT_THROW(model_config_from_json(j), FormatError);
}
