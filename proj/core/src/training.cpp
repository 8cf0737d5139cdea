#include "cae/training.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cae/binary_io.hpp"
#include "cae/error.hpp"
#include "cae/nn/adam.hpp"
#include "cae/nn/loss.hpp"
#include "cae/random.hpp"

#if defined(__SSE__)
#include <xmmintrin.h>
#endif

namespace cae::train {

namespace {

// Flushes denormals to zero while training. Adam's second moments decay into
// the denormal range late in a run, where x86 arithmetic is very slow.
class DenormalGuard {
 public:
#if defined(__SSE__)
  DenormalGuard() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }  // FTZ | DAZ
  ~DenormalGuard() { _mm_setcsr(saved_); }

 private:
  unsigned saved_;
#endif
};

void check_set(std::span<const cle::ColumnMatrix> set, const Autoencoder& model, std::string_view what) {
  for (const auto& m : set) {
    if (m.values.size() != model.config().input_size()) {
      throw ShapeError(std::string(what) + " sample " + m.column_id + " does not match the model input shape");
    }
  }
}

nn::Tensor gather(std::span<const cle::ColumnMatrix> set, std::span<const std::size_t> idx) {
  std::vector<const cle::ColumnMatrix*> ptrs;
  ptrs.reserve(idx.size());
  for (auto i : idx) ptrs.push_back(&set[i]);
  return stack_matrices(std::span<const cle::ColumnMatrix* const>(ptrs));
}

// One Adam update on a batch; returns the batch loss before the update.
double train_batch(Autoencoder& model, nn::Adam<float>& adam, const std::vector<nn::Param<float>>& params,
                   const nn::Tensor& batch, Rng& rng) {
  model.zero_grad();
  const auto recon = model.forward(batch, nn::Mode::Train, &rng);
  auto loss = nn::mse_loss(batch, recon, nn::Reduction::Mean);
  if (!std::isfinite(loss.value)) return loss.value;
  model.backward(loss.grad);
  adam.step(params);
  return loss.value;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
  if (batch_size < 1) throw InvalidArgument("batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
}

LossHistory train(Autoencoder& model, std::span<const cle::ColumnMatrix> train_set,
                  std::span<const cle::ColumnMatrix> val_set, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw InvalidArgument("training set is empty");
  check_set(train_set, model, "training");
  check_set(val_set, model, "validation");

  const auto params = model.params();
  nn::Adam<float> adam(params, nn::AdamConfig{.learning_rate = config.learning_rate});
  DenormalGuard ftz;
  Rng rng(config.seed);

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  LossHistory history;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.shuffle) order = epoch_order(train_set.size(), config.seed, epoch);
    double weighted = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      const std::size_t n = std::min(config.batch_size, order.size() - start);
      const auto batch = gather(train_set, std::span(order).subspan(start, n));
      const double loss = train_batch(model, adam, params, batch, rng);
      if (!std::isfinite(loss)) {
        throw NumericError(fmt::format("non-finite training loss at epoch {} batch {}", epoch, batch_index + 1));
      }
      weighted += loss * static_cast<double>(n);
    }
    model.encoder().clear_state();
    model.decoder().clear_state();
    const double train_loss = weighted / static_cast<double>(order.size());
    history.train_loss.push_back(train_loss);

    double val_loss = std::numeric_limits<double>::quiet_NaN();
    if (!val_set.empty()) {
      val_loss = evaluate_reconstruction(model, val_set, config.batch_size);
      history.val_loss.push_back(val_loss);
    }

    if (!config.dump_dir.empty() && config.dump_epochs.contains(epoch) && !val_set.empty()) {
      std::filesystem::create_directories(config.dump_dir);
      const std::size_t count = std::min(config.dump_samples, val_set.size());
      for (std::size_t i = 0; i < count; ++i) {
        nn::Tensor x({1, model.config().input_size()}, val_set[i].values);
        const auto y = model.reconstruct_batch(x);
        dump_reconstruction(x, y, config.dump_dir / fmt::format("epoch{:03d}_sample{:02d}", epoch, i));
      }
    }
    if (on_epoch) on_epoch(epoch, train_loss, val_loss);
  }
  return history;
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  Rng rng(seeds::derive(seed, epoch));
  return rng.permutation(n);
}

std::vector<double> train_steps(Autoencoder& model, std::span<const cle::ColumnMatrix> samples, std::size_t steps,
                                double learning_rate, std::size_t batch_size, std::uint64_t seed,
                                const StepCallback& stop) {
  if (samples.empty()) throw InvalidArgument("training set is empty");
  check_set(samples, model, "training");
  const auto params = model.params();
  nn::Adam<float> adam(params, nn::AdamConfig{.learning_rate = learning_rate});
  DenormalGuard ftz;
  Rng rng(seed);
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<double> losses;
  losses.reserve(steps);
  std::size_t cursor = 0;
  for (std::size_t s = 0; s < steps; ++s) {
    if (cursor >= order.size()) cursor = 0;
    const std::size_t n = std::min(batch_size, order.size() - cursor);
    const auto batch = gather(samples, std::span(order).subspan(cursor, n));
    cursor += n;
    const double loss = train_batch(model, adam, params, batch, rng);
    if (!std::isfinite(loss)) throw NumericError(fmt::format("non-finite training loss at step {}", s + 1));
    losses.push_back(loss);
    if (stop && stop(s + 1)) break;
  }
  model.encoder().clear_state();
  model.decoder().clear_state();
  return losses;
}

double evaluate_reconstruction(Autoencoder& model, std::span<const cle::ColumnMatrix> set, std::size_t batch_size) {
  if (set.empty()) throw InvalidArgument("evaluation set is empty");
  if (model.has_non_finite_parameters()) throw NumericError("model has non-finite parameters");
  check_set(set, model, "evaluation");
  batch_size = std::max<std::size_t>(batch_size, 1);
  double total = 0.0;
  for (std::size_t start = 0; start < set.size(); start += batch_size) {
    const auto chunk = set.subspan(start, std::min(batch_size, set.size() - start));
    const auto batch = stack_matrices(chunk);
    const auto recon = model.reconstruct_batch(batch);
    total += nn::mse_value(batch, recon, nn::Reduction::Sum);
  }
  return total / static_cast<double>(set.size() * model.config().input_size());
}

std::uint8_t to_pixel(float v) {
  if (!(v > 0.0f)) return 0;  // also maps NaN to black
  if (v >= 1.0f) return 255;
  return static_cast<std::uint8_t>(std::lround(v * 255.0f));
}

std::vector<std::uint8_t> encode_pgm(const nn::Tensor& matrix) {
  if (matrix.size() % cle::kBits != 0 || matrix.empty()) throw ShapeError("PGM dump expects an 8 x L matrix");
  const std::size_t width = matrix.size() / cle::kBits;
  const std::string header = fmt::format("P5\n{} {}\n255\n", width, cle::kBits);
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + matrix.size());
  for (float v : matrix.values()) out.push_back(to_pixel(v));
  return out;
}

void dump_reconstruction(const nn::Tensor& input, const nn::Tensor& reconstruction,
                         const std::filesystem::path& prefix) {
  if (input.size() != reconstruction.size()) throw ShapeError("dump_reconstruction: shapes differ");
  auto with_suffix = [&](std::string_view s) {
    auto p = prefix;
    p += s;
    return p;
  };
  io::write_file(with_suffix("_input.pgm"), encode_pgm(input));
  io::write_file(with_suffix("_recon.pgm"), encode_pgm(reconstruction));
}

std::string loss_history_csv(const LossHistory& h) {
  std::string out = "epoch,train_loss,val_loss\n";
  for (std::size_t i = 0; i < h.train_loss.size(); ++i) {
    if (i < h.val_loss.size()) {
      out += fmt::format("{},{},{}\n", i + 1, h.train_loss[i], h.val_loss[i]);
    } else {
      out += fmt::format("{},{},\n", i + 1, h.train_loss[i]);
    }
  }
  return out;
}

}  // namespace cae::train
