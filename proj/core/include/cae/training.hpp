#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cae/autoencoder.hpp"
#include "cae/cle.hpp"

namespace cae::train {

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  bool shuffle = true;

  // Reconstruction dumps of validation samples at these (1-based) epochs.
  std::set<std::size_t> dump_epochs{1, 50, 100};
  std::size_t dump_samples = 2;
  std::filesystem::path dump_dir;  // empty: no dumps

  void validate() const;
};

struct LossHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;  // empty when no validation set was given
};

// Per-epoch notification: (epoch 1-based, train loss, val loss or NaN).
using EpochCallback = std::function<void(std::size_t, double, double)>;

// Mini-batch Adam on mean-per-element MSE. The last partial batch is kept.
// Dropout is active for training passes and disabled for validation.
LossHistory train(Autoencoder& model, std::span<const cle::ColumnMatrix> train_set,
                  std::span<const cle::ColumnMatrix> val_set, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// Sample order of a shuffled epoch (1-based). Drawn from its own stream so it
// does not depend on dropout draws.
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch);

// Called with the number of completed steps; returning true stops early.
using StepCallback = std::function<bool(std::size_t)>;

// Runs up to `steps` Adam updates over the set (cycling through batches, no
// shuffling) and returns each step's batch loss, measured before its update.
std::vector<double> train_steps(Autoencoder& model, std::span<const cle::ColumnMatrix> samples, std::size_t steps,
                                double learning_rate, std::size_t batch_size, std::uint64_t seed,
                                const StepCallback& stop = {});

// Mean per-element MSE over the set with dropout disabled. Never mutates
// parameters. Throws on non-finite parameters.
double evaluate_reconstruction(Autoencoder& model, std::span<const cle::ColumnMatrix> set,
                               std::size_t batch_size = 64);

// Writes <prefix>_input.pgm and <prefix>_recon.pgm: binary P5, 8 rows x L
// columns, values clamped to [0,1] and scaled to 0..255.
void dump_reconstruction(const nn::Tensor& input, const nn::Tensor& reconstruction,
                         const std::filesystem::path& prefix);

std::uint8_t to_pixel(float v);
std::vector<std::uint8_t> encode_pgm(const nn::Tensor& matrix);  // matrix [8, L] or [8L] with L = size/8

std::string loss_history_csv(const LossHistory& history);

}  // namespace cae::train
