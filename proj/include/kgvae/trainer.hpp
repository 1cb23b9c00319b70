#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "kgvae/graph.hpp"
#include "kgvae/kernels.hpp"
#include "kgvae/model.hpp"
#include "kgvae/objective.hpp"

namespace kgvae {

struct TrainConfig {
  int epochs = 500;
  double lr = 1e-4;
  double beta = 20.0;
  std::size_t batch_size = 8;
  std::uint64_t seed = 0;
  ArchConfig arch = ArchConfig::desk();
  DecoderType decoder = DecoderType::kFc;
  std::vector<KernelSpec> kernels;
  /// Write an intermediate checkpoint every k epochs (0 = only the final one).
  int checkpoint_interval = 0;

  /// Throws ValidationError on epochs < 1, lr <= 0, beta < 0, batch_size 0
  /// or an invalid kernel spec.
  void validate() const;
};

/// One row of the training log: epoch means of the batch-averaged losses.
struct EpochLog {
  int epoch = 0;
  double recon_nll = 0.0;
  double kl = 0.0;
  double kernel_penalty = 0.0;
  double total = 0.0;
};

/// A trained model plus what generation needs to know about the data.
struct Checkpoint {
  GraphVae model;
  TrainConfig config;
  /// Node counts of the training graphs; generation draws n uniformly here.
  std::vector<std::size_t> node_counts;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochLog> log;
};

/// Builds the model config (n_max, feature width) for a training set.
ModelConfig model_config_for(const TrainConfig& cfg, std::span<const Graph> graphs);

/// Seeded minibatch training of the kernel ELBO. When `checkpoint_path` is
/// set and cfg.checkpoint_interval > 0, intermediate checkpoints are written
/// to "<path>.epoch<k>". Throws NumericalError on a non-finite loss.
TrainResult train(const TrainConfig& cfg, std::span<const Graph> train_set,
                  const std::optional<std::filesystem::path>& checkpoint_path = std::nullopt);

/// Draws `count` graphs from the prior; the node count of each is uniform
/// over the checkpoint's training node counts.
std::vector<Graph> generate(const Checkpoint& ckpt, std::size_t count, std::uint64_t seed);

// Checkpoint = parameter file at `path` (see params.hpp) plus a JSON sidecar
// at "<path>.meta.json" with the architecture, decoder, n_max, feature
// layout, kernel config and training node counts.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// CSV with header epoch,recon_nll,kl,kernel_penalty,total; values written
/// with 17 significant digits.
void write_log_csv(const std::filesystem::path& path, std::span<const EpochLog> log);

}  // namespace kgvae
