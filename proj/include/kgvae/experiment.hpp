#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kgvae/datasets.hpp"
#include "kgvae/metrics.hpp"
#include "kgvae/trainer.hpp"

namespace kgvae {

/// One training arm: a name and its kernel set (empty = standard ELBO).
struct ArmConfig {
  std::string name;
  std::vector<KernelSpec> kernels;
};

/// Fully explicit experiment description, parsed from JSON. Every knob is
/// required; there are no hidden defaults.
struct ExperimentConfig {
  // Data: either a JSONL file or a generated corpus.
  std::string data_path;
  CorpusKind corpus_kind = CorpusKind::kLobster;
  std::string corpus_preset;
  std::size_t corpus_count = 0;
  std::uint64_t corpus_seed = 0;

  double train_frac = 0.8;
  std::uint64_t split_seed = 0;

  TrainConfig train;  // kernels and seed are set per arm / run
  std::vector<std::uint64_t> seeds;
  /// Every arm's lambdas are multiplied by this factor before training, so
  /// configs can list reference weights and record the rescaling alongside.
  double lambda_rescale = 1.0;
  std::vector<ArmConfig> arms;

  /// Graphs to generate per run; 0 means "as many as the test split".
  std::size_t generate_count = 0;
  EvalOptions eval;

  std::string output_dir;
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);

struct RunResult {
  std::string arm;
  std::uint64_t seed = 0;
  StructureReport report;
  std::vector<EpochLog> log;
};

struct ExperimentResult {
  std::vector<RunResult> runs;
  std::size_t train_size = 0;
  std::size_t test_size = 0;

  /// Markdown table: arm, seed, the four MMDs, and both edge averages.
  std::string comparison_table() const;
  std::string comparison_csv() const;
};

/// Runs every (arm, seed) pair on one shared train/test split. When
/// output_dir is set, each run writes its checkpoint, loss log, samples and
/// report there, along with comparison.csv / comparison.md.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace kgvae
