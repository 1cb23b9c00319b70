// Command-line driver: dataset creation, training, generation, evaluation
// and multi-arm experiments.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "kgvae/config.hpp"
#include "kgvae/datasets.hpp"
#include "kgvae/error.hpp"
#include "kgvae/experiment.hpp"
#include "kgvae/metrics.hpp"
#include "kgvae/trainer.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

using namespace kgvae;

std::vector<KernelSpec> resolve_kernels(const std::string& arg) {
  if (arg == "none") return {};
  if (arg == "grid" || arg == "lobster" || arg == "protein") return default_kernel_specs(arg);
  std::ifstream f(arg);
  if (!f) throw ValidationError("kernel config '" + arg + "' is not a file, 'none' or a dataset name");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(arg + ": " + e.what());
  }
  return kernel_specs_from_json(j);
}

void print_summary(const std::vector<Graph>& graphs) {
  std::size_t lo = std::numeric_limits<std::size_t>::max(), hi = 0;
  double edges = 0.0;
  for (const auto& g : graphs) {
    lo = std::min(lo, g.num_nodes());
    hi = std::max(hi, g.num_nodes());
    edges += static_cast<double>(g.num_edges());
  }
  if (graphs.empty()) lo = 0;
  std::cout << "graphs: " << graphs.size() << "\n"
            << "nodes:  [" << lo << ", " << hi << "]\n"
            << "avg edges: " << (graphs.empty() ? 0.0 : edges / static_cast<double>(graphs.size()))
            << "\n";
}

std::filesystem::path csv_path_for(const std::filesystem::path& report) {
  std::filesystem::path p = report;
  p.replace_extension(".csv");
  if (p == report) p += ".csv";
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel-regularized graph VAE toolkit"};
  app.require_subcommand(1);

  // dataset make / split
  auto* dataset = app.add_subcommand("dataset", "Create or split graph corpora");
  dataset->require_subcommand(1);

  std::string kind = "lobster", preset = "desk", out_path;
  std::size_t count = 100;
  std::uint64_t seed = 0;
  auto* make = dataset->add_subcommand("make", "Generate a synthetic corpus as JSONL");
  make->add_option("--kind", kind, "grid or lobster")->check(CLI::IsMember({"grid", "lobster"}));
  make->add_option("--count", count, "Number of graphs");
  make->add_option("--preset", preset, "Size preset")->check(CLI::IsMember({"paper", "desk"}));
  make->add_option("--seed", seed, "Random seed");
  make->add_option("--out", out_path, "Output JSONL path")->required();

  std::string data_path, train_out, test_out;
  double train_frac = 0.8;
  auto* split_cmd = dataset->add_subcommand("split", "Seeded train/test split of a JSONL corpus");
  split_cmd->add_option("--data", data_path, "Input JSONL")->required();
  split_cmd->add_option("--train-frac", train_frac, "Training fraction");
  split_cmd->add_option("--seed", seed, "Random seed");
  split_cmd->add_option("--train-out", train_out, "Training split JSONL")->required();
  split_cmd->add_option("--test-out", test_out, "Test split JSONL")->required();

  // train
  std::string decoder = "fc", kernels = "none", arch = "desk", log_path;
  int epochs = 500;
  double lr = 1e-4, beta = 20.0;
  std::size_t batch_size = 8;
  std::uint64_t split_seed = 0;
  int checkpoint_interval = 0;
  auto* train_cmd = app.add_subcommand("train", "Train on the 80% split of a corpus");
  train_cmd->add_option("--data", data_path, "Corpus JSONL")->required();
  train_cmd->add_option("--decoder", decoder, "fc, dot or sbm")
      ->check(CLI::IsMember({"fc", "dot", "sbm"}));
  train_cmd->add_option("--kernels", kernels,
                        "Kernel config JSON file, 'none', or grid|lobster|protein defaults");
  train_cmd->add_option("--epochs", epochs, "Training epochs");
  train_cmd->add_option("--seed", seed, "Training seed");
  train_cmd->add_option("--out", out_path, "Checkpoint path")->required();
  train_cmd->add_option("--lr", lr, "Adam learning rate");
  train_cmd->add_option("--beta", beta, "KL weight");
  train_cmd->add_option("--batch-size", batch_size, "Graphs per minibatch");
  train_cmd->add_option("--arch", arch, "Architecture preset")->check(CLI::IsMember({"desk", "paper"}));
  train_cmd->add_option("--split-seed", split_seed, "Seed of the 80/20 split");
  train_cmd->add_option("--log", log_path, "Loss CSV path (default <out>.loss.csv)");
  train_cmd->add_option("--test-out", test_out, "Also write the held-out split here");
  train_cmd->add_option("--checkpoint-interval", checkpoint_interval,
                        "Intermediate checkpoint every k epochs");

  // generate
  std::string ckpt_path;
  auto* gen_cmd = app.add_subcommand("generate", "Sample graphs from a trained model");
  gen_cmd->add_option("--ckpt", ckpt_path, "Checkpoint path")->required();
  gen_cmd->add_option("--count", count, "Number of graphs")->required();
  gen_cmd->add_option("--seed", seed, "Random seed");
  gen_cmd->add_option("--out", out_path, "Output JSONL")->required();

  // evaluate
  std::string generated_path, plot_dir;
  double sigma = 1.0;
  auto* eval_cmd = app.add_subcommand("evaluate", "Structure-metric MMD report");
  eval_cmd->add_option("--generated", generated_path, "Generated JSONL")->required();
  eval_cmd->add_option("--test", test_out, "Test JSONL")->required();
  eval_cmd->add_option("--out", out_path, "Report JSON path (CSV written alongside)")->required();
  eval_cmd->add_option("--plot", plot_dir, "Directory for histogram plot data");
  eval_cmd->add_option("--sigma", sigma, "Gaussian MMD bandwidth");

  // experiment run
  std::string config_path;
  auto* exp_cmd = app.add_subcommand("experiment", "Multi-arm experiments");
  exp_cmd->require_subcommand(1);
  auto* run_cmd = exp_cmd->add_subcommand("run", "Run every arm and seed of a config");
  run_cmd->add_option("--config", config_path, "Experiment JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*make) {
      const auto k = corpus_kind_from_string(kind);
      const auto graphs = make_corpus(k, count, CorpusPreset::get(k, preset), seed);
      save_jsonl(out_path, graphs);
      print_summary(graphs);
    } else if (*split_cmd) {
      auto [tr, te] = split(load_jsonl(data_path), train_frac, seed);
      save_jsonl(train_out, tr);
      save_jsonl(test_out, te);
      std::cout << "train: " << tr.size() << "  test: " << te.size() << "\n";
    } else if (*train_cmd) {
      auto [tr, te] = split(load_jsonl(data_path), 0.8, split_seed);
      TrainConfig cfg;
      cfg.epochs = epochs;
      cfg.lr = lr;
      cfg.beta = beta;
      cfg.batch_size = batch_size;
      cfg.seed = seed;
      cfg.arch = ArchConfig::from_preset(arch);
      cfg.decoder = decoder_from_string(decoder);
      cfg.kernels = resolve_kernels(kernels);
      cfg.checkpoint_interval = checkpoint_interval;
      const TrainResult result = train(cfg, tr, std::filesystem::path(out_path));
      save_checkpoint(out_path, result.checkpoint);
      write_log_csv(log_path.empty() ? out_path + ".loss.csv" : log_path, result.log);
      if (!test_out.empty()) save_jsonl(test_out, te);
      const auto& last = result.log.back();
      std::cout << "trained " << epochs << " epochs on " << tr.size() << " graphs; final total "
                << last.total << " (recon " << last.recon_nll << ", kl " << last.kl
                << ", kernel " << last.kernel_penalty << ")\n";
    } else if (*gen_cmd) {
      const Checkpoint ckpt = load_checkpoint(ckpt_path);
      const auto graphs = generate(ckpt, count, seed);
      save_jsonl(out_path, graphs);
      print_summary(graphs);
    } else if (*eval_cmd) {
      const auto generated = load_jsonl(generated_path);
      const auto test = load_jsonl(test_out);
      const StructureReport report = evaluate(generated, test, EvalOptions{sigma});
      std::ofstream(out_path) << report.to_json() << '\n';
      std::ofstream(csv_path_for(out_path))
          << StructureReport::csv_header() << '\n' << report.csv_row() << '\n';
      if (!plot_dir.empty()) write_plot_data(plot_dir, generated, test);
      std::cout << report.to_json() << '\n';
    } else if (*run_cmd) {
      const ExperimentConfig cfg = load_experiment_config(config_path);
      const ExperimentResult result = run_experiment(cfg);
      std::cout << "train graphs: " << result.train_size << "  test graphs: " << result.test_size
                << "  lambda rescale: " << cfg.lambda_rescale << "\n\n"
                << result.comparison_table();
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
