#include "kgvae/experiment.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "kgvae/config.hpp"
#include "kgvae/error.hpp"

namespace kgvae {

using json = nlohmann::json;

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("experiment config: ") + e.what());
  }
  ExperimentConfig c;

  if (!j.contains("data")) throw ParseError("missing field \"data\"");
  const json& data = j.at("data");
  if (data.contains("path")) {
    c.data_path = require_field<std::string>(data, "path");
  } else {
    c.corpus_kind = corpus_kind_from_string(require_field<std::string>(data, "kind"));
    c.corpus_preset = require_field<std::string>(data, "preset");
    c.corpus_count = require_field<std::size_t>(data, "count");
    c.corpus_seed = require_field<std::uint64_t>(data, "seed");
  }

  if (!j.contains("split")) throw ParseError("missing field \"split\"");
  c.train_frac = require_field<double>(j.at("split"), "train_frac");
  c.split_seed = require_field<std::uint64_t>(j.at("split"), "seed");

  if (!j.contains("train")) throw ParseError("missing field \"train\"");
  const json& t = j.at("train");
  if (t.contains("seed") || t.contains("kernels")) {
    throw ParseError("\"train\" must not set seed or kernels; use \"seeds\" and \"arms\"");
  }
  c.train.epochs = require_field<int>(t, "epochs");
  c.train.lr = require_field<double>(t, "lr");
  c.train.beta = require_field<double>(t, "beta");
  c.train.batch_size = require_field<std::size_t>(t, "batch_size");
  if (!t.contains("arch")) throw ParseError("missing field \"arch\"");
  c.train.arch = arch_from_json(t.at("arch"));
  c.train.decoder = decoder_from_string(require_field<std::string>(t, "decoder"));
  c.train.checkpoint_interval = require_field<int>(t, "checkpoint_interval");
  c.train.validate();

  c.seeds = require_field<std::vector<std::uint64_t>>(j, "seeds");
  if (c.seeds.empty()) throw ValidationError("experiment needs at least one seed");
  c.lambda_rescale = require_field<double>(j, "lambda_rescale");
  if (!(c.lambda_rescale >= 0.0)) throw ValidationError("lambda_rescale must be >= 0");

  if (!j.contains("arms") || !j.at("arms").is_array() || j.at("arms").empty()) {
    throw ParseError("\"arms\" must be a non-empty array");
  }
  for (const auto& a : j.at("arms")) {
    ArmConfig arm;
    arm.name = require_field<std::string>(a, "name");
    if (!a.contains("kernels")) throw ParseError("arm '" + arm.name + "' lacks \"kernels\"");
    arm.kernels = kernel_specs_from_json(a.at("kernels"));
    c.arms.push_back(std::move(arm));
  }

  c.generate_count = require_field<std::size_t>(j, "generate_count");
  if (!j.contains("eval")) throw ParseError("missing field \"eval\"");
  c.eval.sigma = require_field<double>(j.at("eval"), "sigma");
  c.output_dir = require_field<std::string>(j, "output_dir");
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open experiment config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_experiment_config(ss.str());
}

namespace {

std::string fixed(double v, int precision) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

}  // namespace

std::string ExperimentResult::comparison_table() const {
  std::ostringstream os;
  os << "| arm | seed | Deg. | Clus. | Orbit | Sparsity | avg edges (gen) | avg edges (test) |\n"
     << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : runs) {
    os << "| " << r.arm << " | " << r.seed << " | " << fixed(r.report.degree_mmd, 4) << " | "
       << fixed(r.report.clustering_mmd, 4) << " | " << fixed(r.report.orbit_mmd, 4) << " | "
       << fixed(r.report.sparsity_mmd, 4) << " | " << fixed(r.report.avg_edges_generated, 5)
       << " | " << fixed(r.report.avg_edges_test, 5) << " |\n";
  }
  return os.str();
}

std::string ExperimentResult::comparison_csv() const {
  std::string out = "arm,seed," + StructureReport::csv_header() + "\n";
  for (const auto& r : runs) {
    out += r.arm + "," + std::to_string(r.seed) + "," + r.report.csv_row() + "\n";
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  std::vector<Graph> corpus;
  if (!cfg.data_path.empty()) {
    corpus = load_jsonl(cfg.data_path);
  } else {
    corpus = make_corpus(cfg.corpus_kind, cfg.corpus_count,
                         CorpusPreset::get(cfg.corpus_kind, cfg.corpus_preset), cfg.corpus_seed);
  }
  // One split shared by every arm and seed.
  auto [train_set, test_set] = split(std::move(corpus), cfg.train_frac, cfg.split_seed);

  ExperimentResult result;
  result.train_size = train_set.size();
  result.test_size = test_set.size();
  const std::size_t count = cfg.generate_count > 0 ? cfg.generate_count : test_set.size();

  std::filesystem::path out_dir;
  if (!cfg.output_dir.empty()) {
    out_dir = cfg.output_dir;
    std::filesystem::create_directories(out_dir);
    save_jsonl(out_dir / "train.jsonl", train_set);
    save_jsonl(out_dir / "test.jsonl", test_set);
  }

  for (const auto& arm : cfg.arms) {
    for (std::uint64_t seed : cfg.seeds) {
      TrainConfig tc = cfg.train;
      tc.seed = seed;
      tc.kernels = arm.kernels;
      for (auto& k : tc.kernels) k.lambda *= cfg.lambda_rescale;

      const std::string tag = arm.name + "_seed" + std::to_string(seed);
      std::optional<std::filesystem::path> ckpt_path;
      if (!out_dir.empty()) ckpt_path = out_dir / (tag + ".ckpt");

      TrainResult trained = train(tc, train_set, ckpt_path);
      const auto samples = generate(trained.checkpoint, count, seed);
      RunResult run{arm.name, seed, evaluate(samples, test_set, cfg.eval), std::move(trained.log)};

      if (ckpt_path) {
        save_checkpoint(*ckpt_path, trained.checkpoint);
        write_log_csv(out_dir / (tag + ".loss.csv"), run.log);
        save_jsonl(out_dir / (tag + ".samples.jsonl"), samples);
        std::ofstream(out_dir / (tag + ".report.json")) << run.report.to_json() << '\n';
      }
      result.runs.push_back(std::move(run));
    }
  }
  if (!out_dir.empty()) {
    std::ofstream(out_dir / "comparison.csv") << result.comparison_csv();
    std::ofstream(out_dir / "comparison.md") << result.comparison_table();
  }
  return result;
}

}  // namespace kgvae
