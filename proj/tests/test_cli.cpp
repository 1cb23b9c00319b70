#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kgvae/graph.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "kgvae_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string at(const std::string& name) { return (workdir() / name).string(); }

int run(const std::string& args) {
  const std::string cmd =
      std::string(KGVAE_CLI_PATH) + " " + args + " > " + at("last.out") + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("dataset make is deterministic and respects the preset") {
  REQUIRE(run("dataset make --kind lobster --count 50 --preset desk --seed 3 --out " +
              at("a.jsonl")) == 0);
  REQUIRE(run("dataset make --kind lobster --count 50 --preset desk --seed 3 --out " +
              at("b.jsonl")) == 0);
  CHECK(slurp(at("a.jsonl")) == slurp(at("b.jsonl")));
  const auto graphs = kgvae::load_jsonl(at("a.jsonl"));
  CHECK(graphs.size() == 50);
  for (const auto& g : graphs) {
    CHECK(g.num_nodes() >= 8);
    CHECK(g.num_nodes() <= 20);
    CHECK(g.num_edges() + 1 == g.num_nodes());
  }
}

TEST_CASE("dataset split") {
  REQUIRE(run("dataset make --kind grid --count 10 --preset desk --seed 1 --out " +
              at("grid.jsonl")) == 0);
  REQUIRE(run("dataset split --data " + at("grid.jsonl") + " --seed 2 --train-out " +
              at("grid_train.jsonl") + " --test-out " + at("grid_test.jsonl")) == 0);
  CHECK(kgvae::load_jsonl(at("grid_train.jsonl")).size() == 8);
  CHECK(kgvae::load_jsonl(at("grid_test.jsonl")).size() == 2);
}

TEST_CASE("validation failures exit with code 2") {
  CHECK(run("dataset make --kind tree --count 5 --out " + at("x.jsonl")) == 2);
  CHECK(run("train --data " + at("missing.jsonl") + " --out " + at("m.ckpt")) == 2);
  CHECK(run("train --data " + at("a.jsonl") + " --epochs 0 --out " + at("m.ckpt")) == 2);
  CHECK(run("generate --ckpt " + at("missing.ckpt") + " --count 3 --out " + at("g.jsonl")) == 2);
  CHECK(run("") == 2);
  std::ofstream(at("bad.jsonl")) << "{\"n\":2,\"edges\":[[0,1]]}\n{\"n\":2,\"edges\":[[0,5]]}\n";
  CHECK(run("evaluate --generated " + at("bad.jsonl") + " --test " + at("bad.jsonl") +
            " --out " + at("r.json")) == 2);
  CHECK(slurp(at("last.out")).find(":2:") != std::string::npos);
}

TEST_CASE("numerical failure exits with code 3") {
  CHECK(run("train --data " + at("a.jsonl") + " --epochs 20 --lr 1e300 --kernels none --out " +
            at("nan.ckpt")) == 3);
}

TEST_CASE("train, generate and evaluate pipeline") {
  REQUIRE(run("train --data " + at("a.jsonl") + " --decoder sbm --kernels lobster --epochs 3 " +
              "--seed 5 --out " + at("m.ckpt") + " --test-out " + at("test.jsonl")) == 0);
  CHECK(fs::exists(at("m.ckpt")));
  CHECK(fs::exists(at("m.ckpt.meta.json")));
  CHECK(fs::exists(at("m.ckpt.loss.csv")));
  CHECK(kgvae::load_jsonl(at("test.jsonl")).size() == 10);

  REQUIRE(run("generate --ckpt " + at("m.ckpt") + " --count 7 --seed 1 --out " + at("g1.jsonl")) == 0);
  REQUIRE(run("generate --ckpt " + at("m.ckpt") + " --count 7 --seed 1 --out " + at("g2.jsonl")) == 0);
  CHECK(kgvae::load_jsonl(at("g1.jsonl")).size() == 7);
  CHECK(slurp(at("g1.jsonl")) == slurp(at("g2.jsonl")));

  REQUIRE(run("evaluate --generated " + at("g1.jsonl") + " --test " + at("test.jsonl") + " --out " +
              at("report.json") + " --plot " + at("plots")) == 0);
  CHECK(slurp(at("report.json")).find("\"orbit_mmd\"") != std::string::npos);
  CHECK(slurp(at("report.csv")).rfind("degree_mmd,clustering_mmd,orbit_mmd,sparsity_mmd", 0) == 0);
  CHECK(fs::exists(at("plots") + "/degree.dat"));
  CHECK(fs::exists(at("plots") + "/clustering.dat"));
  CHECK(fs::exists(at("plots") + "/plot.gp"));

  REQUIRE(run("train --data " + at("a.jsonl") + " --kernels none --epochs 3 --seed 5 --out " +
              at("m2.ckpt")) == 0);
  REQUIRE(run("train --data " + at("a.jsonl") + " --kernels none --epochs 3 --seed 5 --out " +
              at("m3.ckpt")) == 0);
  CHECK(slurp(at("m2.ckpt")) == slurp(at("m3.ckpt")));
  CHECK(slurp(at("m2.ckpt.loss.csv")) == slurp(at("m3.ckpt.loss.csv")));
}

TEST_CASE("kernel config files") {
  std::ofstream(at("kernels.json"))
      << R"([{"type": "degree", "lambda": 0.1}, {"type": "transition", "steps": 2, "lambda": 1.0}])";
  CHECK(run("train --data " + at("a.jsonl") + " --kernels " + at("kernels.json") +
            " --epochs 1 --out " + at("k.ckpt")) == 0);
  std::ofstream(at("bad_kernels.json")) << R"([{"type": "wl", "lambda": 0.1}])";
  CHECK(run("train --data " + at("a.jsonl") + " --kernels " + at("bad_kernels.json") +
            " --epochs 1 --out " + at("k.ckpt")) == 2);
}

TEST_CASE("experiment run") {
  std::ofstream(at("exp.json")) << R"({
    "data": {"kind": "lobster", "preset": "desk", "count": 10, "seed": 1},
    "split": {"train_frac": 0.8, "seed": 2},
    "train": {"epochs": 2, "lr": 0.001, "beta": 20, "batch_size": 4, "arch": "desk",
              "decoder": "fc", "checkpoint_interval": 0},
    "seeds": [1],
    "lambda_rescale": 0.0025,
    "arms": [{"name": "none", "kernels": []},
             {"name": "both", "kernels": [{"type": "degree", "lambda": 0.0183},
                                          {"type": "transition", "steps": 1, "lambda": 7.389}]}],
    "generate_count": 4,
    "eval": {"sigma": 1.0},
    "output_dir": ")" + at("exp_out") + R"("
  })";
  REQUIRE(run("experiment run --config " + at("exp.json")) == 0);
  CHECK(fs::exists(at("exp_out") + "/comparison.md"));
  CHECK(fs::exists(at("exp_out") + "/comparison.csv"));
  CHECK(fs::exists(at("exp_out") + "/both_seed1.loss.csv"));
  CHECK(slurp(at("last.out")).find("| both | 1 |") != std::string::npos);

  std::ofstream(at("exp_bad.json")) << R"({"data": {"kind": "lobster"}})";
  CHECK(run("experiment run --config " + at("exp_bad.json")) == 2);
}
