#include "kgvae/trainer.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>

#include "kgvae/config.hpp"
#include "kgvae/error.hpp"
#include "kgvae/optim.hpp"

namespace kgvae {

using json = nlohmann::json;

void TrainConfig::validate() const {
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
  // lr = 0 is accepted: it freezes the parameters, which tests rely on.
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ValidationError("lr must be finite and >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be >= 0");
  if (batch_size == 0) throw ValidationError("batch_size must be >= 1");
  if (checkpoint_interval < 0) throw ValidationError("checkpoint_interval must be >= 0");
  make_kernel_set(kernels, 1).validate();
}

ModelConfig model_config_for(const TrainConfig& cfg, std::span<const Graph> graphs) {
  if (graphs.empty()) throw ValidationError("training set is empty");
  ModelConfig mc;
  mc.arch = cfg.arch;
  mc.decoder = cfg.decoder;
  for (const auto& g : graphs) mc.n_max = std::max(mc.n_max, g.num_nodes());
  const bool all_featured = std::all_of(graphs.begin(), graphs.end(), [&](const Graph& g) {
    return g.features() && g.features()->cols() > 0 &&
           g.features()->cols() == graphs.front().features()->cols();
  });
  if (all_featured) {
    mc.identity_features = false;
    mc.feature_dim = graphs.front().features()->cols();
  } else {
    mc.identity_features = true;
    mc.feature_dim = mc.n_max;
  }
  return mc;
}

namespace {

void check_finite(int epoch, const LossValues& v) {
  const std::pair<const char*, double> parts[] = {{"recon_nll", v.recon_nll},
                                                  {"kl", v.kl},
                                                  {"kernel_penalty", v.kernel_penalty},
                                                  {"total", v.total}};
  for (const auto& [name, value] : parts) {
    if (!std::isfinite(value)) {
      throw NumericalError("epoch " + std::to_string(epoch) + ": non-finite " + name +
                           " loss (" + std::to_string(value) + ")");
    }
  }
}

void check_parameters(int epoch, const GraphVae& model) {
  for (const auto& [name, t] : model.parameters()) {
    for (double v : t.value().data()) {
      if (!std::isfinite(v)) {
        throw NumericalError("epoch " + std::to_string(epoch) + ": parameter " + name +
                             " became non-finite");
      }
    }
  }
}

}  // namespace

TrainResult train(const TrainConfig& cfg, std::span<const Graph> train_set,
                  const std::optional<std::filesystem::path>& checkpoint_path) {
  cfg.validate();
  const ModelConfig mc = model_config_for(cfg, train_set);
  Rng init_rng = make_stream(cfg.seed, Stream::kInit);
  Rng reparam_rng = make_stream(cfg.seed, Stream::kReparam);
  Rng shuffle_rng = make_stream(cfg.seed, Stream::kShuffle);

  TrainResult result{Checkpoint{GraphVae(mc, init_rng), cfg, {}}, {}};
  GraphVae& model = result.checkpoint.model;
  for (const auto& g : train_set) result.checkpoint.node_counts.push_back(g.num_nodes());

  const KernelSet ks = make_kernel_set(cfg.kernels, mc.n_max);
  std::vector<GraphInput> inputs;
  inputs.reserve(train_set.size());
  for (const auto& g : train_set) inputs.push_back(model.prepare(g));

  Adam opt(model.parameter_list(), AdamOptions{.lr = cfg.lr});
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(
          shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(order[i - 1], order[j]);
    }
    LossValues epoch_sum;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      const double inv_b = 1.0 / static_cast<double>(stop - start);
      Tensor batch_total = Tensor::scalar(0.0);
      LossValues batch;
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t idx = order[k];
        const Posterior post = model.encode(inputs[idx]);
        const Tensor z = model.reparameterize(post, reparam_rng);
        const Tensor pa = model.decode(z, inputs[idx].n);
        const LossBreakdown loss = kernel_elbo_loss(train_set[idx], post, pa, ks, cfg.beta);
        const LossValues v = LossValues::of(loss);
        batch.recon_nll += v.recon_nll * inv_b;
        batch.kl += v.kl * inv_b;
        batch.kernel_penalty += v.kernel_penalty * inv_b;
        batch.total += v.total * inv_b;
        batch_total = add(batch_total, scale(loss.total, inv_b));
      }
      check_finite(epoch, batch);
      opt.zero_grad();
      backward(batch_total);
      opt.step();
      epoch_sum.recon_nll += batch.recon_nll;
      epoch_sum.kl += batch.kl;
      epoch_sum.kernel_penalty += batch.kernel_penalty;
      epoch_sum.total += batch.total;
      ++batches;
    }
    check_parameters(epoch, model);
    const double inv = 1.0 / static_cast<double>(batches);
    EpochLog row{epoch, epoch_sum.recon_nll * inv, epoch_sum.kl * inv,
                 epoch_sum.kernel_penalty * inv, epoch_sum.total * inv};
    const double recomposed = row.recon_nll + cfg.beta * row.kl + row.kernel_penalty;
    if (std::abs(row.total - recomposed) > 1e-9 * std::max(1.0, std::abs(row.total))) {
      throw NumericalError("epoch " + std::to_string(epoch) +
                           ": loss decomposition total != recon + beta*kl + kernel");
    }
    result.log.push_back(row);
    if (checkpoint_path && cfg.checkpoint_interval > 0 && epoch % cfg.checkpoint_interval == 0 &&
        epoch != cfg.epochs) {
      save_checkpoint(checkpoint_path->string() + ".epoch" + std::to_string(epoch),
                      result.checkpoint);
    }
  }
  return result;
}

std::vector<Graph> generate(const Checkpoint& ckpt, std::size_t count, std::uint64_t seed) {
  std::vector<Graph> out;
  if (count == 0) return out;
  if (ckpt.node_counts.empty()) throw ValidationError("checkpoint has no training node counts");
  Rng rng = make_stream(seed, Stream::kGenerate);
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto idx = rng.uniform_int(0, static_cast<std::int64_t>(ckpt.node_counts.size()) - 1);
    out.push_back(ckpt.model.sample_from_prior(ckpt.node_counts[static_cast<std::size_t>(idx)], rng));
  }
  return out;
}

namespace {

std::filesystem::path meta_path(const std::filesystem::path& path) {
  return path.string() + ".meta.json";
}

constexpr const char* kMetaFormat = "kgvae-checkpoint-1";

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  save_parameters(path, ckpt.model.parameters());
  const ModelConfig& mc = ckpt.model.config();
  json meta{{"format", kMetaFormat},
            {"arch", to_json(mc.arch)},
            {"decoder", to_string(mc.decoder)},
            {"latent_dim", mc.arch.latent_dim},
            {"n_max", mc.n_max},
            {"feature_dim", mc.feature_dim},
            {"identity_features", mc.identity_features},
            {"kernels", to_json(ckpt.config.kernels)},
            {"train", to_json(ckpt.config)},
            {"node_counts", ckpt.node_counts}};
  std::ofstream f(meta_path(path));
  if (!f) throw ValidationError("cannot write " + meta_path(path).string());
  f << meta.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(meta_path(path));
  if (!f) throw ParseError("cannot open checkpoint sidecar " + meta_path(path).string());
  json meta;
  try {
    meta = json::parse(f);
  } catch (const json::exception& e) {
    throw ParseError(meta_path(path).string() + ": " + e.what());
  }
  if (!meta.is_object() || meta.value("format", "") != kMetaFormat) {
    throw ParseError(meta_path(path).string() + ": not a checkpoint sidecar");
  }
  ModelConfig mc;
  mc.arch = arch_from_json(meta.at("arch"));
  mc.decoder = decoder_from_string(require_field<std::string>(meta, "decoder"));
  mc.n_max = require_field<std::size_t>(meta, "n_max");
  mc.feature_dim = require_field<std::size_t>(meta, "feature_dim");
  mc.identity_features = require_field<bool>(meta, "identity_features");
  const ParameterMap params = load_parameters(path);
  Checkpoint ckpt{GraphVae(mc, params), train_config_from_json(meta.at("train")),
                  require_field<std::vector<std::size_t>>(meta, "node_counts")};
  return ckpt;
}

void write_log_csv(const std::filesystem::path& path, std::span<const EpochLog> log) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path.string());
  f << "epoch,recon_nll,kl,kernel_penalty,total\n" << std::setprecision(17);
  for (const auto& r : log) {
    f << r.epoch << ',' << r.recon_nll << ',' << r.kl << ',' << r.kernel_penalty << ','
      << r.total << '\n';
  }
}

}  // namespace kgvae
