#include "kgvae/config.hpp"

#include "kgvae/error.hpp"

namespace kgvae {

using json = nlohmann::json;

json to_json(const std::vector<KernelSpec>& specs) {
  json out = json::array();
  for (const auto& s : specs) {
    if (s.type == KernelSpec::Type::kDegree) {
      out.push_back({{"type", "degree"}, {"lambda", s.lambda}});
    } else {
      out.push_back({{"type", "transition"}, {"steps", s.steps}, {"lambda", s.lambda}});
    }
  }
  return out;
}

std::vector<KernelSpec> kernel_specs_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("kernel config must be an array");
  std::vector<KernelSpec> out;
  for (const auto& e : j) {
    KernelSpec s;
    const auto type = require_field<std::string>(e, "type");
    if (type == "degree") {
      s.type = KernelSpec::Type::kDegree;
    } else if (type == "transition") {
      s.type = KernelSpec::Type::kTransition;
      s.steps = require_field<int>(e, "steps");
      if (s.steps < 1) throw ValidationError("transition kernel needs steps >= 1");
    } else {
      throw ParseError("unknown kernel type '" + type + "'");
    }
    s.lambda = require_field<double>(e, "lambda");
    if (!(s.lambda >= 0.0)) throw ValidationError("kernel lambda must be non-negative");
    out.push_back(s);
  }
  return out;
}

json to_json(const ArchConfig& a) {
  return {{"preset", a.preset},
          {"encoder_hidden", a.encoder_hidden},
          {"latent_dim", a.latent_dim},
          {"decoder_hidden", a.decoder_hidden},
          {"transform_dim", a.transform_dim}};
}

ArchConfig arch_from_json(const json& j) {
  if (j.is_string()) return ArchConfig::from_preset(j.get<std::string>());
  ArchConfig a;
  a.preset = require_field<std::string>(j, "preset");
  a.encoder_hidden = require_field<std::vector<std::size_t>>(j, "encoder_hidden");
  a.latent_dim = require_field<std::size_t>(j, "latent_dim");
  a.decoder_hidden = require_field<std::vector<std::size_t>>(j, "decoder_hidden");
  a.transform_dim = require_field<std::size_t>(j, "transform_dim");
  if (a.latent_dim == 0 || a.transform_dim == 0) throw ValidationError("zero layer width");
  return a;
}

json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"lr", c.lr},
          {"beta", c.beta},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"arch", to_json(c.arch)},
          {"decoder", to_string(c.decoder)},
          {"kernels", to_json(c.kernels)},
          {"checkpoint_interval", c.checkpoint_interval}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.epochs = require_field<int>(j, "epochs");
  c.lr = require_field<double>(j, "lr");
  c.beta = require_field<double>(j, "beta");
  c.batch_size = require_field<std::size_t>(j, "batch_size");
  c.seed = require_field<std::uint64_t>(j, "seed");
  if (!j.contains("arch")) throw ParseError("missing field \"arch\"");
  c.arch = arch_from_json(j.at("arch"));
  c.decoder = decoder_from_string(require_field<std::string>(j, "decoder"));
  if (!j.contains("kernels")) throw ParseError("missing field \"kernels\"");
  c.kernels = kernel_specs_from_json(j.at("kernels"));
  c.checkpoint_interval = require_field<int>(j, "checkpoint_interval");
  c.validate();
  return c;
}

}  // namespace kgvae
