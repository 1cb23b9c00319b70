#pragma once

#include <json.hpp>
#include <vector>

#include "kgvae/error.hpp"

#include "kgvae/kernels.hpp"
#include "kgvae/model.hpp"
#include "kgvae/trainer.hpp"

namespace kgvae {

// JSON forms of the configuration structs. Readers are strict: every field
// must be present with the right type, otherwise ParseError names it.

nlohmann::json to_json(const std::vector<KernelSpec>& specs);
/// [{"type": "degree"|"transition", "steps": int (transition only), "lambda": real}, ...]
std::vector<KernelSpec> kernel_specs_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ArchConfig& arch);
ArchConfig arch_from_json(const nlohmann::json& j);

/// Includes arch (as a preset name or explicit widths), decoder and kernels.
nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

/// Typed field access with a ParseError naming the missing/mistyped key.
template <typename T>
T require_field(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(std::string("field \"") + key + "\" has the wrong type");
  }
}

}  // namespace kgvae
