#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "kgvae/tensor.hpp"

namespace kgvae {

/// Named model parameters, ordered by name.
using ParameterMap = std::map<std::string, Tensor>;

// Checkpoint file (JSON):
//   {"format": "kgvae-params-1",
//    "params": {"<name>": {"shape": [rows, cols],
//                          "values": ["<hex float>", ...]}}}
// Values are row-major and written as C99 hexadecimal floating-point
// literals ("%a"), which round-trip every finite double bit-exactly.

void save_parameters(const std::filesystem::path& path, const ParameterMap& params);

/// Loads a checkpoint into freshly created parameter tensors.
ParameterMap load_parameters(const std::filesystem::path& path);

/// Copies values from `source` into the matching tensors of `target`.
/// Names and shapes must agree exactly; otherwise ParseError.
void assign_parameters(ParameterMap& target, const ParameterMap& source);

}  // namespace kgvae
