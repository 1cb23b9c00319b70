#include "kgvae/params.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>

#include "kgvae/error.hpp"

namespace kgvae {

using json = nlohmann::json;

namespace {

constexpr const char* kFormat = "kgvae-params-1";

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_hex_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw ParseError("bad parameter value '" + s + "'");
  return v;
}

}  // namespace

void save_parameters(const std::filesystem::path& path, const ParameterMap& params) {
  json root;
  root["format"] = kFormat;
  json& out = root["params"] = json::object();
  for (const auto& [name, t] : params) {
    json values = json::array();
    for (double v : t.value().data()) values.push_back(hex_double(v));
    out[name] = {{"shape", {t.rows(), t.cols()}}, {"values", std::move(values)}};
  }
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path.string());
  f << root.dump() << '\n';
}

ParameterMap load_parameters(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open checkpoint " + path.string());
  json root;
  try {
    root = json::parse(f);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!root.is_object() || root.value("format", "") != kFormat || !root.contains("params")) {
    throw ParseError(path.string() + ": not a parameter checkpoint");
  }
  ParameterMap out;
  try {
    for (const auto& [name, entry] : root["params"].items()) {
      const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
      const auto& values = entry.at("values");
      if (shape.size() != 2 || values.size() != shape[0] * shape[1]) {
        throw ParseError("parameter '" + name + "' has inconsistent shape");
      }
      std::vector<double> data;
      data.reserve(values.size());
      for (const auto& v : values) data.push_back(parse_hex_double(v.get<std::string>()));
      out.emplace(name, Tensor::parameter(Matrix(shape[0], shape[1], std::move(data))));
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return out;
}

void assign_parameters(ParameterMap& target, const ParameterMap& source) {
  if (target.size() != source.size()) throw ParseError("checkpoint parameter count mismatch");
  for (auto& [name, t] : target) {
    auto it = source.find(name);
    if (it == source.end()) throw ParseError("checkpoint lacks parameter '" + name + "'");
    if (it->second.shape() != t.shape()) {
      throw ParseError("parameter '" + name + "' has shape " + it->second.shape().str() +
                       ", expected " + t.shape().str());
    }
    t.mutable_value() = it->second.value();
  }
}

}  // namespace kgvae
