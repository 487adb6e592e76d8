#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pai/errors.hpp"
#include "pai/network.hpp"

namespace pai {

namespace detail {

inline std::pair<std::size_t, std::size_t> offset_to_line_col(const std::string& text,
                                                              std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline nlohmann::json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = offset_to_line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(what + ": " + e.what(), line, col);
  }
}

inline std::vector<std::vector<double>> json_matrix(const nlohmann::json& j,
                                                    const std::string& where) {
  if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a non-empty matrix");
  std::vector<std::vector<double>> m;
  for (const auto& row : j) {
    if (!row.is_array() || row.empty()) throw ParseError(where + ": expected matrix rows");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) throw ParseError(where + ": matrix entries must be numbers");
      r.push_back(v.get<double>());
    }
    m.push_back(std::move(r));
  }
  return m;
}

inline std::vector<double> json_vector(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of numbers");
  std::vector<double> v;
  for (const auto& e : j) {
    if (!e.is_number()) throw ParseError(where + ": entries must be numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

}  // namespace detail

/// Parses the versioned network file format:
///   { "format_version": 1, "layers": [ {"type": "dense", ...}, ... ] }
/// Dense layers carry "weights" (out x in) and optional "bias"; relu layers
/// take their width from the preceding layer (or an explicit "width" when
/// first); conv2d layers carry "filter", "input_shape": [h, w] and optional
/// "bias". Omitted biases are zero.
inline Network load_network(const std::string& text) {
  nlohmann::json j = detail::parse_json_text(text, "network file");
  if (!j.is_object()) throw ParseError("network file: top level must be an object");
  if (!j.contains("format_version") || !j["format_version"].is_number_integer() ||
      j["format_version"].get<int>() != 1)
    throw ParseError("network file: missing or unsupported format_version (expected 1)");
  if (!j.contains("layers") || !j["layers"].is_array())
    throw ParseError("network file: missing 'layers' array");
  if (j["layers"].empty()) throw ParseError("network file: empty layer list");

  std::vector<Layer> layers;
  std::size_t previous_width = 0;
  for (std::size_t i = 0; i < j["layers"].size(); ++i) {
    const auto& jl = j["layers"][i];
    std::string where = "layers[" + std::to_string(i) + "]";
    if (!jl.is_object() || !jl.contains("type") || !jl["type"].is_string())
      throw ParseError(where + ": expected an object with a 'type' string");
    std::string type = jl["type"].get<std::string>();
    if (type == "dense") {
      DenseLayer dense;
      if (!jl.contains("weights")) throw ParseError(where + ": dense layer needs 'weights'");
      dense.weights = detail::json_matrix(jl["weights"], where + ".weights");
      if (jl.contains("bias")) dense.bias = detail::json_vector(jl["bias"], where + ".bias");
      previous_width = dense.out_width();
      layers.emplace_back(std::move(dense));
    } else if (type == "relu") {
      ReluLayer relu;
      if (jl.contains("width")) {
        if (!jl["width"].is_number_unsigned()) throw ParseError(where + ".width: expected integer");
        relu.width = jl["width"].get<std::size_t>();
      } else if (previous_width > 0) {
        relu.width = previous_width;
      } else {
        throw ParseError(where + ": relu width cannot be inferred; add a 'width' field");
      }
      previous_width = relu.width;
      layers.emplace_back(relu);
    } else if (type == "conv2d") {
      Conv2dLayer conv;
      if (!jl.contains("filter")) throw ParseError(where + ": conv2d layer needs 'filter'");
      conv.filter = detail::json_matrix(jl["filter"], where + ".filter");
      if (!jl.contains("input_shape") || !jl["input_shape"].is_array() ||
          jl["input_shape"].size() != 2)
        throw ParseError(where + ": conv2d needs 'input_shape': [h, w]");
      conv.in_h = jl["input_shape"][0].get<std::size_t>();
      conv.in_w = jl["input_shape"][1].get<std::size_t>();
      if (jl.contains("bias")) conv.bias = detail::json_vector(jl["bias"], where + ".bias");
      previous_width = conv.out_width();
      layers.emplace_back(std::move(conv));
    } else {
      throw ParseError(where + ": unknown layer type '" + type + "'");
    }
  }
  return Network(std::move(layers));
}

inline Network load_network_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open network file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_network(buffer.str());
}

}  // namespace pai
