#include "ghne/model_file.hpp"

#include <nlohmann/json.hpp>

#include "ghne/csv.hpp"
#include "ghne/error.hpp"
#include "ghne/file_io.hpp"
#include "little_endian.hpp"

namespace ghne {
namespace {

using nlohmann::json;

[[noreturn]] void fail(FormatError::Kind kind, const std::string& what) {
  throw FormatError(kind, "model file: " + what);
}

std::size_t positive_integer(const json& node, const std::string& context,
                             const char* field) {
  if (!node.contains(field)) fail(FormatError::Kind::kInvalidValue, context + ": missing '" + field + "'");
  const json& value = node.at(field);
  if (!value.is_number_integer() || value.get<std::int64_t>() < 1) {
    fail(FormatError::Kind::kInvalidValue,
         context + ": '" + field + "' must be a positive integer, got " + value.dump());
  }
  return value.get<std::size_t>();
}

std::vector<std::size_t> positive_integers(const json& value, const std::string& context,
                                           const char* field) {
  if (!value.is_array() || value.empty()) {
    fail(FormatError::Kind::kInvalidValue,
         context + ": '" + field + "' must be a non-empty array of positive integers");
  }
  std::vector<std::size_t> out;
  for (const auto& item : value) {
    if (!item.is_number_integer() || item.get<std::int64_t>() < 1) {
      fail(FormatError::Kind::kInvalidValue,
           context + ": '" + field + "' entries must be positive integers, got " + item.dump());
    }
    out.push_back(item.get<std::size_t>());
  }
  return out;
}

std::vector<Scalar> read_weight_blob(const std::filesystem::path& path, const std::string& context) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const IoError& e) {
    fail(FormatError::Kind::kParse, context + ": " + e.what());
  }
  if (bytes.size() % sizeof(double) != 0) {
    fail(FormatError::Kind::kInvalidValue,
         context + ": weights_file size " + std::to_string(bytes.size()) +
             " is not a multiple of 8");
  }
  std::vector<Scalar> weights(bytes.size() / sizeof(double));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] = le::get<double>(bytes, i * sizeof(double));
  }
  return weights;
}

LayerSpec parse_layer(const json& node, std::size_t index, const std::filesystem::path& base_dir) {
  std::string context = "layer " + std::to_string(index + 1);
  if (!node.is_object()) fail(FormatError::Kind::kInvalidValue, context + ": expected an object");

  LayerSpec layer;
  if (node.contains("name")) {
    if (!node.at("name").is_string()) {
      fail(FormatError::Kind::kInvalidValue, context + ": 'name' must be a string");
    }
    layer.name = node.at("name").get<std::string>();
    context += " (" + layer.name + ")";
  }
  layer.out_filters = positive_integer(node, context, "out_filters");
  layer.in_channels = positive_integer(node, context, "in_channels");
  if (!node.contains("kernel")) fail(FormatError::Kind::kInvalidValue, context + ": missing 'kernel'");
  layer.kernel = Shape(positive_integers(node.at("kernel"), context, "kernel"));

  if (!node.contains("stride")) {
    layer.stride.assign(layer.kernel.rank(), 1);
  } else if (node.at("stride").is_number_integer()) {
    layer.stride.assign(layer.kernel.rank(), positive_integer(node, context, "stride"));
  } else {
    layer.stride = positive_integers(node.at("stride"), context, "stride");
    if (layer.stride.size() != layer.kernel.rank()) {
      fail(FormatError::Kind::kInvalidValue, context + ": 'stride' has " +
                                                 std::to_string(layer.stride.size()) +
                                                 " axes, 'kernel' has " +
                                                 std::to_string(layer.kernel.rank()));
    }
  }

  const bool inline_weights = node.contains("weights");
  const bool file_weights = node.contains("weights_file");
  if (inline_weights == file_weights) {
    fail(FormatError::Kind::kInvalidValue,
         context + ": exactly one of 'weights' or 'weights_file' is required");
  }
  if (inline_weights) {
    const json& weights = node.at("weights");
    if (!weights.is_array()) fail(FormatError::Kind::kInvalidValue, context + ": 'weights' must be an array");
    layer.weights.reserve(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (!weights[i].is_number()) {
        fail(FormatError::Kind::kInvalidValue,
             context + ": weight " + std::to_string(i) + " is not a number");
      }
      layer.weights.push_back(weights[i].get<Scalar>());
    }
  } else {
    if (!node.at("weights_file").is_string()) {
      fail(FormatError::Kind::kInvalidValue, context + ": 'weights_file' must be a string");
    }
    layer.weights = read_weight_blob(base_dir / node.at("weights_file").get<std::string>(), context);
  }

  const std::size_t expected = layer.out_filters * layer.in_channels * layer.kernel.size();
  if (layer.weights.size() != expected) {
    fail(FormatError::Kind::kInvalidValue,
         context + ": weight count mismatch, expected " + std::to_string(expected) + " (" +
             std::to_string(layer.out_filters) + " x " + std::to_string(layer.in_channels) +
             " x " + layer.kernel.to_string() + "), got " + std::to_string(layer.weights.size()));
  }
  try {
    require_finite(layer.weights, context + " weights");
  } catch (const InvalidArgument& e) {
    fail(FormatError::Kind::kInvalidValue, e.what());
  }
  return layer;
}

}  // namespace

Model parse_model(std::string_view text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(FormatError::Kind::kParse, e.what());
  }
  if (!root.is_object()) fail(FormatError::Kind::kParse, "top level must be an object");
  if (root.contains("format") &&
      (!root.at("format").is_string() || root.at("format").get<std::string>() != "ghn-model")) {
    fail(FormatError::Kind::kInvalidHeader, "'format' must be \"ghn-model\"");
  }
  if (!root.contains("version") || !root.at("version").is_number_integer()) {
    fail(FormatError::Kind::kInvalidHeader, "missing integer 'version'");
  }
  if (root.at("version").get<std::int64_t>() != kModelFormatVersion) {
    fail(FormatError::Kind::kUnsupportedVersion,
         "unsupported version " + root.at("version").dump());
  }
  if (!root.contains("layers") || !root.at("layers").is_array() || root.at("layers").empty()) {
    fail(FormatError::Kind::kInvalidValue, "'layers' must be a non-empty array");
  }

  std::vector<LayerSpec> layers;
  const json& nodes = root.at("layers");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    try {
      layers.push_back(parse_layer(nodes[i], i, base_dir));
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      fail(FormatError::Kind::kInvalidValue, "layer " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  // Chain rule and rank agreement are checked by Model itself.
  return Model(std::move(layers));
}

Model load_model(const std::filesystem::path& path) {
  return parse_model(read_file(path), path.parent_path());
}

std::string model_to_json(const Model& model) {
  std::string out = "{\n  \"format\": \"ghn-model\",\n  \"version\": " +
                    std::to_string(kModelFormatVersion) + ",\n  \"layers\": [\n";
  for (std::size_t i = 0; i < model.size(); ++i) {
    const LayerSpec& layer = model.layer(i);
    out += "    {\"name\": " + json(layer.name).dump() +
           ", \"out_filters\": " + std::to_string(layer.out_filters) +
           ", \"in_channels\": " + std::to_string(layer.in_channels) + ", \"kernel\": [";
    for (std::size_t axis = 0; axis < layer.kernel.rank(); ++axis) {
      out += (axis ? ", " : "") + std::to_string(layer.kernel.extent(axis));
    }
    out += "], \"stride\": [";
    for (std::size_t axis = 0; axis < layer.stride.size(); ++axis) {
      out += (axis ? ", " : "") + std::to_string(layer.stride[axis]);
    }
    out += "],\n     \"weights\": [";
    for (std::size_t w = 0; w < layer.weights.size(); ++w) {
      out += (w ? ", " : "") + format_scalar(layer.weights[w]);
    }
    out += "]}";
    out += i + 1 < model.size() ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  write_file_atomic(path, model_to_json(model));
}

}  // namespace ghne
