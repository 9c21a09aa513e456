#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "glossrank/engine.hpp"
#include "glossrank/error.hpp"
#include "glossrank/text.hpp"

namespace glossrank {

using nlohmann::json;

SyntheticSpec parse_synthetic_spec(std::string_view s) {
  const auto parts = text::split(s, ',');
  SyntheticSpec spec;
  double seed = 0, dim = 0;
  if (parts.size() != 2 || !text::parse_double(text::trim(parts[0]), seed) ||
      !text::parse_double(text::trim(parts[1]), dim) || seed < 0 || dim < 1 || seed != std::floor(seed) ||
      dim != std::floor(dim) || seed > 9007199254740992.0) {
    throw Error(ErrorCode::kInvalidConfig, "synthetic spec must be 'seed,dim', got '" + std::string(s) + "'");
  }
  spec.seed = static_cast<std::uint64_t>(seed);
  spec.dim = static_cast<std::size_t>(dim);
  return spec;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidConfig, what);
}

bool needs_inventory(DefinitionSourceMode m) {
  return m == DefinitionSourceMode::kWn || m == DefinitionSourceMode::kWnPlusCadg;
}

bool needs_generated(DefinitionSourceMode m) {
  return m == DefinitionSourceMode::kDg || m == DefinitionSourceMode::kCadg ||
         m == DefinitionSourceMode::kWnPlusCadg;
}

}  // namespace

void RunConfig::validate() const {
  const bool none = mode == DefinitionSourceMode::kNone;
  require(none == (scoring == ScoringMode::kBaseline),
          none ? "definition mode none allows only baseline scoring"
               : "baseline scoring requires definition mode none");
  require(!(store && synthetic), "--store and --synthetic are mutually exclusive");
  require(store || synthetic || (pairs && scoring == ScoringMode::kBaseline),
          "a representation provider (--store or --synthetic) is required");
  require(!needs_inventory(mode) || inventory.has_value(),
          "definition mode " + std::string(to_string(mode)) + " requires --inventory");
  require(!needs_generated(mode) || generated.has_value(),
          "definition mode " + std::string(to_string(mode)) + " requires --gen-defs");
  require(!senses || scoring == ScoringMode::kPipeline, "--senses applies only to pipeline scoring");
  require(n_samples >= 1, "n_samples must be >= 1");
  require(std::isfinite(temperature) && temperature >= 0.0, "temperature must be >= 0");
  require(workers >= 1, "workers must be >= 1");
  for (const auto& s : {c2d_scale, d2i_scale}) {
    require(!s || (std::isfinite(*s) && *s > 0.0), "scales must be positive and finite");
  }
  if (synthetic) require(synthetic->dim >= 1, "synthetic dim must be >= 1");
}

std::string RunConfig::effective_label() const {
  if (!label.empty()) return label;
  return std::string(to_string(mode)) + "/" + std::string(to_string(scoring));
}

RunConfig apply_config_json(const RunConfig& base, const std::string& json_text,
                            const std::filesystem::path& base_dir) {
  RunConfig cfg = base;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  require(j.is_object(), "config must be a JSON object");
  const auto path_of = [&](const json& v, const std::string& key) {
    require(v.is_string(), key + " must be a string");
    std::filesystem::path p = v.get<std::string>();
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  const auto number_of = [](const json& v, const std::string& key) {
    require(v.is_number(), key + " must be a number");
    return v.get<double>();
  };
  const auto count_of = [](const json& v, const std::string& key) {
    require(v.is_number_integer() && v.get<long long>() >= 0, key + " must be a non-negative integer");
    return v.get<long long>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "label") {
      require(v.is_string(), "label must be a string");
      cfg.label = v.get<std::string>();
    } else if (key == "mode") {
      const auto m = v.is_string() ? parse_definition_mode(v.get<std::string>()) : std::nullopt;
      require(m.has_value(), "unknown definition mode");
      cfg.mode = *m;
    } else if (key == "scoring") {
      const auto s = v.is_string() ? parse_scoring_mode(v.get<std::string>()) : std::nullopt;
      require(s.has_value(), "unknown scoring mode");
      cfg.scoring = *s;
    } else if (key == "store") {
      cfg.store = path_of(v, key);
      cfg.synthetic.reset();
    } else if (key == "pairs") {
      cfg.pairs = path_of(v, key);
    } else if (key == "synthetic") {
      if (v.is_string()) {
        cfg.synthetic = parse_synthetic_spec(v.get<std::string>());
      } else {
        require(v.is_object() && v.contains("seed") && v.contains("dim"), "synthetic needs seed and dim");
        cfg.synthetic = SyntheticSpec{static_cast<std::uint64_t>(count_of(v.at("seed"), "synthetic.seed")),
                                      static_cast<std::size_t>(count_of(v.at("dim"), "synthetic.dim"))};
      }
      cfg.store.reset();
    } else if (key == "inventory") {
      cfg.inventory = path_of(v, key);
    } else if (key == "generated") {
      cfg.generated = path_of(v, key);
    } else if (key == "senses") {
      cfg.senses = path_of(v, key);
    } else if (key == "cache_dir") {
      cfg.cache_dir = path_of(v, key);
    } else if (key == "c2d_scale") {
      cfg.c2d_scale = number_of(v, key);
    } else if (key == "d2i_scale") {
      cfg.d2i_scale = number_of(v, key);
    } else if (key == "n_samples") {
      cfg.n_samples = static_cast<int>(count_of(v, key));
    } else if (key == "temperature") {
      cfg.temperature = number_of(v, key);
    } else if (key == "workers") {
      cfg.workers = static_cast<std::size_t>(count_of(v, key));
    } else if (key == "pos_filter") {
      require(v.is_boolean(), "pos_filter must be a boolean");
      cfg.pos_filter = v.get<bool>();
    } else {
      throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig apply_config_file(const RunConfig& base, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIOError, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return apply_config_json(base, ss.str(), path.parent_path());
}

}  // namespace glossrank
