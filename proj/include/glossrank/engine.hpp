#pragma once
// Run configuration, resource loading and dataset-level ranking.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "glossrank/defgen.hpp"
#include "glossrank/eval.hpp"
#include "glossrank/providers.hpp"
#include "glossrank/report.hpp"
#include "glossrank/scoring.hpp"
#include "glossrank/sense_inventory.hpp"

namespace glossrank {

struct SyntheticSpec {
  std::uint64_t seed = 0;
  std::size_t dim = 64;

  bool operator==(const SyntheticSpec&) const = default;
};

/// Parses "seed,dim". Throws Error(kInvalidConfig).
SyntheticSpec parse_synthetic_spec(std::string_view s);

struct RunConfig {
  std::string label;  // report label; derived from mode and scoring when empty
  DefinitionSourceMode mode = DefinitionSourceMode::kWn;
  ScoringMode scoring = ScoringMode::kMarginal;

  std::optional<std::filesystem::path> store;
  std::optional<std::filesystem::path> pairs;
  std::optional<SyntheticSpec> synthetic;

  std::optional<std::filesystem::path> inventory;
  std::optional<std::filesystem::path> generated;  // generated-definitions TSV
  std::optional<std::filesystem::path> senses;     // external sense predictions (pipeline)
  std::optional<std::filesystem::path> cache_dir;

  /// Unset scales fall back to the store's logit_scale, else 1.0.
  std::optional<double> c2d_scale;
  std::optional<double> d2i_scale;

  int n_samples = 1;
  double temperature = 1.0;
  std::size_t workers = 1;
  bool pos_filter = false;

  /// Throws Error(kInvalidConfig) describing the first violated rule.
  void validate() const;

  std::string effective_label() const;

  bool operator==(const RunConfig&) const = default;
};

/// Overrides fields of base with those present in a JSON object. Keys:
/// label, mode, scoring, store, pairs, synthetic ("seed,dim" or
/// {"seed","dim"}), inventory, generated, senses, cache_dir, c2d_scale,
/// d2i_scale, n_samples, temperature, workers, pos_filter. Relative paths
/// resolve against base_dir. Unknown keys throw Error(kInvalidConfig).
RunConfig apply_config_json(const RunConfig& base, const std::string& json_text,
                            const std::filesystem::path& base_dir = {});
RunConfig apply_config_file(const RunConfig& base, const std::filesystem::path& path);

/// Loaded, immutable inputs shared by every worker.
struct Resources {
  std::shared_ptr<const RepresentationProvider> provider;  // may be null with pairs + baseline
  std::shared_ptr<const PairScoreTable> pairs;
  std::shared_ptr<const SenseInventory> inventory;
  std::shared_ptr<const GeneratedDefinitions> generated;
  std::map<std::string, std::string> sense_predictions;  // instance id -> definition
  std::optional<double> store_logit_scale;
};

Resources load_resources(const RunConfig& cfg);

/// `id<TAB>definition`, one line per instance.
std::map<std::string, std::string> load_sense_predictions(const std::filesystem::path& path);

struct MissingKey {
  std::string kind;  // text | image | pair
  std::string key;
  std::string instance_id;

  bool operator==(const MissingKey&) const = default;
};

/// "<kind> '<key>' (instance <id>)" lines, one per missing key.
std::string describe(const std::vector<MissingKey>& missing);

struct InstanceDefinitions {
  std::vector<SenseEntry> entries;
  std::optional<std::size_t> kb_senses;
  bool fallback = false;  // no definitions available, baseline used
};

struct RankOutcome {
  RankResult result;
  std::vector<SenseEntry> definitions;
  ScoringMode applied = ScoringMode::kBaseline;
  bool fallback = false;
  std::optional<std::size_t> kb_senses;
};

class Engine {
 public:
  Engine(RunConfig cfg, Resources res);

  const RunConfig& config() const noexcept { return cfg_; }
  const ScoreConfig& score_config() const noexcept { return score_; }

  InstanceDefinitions definitions_for(const VwsdInstance& inst) const;

  /// Every key that ranking these instances would need but the providers lack.
  std::vector<MissingKey> audit(const std::vector<VwsdInstance>& instances) const;

  RankOutcome rank_instance(const VwsdInstance& inst) const;

  /// Audits first (Error(kMissingKey) listing every absent key), then ranks
  /// on the worker pool. Results keep dataset order.
  std::vector<RankOutcome> rank_all(const std::vector<VwsdInstance>& instances) const;

  /// Requires gold on every instance (Error(kMissingGold)).
  EvalReport evaluate(const std::vector<VwsdInstance>& instances) const;

 private:
  bool pairs_for_d2i() const noexcept { return res_.pairs != nullptr; }
  Distribution baseline(const VwsdInstance& inst) const;
  std::vector<Distribution> d2i_rows(const VwsdInstance& inst, const std::vector<std::string>& joint_keys) const;
  Representation text(const std::string& key) const;

  RunConfig cfg_;
  Resources res_;
  ScoreConfig score_;
};

/// Runs fn(i) for i in [0, n) on up to `workers` threads. The exception from
/// the lowest failing index is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

struct GendefsOptions {
  std::vector<PromptKind> kinds{PromptKind::kCadg};
  int n_samples = 1;
  double temperature = 1.0;
  bool oov_only = false;  // needs an inventory
  int max_retries = 3;
};

struct GendefsFailure {
  std::string instance_id;
  std::string message;
};

struct GendefsResult {
  GeneratedDefinitions definitions;
  std::vector<GendefsFailure> failures;
  std::size_t processed = 0;
  std::size_t skipped = 0;
};

/// Builds prompts per instance and kind, generates through the cache and
/// collects the samples. Per-instance errors are recorded, not thrown.
GendefsResult run_gendefs(const std::vector<VwsdInstance>& instances, const SenseInventory* inventory,
                          GenerationClient* client, const GenCache* cache, const GendefsOptions& opts);

}  // namespace glossrank
