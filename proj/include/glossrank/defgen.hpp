#pragma once
// Definition generation: prompt construction, the generation-service
// contract, an on-disk response cache, and per-mode assembly of the
// definition set used for ranking.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "glossrank/sense_inventory.hpp"

namespace glossrank {

enum class DefinitionSourceMode { kNone, kWn, kDg, kCadg, kWnPlusCadg };

std::string_view to_string(DefinitionSourceMode mode) noexcept;
/// CLI labels: none, wn, dg, cadg, wn+cadg.
std::optional<DefinitionSourceMode> parse_definition_mode(std::string_view s) noexcept;

enum class PromptKind { kDg, kCadg };
std::string_view to_string(PromptKind kind) noexcept;
std::optional<PromptKind> parse_prompt_kind(std::string_view s) noexcept;

/// "<target> (<pos>)". Unknown pos is written as n.
std::string build_dg_prompt(std::string_view target, PartOfSpeech pos);

/// "Define \"<target>\" in <context>.\n<target> (<pos>)".
std::string build_cadg_prompt(std::string_view target, PartOfSpeech pos, std::string_view context);

struct GenRequest {
  std::string prompt;
  int n_samples = 1;
  double temperature = 1.0;
  std::string target;
  std::string context;
  PartOfSpeech pos = PartOfSpeech::kNoun;

  void validate() const;
};

/// 16 hex digits of FNV-1a-64 over prompt, n and temperature. Provenance
/// fields do not participate.
std::string fingerprint(const GenRequest& req);

struct GenRecord {
  std::string fingerprint;
  std::string prompt;
  int n_samples = 1;
  double temperature = 1.0;
  std::vector<std::string> samples;
  std::int64_t created_at = 0;  // unix seconds
};

/// Text-generation service: one prompt in, n samples out.
class GenerationClient {
 public:
  virtual ~GenerationClient() = default;
  virtual std::vector<std::string> complete(const std::string& prompt, int n, double temperature) = 0;
};

/// POSTs {"prompt", "n", "temperature"} as JSON and expects {"samples": [...]}.
/// An API key, when set, goes out as "Authorization: Bearer <key>".
class HttpGenerationClient final : public GenerationClient {
 public:
  static constexpr const char* kEndpointEnv = "GLOSSRANK_GEN_ENDPOINT";
  static constexpr const char* kApiKeyEnv = "GLOSSRANK_GEN_API_KEY";

  /// endpoint: "http://host:port/path" (https when built with OpenSSL support).
  HttpGenerationClient(std::string endpoint, std::string api_key = {},
                       std::chrono::seconds timeout = std::chrono::seconds(60));

  /// Reads both env vars; nullptr when the endpoint is unset.
  static std::unique_ptr<HttpGenerationClient> from_environment();

  std::vector<std::string> complete(const std::string& prompt, int n, double temperature) override;

 private:
  std::string scheme_host_port_;
  std::string path_;
  std::string api_key_;
  std::chrono::seconds timeout_;
};

/// Serves samples from a JSON-lines fixture: {"prompt": ..., "samples": [...]}.
/// Successive calls for a prompt walk through its samples, so a fixture can
/// script an empty sample followed by a good one.
class ReplayGenerationClient final : public GenerationClient {
 public:
  explicit ReplayGenerationClient(std::map<std::string, std::vector<std::string>> responses);
  static std::unique_ptr<ReplayGenerationClient> load(const std::filesystem::path& path);

  /// Throws Error(kServiceUnavailable) for an unknown prompt.
  std::vector<std::string> complete(const std::string& prompt, int n, double temperature) override;

  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  std::map<std::string, std::vector<std::string>> responses_;
  std::map<std::string, std::size_t> cursor_;
  std::atomic<std::size_t> calls_{0};
  std::mutex mutex_;
};

/// One JSON file per fingerprint, written temp-then-rename.
class GenCache {
 public:
  explicit GenCache(std::filesystem::path dir);

  std::optional<GenRecord> lookup(const std::string& fingerprint) const;

  /// Throws Error(kCacheWrite).
  void store(const GenRecord& record) const;

  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

struct GenerateOptions {
  int max_retries = 3;
};

/// Cached samples on a hit; otherwise asks the client, trims samples,
/// re-requests for empty ones up to max_retries, persists and returns.
/// client may be null (offline): a cache miss then throws kServiceUnavailable.
std::vector<std::string> generate(GenerationClient* client, const GenRequest& req, const GenCache* cache,
                                  const GenerateOptions& opts = {});

/// NONE -> empty; WN -> wn_defs; DG/CADG -> generated; WN+CADG -> wn_defs
/// when non-empty, else generated. Throws Error(kNoDefinitionsAvailable)
/// when a non-NONE mode ends up with nothing.
std::vector<SenseEntry> assemble_definitions(DefinitionSourceMode mode, const std::vector<SenseEntry>& wn_defs,
                                             const std::vector<SenseEntry>& gen_defs);

std::vector<SenseEntry> as_generated_entries(std::string_view target, PartOfSpeech pos,
                                             const std::vector<std::string>& samples);

/// Generated definitions keyed by instance id (CADG output depends on context).
/// File: `id<TAB>dg|cadg<TAB>target<TAB>definition`, one definition per line.
class GeneratedDefinitions {
 public:
  struct Row {
    std::string id;
    PromptKind kind;
    std::string target;
    std::string definition;
  };

  static GeneratedDefinitions open(const std::filesystem::path& path);
  static GeneratedDefinitions parse(std::istream& in, std::string_view source_name = "<stream>");
  void write(std::ostream& out) const;

  void add(Row row);
  std::vector<SenseEntry> lookup(std::string_view id, PromptKind kind) const;
  std::size_t size() const noexcept { return rows_.size(); }
  const std::vector<Row>& rows() const noexcept { return rows_; }

  /// The rows as an inventory of GENERATED senses keyed by target.
  SenseInventory as_inventory() const;

 private:
  std::vector<Row> rows_;
  std::map<std::pair<std::string, PromptKind>, std::vector<std::size_t>> index_;
};

}  // namespace glossrank
