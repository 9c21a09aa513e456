#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "glossrank/defgen.hpp"
#include "glossrank/error.hpp"
#include "glossrank/text.hpp"

namespace glossrank {

using nlohmann::json;

// ---- HTTP client ----------------------------------------------------------

HttpGenerationClient::HttpGenerationClient(std::string endpoint, std::string api_key,
                                           std::chrono::seconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidConfig, "generation endpoint must look like http://host:port/path");
  }
  const auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port_ = endpoint;
    path_ = "/";
  } else {
    scheme_host_port_ = endpoint.substr(0, path_start);
    path_ = endpoint.substr(path_start);
  }
}

std::unique_ptr<HttpGenerationClient> HttpGenerationClient::from_environment() {
  const char* endpoint = std::getenv(kEndpointEnv);
  if (endpoint == nullptr || *endpoint == '\0') return nullptr;
  const char* key = std::getenv(kApiKeyEnv);
  return std::make_unique<HttpGenerationClient>(endpoint, key ? key : "");
}

std::vector<std::string> HttpGenerationClient::complete(const std::string& prompt, int n, double temperature) {
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  const json body = {{"prompt", prompt}, {"n", n}, {"temperature", temperature}};
  const auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::kServiceUnavailable,
                scheme_host_port_ + path_ + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kServiceUnavailable,
                scheme_host_port_ + path_ + ": HTTP " + std::to_string(res->status));
  }
  try {
    const json reply = json::parse(res->body);
    return reply.at("samples").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kServiceUnavailable, "malformed generation response: " + std::string(e.what()));
  }
}

// ---- replay client ---------------------------------------------------------

ReplayGenerationClient::ReplayGenerationClient(std::map<std::string, std::vector<std::string>> responses)
    : responses_(std::move(responses)) {}

std::unique_ptr<ReplayGenerationClient> ReplayGenerationClient::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIOError, "cannot open replay fixture " + path.string());
  std::map<std::string, std::vector<std::string>> responses;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      auto& slot = responses[j.at("prompt").get<std::string>()];
      for (const auto& s : j.at("samples")) slot.push_back(s.get<std::string>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedLine, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return std::make_unique<ReplayGenerationClient>(std::move(responses));
}

std::vector<std::string> ReplayGenerationClient::complete(const std::string& prompt, int n, double) {
  std::lock_guard lock(mutex_);
  ++calls_;
  const auto it = responses_.find(prompt);
  if (it == responses_.end() || it->second.empty()) {
    throw Error(ErrorCode::kServiceUnavailable, "replay fixture has no response for prompt '" + prompt + "'");
  }
  std::size_t& cursor = cursor_[prompt];
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(it->second[cursor % it->second.size()]);
    ++cursor;
  }
  return out;
}

// ---- cache -----------------------------------------------------------------

GenCache::GenCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::kCacheWrite, "cannot create cache dir " + dir_.string() + ": " + ec.message());
}

std::optional<GenRecord> GenCache::lookup(const std::string& fp) const {
  const auto path = dir_ / fp;
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    const json j = json::parse(in);
    GenRecord rec;
    rec.fingerprint = j.at("fingerprint").get<std::string>();
    rec.prompt = j.at("prompt").get<std::string>();
    rec.n_samples = j.at("n").get<int>();
    rec.temperature = j.at("temperature").get<double>();
    rec.samples = j.at("samples").get<std::vector<std::string>>();
    rec.created_at = j.at("created_at").get<std::int64_t>();
    if (rec.fingerprint != fp || static_cast<int>(rec.samples.size()) != rec.n_samples) return std::nullopt;
    return rec;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIOError, "corrupt cache record " + path.string() + ": " + e.what());
  }
}

void GenCache::store(const GenRecord& rec) const {
  const json j = {{"fingerprint", rec.fingerprint}, {"prompt", rec.prompt},
                  {"n", rec.n_samples},             {"temperature", rec.temperature},
                  {"samples", rec.samples},         {"created_at", rec.created_at}};
  std::ostringstream tmp_name;
  tmp_name << '.' << rec.fingerprint << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id());
  const auto tmp = dir_ / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << j.dump(2) << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::kCacheWrite, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, dir_ / rec.fingerprint, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kCacheWrite, "cannot publish cache record " + rec.fingerprint);
  }
}

// ---- generate --------------------------------------------------------------

std::vector<std::string> generate(GenerationClient* client, const GenRequest& req, const GenCache* cache,
                                  const GenerateOptions& opts) {
  req.validate();
  const std::string fp = fingerprint(req);
  if (cache != nullptr) {
    if (auto hit = cache->lookup(fp)) return std::move(hit->samples);
  }
  if (client == nullptr) {
    throw Error(ErrorCode::kServiceUnavailable, "no generation client and no cached record for '" + req.prompt + "'");
  }

  std::vector<std::string> samples;
  for (int attempt = 0; static_cast<int>(samples.size()) < req.n_samples; ++attempt) {
    if (attempt > opts.max_retries) {
      throw Error(ErrorCode::kEmptySample, "service kept returning empty samples for '" + req.prompt + "'");
    }
    const int need = req.n_samples - static_cast<int>(samples.size());
    for (const std::string& s : client->complete(req.prompt, need, req.temperature)) {
      const auto trimmed = text::trim(s);
      if (!trimmed.empty() && static_cast<int>(samples.size()) < req.n_samples) samples.emplace_back(trimmed);
    }
  }

  if (cache != nullptr) {
    GenRecord rec{fp, req.prompt, req.n_samples, req.temperature, samples,
                  std::chrono::duration_cast<std::chrono::seconds>(
                      std::chrono::system_clock::now().time_since_epoch())
                      .count()};
    cache->store(rec);
  }
  return samples;
}

}  // namespace glossrank
