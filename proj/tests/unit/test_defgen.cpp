#include <gtest/gtest.h>

#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "glossrank/defgen.hpp"
#include "test_util.hpp"

using namespace glossrank;

namespace {

using Samples = std::vector<std::string>;

class CountingClient : public GenerationClient {
 public:
  explicit CountingClient(std::vector<std::vector<std::string>> script) : script_(std::move(script)) {}
  std::vector<std::string> complete(const std::string& prompt, int n, double temperature) override {
    last_prompt = prompt;
    last_n = n;
    last_temperature = temperature;
    return script_.at(calls++ % script_.size());
  }
  std::size_t calls = 0;
  std::string last_prompt;
  int last_n = 0;
  double last_temperature = -1;

 private:
  std::vector<std::vector<std::string>> script_;
};

GenRequest request(std::string prompt, int n = 1) {
  GenRequest r;
  r.prompt = std::move(prompt);
  r.n_samples = n;
  return r;
}

}  // namespace

TEST(Prompts, CadgGolden) {
  EXPECT_EQ(build_cadg_prompt("angora", PartOfSpeech::kNoun, "angora city"),
            "Define \"angora\" in angora city.\nangora (n)");
}

TEST(Prompts, DgGoldenAndPosLetters) {
  EXPECT_EQ(build_dg_prompt("angora", PartOfSpeech::kNoun), "angora (n)");
  EXPECT_EQ(build_dg_prompt("run", PartOfSpeech::kVerb), "run (v)");
  EXPECT_EQ(build_dg_prompt("quick", PartOfSpeech::kAdjective), "quick (a)");
  EXPECT_EQ(build_dg_prompt("thing", PartOfSpeech::kOther), "thing (n)");
}

TEST(Prompts, EmptyTargetRejected) {
  EXPECT_GR_ERROR(build_dg_prompt("  ", PartOfSpeech::kNoun), ErrorCode::kEmptyTarget);
  EXPECT_GR_ERROR(build_cadg_prompt("", PartOfSpeech::kNoun, "ctx"), ErrorCode::kEmptyTarget);
  EXPECT_GR_ERROR(build_cadg_prompt("angora", PartOfSpeech::kNoun, " "), ErrorCode::kEmptyField);
}

TEST(Prompts, ModeLabels) {
  for (auto m : {DefinitionSourceMode::kNone, DefinitionSourceMode::kWn, DefinitionSourceMode::kDg,
                 DefinitionSourceMode::kCadg, DefinitionSourceMode::kWnPlusCadg}) {
    EXPECT_EQ(parse_definition_mode(to_string(m)), m);
  }
  EXPECT_EQ(to_string(DefinitionSourceMode::kWnPlusCadg), "wn+cadg");
  EXPECT_FALSE(parse_definition_mode("gpt").has_value());
  EXPECT_EQ(parse_prompt_kind("dg"), PromptKind::kDg);
}

TEST(Fingerprint, DependsOnPromptNAndTemperatureOnly) {
  GenRequest a = request("angora (n)");
  GenRequest b = a;
  b.target = "angora";
  b.context = "something else";
  EXPECT_EQ(fingerprint(a), fingerprint(b));
  EXPECT_EQ(fingerprint(a).size(), 16u);
  b.n_samples = 2;
  EXPECT_NE(fingerprint(a), fingerprint(b));
  GenRequest c = a;
  c.temperature = 0.7;
  EXPECT_NE(fingerprint(a), fingerprint(c));
}

TEST(Request, Validation) {
  GenRequest r = request("p", 0);
  EXPECT_GR_ERROR(r.validate(), ErrorCode::kInvalidConfig);
  r.n_samples = 1;
  r.temperature = -0.1;
  EXPECT_GR_ERROR(r.validate(), ErrorCode::kInvalidConfig);
}

TEST(Generate, CallsClientAndCaches) {
  const auto dir = testutil::temp_dir("cache");
  const GenCache cache(dir);
  CountingClient client({Samples{" a breed of goat \n", "a city"}});
  const auto req = request("angora (n)", 2);
  const auto first = generate(&client, req, &cache);
  EXPECT_EQ(first, (std::vector<std::string>{"a breed of goat", "a city"}));
  EXPECT_EQ(client.calls, 1u);
  EXPECT_EQ(client.last_n, 2);
  EXPECT_EQ(client.last_temperature, 1.0);
  EXPECT_TRUE(std::filesystem::exists(dir / fingerprint(req)));
  const auto second = generate(&client, req, &cache);
  EXPECT_EQ(second, first);
  EXPECT_EQ(client.calls, 1u);
  const auto offline = generate(nullptr, req, &cache);
  EXPECT_EQ(offline, first);
  std::filesystem::remove_all(dir);
}

TEST(Generate, RetriesEmptySamples) {
  CountingClient client({Samples{"  "}, Samples{""}, Samples{"a real definition"}});
  const auto out = generate(&client, request("x (n)"), nullptr);
  EXPECT_EQ(out, (std::vector<std::string>{"a real definition"}));
  EXPECT_EQ(client.calls, 3u);
}

TEST(Generate, GivesUpAfterRetries) {
  CountingClient client({Samples{" "}});
  EXPECT_GR_ERROR(generate(&client, request("x (n)"), nullptr, GenerateOptions{2}), ErrorCode::kEmptySample);
  EXPECT_EQ(client.calls, 3u);
}

TEST(Generate, OfflineMissIsServiceUnavailable) {
  const auto dir = testutil::temp_dir("cache_miss");
  const GenCache cache(dir);
  EXPECT_GR_ERROR(generate(nullptr, request("x (n)"), &cache), ErrorCode::kServiceUnavailable);
  EXPECT_GR_ERROR(generate(nullptr, request("x (n)"), nullptr), ErrorCode::kServiceUnavailable);
  std::filesystem::remove_all(dir);
}

TEST(Generate, ThreeSamplesStoredAndReturned) {
  const auto dir = testutil::temp_dir("cache3");
  const GenCache cache(dir);
  CountingClient client({Samples{"one", "two", "three"}});
  const auto req = request("angora (n)", 3);
  EXPECT_EQ(generate(&client, req, &cache).size(), 3u);
  const auto rec = cache.lookup(fingerprint(req));
  ASSERT_TRUE(rec.has_value());
  EXPECT_EQ(rec->samples.size(), 3u);
  EXPECT_EQ(rec->prompt, "angora (n)");
  EXPECT_GT(rec->created_at, 0);
  std::filesystem::remove_all(dir);
}

TEST(Cache, CorruptRecordIsIOErrorAndMismatchIsMiss) {
  const auto dir = testutil::temp_dir("cache_bad");
  const GenCache cache(dir);
  testutil::write_file(dir / "deadbeefdeadbeef", "{not json");
  EXPECT_GR_ERROR(cache.lookup("deadbeefdeadbeef"), ErrorCode::kIOError);
  GenRecord rec{"0123456789abcdef", "p", 2, 1.0, {"only one"}, 1};
  testutil::write_file(dir / "0123456789abcdef",
                       nlohmann::json{{"fingerprint", rec.fingerprint}, {"prompt", "p"}, {"n", 2},
                                      {"temperature", 1.0}, {"samples", rec.samples}, {"created_at", 1}}
                           .dump());
  EXPECT_FALSE(cache.lookup("0123456789abcdef").has_value());
  EXPECT_FALSE(cache.lookup("ffffffffffffffff").has_value());
  std::filesystem::remove_all(dir);
}

TEST(Cache, UnwritableDirectory) {
  const auto dir = testutil::temp_dir("cache_ro");
  testutil::write_file(dir / "file", "x");
  EXPECT_GR_ERROR(GenCache(dir / "file" / "sub"), ErrorCode::kCacheWrite);
  std::filesystem::remove_all(dir);
}

TEST(Replay, WalksScriptedResponses) {
  const auto dir = testutil::temp_dir("replay");
  testutil::write_file(dir / "replay.jsonl",
                       "{\"prompt\": \"angora (n)\", \"samples\": [\"\", \"a breed of cat\"]}\n"
                       "\n"
                       "{\"prompt\": \"bank (n)\", \"samples\": [\"land by a river\"]}\n");
  auto replay = ReplayGenerationClient::load(dir / "replay.jsonl");
  const auto out = generate(replay.get(), request("angora (n)"), nullptr);
  EXPECT_EQ(out, (std::vector<std::string>{"a breed of cat"}));
  EXPECT_EQ(replay->calls(), 2u);
  EXPECT_GR_ERROR(replay->complete("unknown", 1, 1.0), ErrorCode::kServiceUnavailable);
  testutil::write_file(dir / "bad.jsonl", "{\"prompt\": 3}\n");
  EXPECT_GR_ERROR(ReplayGenerationClient::load(dir / "bad.jsonl"), ErrorCode::kMalformedLine);
  std::filesystem::remove_all(dir);
}

TEST(HttpClient, TalksToService) {
  httplib::Server server;
  std::string seen_auth;
  nlohmann::json seen_body;
  server.Post("/v1/generate", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_body = nlohmann::json::parse(req.body);
    nlohmann::json samples = nlohmann::json::array();
    for (int i = 0; i < seen_body.at("n").get<int>(); ++i) samples.push_back("sample " + std::to_string(i));
    res.set_content(nlohmann::json{{"samples", samples}}.dump(), "application/json");
  });
  server.Post("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  const std::string base = "http://127.0.0.1:" + std::to_string(port);
  HttpGenerationClient client(base + "/v1/generate", "secret");
  const auto out = client.complete("angora (n)", 2, 1.0);
  EXPECT_EQ(out, (std::vector<std::string>{"sample 0", "sample 1"}));
  EXPECT_EQ(seen_auth, "Bearer secret");
  EXPECT_EQ(seen_body.at("prompt"), "angora (n)");
  EXPECT_EQ(seen_body.at("temperature"), 1.0);

  HttpGenerationClient broken(base + "/broken");
  EXPECT_GR_ERROR(broken.complete("p", 1, 1.0), ErrorCode::kServiceUnavailable);
  server.stop();
  t.join();
  HttpGenerationClient down(base + "/v1/generate", "", std::chrono::seconds(1));
  EXPECT_GR_ERROR(down.complete("p", 1, 1.0), ErrorCode::kServiceUnavailable);
}

TEST(HttpClient, EndpointValidationAndEnvironment) {
  EXPECT_GR_ERROR(HttpGenerationClient("localhost:8080"), ErrorCode::kInvalidConfig);
  ::unsetenv(HttpGenerationClient::kEndpointEnv);
  EXPECT_EQ(HttpGenerationClient::from_environment(), nullptr);
  ::setenv(HttpGenerationClient::kEndpointEnv, "http://127.0.0.1:9/x", 1);
  EXPECT_NE(HttpGenerationClient::from_environment(), nullptr);
  ::unsetenv(HttpGenerationClient::kEndpointEnv);
}

TEST(Assemble, PerMode) {
  const std::vector<SenseEntry> wn{make_sense("angora", PartOfSpeech::kNoun, "a breed of cat")};
  const std::vector<SenseEntry> gen{
      make_sense("angora", PartOfSpeech::kOther, "former name of Ankara", SenseSource::kGenerated)};
  EXPECT_TRUE(assemble_definitions(DefinitionSourceMode::kNone, wn, gen).empty());
  EXPECT_EQ(assemble_definitions(DefinitionSourceMode::kWn, wn, gen), wn);
  EXPECT_EQ(assemble_definitions(DefinitionSourceMode::kCadg, wn, gen), gen);
  EXPECT_EQ(assemble_definitions(DefinitionSourceMode::kDg, wn, gen), gen);
  EXPECT_EQ(assemble_definitions(DefinitionSourceMode::kWnPlusCadg, wn, gen), wn);
  EXPECT_EQ(assemble_definitions(DefinitionSourceMode::kWnPlusCadg, {}, gen), gen);
  EXPECT_GR_ERROR(assemble_definitions(DefinitionSourceMode::kWn, {}, gen), ErrorCode::kNoDefinitionsAvailable);
  EXPECT_GR_ERROR(assemble_definitions(DefinitionSourceMode::kWnPlusCadg, {}, {}),
                  ErrorCode::kNoDefinitionsAvailable);
}

TEST(Assemble, GeneratedEntriesAreSingleLine) {
  const auto entries = as_generated_entries("Angora", PartOfSpeech::kNoun, {"line one\nline two", "b"});
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].definition, "line one line two");
  EXPECT_EQ(entries[0].lemma, "angora");
  EXPECT_EQ(entries[0].source, SenseSource::kGenerated);
}

TEST(GeneratedDefinitionsFile, RoundTripAndLookup) {
  GeneratedDefinitions defs;
  defs.add({"s1", PromptKind::kCadg, "angora", "former name of\tAnkara"});
  defs.add({"s1", PromptKind::kDg, "angora", "a breed of goat"});
  defs.add({"s2", PromptKind::kCadg, "bank", "land beside a river"});
  std::ostringstream out;
  defs.write(out);
  std::istringstream in(out.str());
  const auto back = GeneratedDefinitions::parse(in);
  EXPECT_EQ(back.size(), 3u);
  const auto s1 = back.lookup("s1", PromptKind::kCadg);
  ASSERT_EQ(s1.size(), 1u);
  EXPECT_EQ(s1[0].definition, "former name of Ankara");
  EXPECT_EQ(s1[0].source, SenseSource::kGenerated);
  EXPECT_TRUE(back.lookup("s3", PromptKind::kCadg).empty());
  EXPECT_EQ(back.as_inventory().count("angora"), 2u);
  std::istringstream bad("s1\tcadg\tangora\n");
  EXPECT_GR_ERROR(GeneratedDefinitions::parse(bad), ErrorCode::kMalformedLine);
}
