#include <gtest/gtest.h>

#include <atomic>
#include <sstream>

#include <json.hpp>

#include "glossrank/engine.hpp"
#include "glossrank/fixture.hpp"
#include "glossrank/kernels.hpp"
#include "test_util.hpp"

using namespace glossrank;

namespace {

const std::filesystem::path kFx = testutil::data_dir() / "synthetic20";

RunConfig fixture_config(ScoringMode scoring = ScoringMode::kMarginal) {
  RunConfig cfg;
  cfg.store = kFx / "store.tsv";
  cfg.inventory = kFx / "inventory.tsv";
  cfg.scoring = scoring;
  cfg.mode = scoring == ScoringMode::kBaseline ? DefinitionSourceMode::kNone : DefinitionSourceMode::kWn;
  return cfg;
}

std::vector<VwsdInstance> fixture_instances() { return load_dataset(kFx / "dataset.tsv", kFx / "gold.tsv"); }

Engine make_engine(const RunConfig& cfg) { return Engine(cfg, load_resources(cfg)); }

}  // namespace

TEST(Config, Validation) {
  RunConfig cfg = fixture_config();
  EXPECT_NO_THROW(cfg.validate());
  cfg.scoring = ScoringMode::kBaseline;
  EXPECT_GR_ERROR(cfg.validate(), ErrorCode::kInvalidConfig);
  cfg.mode = DefinitionSourceMode::kNone;
  EXPECT_NO_THROW(cfg.validate());
  cfg.scoring = ScoringMode::kMarginal;
  EXPECT_GR_ERROR(cfg.validate(), ErrorCode::kInvalidConfig);

  RunConfig no_provider = fixture_config();
  no_provider.store.reset();
  EXPECT_GR_ERROR(no_provider.validate(), ErrorCode::kInvalidConfig);

  RunConfig both = fixture_config();
  both.synthetic = SyntheticSpec{1, 8};
  EXPECT_GR_ERROR(both.validate(), ErrorCode::kInvalidConfig);

  RunConfig cadg = fixture_config();
  cadg.mode = DefinitionSourceMode::kCadg;
  EXPECT_GR_ERROR(cadg.validate(), ErrorCode::kInvalidConfig);

  RunConfig senses = fixture_config();
  senses.senses = "s.tsv";
  EXPECT_GR_ERROR(senses.validate(), ErrorCode::kInvalidConfig);
  senses.scoring = ScoringMode::kPipeline;
  EXPECT_NO_THROW(senses.validate());

  RunConfig bad_scale = fixture_config();
  bad_scale.c2d_scale = -1;
  EXPECT_GR_ERROR(bad_scale.validate(), ErrorCode::kInvalidConfig);
}

TEST(Config, JsonOverrides) {
  const RunConfig base = fixture_config();
  const auto cfg = apply_config_json(
      base, R"({"mode": "none", "scoring": "baseline", "d2i_scale": 2.5, "workers": 3, "label": "b"})");
  EXPECT_EQ(cfg.mode, DefinitionSourceMode::kNone);
  EXPECT_EQ(cfg.scoring, ScoringMode::kBaseline);
  EXPECT_EQ(cfg.d2i_scale, 2.5);
  EXPECT_EQ(cfg.workers, 3u);
  EXPECT_EQ(cfg.effective_label(), "b");
  EXPECT_EQ(cfg.store, base.store);

  const auto syn = apply_config_json(base, R"({"synthetic": {"seed": 4, "dim": 16}})");
  EXPECT_FALSE(syn.store.has_value());
  EXPECT_EQ(syn.synthetic, (SyntheticSpec{4, 16}));
  const auto rel = apply_config_json(base, R"({"inventory": "inv.tsv"})", "/data");
  EXPECT_EQ(rel.inventory, std::filesystem::path("/data/inv.tsv"));

  EXPECT_GR_ERROR(apply_config_json(base, R"({"colour": 1})"), ErrorCode::kInvalidConfig);
  EXPECT_GR_ERROR(apply_config_json(base, R"({"mode": "gpt"})"), ErrorCode::kInvalidConfig);
  EXPECT_GR_ERROR(apply_config_json(base, "[1]"), ErrorCode::kInvalidConfig);
  EXPECT_GR_ERROR(apply_config_json(base, "{"), ErrorCode::kInvalidConfig);
}

TEST(Config, SyntheticSpec) {
  EXPECT_EQ(parse_synthetic_spec("42,64"), (SyntheticSpec{42, 64}));
  EXPECT_GR_ERROR(parse_synthetic_spec("42"), ErrorCode::kInvalidConfig);
  EXPECT_GR_ERROR(parse_synthetic_spec("a,64"), ErrorCode::kInvalidConfig);
  EXPECT_GR_ERROR(parse_synthetic_spec("4,0"), ErrorCode::kInvalidConfig);
  EXPECT_GR_ERROR(parse_synthetic_spec("1.5,4"), ErrorCode::kInvalidConfig);
}

TEST(Config, DefaultLabels) {
  EXPECT_EQ(fixture_config().effective_label(), "wn/marginal");
  EXPECT_EQ(fixture_config(ScoringMode::kBaseline).effective_label(), "none/baseline");
}

TEST(EngineTest, ScalesDefaultToStoreHeader) {
  const auto engine = make_engine(fixture_config());
  EXPECT_EQ(engine.score_config().c2d_scale, 5.0);
  EXPECT_EQ(engine.score_config().d2i_scale, 5.0);
  RunConfig cfg = fixture_config();
  cfg.c2d_scale = 2.0;
  EXPECT_EQ(make_engine(cfg).score_config().c2d_scale, 2.0);
  EXPECT_EQ(make_engine(cfg).score_config().d2i_scale, 5.0);
}

TEST(EngineTest, MarginalBeatsBaselineOnFixture) {
  const auto instances = fixture_instances();
  const auto marginal = make_engine(fixture_config()).evaluate(instances);
  const auto baseline = make_engine(fixture_config(ScoringMode::kBaseline)).evaluate(instances);
  EXPECT_GE(marginal.hits_at_1, baseline.hits_at_1 + 20.0);
  EXPECT_EQ(marginal.n, 20u);
  EXPECT_EQ(marginal.fallback_count, 1u);
  EXPECT_EQ(baseline.fallback_count, 0u);
}

TEST(EngineTest, OovFallsBackToBaseline) {
  const auto instances = fixture_instances();
  const auto engine = make_engine(fixture_config());
  const auto base_engine = make_engine(fixture_config(ScoringMode::kBaseline));
  for (const auto& inst : instances) {
    if (inst.target != "zorbing") continue;
    const auto out = engine.rank_instance(inst);
    EXPECT_TRUE(out.fallback);
    EXPECT_EQ(out.applied, ScoringMode::kBaseline);
    EXPECT_TRUE(out.definitions.empty());
    EXPECT_FALSE(out.result.c2d.has_value());
    EXPECT_EQ(out.result.posterior, base_engine.rank_instance(inst).result.posterior);
    return;
  }
  FAIL() << "fixture lost its OOV instance";
}

TEST(EngineTest, SingleSenseMarginalEqualsPipeline) {
  const auto instances = fixture_instances();
  const auto marginal = make_engine(fixture_config());
  const auto pipeline = make_engine(fixture_config(ScoringMode::kPipeline));
  std::size_t checked = 0;
  for (const auto& inst : instances) {
    const auto m = marginal.rank_instance(inst);
    if (m.definitions.size() != 1) continue;
    const auto p = pipeline.rank_instance(inst);
    EXPECT_EQ(m.result.posterior, p.result.posterior);
    ++checked;
  }
  EXPECT_EQ(checked, 3u);
}

TEST(EngineTest, WorkersDoNotChangeResults) {
  const auto instances = fixture_instances();
  RunConfig cfg = fixture_config();
  const auto one = make_engine(cfg).evaluate(instances);
  cfg.workers = 4;
  EXPECT_EQ(make_engine(cfg).evaluate(instances), one);
}

TEST(EngineTest, KernelChoiceDoesNotChangeReport) {
  if (!kernels::available(kernels::Isa::kAvx2)) GTEST_SKIP();
  const auto instances = fixture_instances();
  const auto before = kernels::active().isa;
  kernels::set_active(kernels::Isa::kScalar);
  const auto scalar = make_engine(fixture_config()).evaluate(instances);
  kernels::set_active(kernels::Isa::kAvx2);
  const auto simd = make_engine(fixture_config()).evaluate(instances);
  kernels::set_active(before);
  EXPECT_EQ(scalar, simd);
}

TEST(EngineTest, EvaluateRequiresGold) {
  auto instances = load_dataset(kFx / "dataset.tsv");
  EXPECT_GR_ERROR(make_engine(fixture_config()).evaluate(instances), ErrorCode::kMissingGold);
}

TEST(EngineTest, AuditListsEveryMissingKey) {
  auto store = std::make_shared<EmbeddingStore>(EmbeddingStore::open(kFx / "store.tsv"));
  auto instances = fixture_instances();
  instances.resize(3);
  instances[0].candidates.push_back("ghost-a.jpg");
  instances[2].candidates.push_back("ghost-b.jpg");
  instances[1].context = "unseen context";
  RunConfig cfg = fixture_config();
  Resources res = load_resources(cfg);
  const Engine engine(cfg, res);
  const auto missing = engine.audit(instances);
  std::size_t images = 0, texts = 0;
  for (const auto& m : missing) (m.kind == "image" ? images : texts) += 1;
  EXPECT_EQ(images, 2u);
  EXPECT_GE(texts, 2u);  // the context plus its joint texts
  try {
    engine.rank_all(instances);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingKey);
    EXPECT_NE(std::string(e.what()).find("ghost-a.jpg"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("ghost-b.jpg"), std::string::npos);
  }
  EXPECT_TRUE(engine.audit(fixture_instances()).empty());
}

TEST(EngineTest, PairScoresReproduceBiEncoderScores) {
  const auto store = EmbeddingStore::open(kFx / "store.tsv");
  const auto instances = fixture_instances();
  const auto inv = load_inventory(kFx / "inventory.tsv");
  auto pairs = std::make_shared<PairScoreTable>();
  for (const auto& inst : instances) {
    std::vector<std::string> texts{inst.context};
    for (const auto& s : inv.lookup(inst.target)) texts.push_back(build_joint_text(inst.context, s.definition));
    for (const auto& t : texts) {
      for (const auto& img : inst.candidates) {
        pairs->set(t, img, kernels::dot(store.get_text(t).vec(), store.get_image(img).vec()));
      }
    }
  }
  const RunConfig cfg = fixture_config();
  Resources with_pairs = load_resources(cfg);
  with_pairs.pairs = pairs;
  const auto a = Engine(cfg, load_resources(cfg)).evaluate(instances);
  const auto b = Engine(cfg, with_pairs).evaluate(instances);
  EXPECT_EQ(a, b);

  // Baseline from pairs alone, no vectors at all.
  RunConfig base_cfg = fixture_config(ScoringMode::kBaseline);
  Resources only_pairs;
  only_pairs.pairs = pairs;
  only_pairs.inventory = with_pairs.inventory;
  const auto c = Engine(base_cfg, only_pairs).evaluate(instances);
  const auto d = make_engine(base_cfg).evaluate(instances);
  EXPECT_EQ(c.hits_at_1, d.hits_at_1);
  EXPECT_EQ(c.instances, d.instances);

  auto partial = std::make_shared<PairScoreTable>();
  partial->set(instances[0].context, instances[0].candidates[0], 0.5);
  Resources sparse = load_resources(cfg);
  sparse.pairs = partial;
  const auto missing = Engine(cfg, sparse).audit(instances);
  EXPECT_FALSE(missing.empty());
  EXPECT_EQ(missing.front().kind, "pair");
}

TEST(EngineTest, StoreAndSyntheticProvidersAgree) {
  const SyntheticEncoder enc(77, 32);
  std::vector<VwsdInstance> instances(1);
  instances[0] = {"s1", "angora", std::nullopt, "angora city", {"i1", "i2", "i3"}, "i2"};
  SenseInventory inv;
  inv.add(make_sense("angora", PartOfSpeech::kNoun, "a breed of cat"));
  inv.add(make_sense("angora", PartOfSpeech::kNoun, "the former name of Ankara"));

  auto store = std::make_shared<EmbeddingStore>(32, 1.0);
  store->add(enc.encode(RepKind::kText, "angora city"));
  for (const auto& s : inv.entries()) store->add(enc.encode(RepKind::kText, build_joint_text("angora city", s.definition)));
  for (const auto& img : instances[0].candidates) store->add(enc.encode(RepKind::kImage, img));

  RunConfig cfg;
  cfg.synthetic = SyntheticSpec{77, 32};
  cfg.inventory = "unused";
  Resources syn;
  syn.provider = std::make_shared<SyntheticProvider>(enc);
  syn.inventory = std::make_shared<SenseInventory>(inv);
  Resources st = syn;
  st.provider = std::make_shared<StoreProvider>(store);
  const auto a = Engine(cfg, syn).rank_instance(instances[0]);
  const auto b = Engine(cfg, st).rank_instance(instances[0]);
  EXPECT_EQ(a.result.posterior, b.result.posterior);
  EXPECT_EQ(*a.result.c2d, *b.result.c2d);
}

TEST(EngineTest, PipelineWithExternalSenses) {
  const auto dir = testutil::temp_dir("senses");
  const auto instances = fixture_instances();
  const auto inv = load_inventory(kFx / "inventory.tsv");
  std::ostringstream senses;
  for (const auto& inst : instances) {
    const auto defs = inv.lookup(inst.target);
    if (!defs.empty()) senses << inst.id << '\t' << defs.back().definition << '\n';
  }
  testutil::write_file(dir / "senses.tsv", senses.str());
  RunConfig cfg = fixture_config(ScoringMode::kPipeline);
  cfg.senses = dir / "senses.tsv";
  const auto engine = make_engine(cfg);
  for (const auto& inst : instances) {
    const auto out = engine.rank_instance(inst);
    if (out.definitions.empty()) continue;
    EXPECT_EQ(out.applied, ScoringMode::kPipeline);
    EXPECT_FALSE(out.result.c2d.has_value());
  }
  testutil::write_file(dir / "wrong.tsv", instances[0].id + "\tnot a real sense\n");
  cfg.senses = dir / "wrong.tsv";
  EXPECT_GR_ERROR(make_engine(cfg).rank_instance(instances[0]), ErrorCode::kUnknownSense);
  EXPECT_GR_ERROR(make_engine(cfg).rank_instance(instances[1]), ErrorCode::kUnknownSense);
  testutil::write_file(dir / "bad.tsv", "no tab here\n");
  EXPECT_GR_ERROR(load_sense_predictions(dir / "bad.tsv"), ErrorCode::kMalformedLine);
  std::filesystem::remove_all(dir);
}

TEST(EngineTest, WnPlusCadgUsesGeneratedOnlyForOov) {
  const auto instances = fixture_instances();
  auto gen = std::make_shared<GeneratedDefinitions>();
  for (const auto& inst : instances) gen->add({inst.id, PromptKind::kCadg, inst.target, "generated for " + inst.id});
  RunConfig cfg = fixture_config();
  cfg.mode = DefinitionSourceMode::kWnPlusCadg;
  cfg.generated = "in-memory";
  Resources res;
  res.provider = std::make_shared<SyntheticProvider>(SyntheticEncoder(1, 8));
  res.inventory = std::make_shared<SenseInventory>(load_inventory(kFx / "inventory.tsv"));
  res.generated = gen;
  const Engine engine(cfg, res);
  for (const auto& inst : instances) {
    const auto defs = engine.definitions_for(inst);
    ASSERT_FALSE(defs.entries.empty());
    const bool oov = res.inventory->count(inst.target) == 0;
    EXPECT_EQ(defs.entries[0].source == SenseSource::kGenerated, oov) << inst.id;
  }
  cfg.mode = DefinitionSourceMode::kCadg;
  const Engine cadg(cfg, res);
  EXPECT_EQ(cadg.definitions_for(instances[0]).entries.size(), 1u);
  EXPECT_EQ(cadg.definitions_for(instances[0]).kb_senses, 3u);
}

TEST(EngineTest, PosFilterOffByDefault) {
  SenseInventory inv;
  inv.add(make_sense("bank", PartOfSpeech::kNoun, "land by water"));
  inv.add(make_sense("bank", PartOfSpeech::kVerb, "deposit money"));
  RunConfig cfg;
  cfg.synthetic = SyntheticSpec{1, 8};
  cfg.inventory = "unused";
  Resources res;
  res.provider = std::make_shared<SyntheticProvider>(SyntheticEncoder(1, 8));
  res.inventory = std::make_shared<SenseInventory>(inv);
  VwsdInstance inst{"x", "bank", PartOfSpeech::kVerb, "bank money", {"a", "b"}, std::nullopt};
  EXPECT_EQ(Engine(cfg, res).definitions_for(inst).entries.size(), 2u);
  cfg.pos_filter = true;
  EXPECT_EQ(Engine(cfg, res).definitions_for(inst).entries.size(), 1u);
}

TEST(ParallelFor, RunsEveryIndexAndRethrowsLowestFailure) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  try {
    parallel_for(50, 3, [](std::size_t i) {
      if (i == 7 || i == 30) throw std::runtime_error("fail " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "fail 7");
  }
  parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(Gendefs, WarmCacheMakesNoCalls) {
  const auto dir = testutil::temp_dir("gendefs");
  auto instances = fixture_instances();
  instances.resize(4);
  std::ostringstream replay;
  for (const auto& inst : instances) {
    const nlohmann::json line = {
        {"prompt", build_cadg_prompt(inst.target, PartOfSpeech::kNoun, inst.context)},
        {"samples", {"sense one of " + inst.target, "sense two", "sense three"}}};
    replay << line.dump() << '\n';
  }
  testutil::write_file(dir / "replay.jsonl", replay.str());
  auto client = ReplayGenerationClient::load(dir / "replay.jsonl");
  const GenCache cache(dir / "cache");
  GendefsOptions opts;
  opts.n_samples = 3;
  const auto first = run_gendefs(instances, nullptr, client.get(), &cache, opts);
  EXPECT_TRUE(first.failures.empty()) << (first.failures.empty() ? "" : first.failures[0].message);
  EXPECT_EQ(first.definitions.size(), 12u);
  for (const auto& inst : instances) EXPECT_EQ(first.definitions.lookup(inst.id, PromptKind::kCadg).size(), 3u);
  const auto calls = client->calls();
  const auto second = run_gendefs(instances, nullptr, client.get(), &cache, opts);
  EXPECT_EQ(client->calls(), calls);
  EXPECT_EQ(second.definitions.rows().size(), first.definitions.rows().size());
  const auto offline = run_gendefs(instances, nullptr, nullptr, &cache, opts);
  EXPECT_TRUE(offline.failures.empty());
  std::filesystem::remove_all(dir);
}

TEST(Gendefs, OovOnlyAndFailuresRecorded) {
  const auto instances = fixture_instances();
  const auto inv = load_inventory(kFx / "inventory.tsv");
  std::map<std::string, std::vector<std::string>> responses;
  responses["zorbing (n)"] = {"rolling downhill inside a transparent orb"};
  ReplayGenerationClient client(responses);
  GendefsOptions opts;
  opts.kinds = {PromptKind::kDg};
  opts.oov_only = true;
  const auto out = run_gendefs(instances, &inv, &client, nullptr, opts);
  EXPECT_EQ(out.processed, 1u);
  EXPECT_EQ(out.skipped, 19u);
  EXPECT_EQ(out.definitions.size(), 1u);
  EXPECT_EQ(out.definitions.rows()[0].target, "zorbing");

  opts.oov_only = false;
  const auto all = run_gendefs(instances, &inv, &client, nullptr, opts);
  EXPECT_EQ(all.failures.size(), 19u);
  EXPECT_EQ(all.definitions.size(), 1u);
  EXPECT_GR_ERROR(run_gendefs(instances, nullptr, &client, nullptr, GendefsOptions{{PromptKind::kDg}, 1, 1.0, true, 3}),
                  ErrorCode::kInvalidConfig);
}

TEST(Fixture, RebuildMatchesCommittedFiles) {
  const auto dir = testutil::temp_dir("fixture");
  write_fixture(build_synthetic_fixture(), dir);
  for (const char* f : {"dataset.tsv", "gold.tsv", "inventory.tsv", "store.tsv"}) {
    EXPECT_EQ(testutil::read_file(dir / f), testutil::read_file(kFx / f)) << f;
  }
  std::filesystem::remove_all(dir);
}

TEST(Fixture, Shape) {
  const auto fx = build_synthetic_fixture();
  EXPECT_EQ(fx.instances.size(), 20u);
  std::size_t oov = 0, trivial = 0, ambiguous = 0;
  for (const auto& inst : fx.instances) {
    EXPECT_EQ(inst.candidates.size(), 10u);
    EXPECT_TRUE(inst.gold.has_value());
    switch (fx.inventory.ambiguity_class(inst.target).level) {
      case AmbiguityLevel::kOov: ++oov; break;
      case AmbiguityLevel::kTrivial: ++trivial; break;
      case AmbiguityLevel::kAmbiguous: ++ambiguous; break;
    }
  }
  EXPECT_EQ(oov, 1u);
  EXPECT_EQ(trivial, 3u);
  EXPECT_EQ(ambiguous, 16u);
}
