// glossrank command-line tool: rank, evaluate, gendefs, inspect, make-fixture.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glossrank/engine.hpp"
#include "glossrank/error.hpp"
#include "glossrank/fixture.hpp"
#include "glossrank/kernels.hpp"
#include "glossrank/report.hpp"

namespace gr = glossrank;

namespace {

constexpr int kExitError = 1;
constexpr int kExitMissingKey = 2;

// Flags shared by the ranking subcommands; unset flags leave the config alone.
struct CommonFlags {
  std::string config, store, pairs, synthetic, inventory, gen_defs, senses, cache_dir;
  std::string mode, scoring, kernel, label;
  std::optional<double> c2d_scale, d2i_scale;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<int> n_samples;
  bool pos_filter = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON run config applied before the other flags");
    app->add_option("--store", store, "embedding store file");
    app->add_option("--pairs", pairs, "pair-score file (cross-encoder D2I)");
    app->add_option("--synthetic", synthetic, "synthetic encoder as seed,dim");
    app->add_option("--inventory", inventory, "sense inventory TSV");
    app->add_option("--gen-defs", gen_defs, "generated definitions TSV");
    app->add_option("--senses", senses, "external sense predictions for pipeline scoring");
    app->add_option("--cache-dir", cache_dir, "generation cache directory");
    app->add_option("--mode", mode, "definition source: none, wn, dg, cadg, wn+cadg");
    app->add_option("--scoring", scoring, "baseline, marginal or pipeline");
    app->add_option("--c2d-scale", c2d_scale, "logit scale for context-to-definition");
    app->add_option("--d2i-scale", d2i_scale, "logit scale for definition-to-image and baseline");
    app->add_option("--n-samples", n_samples, "generated samples per prompt");
    app->add_option("--seed", seed, "seed for the synthetic encoder");
    app->add_option("--workers", workers, "ranking threads");
    app->add_option("--kernel", kernel, "numeric kernels: auto, scalar, avx2");
    app->add_option("--label", label, "report label");
    app->add_flag("--pos-filter", pos_filter, "filter inventory senses by part of speech");
  }

  gr::RunConfig build(gr::RunConfig cfg = {}) const {
    if (!config.empty()) cfg = gr::apply_config_file(cfg, config);
    if (!store.empty()) {
      cfg.store = store;
      cfg.synthetic.reset();
    }
    if (!synthetic.empty()) {
      cfg.synthetic = gr::parse_synthetic_spec(synthetic);
      cfg.store.reset();
    }
    if (seed) {
      if (!cfg.synthetic) throw gr::Error(gr::ErrorCode::kInvalidConfig, "--seed needs --synthetic");
      cfg.synthetic->seed = *seed;
    }
    if (!pairs.empty()) cfg.pairs = pairs;
    if (!inventory.empty()) cfg.inventory = inventory;
    if (!gen_defs.empty()) cfg.generated = gen_defs;
    if (!senses.empty()) cfg.senses = senses;
    if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
    if (!label.empty()) cfg.label = label;
    if (!mode.empty()) {
      const auto m = gr::parse_definition_mode(mode);
      if (!m) throw gr::Error(gr::ErrorCode::kInvalidConfig, "unknown --mode '" + mode + "'");
      cfg.mode = *m;
    }
    if (!scoring.empty()) {
      const auto s = gr::parse_scoring_mode(scoring);
      if (!s) throw gr::Error(gr::ErrorCode::kInvalidConfig, "unknown --scoring '" + scoring + "'");
      cfg.scoring = *s;
    }
    if (c2d_scale) cfg.c2d_scale = *c2d_scale;
    if (d2i_scale) cfg.d2i_scale = *d2i_scale;
    if (n_samples) cfg.n_samples = *n_samples;
    if (workers) cfg.workers = *workers;
    if (pos_filter) cfg.pos_filter = true;
    // --mode none implies baseline unless told otherwise, and vice versa.
    if (scoring.empty() && !mode.empty() && cfg.mode == gr::DefinitionSourceMode::kNone) {
      cfg.scoring = gr::ScoringMode::kBaseline;
    }
    if (mode.empty() && !scoring.empty() && cfg.scoring == gr::ScoringMode::kBaseline) {
      cfg.mode = gr::DefinitionSourceMode::kNone;
    }
    return cfg;
  }

  void apply_kernel() const {
    if (kernel.empty()) return;
    const auto isa = gr::kernels::parse_isa(kernel);
    if (!isa) throw gr::Error(gr::ErrorCode::kInvalidConfig, "unknown --kernel '" + kernel + "'");
    gr::kernels::set_active(*isa);
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void print_ranking(const gr::RankOutcome& o, const std::optional<std::string>& gold) {
  const auto& r = o.result;
  std::cout << "instance: " << (r.instance_id.empty() ? "-" : r.instance_id) << '\n';
  std::cout << "scoring: " << gr::to_string(o.applied) << (o.fallback ? " (fallback: no definitions)" : "")
            << "  definitions: " << o.definitions.size() << '\n';
  if (r.c2d) {
    std::cout << "c2d:\n";
    for (std::size_t i = 0; i < o.definitions.size(); ++i) {
      std::cout << "  " << fmt((*r.c2d)[i]) << "  " << o.definitions[i].definition << '\n';
    }
  }
  std::cout << "ranking:\n";
  for (std::size_t k = 0; k < r.ranking.size(); ++k) {
    const std::size_t idx = r.ranking[k];
    const std::string& key = r.posterior.support()[idx];
    std::cout << "  " << (k + 1) << ". " << fmt(r.posterior[idx]) << "  " << key
              << (gold && *gold == key ? "  [gold]" : "") << '\n';
  }
  std::cout << "prediction: " << r.prediction << '\n';
  if (r.gold_rank) std::cout << "gold_rank: " << *r.gold_rank << '\n';
}

int run_rank(const CommonFlags& flags, const gr::VwsdInstance& inst) {
  flags.apply_kernel();
  const gr::RunConfig cfg = flags.build();
  gr::Engine engine(cfg, gr::load_resources(cfg));
  const auto missing = engine.audit({inst});
  if (!missing.empty()) {
    throw gr::Error(gr::ErrorCode::kMissingKey, std::to_string(missing.size()) + " key(s) missing:\n" +
                                                    gr::describe(missing));
  }
  print_ranking(engine.rank_instance(inst), inst.gold);
  return 0;
}

struct EvaluateArgs {
  std::string data, gold, compare, out, format = "json";
};

int run_evaluate(const CommonFlags& flags, const EvaluateArgs& args) {
  flags.apply_kernel();
  if (args.gold.empty()) throw gr::Error(gr::ErrorCode::kMissingGold, "evaluation needs --gold");
  const auto instances = gr::load_dataset(args.data, args.gold);
  const gr::RunConfig cfg = flags.build();

  gr::ReportDocument doc;
  doc.system = gr::Engine(cfg, gr::load_resources(cfg)).evaluate(instances);
  if (!args.compare.empty()) {
    gr::RunConfig ref_base = cfg;
    ref_base.label.clear();
    const gr::RunConfig ref_cfg = gr::apply_config_file(ref_base, args.compare);
    doc.reference = gr::Engine(ref_cfg, gr::load_resources(ref_cfg)).evaluate(instances);
    doc.comparison = gr::compare(*doc.reference, doc.system);
  }
  if (!args.out.empty()) {
    gr::emit_report(doc, args.out, args.format == "text" ? gr::ReportFormat::kText : gr::ReportFormat::kJson);
  }
  std::cout << gr::render_summary(doc);
  return 0;
}

struct GendefsArgs {
  std::string data, out, failures, replay;
  std::vector<std::string> kinds{"cadg"};
  double temperature = 1.0;
  bool oov_only = false;
  int max_retries = 3;
};

int run_gendefs_cmd(const CommonFlags& flags, const GendefsArgs& args) {
  gr::RunConfig cfg = flags.build();
  const auto instances = gr::load_dataset(args.data);

  std::unique_ptr<gr::GenerationClient> client;
  gr::ReplayGenerationClient* replay = nullptr;
  if (!args.replay.empty()) {
    auto r = gr::ReplayGenerationClient::load(args.replay);
    replay = r.get();
    client = std::move(r);
  } else {
    client = gr::HttpGenerationClient::from_environment();
  }
  std::optional<gr::GenCache> cache;
  if (cfg.cache_dir) cache.emplace(*cfg.cache_dir);
  std::optional<gr::SenseInventory> inventory;
  if (cfg.inventory) inventory = gr::load_inventory(*cfg.inventory);

  gr::GendefsOptions opts;
  opts.kinds.clear();
  for (const auto& k : args.kinds) {
    const auto kind = gr::parse_prompt_kind(k);
    if (!kind) throw gr::Error(gr::ErrorCode::kInvalidConfig, "unknown --kind '" + k + "'");
    opts.kinds.push_back(*kind);
  }
  opts.n_samples = cfg.n_samples;
  opts.temperature = args.temperature;
  opts.oov_only = args.oov_only;
  opts.max_retries = args.max_retries;

  const auto result = gr::run_gendefs(instances, inventory ? &*inventory : nullptr, client.get(),
                                      cache ? &*cache : nullptr, opts);
  {
    std::ofstream out(args.out, std::ios::binary | std::ios::trunc);
    if (!out) throw gr::Error(gr::ErrorCode::kIOError, "cannot write " + args.out);
    result.definitions.write(out);
  }
  std::cout << "processed " << result.processed << ", skipped " << result.skipped << ", definitions "
            << result.definitions.size() << ", failures " << result.failures.size() << '\n';
  if (replay != nullptr) std::cout << "service calls: " << replay->calls() << '\n';
  if (!result.failures.empty()) {
    const std::string path = args.failures.empty() ? args.out + ".failures.tsv" : args.failures;
    std::ofstream fail(path, std::ios::binary | std::ios::trunc);
    for (const auto& f : result.failures) {
      fail << f.instance_id << '\t' << f.message << '\n';
      std::cerr << "failed: " << f.instance_id << ": " << f.message << '\n';
    }
    std::cerr << "failures written to " << path << '\n';
    return kExitError;
  }
  return 0;
}

int run_inspect(const CommonFlags& flags, const std::string& data) {
  gr::RunConfig cfg = flags.build();
  if (cfg.store) {
    const auto store = gr::EmbeddingStore::open(*cfg.store);
    std::cout << "store: dim=" << store.dim() << " logit_scale=" << store.logit_scale()
              << " text=" << store.text_count() << " image=" << store.image_count() << '\n';
  }
  if (cfg.pairs) std::cout << "pairs: " << gr::PairScoreTable::open(*cfg.pairs).size() << " scores\n";
  std::optional<gr::SenseInventory> inv;
  if (cfg.inventory) {
    inv = gr::load_inventory(*cfg.inventory);
    std::cout << "inventory: " << inv->size() << " senses over " << inv->lemma_count() << " lemmas\n";
  }
  if (data.empty()) return 0;

  const auto instances = gr::load_dataset(data);
  std::cout << "dataset: " << instances.size() << " instances\n";
  if (inv) {
    std::size_t counts[3] = {0, 0, 0};
    for (const auto& inst : instances) ++counts[static_cast<int>(inv->ambiguity_class(inst.target).level)];
    const double total = static_cast<double>(instances.size());
    char buf[128];
    std::snprintf(buf, sizeof buf, "oov: %zu (%.2f%%)  trivial: %zu  ambiguous: %zu\n", counts[0],
                  total > 0 ? 100.0 * counts[0] / total : 0.0, counts[1], counts[2]);
    std::cout << buf;
  }
  if (cfg.store || cfg.synthetic || cfg.pairs) {
    if (flags.mode.empty()) cfg.mode = inv ? gr::DefinitionSourceMode::kWn : gr::DefinitionSourceMode::kNone;
    if (flags.scoring.empty()) {
      cfg.scoring = cfg.mode == gr::DefinitionSourceMode::kNone ? gr::ScoringMode::kBaseline
                                                                : gr::ScoringMode::kMarginal;
    }
    gr::Engine engine(cfg, gr::load_resources(cfg));
    const auto missing = engine.audit(instances);
    std::cout << "missing keys (" << gr::to_string(cfg.mode) << "/" << gr::to_string(cfg.scoring)
              << "): " << missing.size() << '\n'
              << gr::describe(missing);
  }
  return 0;
}

int run_make_fixture(const std::string& out, std::optional<std::uint64_t> seed) {
  gr::FixtureParams params;
  if (seed) params.seed = *seed;
  const auto fx = gr::build_synthetic_fixture(params);
  gr::write_fixture(fx, out);
  std::cout << "wrote " << fx.instances.size() << " instances to " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glossrank: gloss-marginalized image ranking for ambiguous words"};
  app.require_subcommand(1);

  CommonFlags rank_flags, eval_flags, gen_flags, inspect_flags;

  auto* rank = app.add_subcommand("rank", "rank the candidates of one instance");
  rank_flags.attach(rank);
  gr::VwsdInstance inst;
  std::string pos;
  std::string gold;
  rank->add_option("--id", inst.id, "instance id")->default_val("cli");
  rank->add_option("--target", inst.target, "target word")->required();
  rank->add_option("--context", inst.context, "context phrase")->required();
  rank->add_option("--candidates", inst.candidates, "candidate image keys")->required();
  rank->add_option("--gold", gold, "gold image key");
  rank->add_option("--pos", pos, "part of speech (n, v, a, r, x)");

  auto* evaluate = app.add_subcommand("evaluate", "rank a dataset and write a report");
  eval_flags.attach(evaluate);
  EvaluateArgs eval_args;
  evaluate->add_option("--data", eval_args.data, "dataset TSV")->required();
  evaluate->add_option("--gold", eval_args.gold, "gold TSV");
  evaluate->add_option("--compare", eval_args.compare, "JSON config of the reference system");
  evaluate->add_option("--out", eval_args.out, "report path");
  evaluate->add_option("--format", eval_args.format, "report format")->check(CLI::IsMember({"json", "text"}));

  auto* gendefs = app.add_subcommand("gendefs", "generate definitions for a dataset");
  gen_flags.attach(gendefs);
  GendefsArgs gen_args;
  gendefs->add_option("--data", gen_args.data, "dataset TSV")->required();
  gendefs->add_option("--out", gen_args.out, "generated definitions TSV")->required();
  gendefs->add_option("--failures", gen_args.failures, "failures TSV (default <out>.failures.tsv)");
  gendefs->add_option("--kind", gen_args.kinds, "prompt kinds: dg, cadg");
  gendefs->add_option("--temperature", gen_args.temperature, "sampling temperature");
  gendefs->add_option("--max-retries", gen_args.max_retries, "re-requests for empty samples");
  gendefs->add_option("--replay", gen_args.replay, "serve responses from a JSON-lines file");
  gendefs->add_flag("--oov-only", gen_args.oov_only, "only targets absent from --inventory");

  auto* inspect = app.add_subcommand("inspect", "print store, inventory and dataset diagnostics");
  inspect_flags.attach(inspect);
  std::string inspect_data;
  inspect->add_option("--data", inspect_data, "dataset TSV");

  auto* make_fixture = app.add_subcommand("make-fixture", "write the synthetic 20-instance fixture");
  std::string fixture_out;
  std::optional<std::uint64_t> fixture_seed;
  make_fixture->add_option("--out", fixture_out, "output directory")->required();
  make_fixture->add_option("--seed", fixture_seed, "encoder seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rank) {
      if (!gold.empty()) inst.gold = gold;
      if (!pos.empty()) {
        inst.pos = gr::parse_pos(pos);
        if (!inst.pos) throw gr::Error(gr::ErrorCode::kInvalidConfig, "unknown --pos '" + pos + "'");
      }
      return run_rank(rank_flags, inst);
    }
    if (*evaluate) return run_evaluate(eval_flags, eval_args);
    if (*gendefs) return run_gendefs_cmd(gen_flags, gen_args);
    if (*inspect) return run_inspect(inspect_flags, inspect_data);
    if (*make_fixture) return run_make_fixture(fixture_out, fixture_seed);
  } catch (const gr::Error& e) {
    std::cerr << "glossrank: " << e.what() << '\n';
    const bool missing = e.code() == gr::ErrorCode::kMissingKey || e.code() == gr::ErrorCode::kMissingPair;
    return missing ? kExitMissingKey : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "glossrank: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
