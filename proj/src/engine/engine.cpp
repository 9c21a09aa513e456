#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <set>
#include <thread>

#include "glossrank/engine.hpp"
#include "glossrank/error.hpp"
#include "glossrank/text.hpp"

namespace glossrank {

std::map<std::string, std::string> load_sense_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIOError, "cannot open sense predictions " + path.string());
  std::map<std::string, std::string> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = text::chomp(raw);
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 || text::trim(line.substr(tab + 1)).empty()) {
      throw Error(ErrorCode::kMalformedLine,
                  path.string() + ":" + std::to_string(line_no) + ": expected 'id\\tdefinition'");
    }
    out[std::string(line.substr(0, tab))] = std::string(text::trim(line.substr(tab + 1)));
  }
  return out;
}

Resources load_resources(const RunConfig& cfg) {
  cfg.validate();
  Resources res;
  if (cfg.store) {
    auto store = std::make_shared<const EmbeddingStore>(EmbeddingStore::open(*cfg.store));
    res.store_logit_scale = store->logit_scale();
    res.provider = std::make_shared<const StoreProvider>(std::move(store));
  } else if (cfg.synthetic) {
    res.provider =
        std::make_shared<const SyntheticProvider>(SyntheticEncoder(cfg.synthetic->seed, cfg.synthetic->dim));
  }
  if (cfg.pairs) res.pairs = std::make_shared<const PairScoreTable>(PairScoreTable::open(*cfg.pairs));
  if (cfg.inventory) res.inventory = std::make_shared<const SenseInventory>(load_inventory(*cfg.inventory));
  if (cfg.generated) {
    res.generated = std::make_shared<const GeneratedDefinitions>(GeneratedDefinitions::open(*cfg.generated));
  }
  if (cfg.senses) res.sense_predictions = load_sense_predictions(*cfg.senses);
  return res;
}

std::string describe(const std::vector<MissingKey>& missing) {
  std::string out;
  for (const auto& m : missing) out += m.kind + " '" + m.key + "' (instance " + m.instance_id + ")\n";
  return out;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!failed.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Engine::Engine(RunConfig cfg, Resources res) : cfg_(std::move(cfg)), res_(std::move(res)) {
  cfg_.validate();
  const double fallback_scale = res_.store_logit_scale.value_or(1.0);
  score_.c2d_scale = cfg_.c2d_scale.value_or(fallback_scale);
  score_.d2i_scale = cfg_.d2i_scale.value_or(fallback_scale);
  score_.mode = cfg_.scoring;
  score_.validate();
  if (!res_.provider && !(res_.pairs && cfg_.scoring == ScoringMode::kBaseline)) {
    throw Error(ErrorCode::kInvalidConfig, "no representation provider loaded");
  }
}

InstanceDefinitions Engine::definitions_for(const VwsdInstance& inst) const {
  InstanceDefinitions out;
  if (res_.inventory) out.kb_senses = res_.inventory->count(inst.target);
  if (cfg_.mode == DefinitionSourceMode::kNone) return out;
  std::vector<SenseEntry> wn, gen;
  if (res_.inventory) {
    wn = res_.inventory->lookup(inst.target, cfg_.pos_filter ? inst.pos : std::nullopt);
  }
  if (res_.generated) {
    const PromptKind kind = cfg_.mode == DefinitionSourceMode::kDg ? PromptKind::kDg : PromptKind::kCadg;
    gen = res_.generated->lookup(inst.id, kind);
  }
  try {
    out.entries = assemble_definitions(cfg_.mode, wn, gen);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoDefinitionsAvailable) throw;
    out.fallback = true;
  }
  return out;
}

namespace {

class KeyAudit {
 public:
  void need(const char* kind, const std::string& key, const std::string& id) {
    if (seen_.emplace(kind, key).second) missing_.push_back({kind, key, id});
  }
  std::vector<MissingKey> take() { return std::move(missing_); }

 private:
  std::set<std::pair<std::string, std::string>> seen_;
  std::vector<MissingKey> missing_;
};

}  // namespace

std::vector<MissingKey> Engine::audit(const std::vector<VwsdInstance>& instances) const {
  KeyAudit audit;
  const auto* prov = res_.provider.get();
  const auto text_ok = [&](const std::string& k) { return prov && prov->has_text(k); };
  const auto image_ok = [&](const std::string& k) { return prov && prov->has_image(k); };
  for (const auto& inst : instances) {
    const InstanceDefinitions defs = definitions_for(inst);
    const bool use_senses = cfg_.scoring == ScoringMode::kPipeline && cfg_.senses.has_value();
    if (defs.entries.empty()) {
      for (const auto& img : inst.candidates) {
        if (res_.pairs) {
          if (!res_.pairs->contains(inst.context, img)) audit.need("pair", inst.context + "\t" + img, inst.id);
        } else {
          if (!text_ok(inst.context)) audit.need("text", inst.context, inst.id);
          if (!image_ok(img)) audit.need("image", img, inst.id);
        }
      }
      continue;
    }
    if (!use_senses && !text_ok(inst.context)) audit.need("text", inst.context, inst.id);
    for (const auto& d : defs.entries) {
      const std::string joint = build_joint_text(inst.context, d.definition);
      if ((!use_senses || !res_.pairs) && !text_ok(joint)) audit.need("text", joint, inst.id);
      for (const auto& img : inst.candidates) {
        if (res_.pairs) {
          if (!res_.pairs->contains(joint, img)) audit.need("pair", joint + "\t" + img, inst.id);
        } else if (!image_ok(img)) {
          audit.need("image", img, inst.id);
        }
      }
    }
  }
  return audit.take();
}

Representation Engine::text(const std::string& key) const {
  if (!res_.provider) throw Error(ErrorCode::kMissingKey, "text '" + key + "': no representation provider");
  return res_.provider->text(key);
}

Distribution Engine::baseline(const VwsdInstance& inst) const {
  if (res_.pairs) {
    std::vector<double> scores;
    scores.reserve(inst.candidates.size());
    for (const auto& img : inst.candidates) scores.push_back(res_.pairs->pair_score(inst.context, img));
    return softmax(scores, score_.d2i_scale, inst.candidates);
  }
  std::vector<Representation> images;
  images.reserve(inst.candidates.size());
  for (const auto& img : inst.candidates) images.push_back(res_.provider->image(img));
  return baseline_posterior(text(inst.context), images, score_);
}

std::vector<Distribution> Engine::d2i_rows(const VwsdInstance& inst,
                                           const std::vector<std::string>& joint_keys) const {
  std::vector<Distribution> rows;
  rows.reserve(joint_keys.size());
  if (res_.pairs) {
    std::vector<double> scores(inst.candidates.size());
    for (const auto& joint : joint_keys) {
      for (std::size_t v = 0; v < inst.candidates.size(); ++v) {
        scores[v] = res_.pairs->pair_score(joint, inst.candidates[v]);
      }
      rows.push_back(d2i_from_scores(scores, inst.candidates, score_));
    }
    return rows;
  }
  std::vector<Representation> images;
  images.reserve(inst.candidates.size());
  for (const auto& img : inst.candidates) images.push_back(res_.provider->image(img));
  for (const auto& joint : joint_keys) rows.push_back(d2i(text(joint), images, score_));
  return rows;
}

RankOutcome Engine::rank_instance(const VwsdInstance& inst) const {
  inst.validate();
  InstanceDefinitions defs = definitions_for(inst);
  const std::optional<std::string_view> gold =
      inst.gold ? std::optional<std::string_view>(*inst.gold) : std::nullopt;

  if (defs.entries.empty()) {
    return RankOutcome{rank(baseline(inst), gold, inst.id), {}, ScoringMode::kBaseline, defs.fallback,
                       defs.kb_senses};
  }

  std::vector<std::string> joint_keys;
  joint_keys.reserve(defs.entries.size());
  for (const auto& d : defs.entries) joint_keys.push_back(build_joint_text(inst.context, d.definition));
  const std::vector<Distribution> rows = d2i_rows(inst, joint_keys);

  if (cfg_.scoring == ScoringMode::kPipeline && cfg_.senses) {
    const auto it = res_.sense_predictions.find(inst.id);
    if (it == res_.sense_predictions.end()) {
      throw Error(ErrorCode::kUnknownSense, "no sense prediction for instance " + inst.id);
    }
    const auto match = std::find_if(defs.entries.begin(), defs.entries.end(),
                                    [&](const SenseEntry& e) { return e.definition == it->second; });
    if (match == defs.entries.end()) {
      throw Error(ErrorCode::kUnknownSense,
                  "instance " + inst.id + ": predicted sense is not among its definitions: " + it->second);
    }
    const auto idx = static_cast<std::size_t>(match - defs.entries.begin());
    return RankOutcome{rank(rows[idx], gold, inst.id), std::move(defs.entries), ScoringMode::kPipeline, false,
                       defs.kb_senses};
  }

  std::vector<Representation> joints;
  joints.reserve(joint_keys.size());
  for (const auto& k : joint_keys) joints.push_back(text(k));
  Distribution c = c2d(text(inst.context), joints, score_);
  Distribution post = cfg_.scoring == ScoringMode::kPipeline ? pipeline_posterior(c, rows)
                                                             : marginal_posterior(c, rows);
  RankResult result = rank(post, gold, inst.id);
  result.c2d = std::move(c);
  return RankOutcome{std::move(result), std::move(defs.entries), cfg_.scoring, false, defs.kb_senses};
}

std::vector<RankOutcome> Engine::rank_all(const std::vector<VwsdInstance>& instances) const {
  const auto missing = audit(instances);
  if (!missing.empty()) {
    throw Error(ErrorCode::kMissingKey,
                std::to_string(missing.size()) + " key(s) missing from the providers:\n" + describe(missing));
  }
  std::vector<std::optional<RankOutcome>> slots(instances.size());
  parallel_for(instances.size(), cfg_.workers, [&](std::size_t i) { slots[i] = rank_instance(instances[i]); });
  std::vector<RankOutcome> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

EvalReport Engine::evaluate(const std::vector<VwsdInstance>& instances) const {
  if (instances.empty()) throw Error(ErrorCode::kEmptyResults, "dataset has no instances");
  for (const auto& inst : instances) {
    if (!inst.gold) throw Error(ErrorCode::kMissingGold, "instance " + inst.id + " has no gold image");
  }
  const auto outcomes = rank_all(instances);
  EvalReport report;
  report.label = cfg_.effective_label();
  report.definition_mode = std::string(to_string(cfg_.mode));
  report.scoring = std::string(to_string(cfg_.scoring));
  report.c2d_scale = score_.c2d_scale;
  report.d2i_scale = score_.d2i_scale;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    InstanceRecord rec;
    rec.id = instances[i].id;
    rec.target = instances[i].target;
    rec.gold_rank = *o.result.gold_rank;
    rec.correct = rec.gold_rank == 1;
    rec.num_definitions = o.definitions.size();
    rec.kb_senses = o.kb_senses;
    rec.scoring = std::string(to_string(o.applied));
    rec.fallback = o.fallback;
    rec.prediction = o.result.prediction;
    report.instances.push_back(std::move(rec));
  }
  finalize(report);
  return report;
}

}  // namespace glossrank
