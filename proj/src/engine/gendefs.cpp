#include "glossrank/engine.hpp"
#include "glossrank/error.hpp"

namespace glossrank {

GendefsResult run_gendefs(const std::vector<VwsdInstance>& instances, const SenseInventory* inventory,
                          GenerationClient* client, const GenCache* cache, const GendefsOptions& opts) {
  if (opts.oov_only && !inventory) {
    throw Error(ErrorCode::kInvalidConfig, "the OOV-only filter needs an inventory");
  }
  GendefsResult out;
  const GenerateOptions gen_opts{opts.max_retries};
  for (const auto& inst : instances) {
    if (opts.oov_only && inventory->count(inst.target) > 0) {
      ++out.skipped;
      continue;
    }
    ++out.processed;
    const PartOfSpeech pos = inst.pos.value_or(PartOfSpeech::kNoun);
    try {
      std::vector<GeneratedDefinitions::Row> rows;
      for (PromptKind kind : opts.kinds) {
        GenRequest req;
        req.prompt = kind == PromptKind::kDg ? build_dg_prompt(inst.target, pos)
                                             : build_cadg_prompt(inst.target, pos, inst.context);
        req.n_samples = opts.n_samples;
        req.temperature = opts.temperature;
        req.target = inst.target;
        req.context = inst.context;
        req.pos = pos;
        for (const auto& sample : generate(client, req, cache, gen_opts)) {
          rows.push_back({inst.id, kind, inst.target, sample});
        }
      }
      for (auto& r : rows) out.definitions.add(std::move(r));
    } catch (const Error& e) {
      out.failures.push_back({inst.id, e.what()});
    }
  }
  return out;
}

}  // namespace glossrank
