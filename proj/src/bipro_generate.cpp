#include "bipro/bipro_generate.h"

#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "bipro/hashing.h"
#include "bipro/utf8.h"

namespace bipro {
namespace {

std::uint64_t derive_seed(std::uint64_t base, const char* stage, int round, int sentence) {
  std::uint64_t h = hashing::fnv1a_u64(base);
  h = hashing::fnv1a(stage, h);
  h = hashing::fnv1a_u64(static_cast<std::uint64_t>(round), h);
  h = hashing::fnv1a_u64(static_cast<std::uint64_t>(sentence), h);
  return hashing::splitmix64(h);
}

}  // namespace

void GenerationConfig::validate() const {
  if (max_rewrite_rounds < 0) throw ConfigError("max_rewrite_rounds must be >= 0");
  if (beam.beam_size < 1) throw ConfigError("beam_size must be >= 1");
  weights.validate();
  templates.validate();
}

const char* trace_kind_name(TraceEvent::Kind kind) {
  switch (kind) {
    case TraceEvent::Kind::kGenerated:
      return "generated";
    case TraceEvent::Kind::kRevised:
      return "revised";
    case TraceEvent::Kind::kRewritten:
      return "rewritten";
    case TraceEvent::Kind::kRejected:
      return "rejected";
  }
  return "?";
}

nlohmann::ordered_json TraceEvent::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = trace_kind_name(kind);
  j["sentence_index"] = sentence_index + 1;
  j["old_text"] = old_text;
  j["new_text"] = new_text;
  j["old_score"] = old_score ? nlohmann::ordered_json(*old_score) : nlohmann::ordered_json(nullptr);
  j["new_score"] = new_score;
  j["round"] = round;
  return j;
}

TraceEvent TraceEvent::from_json(const nlohmann::json& j) {
  TraceEvent e;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "generated") {
    e.kind = Kind::kGenerated;
  } else if (kind == "revised") {
    e.kind = Kind::kRevised;
  } else if (kind == "rewritten") {
    e.kind = Kind::kRewritten;
  } else if (kind == "rejected") {
    e.kind = Kind::kRejected;
  } else {
    throw ParseError("unknown trace event kind: " + kind);
  }
  e.sentence_index = j.at("sentence_index").get<int>() - 1;
  e.old_text = j.at("old_text").get<std::string>();
  e.new_text = j.at("new_text").get<std::string>();
  if (!j.at("old_score").is_null()) e.old_score = j["old_score"].get<double>();
  e.new_score = j.at("new_score").get<double>();
  e.round = j.at("round").get<int>();
  return e;
}

void GenerationTrace::write_jsonl(std::ostream& out) const {
  for (const TraceEvent& e : events) out << e.to_json().dump() << '\n';
}

GenerationTrace GenerationTrace::read_jsonl(std::istream& in) {
  GenerationTrace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      trace.events.push_back(TraceEvent::from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("invalid trace line: ") + e.what(), line_no);
    }
  }
  return trace;
}

Poem GenerationTrace::replay(const std::string& title, PoemFormat format) const {
  Poem poem;
  poem.title = title;
  poem.format = format;
  for (const TraceEvent& e : events) {
    switch (e.kind) {
      case TraceEvent::Kind::kGenerated:
        poem.sentences.resize(
            std::max(poem.sentences.size(), static_cast<std::size_t>(e.sentence_index) + 1));
        poem.sentences[static_cast<std::size_t>(e.sentence_index)] = e.new_text;
        break;
      case TraceEvent::Kind::kRevised:
      case TraceEvent::Kind::kRewritten:
        poem.sentences.at(static_cast<std::size_t>(e.sentence_index)) = e.new_text;
        break;
      case TraceEvent::Kind::kRejected:
        break;
    }
  }
  return poem;
}

GenerationResult generate_poem(const ModelBackend& model, const std::string& title,
                               const PingshuiVerifier& verifier,
                               const GenerationConfig& config) {
  if (title.empty()) throw InputError("title must be non-empty");
  config.validate();

  const int n = config.format.sentence_count;
  Poem poem;
  poem.title = title;
  poem.format = config.format;
  GenerationTrace trace;

  auto scorer_for = [&](int index, Phase phase) -> SentenceScorer {
    if (config.direct) return {};
    return [&model, &title, &poem, &config, index, phase](std::span<const std::string> tokens) {
      Poem candidate = poem;
      if (static_cast<int>(candidate.sentences.size()) <= index) {
        candidate.sentences.resize(static_cast<std::size_t>(index) + 1);
      }
      candidate.sentences[static_cast<std::size_t>(index)] = utf8::join(tokens);
      return bipro_score(model, title, candidate, index, phase, config.weights,
                         config.templates);
    };
  };

  auto run_beam = [&](int index, Phase phase, std::uint64_t seed) {
    BlockContext ctx = make_generation_context(title, poem, index, config.templates);
    BeamConfig beam = config.beam;
    beam.seed = seed;
    return generate_constrained_sentence(model, ctx, index, poem, verifier,
                                         scorer_for(index, phase), beam);
  };

  // Replaces sentence `index` if a regenerated candidate scores strictly
  // higher under the phase's match sentence; returns whether it did.
  auto attempt_replace = [&](int index, Phase phase, int round, std::uint64_t seed) {
    double old_score =
        bipro_score(model, title, poem, index, phase, config.weights, config.templates);
    SentenceResult res;
    try {
      res = run_beam(index, phase, seed);
    } catch (const ExhaustionError&) {
      // The incumbent stays; a failed regeneration is just a non-improvement.
      TraceEvent e;
      e.kind = TraceEvent::Kind::kRejected;
      e.sentence_index = index;
      e.old_text = poem.sentences[static_cast<std::size_t>(index)];
      e.new_text.clear();
      e.old_score = old_score;
      e.new_score = old_score;
      e.round = round;
      trace.events.push_back(std::move(e));
      return false;
    }
    TraceEvent e;
    e.sentence_index = index;
    e.old_text = poem.sentences[static_cast<std::size_t>(index)];
    e.new_text = res.sentence;
    e.old_score = old_score;
    e.new_score = res.score;
    e.round = round;
    if (res.score > old_score) {
      e.kind = phase == Phase::kRevise ? TraceEvent::Kind::kRevised : TraceEvent::Kind::kRewritten;
      poem.sentences[static_cast<std::size_t>(index)] = res.sentence;
      trace.events.push_back(std::move(e));
      return true;
    }
    e.kind = TraceEvent::Kind::kRejected;
    trace.events.push_back(std::move(e));
    return false;
  };

  // Initial pass: generate sentence k, then revise sentence k-1.
  for (int k = 0; k < n; ++k) {
    SentenceResult res;
    try {
      res = run_beam(k, Phase::kGeneration, derive_seed(config.seed, "generate", 0, k));
    } catch (const ExhaustionError& e) {
      throw GenerationError(std::string("beam exhaustion while generating sentence ") +
                                std::to_string(k + 1) + ": " + e.what(),
                            trace, e.violations());
    }
    poem.sentences.push_back(res.sentence);
    TraceEvent event;
    event.kind = TraceEvent::Kind::kGenerated;
    event.sentence_index = k;
    event.new_text = res.sentence;
    event.new_score = res.score;
    event.round = 0;
    trace.events.push_back(std::move(event));

    if (k > 0 && !config.direct) {
      attempt_replace(k - 1, Phase::kRevise, 0, derive_seed(config.seed, "revise", 0, k - 1));
    }
  }

  // Rewrite rounds, until a full round changes nothing or the limit hits.
  if (!config.direct) {
    int round = 0;
    bool changed = true;
    while (round < config.max_rewrite_rounds && changed) {
      ++round;
      changed = false;
      for (int k = 0; k < n; ++k) {
        changed |= attempt_replace(k, Phase::kRewrite, round,
                                   derive_seed(config.seed, "rewrite", round, k));
      }
    }
  }

  return GenerationResult{std::move(poem), std::move(trace)};
}

CostMode cost_mode_from_name(const std::string& name) {
  if (name == "single" || name == "single_sentence" || name == "single-sentence") {
    return CostMode::kSingleSentence;
  }
  if (name == "with-revise" || name == "with_revise") return CostMode::kWithRevise;
  if (name == "full") return CostMode::kFull;
  throw ConfigError("unknown cost mode: \"" + name + "\" (single, with-revise, full)");
}

void CostParams::validate() const {
  if (n < 1 || s < 1 || m < 1 || t < 1 || k < 1) {
    throw ConfigError("cost parameters must all be >= 1");
  }
}

std::int64_t estimate_token_cost(const CostParams& params, CostMode mode) {
  params.validate();
  switch (mode) {
    case CostMode::kSingleSentence:
      return params.k * (params.t + params.s);
    case CostMode::kWithRevise:
      return 2 * params.n * params.k * (params.t + params.s);
    case CostMode::kFull:
      return params.n * params.k * (params.m + 2) * (params.t + params.s);
  }
  throw ConfigError("invalid cost mode");
}

}  // namespace bipro
