// bipro: constrained poem generation, verification, scoring and review
// evaluation from the command line.
//
// Commands:
//   generate  make a poem for a title under the Pingshui rules
//   verify    check a poem JSON file against the rules
//   score     block-scoring of one poem sentence (or the title)
//   cost      token-cost estimate of the generation pipeline
//   eval      aggregate a human-review CSV into per-system statistics
//
// Exit codes: 0 success, 1 config/IO error, 2 beam exhaustion,
// 3 verification failure.

#include <atomic>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bipro/beam_engine.h"
#include "bipro/bipro_generate.h"
#include "bipro/errors.h"
#include "bipro/hashing.h"
#include "bipro/mock_backend.h"
#include "bipro/model_server.h"
#include "bipro/poem.h"
#include "bipro/prompt_templates.h"
#include "bipro/remote_backend.h"
#include "bipro/review_stats.h"
#include "bipro/scorer.h"
#include "bipro/utf8.h"
#include "bipro/verifier.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitExhaustion = 2;
constexpr int kExitVerification = 3;

struct SharedArgs {
  std::optional<std::string> config_path;
  std::optional<std::string> dict_path;
  std::optional<std::string> templates_path;
  std::optional<std::string> model;
  std::optional<std::string> model_url;
  std::optional<std::uint64_t> seed;
  std::optional<int> beam_size;
  std::optional<int> max_rewrites;
  std::optional<double> alpha_title;
  bool lenient = false;
};

struct Settings {
  std::string dict_path;
  std::string templates_path;
  std::string model = "mock";
  std::string model_url;
  std::uint64_t seed = 0;
  int beam_size = 6;
  int max_rewrites = 20;
  double alpha_title = 0.5;
  bool lenient = false;
};

void add_shared_options(CLI::App* cmd, SharedArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--dict", args.dict_path, "rhyme dictionary (TSV)");
  cmd->add_option("--templates", args.templates_path, "prompt templates file");
  cmd->add_option("--model", args.model, "model backend: mock or remote")
      ->check(CLI::IsMember({"mock", "remote"}));
  cmd->add_option("--model-url", args.model_url,
                  "remote model URL (or env BIPRO_MODEL_URL)");
  cmd->add_option("--seed", args.seed, "64-bit seed");
  cmd->add_flag("--lenient", args.lenient,
                "per-rule pronunciation choice instead of one consistent assignment");
}

// CLI flags override the config file, which overrides built-in defaults
// (beam 6, rewrites 20, alpha 0.5).
Settings resolve(const SharedArgs& args) {
  Settings s;
  if (args.config_path) {
    std::ifstream in(*args.config_path);
    if (!in) throw bipro::ConfigError("cannot open config file: " + *args.config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw bipro::ConfigError("invalid config JSON: " + std::string(e.what()));
    }
    s.dict_path = j.value("dictionary_path", s.dict_path);
    s.templates_path = j.value("templates_path", s.templates_path);
    s.model = j.value("model", s.model);
    s.model_url = j.value("model_url", s.model_url);
    s.beam_size = j.value("beam_size", s.beam_size);
    s.max_rewrites = j.value("max_rewrites", s.max_rewrites);
    s.seed = j.value("seed", s.seed);
    s.alpha_title = j.value("alpha_title", s.alpha_title);
    s.lenient = j.value("lenient_pronunciation", s.lenient);
  }
  if (args.dict_path) s.dict_path = *args.dict_path;
  if (args.templates_path) s.templates_path = *args.templates_path;
  if (args.model) s.model = *args.model;
  if (args.model_url) s.model_url = *args.model_url;
  if (args.seed) s.seed = *args.seed;
  if (args.beam_size) s.beam_size = *args.beam_size;
  if (args.max_rewrites) s.max_rewrites = *args.max_rewrites;
  if (args.alpha_title) s.alpha_title = *args.alpha_title;
  if (args.lenient) s.lenient = true;
  if (s.beam_size < 1) throw bipro::ConfigError("beam size must be >= 1");
  return s;
}

bipro::RhymeDictionary load_dictionary(const Settings& s) {
  if (s.dict_path.empty()) {
    throw bipro::ConfigError("a rhyme dictionary is required (--dict PATH)");
  }
  return bipro::RhymeDictionary::load_file(s.dict_path);
}

bipro::PromptTemplates load_templates(const Settings& s) {
  if (s.templates_path.empty()) {
    bipro::PromptTemplates t;
    t.validate();
    return t;
  }
  return bipro::PromptTemplates::load_file(s.templates_path);
}

// The mock model needs a vocabulary covering everything a prompt can
// mention: the dictionary, the template boilerplate and any free text
// (title, existing poem sentences).
std::string vocab_text(const bipro::RhymeDictionary& dict,
                       const bipro::PromptTemplates& templates, const std::string& extra) {
  std::string text;
  for (const auto& ch : dict.characters()) text += ch;
  for (std::string tmpl : {templates.generation, templates.title_score,
                           templates.sentence_score}) {
    for (const char* placeholder : {"{title}", "{sentences}", "{mask}"}) {
      for (std::size_t pos; (pos = tmpl.find(placeholder)) != std::string::npos;) {
        tmpl.erase(pos, std::string(placeholder).size());
      }
    }
    text += tmpl;
  }
  text += templates.separator;
  text += extra;
  return text;
}

std::unique_ptr<bipro::ModelBackend> make_backend(const Settings& s,
                                                  const bipro::RhymeDictionary& dict,
                                                  const bipro::PromptTemplates& templates,
                                                  const std::string& extra_text) {
  bipro::Vocabulary vocab =
      bipro::Vocabulary::from_text(vocab_text(dict, templates, extra_text));
  if (s.model == "remote") {
    bipro::RemoteConfig config;
    config.base_url = s.model_url;
    return std::make_unique<bipro::RemoteBackend>(std::move(vocab), config);
  }
  return std::make_unique<bipro::MockBackend>(
      bipro::MockBackend::bigram(std::move(vocab), s.seed));
}

nlohmann::ordered_json error_json(const std::string& kind, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = message;
  j["kind"] = kind;
  return j;
}

bipro::Phase phase_from_name(const std::string& name) {
  if (name == "generation") return bipro::Phase::kGeneration;
  if (name == "revise") return bipro::Phase::kRevise;
  if (name == "rewrite") return bipro::Phase::kRewrite;
  throw bipro::ConfigError("unknown phase: " + name);
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateArgs {
  SharedArgs shared;
  std::string title;
  std::string titles_file;
  std::string format = "5-jueju";
  std::string trace_out;
  std::optional<std::int64_t> max_replacements;
  bool direct = false;
  int jobs = 1;
};

bipro::GenerationConfig build_generation_config(const Settings& s, const GenerateArgs& args,
                                                const bipro::PromptTemplates& templates) {
  bipro::GenerationConfig config;
  config.format = bipro::PoemFormat::parse(args.format);
  config.max_rewrite_rounds = s.max_rewrites;
  config.beam.beam_size = s.beam_size;
  if (args.max_replacements) config.beam.max_replacements_per_step = *args.max_replacements;
  config.weights.alpha_title = s.alpha_title;
  config.templates = templates;
  config.seed = s.seed;
  config.direct = args.direct;
  config.validate();
  return config;
}

int run_generate(const GenerateArgs& args) {
  Settings s = resolve(args.shared);
  bipro::RhymeDictionary dict = load_dictionary(s);
  bipro::PromptTemplates templates = load_templates(s);
  bipro::PingshuiVerifier verifier(dict, bipro::VerifyOptions{s.lenient, true});

  if (!args.titles_file.empty()) {
    if (!args.trace_out.empty()) {
      throw bipro::ConfigError("--trace-out is not supported with --titles-file");
    }
    std::ifstream in(args.titles_file);
    if (!in) throw bipro::ConfigError("cannot open titles file: " + args.titles_file);
    std::vector<std::string> titles;
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) titles.push_back(line);
    }
    std::vector<std::string> outputs(titles.size());
    std::vector<std::string> failures(titles.size());
    std::atomic<std::size_t> next{0};
    int jobs = std::max(1, args.jobs);
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < titles.size();) {
        Settings per = s;
        per.seed = bipro::hashing::splitmix64(
            bipro::hashing::fnv1a_u64(i, bipro::hashing::fnv1a_u64(s.seed)));
        try {
          auto backend = make_backend(per, dict, templates, titles[i]);
          GenerateArgs one = args;
          bipro::GenerationConfig config = build_generation_config(per, one, templates);
          bipro::GenerationResult result =
              bipro::generate_poem(*backend, titles[i], verifier, config);
          outputs[i] = result.poem.to_json().dump();
        } catch (const std::exception& e) {
          failures[i] = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    bool any_failed = false;
    for (std::size_t i = 0; i < titles.size(); ++i) {
      if (!failures[i].empty()) {
        any_failed = true;
        std::cerr << error_json("generation", "title \"" + titles[i] + "\": " + failures[i]).dump()
                  << '\n';
      } else {
        std::cout << outputs[i] << '\n';
      }
    }
    return any_failed ? kExitExhaustion : kExitOk;
  }

  if (args.title.empty()) throw bipro::ConfigError("--title is required");
  auto backend = make_backend(s, dict, templates, args.title);
  bipro::GenerationConfig config = build_generation_config(s, args, templates);
  bipro::GenerationResult result;
  try {
    result = bipro::generate_poem(*backend, args.title, verifier, config);
  } catch (const bipro::GenerationError& e) {
    if (!args.trace_out.empty()) {
      std::ofstream trace(args.trace_out);
      e.partial_trace().write_jsonl(trace);
    }
    nlohmann::ordered_json j = error_json("exhaustion", e.what());
    j["violations"] = nlohmann::ordered_json::array();
    for (const auto& v : e.violations()) j["violations"].push_back(v.to_json());
    std::cerr << j.dump() << '\n';
    return kExitExhaustion;
  }
  if (!args.trace_out.empty()) {
    std::ofstream trace(args.trace_out);
    if (!trace) throw bipro::ConfigError("cannot write trace file: " + args.trace_out);
    result.trace.write_jsonl(trace);
  }
  std::cout << result.poem.to_json().dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int run_verify(const SharedArgs& shared, const std::string& poem_path) {
  Settings s = resolve(shared);
  bipro::RhymeDictionary dict = load_dictionary(s);
  std::ifstream in(poem_path);
  if (!in) throw bipro::ConfigError("cannot open poem file: " + poem_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw bipro::ParseError("invalid poem JSON: " + std::string(e.what()));
  }
  bipro::Poem poem = bipro::Poem::from_json(j);
  bipro::PingshuiVerifier verifier(std::move(dict), bipro::VerifyOptions{s.lenient, true});
  std::vector<bipro::Violation> violations = verifier.verify(poem);
  nlohmann::ordered_json out;
  out["ok"] = violations.empty();
  out["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : violations) out["violations"].push_back(v.to_json());
  std::cout << out.dump(2) << '\n';
  return violations.empty() ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

struct ScoreArgs {
  SharedArgs shared;
  std::string poem_path;
  std::optional<int> sentence;  // 1-based
  bool title_only = false;
  std::string phase = "rewrite";
};

int run_score(const ScoreArgs& args) {
  Settings s = resolve(args.shared);
  bipro::RhymeDictionary dict = load_dictionary(s);
  bipro::PromptTemplates templates = load_templates(s);
  std::ifstream in(args.poem_path);
  if (!in) throw bipro::ConfigError("cannot open poem file: " + args.poem_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw bipro::ParseError("invalid poem JSON: " + std::string(e.what()));
  }
  bipro::Poem poem = bipro::Poem::from_json(j);
  std::string all_text = poem.title;
  for (const auto& sentence : poem.sentences) all_text += sentence;
  auto backend = make_backend(s, dict, templates, all_text);

  nlohmann::ordered_json out;
  if (args.title_only) {
    bipro::RenderedPrompt prompt =
        bipro::make_bipro_prompt(poem.title, poem, bipro::MaskTarget::title(), templates);
    bipro::LogProbSeries series = backend->score_target(prompt.context, prompt.target);
    out["target"] = "title";
    out["mean_logprob"] = bipro::mean_logprob(series);
    out["perplexity"] = bipro::perplexity(series);
  } else {
    if (!args.sentence) throw bipro::ConfigError("--sentence K or --title is required");
    int index = *args.sentence - 1;
    bipro::Phase phase = phase_from_name(args.phase);
    bipro::ScoreWeights weights{s.alpha_title};
    double value =
        bipro::bipro_score(*backend, poem.title, poem, index, phase, weights, templates);
    out["target"] = "sentence " + std::to_string(*args.sentence);
    out["phase"] = args.phase;
    out["alpha_title"] = s.alpha_title;
    out["bipro_score"] = value;
    std::optional<int> match = bipro::match_sentence(
        index, phase, static_cast<int>(poem.sentences.size()));
    out["match_sentence"] =
        match ? nlohmann::ordered_json(*match + 1) : nlohmann::ordered_json(nullptr);
  }
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// cost
// ---------------------------------------------------------------------------

struct CostArgs {
  bipro::CostParams params;
  std::string mode = "full";
};

int run_cost(const CostArgs& args) {
  std::cout << bipro::estimate_token_cost(args.params, bipro::cost_mode_from_name(args.mode))
            << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string reviews_path;
  std::string manifest_path;
  std::string stats_out;
  std::string ar_out;
};

int run_eval(const EvalArgs& args) {
  std::vector<bipro::ReviewRecord> records = bipro::read_reviews_file(args.reviews_path);
  bipro::PoemManifest manifest = bipro::read_manifest_file(args.manifest_path);
  std::vector<bipro::SystemStats> stats = bipro::aggregate_stats(records, manifest);

  if (args.stats_out.empty()) {
    bipro::write_stats_csv(std::cout, stats);
  } else {
    std::ofstream out(args.stats_out);
    if (!out) throw bipro::ConfigError("cannot write stats file: " + args.stats_out);
    bipro::write_stats_csv(out, stats);
  }

  if (!args.ar_out.empty()) {
    nlohmann::ordered_json j;
    for (const auto& [poem_id, ar] : bipro::per_poem_ar(records)) j[poem_id] = ar;
    std::ofstream out(args.ar_out);
    if (!out) throw bipro::ConfigError("cannot write AR file: " + args.ar_out);
    out << j.dump(2) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BIPro constrained poem generation framework"};
  app.require_subcommand(1);

  GenerateArgs generate_args;
  CLI::App* generate = app.add_subcommand("generate", "generate a poem for a title");
  add_shared_options(generate, generate_args.shared);
  generate->add_option("--title", generate_args.title, "poem title");
  generate->add_option("--titles-file", generate_args.titles_file,
                       "batch mode: one title per line, JSONL output");
  generate->add_option("--jobs", generate_args.jobs, "parallel workers in batch mode")
      ->check(CLI::PositiveNumber);
  generate
      ->add_option("--format", generate_args.format,
                   "poem format: 5-jueju, 7-jueju, 5-lvshi, 7-lvshi")
      ->check(CLI::IsMember({"5-jueju", "7-jueju", "5-lvshi", "7-lvshi"}));
  generate->add_option("--beam-size", generate_args.shared.beam_size, "beam size (default 6)");
  generate->add_option("--max-rewrites", generate_args.shared.max_rewrites,
                       "rewrite round limit (default 20)");
  generate->add_option("--alpha-title", generate_args.shared.alpha_title,
                       "weight of the title score component (default 0.5)");
  generate->add_option("--max-replacements", generate_args.max_replacements,
                       "per-step beam replacement budget (default 4*beam)");
  generate->add_flag("--direct", generate_args.direct,
                     "direct baseline: first completed beam, no revise/rewrite");
  generate->add_option("--trace-out", generate_args.trace_out, "write a JSONL event trace");

  SharedArgs verify_shared;
  std::string verify_poem_path;
  CLI::App* verify = app.add_subcommand("verify", "verify a poem JSON file");
  add_shared_options(verify, verify_shared);
  verify->add_option("poem", verify_poem_path, "poem JSON file")->required();

  ScoreArgs score_args;
  CLI::App* score = app.add_subcommand("score", "score a poem sentence or title");
  add_shared_options(score, score_args.shared);
  score->add_option("--poem", score_args.poem_path, "poem JSON file")->required();
  score->add_option("--sentence", score_args.sentence, "1-based sentence to score");
  score->add_flag("--title", score_args.title_only, "score the masked title instead");
  score->add_option("--phase", score_args.phase, "generation, revise or rewrite")
      ->check(CLI::IsMember({"generation", "revise", "rewrite"}));
  score->add_option("--alpha-title", score_args.shared.alpha_title,
                    "weight of the title score component");

  CostArgs cost_args;
  CLI::App* cost = app.add_subcommand("cost", "token-cost estimate");
  cost->add_option("--n", cost_args.params.n, "sentences per poem (default 8)");
  cost->add_option("--s", cost_args.params.s, "tokens per sentence generation (default 7)");
  cost->add_option("--m", cost_args.params.m, "rewrite rounds (default 10)");
  cost->add_option("--t", cost_args.params.t, "target/title length (default 5)");
  cost->add_option("--k", cost_args.params.k, "beam size (default 6)");
  cost->add_option("--mode", cost_args.mode, "single, with-revise or full")
      ->check(CLI::IsMember({"single", "with-revise", "full"}));

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "aggregate review data");
  eval->add_option("--reviews", eval_args.reviews_path, "reviews CSV")->required();
  eval->add_option("--manifest", eval_args.manifest_path, "poems manifest CSV")->required();
  eval->add_option("--stats-out", eval_args.stats_out, "stats CSV path (default stdout)");
  eval->add_option("--ar-out", eval_args.ar_out, "per-poem AR JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (generate->parsed()) return run_generate(generate_args);
    if (verify->parsed()) return run_verify(verify_shared, verify_poem_path);
    if (score->parsed()) return run_score(score_args);
    if (cost->parsed()) return run_cost(cost_args);
    if (eval->parsed()) return run_eval(eval_args);
  } catch (const bipro::GenerationError& e) {
    std::cerr << error_json("exhaustion", e.what()).dump() << '\n';
    return kExitExhaustion;
  } catch (const bipro::ExhaustionError& e) {
    std::cerr << error_json("exhaustion", e.what()).dump() << '\n';
    return kExitExhaustion;
  } catch (const bipro::Error& e) {
    std::cerr << error_json("error", e.what()).dump() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << error_json("error", e.what()).dump() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
