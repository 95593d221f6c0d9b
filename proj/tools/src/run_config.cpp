// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "run_config.hpp"

#include <fstream>
#include <set>

#include "zeroswot/error.hpp"

namespace zeroswot::cli {
namespace {

using Json = nlohmann::json;

[[noreturn]] void Invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kConfigInvalid, (path.empty() ? std::string("<root>") : path) + ": " + what);
}

/// Walks one JSON object, consuming keys; Finish() rejects leftovers.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) Invalid(path_, "expected an object");
  }

  /// Returns whether the key was present.
  template <typename T>
  bool Read(const char* key, T& out) {
    const Json* v = Take(key);
    if (!v) return false;
    const std::string p = Child(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v->is_boolean()) Invalid(p, "expected a boolean");
      out = v->get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v->is_number_integer()) Invalid(p, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v->is_number_integer() && !v->is_number_unsigned() && v->get<long long>() < 0) {
          Invalid(p, "expected a non-negative integer");
        }
      }
      out = v->get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v->is_number()) Invalid(p, "expected a number");
      out = v->get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v->is_string()) Invalid(p, "expected a string");
      out = v->get<std::string>();
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      if (!v->is_array()) Invalid(p, "expected an array of strings");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_string()) Invalid(p, "expected an array of strings");
        out.push_back(e.get<std::string>());
      }
    } else if constexpr (std::is_same_v<T, std::vector<int>>) {
      if (!v->is_array()) Invalid(p, "expected an array of integers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number_integer()) Invalid(p, "expected an array of integers");
        out.push_back(e.get<int>());
      }
    } else {
      static_assert(sizeof(T) == 0, "unsupported config field type");
    }
    return true;
  }

  /// Returns a reader for a nested object, or nullopt when absent.
  std::optional<ObjectReader> Object(const char* key) {
    const Json* v = Take(key);
    if (!v) return std::nullopt;
    return ObjectReader(*v, Child(key));
  }

  std::string Child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) Invalid(Child(key.c_str()), "unknown key");
    }
  }

 private:
  const Json* Take(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Enum, typename Parse>
void ReadEnum(ObjectReader& r, const char* key, Enum& out, Parse parse) {
  std::string s;
  if (!r.Read(key, s)) return;
  auto v = parse(s);
  if (!v) Invalid(r.Child(key), "unknown value '" + s + "'");
  out = *v;
}

void ReadGenerator(ObjectReader r, GeneratorSpec& g) {
  r.Read("alphabet", g.alphabet);
  r.Read("punctuation", g.punctuation);
  r.Read("lexicon", g.lexicon);
  r.Read("subwords", g.subwords);
  r.Read("min_words", g.min_words);
  r.Read("max_words", g.max_words);
  r.Read("min_repeat", g.min_repeat);
  r.Read("max_repeat", g.max_repeat);
  r.Read("min_silence", g.min_silence);
  r.Read("max_silence", g.max_silence);
  r.Read("noise_sigma", g.noise_sigma);
  r.Read("punctuation_prob", g.punctuation_prob);
  r.Read("mapping_seed", g.mapping_seed);
  r.Read("feature_dim", g.feature_dim);
  r.Read("downsample", g.downsample);
  r.Finish();
}

void ReadModel(ObjectReader r, ModelConfig& m) {
  r.Read("d", m.d);
  r.Read("heads", m.heads);
  r.Read("ff_dim", m.ff_dim);
  r.Read("acoustic_layers", m.acoustic_layers);
  r.Read("shared_layers", m.shared_layers);
  r.Read("subword_layers", m.subword_layers);
  r.Read("decoder_layers", m.decoder_layers);
  r.Read("taps", m.taps);
  r.Finish();
}

void ReadOt(ObjectReader r, OtConfig& o) {
  r.Read("mu", o.mu);
  r.Read("lambda", o.lambda);
  r.Read("max_iters", o.max_iters);
  r.Read("tol", o.tol);
  r.Read("debiased", o.debiased);
  r.Finish();
}

}  // namespace

RunConfig ParseRunConfig(const nlohmann::json& doc) {
  RunConfig cfg;
  ObjectReader root(doc, "");
  root.Read("seed", cfg.seed);
  if (auto r = root.Object("generator")) ReadGenerator(*r, cfg.generator);
  if (auto r = root.Object("corpus")) {
    r->Read("train", cfg.corpus.train);
    r->Read("valid", cfg.corpus.valid);
    r->Read("test", cfg.corpus.test);
    r->Finish();
  }
  if (auto r = root.Object("model")) ReadModel(*r, cfg.model);
  if (auto r = root.Object("mt")) {
    r->Read("steps", cfg.mt.steps);
    r->Read("batch_size", cfg.mt.batch_size);
    r->Read("base_lr", cfg.mt.base_lr);
    r->Read("warmup", cfg.mt.warmup);
    r->Read("label_smoothing", cfg.mt.label_smoothing);
    r->Finish();
  }
  if (auto r = root.Object("train")) {
    TrainConfig& t = cfg.train;
    r->Read("steps", t.steps);
    r->Read("batch_size", t.batch_size);
    r->Read("base_lr", t.base_lr);
    r->Read("warmup", t.warmup);
    r->Read("valid_every", t.valid_every);
    r->Read("valid_examples", cfg.valid_examples);
    r->Read("patience", t.patience);
    r->Read("avg_best_k", t.avg_best_k);
    r->Read("alpha", t.weights.alpha);
    r->Read("offline_targets", cfg.offline_targets);
    if (auto m = r->Object("mask")) {
      m->Read("p_time", t.mask.p_time);
      m->Read("len_time", t.mask.len_time);
      m->Read("p_chan", t.mask.p_chan);
      m->Read("len_chan", t.mask.len_chan);
      m->Finish();
    }
    r->Finish();
  }
  if (auto r = root.Object("ot")) ReadOt(*r, cfg.train.ot);
  if (auto r = root.Object("ablation")) {
    TrainConfig& t = cfg.train;
    ReadEnum(*r, "adapter_mode", t.adapter, ParseAdapterMode);
    ReadEnum(*r, "label_mode", t.label_mode, ParseLabelMode);
    r->Read("no_speech_embedder", t.no_speech_embedder);
    r->Read("no_aux_wass", t.no_aux_wass);
    r->Read("include_separator", t.include_separator);
    r->Finish();
  }
  if (auto r = root.Object("eval")) {
    r->Read("beam", cfg.eval.beam);
    r->Read("max_len", cfg.eval.max_len);
    r->Finish();
  }
  if (auto r = root.Object("paths")) {
    r->Read("data_dir", cfg.paths.data_dir);
    r->Read("mt_checkpoint", cfg.paths.mt_checkpoint);
    r->Finish();
  }
  root.Finish();
  return cfg;
}

nlohmann::ordered_json ToJson(const RunConfig& c) {
  using OJ = nlohmann::ordered_json;
  const GeneratorSpec& g = c.generator;
  const TrainConfig& t = c.train;
  OJ j;
  j["seed"] = c.seed;
  j["generator"] = OJ{{"alphabet", g.alphabet},
                      {"punctuation", g.punctuation},
                      {"lexicon", g.lexicon},
                      {"subwords", g.subwords},
                      {"min_words", g.min_words},
                      {"max_words", g.max_words},
                      {"min_repeat", g.min_repeat},
                      {"max_repeat", g.max_repeat},
                      {"min_silence", g.min_silence},
                      {"max_silence", g.max_silence},
                      {"noise_sigma", g.noise_sigma},
                      {"punctuation_prob", g.punctuation_prob},
                      {"mapping_seed", g.mapping_seed},
                      {"feature_dim", g.feature_dim},
                      {"downsample", g.downsample}};
  j["corpus"] = OJ{{"train", c.corpus.train}, {"valid", c.corpus.valid}, {"test", c.corpus.test}};
  j["model"] = OJ{{"d", c.model.d},
                  {"heads", c.model.heads},
                  {"ff_dim", c.model.ff_dim},
                  {"acoustic_layers", c.model.acoustic_layers},
                  {"shared_layers", c.model.shared_layers},
                  {"subword_layers", c.model.subword_layers},
                  {"decoder_layers", c.model.decoder_layers},
                  {"taps", c.model.taps}};
  j["mt"] = OJ{{"steps", c.mt.steps},
               {"batch_size", c.mt.batch_size},
               {"base_lr", c.mt.base_lr},
               {"warmup", c.mt.warmup},
               {"label_smoothing", c.mt.label_smoothing}};
  j["train"] = OJ{{"steps", t.steps},
                  {"batch_size", t.batch_size},
                  {"base_lr", t.base_lr},
                  {"warmup", t.warmup},
                  {"valid_every", t.valid_every},
                  {"valid_examples", c.valid_examples},
                  {"patience", t.patience},
                  {"avg_best_k", t.avg_best_k},
                  {"alpha", t.weights.alpha},
                  {"offline_targets", c.offline_targets},
                  {"mask", OJ{{"p_time", t.mask.p_time},
                              {"len_time", t.mask.len_time},
                              {"p_chan", t.mask.p_chan},
                              {"len_chan", t.mask.len_chan}}}};
  j["ot"] = OJ{{"mu", t.ot.mu},
               {"lambda", t.ot.lambda},
               {"max_iters", t.ot.max_iters},
               {"tol", t.ot.tol},
               {"debiased", t.ot.debiased}};
  j["ablation"] = OJ{{"adapter_mode", ToString(t.adapter)},
                     {"label_mode", ToString(t.label_mode)},
                     {"no_speech_embedder", t.no_speech_embedder},
                     {"no_aux_wass", t.no_aux_wass},
                     {"include_separator", t.include_separator}};
  j["eval"] = OJ{{"beam", c.eval.beam}, {"max_len", c.eval.max_len}};
  j["paths"] = OJ{{"data_dir", c.paths.data_dir}, {"mt_checkpoint", c.paths.mt_checkpoint}};
  return j;
}

void ApplyAblation(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    Invalid("--ablation", "expected KEY=VALUE, got '" + std::string(assignment) + "'");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string value(assignment.substr(eq + 1));
  auto flag = [&](bool& out) {
    if (value == "true" || value == "1") {
      out = true;
    } else if (value == "false" || value == "0") {
      out = false;
    } else {
      Invalid("ablation." + key, "expected true or false, got '" + value + "'");
    }
  };
  TrainConfig& t = cfg.train;
  if (key == "adapter_mode") {
    auto m = ParseAdapterMode(value);
    if (!m) Invalid("ablation.adapter_mode", "unknown value '" + value + "'");
    t.adapter = *m;
  } else if (key == "label_mode") {
    auto m = ParseLabelMode(value);
    if (!m) Invalid("ablation.label_mode", "unknown value '" + value + "'");
    t.label_mode = *m;
  } else if (key == "no_speech_embedder") {
    flag(t.no_speech_embedder);
  } else if (key == "no_aux_wass") {
    flag(t.no_aux_wass);
  } else if (key == "include_separator") {
    flag(t.include_separator);
  } else if (key == "debiased") {
    flag(t.ot.debiased);
  } else {
    Invalid("ablation." + key, "unknown ablation key");
  }
}

void FinalizeConfig(RunConfig& cfg, int letter_vocab, int subword_vocab) {
  ValidateGeneratorSpec(cfg.generator);
  cfg.model.feature_dim = cfg.generator.feature_dim;
  cfg.model.downsample = cfg.generator.downsample;
  cfg.model.letter_vocab = letter_vocab;
  cfg.model.subword_vocab = subword_vocab;
  ValidateModelConfig(cfg.model);
  cfg.train.weights.taps = cfg.model.taps;
  cfg.train.seed = cfg.seed;
  cfg.mt.seed = cfg.seed;
  ValidateOtConfig(cfg.train.ot);
  EffectiveWeights(cfg.train, cfg.model.shared_layers);
  if (cfg.corpus.train == 0 || cfg.corpus.valid == 0 || cfg.corpus.test == 0) {
    Invalid("corpus", "every split needs at least one example");
  }
  if (cfg.mt.steps < 0 || cfg.train.steps < 0) Invalid("train.steps", "must be >= 0");
  if (cfg.mt.batch_size < 1) Invalid("mt.batch_size", "must be >= 1");
  if (cfg.train.batch_size < 1) Invalid("train.batch_size", "must be >= 1");
  if (cfg.train.valid_every < 1) Invalid("train.valid_every", "must be >= 1");
  if (cfg.train.patience < 1) Invalid("train.patience", "must be >= 1");
  if (cfg.train.avg_best_k < 1) Invalid("train.avg_best_k", "must be >= 1");
  if (cfg.valid_examples < 1) Invalid("train.valid_examples", "must be >= 1");
  if (cfg.eval.beam < 1) Invalid("eval.beam", "must be >= 1");
  if (cfg.eval.max_len < 1) Invalid("eval.max_len", "must be >= 1");
  if (cfg.mt.label_smoothing < 0.0 || cfg.mt.label_smoothing >= 1.0) {
    Invalid("mt.label_smoothing", "must lie in [0, 1)");
  }
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfigInvalid, path.string() + ": " + e.what());
  }
  return ParseRunConfig(doc);
}

}  // namespace zeroswot::cli
