// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "zeroswot/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "zeroswot/checkpoint.hpp"
#include "zeroswot/ctc.hpp"
#include "zeroswot/error.hpp"
#include "zeroswot/ops.hpp"
#include "zeroswot/optim.hpp"

namespace zeroswot {
namespace {

template <typename F>
void ParallelFor(std::size_t n, int threads, F&& f) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<Parameter*> Trainable(std::vector<Parameter*> params) {
  std::erase_if(params, [](const Parameter* p) { return p->frozen; });
  return params;
}

std::vector<Parameter> Snapshot(std::span<Parameter* const> params) {
  std::vector<Parameter> out;
  out.reserve(params.size());
  for (const Parameter* p : params) out.push_back(*p);
  return out;
}

std::vector<int> AllLayers(int num_layers) {
  std::vector<int> v(static_cast<std::size_t>(num_layers));
  std::iota(v.begin(), v.end(), 1);
  return v;
}

/// Cycles through a seeded permutation of [0, n), reshuffling each epoch.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, std::uint64_t seed) : rng_(seed), order_(n) {
    std::iota(order_.begin(), order_.end(), 0);
    std::shuffle(order_.begin(), order_.end(), rng_);
  }

  std::vector<std::size_t> Next(std::size_t batch) {
    std::vector<std::size_t> out;
    out.reserve(batch);
    while (out.size() < batch) {
      if (pos_ == order_.size()) {
        std::shuffle(order_.begin(), order_.end(), rng_);
        pos_ = 0;
      }
      out.push_back(order_[pos_++]);
    }
    return out;
  }

 private:
  std::mt19937_64 rng_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

struct SpeechPath {
  Var acoustic;
  Var log_probs;
  std::optional<Var> embedded;  // unset when the adapter produced nothing
};

SpeechPath RunSpeechPath(Graph& g, const SpeechEncoder& enc, const SpeechContext& ctx,
                         const Tensor& frames, bool allow_fallback, bool* used_fallback) {
  const ModelConfig& mcfg = ctx.model_cfg;
  const TrainConfig& tcfg = ctx.train_cfg;
  SpeechPath path;
  path.acoustic = AcousticEncode(g, enc.acoustic, frames, mcfg);
  path.log_probs = CtcHead(path.acoustic, g.Param(enc.ctc.weight), g.Param(enc.ctc.bias));
  AdapterOptions options;
  options.blank_id = ctx.letters.blank_id();
  options.sep_id = ctx.letters.sep_id();
  options.include_separator = tcfg.include_separator;
  options.heads = mcfg.heads;
  Var compressed;
  try {
    compressed = Adapt(g, path.acoustic, path.log_probs.value(), tcfg.adapter, enc.subword,
                       options)
                     .output;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoChunks && e.code() != ErrorCode::kNoCharacters) throw;
    if (!allow_fallback) return path;
    if (used_fallback) *used_fallback = true;
    compressed = path.acoustic;
  }
  path.embedded = SpeechEmbed(g, enc.embedder, compressed, !tcfg.no_speech_embedder);
  return path;
}

}  // namespace

void ValidateLossWeights(const LossWeights& w, int num_layers) {
  if (!(w.alpha >= 0.0 && w.alpha <= 1.0)) {
    throw Error(ErrorCode::kConfigInvalid, "alpha must lie in [0, 1]");
  }
  if (w.taps.empty()) throw Error(ErrorCode::kConfigInvalid, "tap set must not be empty");
  for (int l : w.taps) {
    if (l < 1 || l > num_layers) {
      throw Error(ErrorCode::kConfigInvalid, "tap " + std::to_string(l) + " outside 1.." +
                                                 std::to_string(num_layers));
    }
  }
  if (std::find(w.taps.begin(), w.taps.end(), num_layers) == w.taps.end()) {
    throw Error(ErrorCode::kConfigInvalid, "tap set must include the final layer");
  }
}

LossBreakdown TotalLoss(const std::map<int, Var>& speech_taps,
                        const std::map<int, Var>& text_taps, Var ctc, const LossWeights& w,
                        const OtConfig& ot) {
  const std::set<int> wanted(w.taps.begin(), w.taps.end());
  auto keys = [](const std::map<int, Var>& m) {
    std::set<int> k;
    for (const auto& [l, v] : m) k.insert(l);
    return k;
  };
  if (wanted.empty() || keys(speech_taps) != wanted || keys(text_taps) != wanted) {
    throw Error(ErrorCode::kTapMismatch, "speech and text taps must both cover the tap set");
  }
  LossBreakdown out;
  out.ctc = ctc.value().item();
  const double per_tap = w.alpha / static_cast<double>(wanted.size());
  Var total = ops::Scale(ctc, 1.0 - w.alpha);
  for (int l : wanted) {
    Var wl = WassersteinLoss(speech_taps.at(l), text_taps.at(l), ot).loss;
    out.wass[l] = wl.value().item();
    total = ops::Add(total, ops::Scale(wl, per_tap));
  }
  out.total = total;
  return out;
}

Tensor MaskSpeech(const Tensor& frames, const MaskConfig& cfg, std::uint64_t seed) {
  Tensor out = frames;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution time(std::clamp(cfg.p_time, 0.0, 1.0));
  std::bernoulli_distribution chan(std::clamp(cfg.p_chan, 0.0, 1.0));
  const std::size_t rows = out.rows();
  const std::size_t cols = out.cols();
  for (std::size_t t = 0; t < rows; ++t) {
    if (!time(rng)) continue;
    const std::size_t end = std::min(rows, t + static_cast<std::size_t>(std::max(0, cfg.len_time)));
    for (std::size_t k = t; k < end; ++k) {
      for (std::size_t c = 0; c < cols; ++c) out(k, c) = 0.0;
    }
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (!chan(rng)) continue;
    const std::size_t end = std::min(cols, c + static_cast<std::size_t>(std::max(0, cfg.len_chan)));
    for (std::size_t t = 0; t < rows; ++t) {
      for (std::size_t k = c; k < end; ++k) out(t, k) = 0.0;
    }
  }
  return out;
}

TapSet ComputeTextTaps(const TextBranch& text, const SubwordVocab& vocab, std::string_view x,
                       const ModelConfig& cfg) {
  Graph g(false);
  const std::vector<int> ids = EncodeSource(x, vocab);
  const std::vector<int> layers = AllLayers(cfg.shared_layers);
  EncoderOutput out = EncodeWithTaps(g, text.encoder, EmbedText(g, text, ids), cfg.heads, layers);
  TapSet taps;
  for (const auto& [l, v] : out.taps) taps[l] = v.value();
  return taps;
}

const TapSet& OnlineTargets::Get(const std::string& id, std::string_view transcription) {
  auto it = cache_.find(id);
  if (it == cache_.end()) {
    it = cache_.emplace(id, ComputeTextTaps(text_, vocab_, transcription, cfg_)).first;
  }
  return it->second;
}

const TapSet& OfflineTargets::Get(const std::string& id, std::string_view) {
  auto it = cache_.find(id);
  if (it != cache_.end()) return it->second;
  const auto path = dir_ / (id + ".ckpt");
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kMissingExample, "no stored text targets for " + id);
  }
  TapSet taps;
  for (auto& p : ReadCheckpoint(path)) {
    if (!p.name.starts_with("tap.")) continue;
    taps[std::stoi(p.name.substr(4))] = std::move(p.value);
  }
  return cache_.emplace(id, std::move(taps)).first->second;
}

std::size_t ExtractTextTargets(std::span<const AsrPair> corpus, const TextBranch& text,
                               const SubwordVocab& vocab, const ModelConfig& cfg,
                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const AsrPair& ex : corpus) {
    std::vector<Parameter> tensors;
    for (auto& [l, t] : ComputeTextTaps(text, vocab, *ex.transcription, cfg)) {
      tensors.push_back({"tap." + std::to_string(l), std::move(t), true});
    }
    WriteCheckpoint(dir / (*ex.id + ".ckpt"), std::span<const Parameter>(tensors));
  }
  return corpus.size();
}

// ---------------------------------------------------------------------------

namespace {

struct MtExample {
  std::vector<int> source;
  std::vector<int> prefix;
  std::vector<int> targets;
};

MtExample PrepareMt(const MtPair& p, const SubwordVocab& vocab) {
  MtExample ex;
  ex.source = EncodeSource(*p.transcription, vocab);
  ex.prefix.push_back(vocab.lang_id());
  ex.prefix.insert(ex.prefix.end(), p.translation->begin(), p.translation->end());
  ex.targets.assign(p.translation->begin(), p.translation->end());
  ex.targets.push_back(vocab.eos_id());
  return ex;
}

Var MtLogits(Graph& g, const MtModel& m, const MtExample& ex, int heads) {
  Var enc = EncodeWithTaps(g, m.text.encoder, EmbedText(g, m.text, ex.source), heads, {}).final;
  return DecoderForward(g, m.decoder, m.text, ex.prefix, enc, heads);
}

}  // namespace

double TeacherForcedAccuracy(const MtModel& mt, std::span<const MtPair> pairs,
                             const SubwordVocab& vocab, const ModelConfig& cfg) {
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const MtPair& p : pairs) {
    Graph g(false);
    const MtExample ex = PrepareMt(p, vocab);
    const std::vector<int> pred = ArgmaxRows(MtLogits(g, mt, ex, cfg.heads).value());
    for (std::size_t t = 0; t < ex.targets.size(); ++t) correct += pred[t] == ex.targets[t];
    total += ex.targets.size();
  }
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

MtTrainResult TrainToyMt(std::span<const MtPair> train, std::span<const MtPair> valid,
                         const SubwordVocab& vocab, const ModelConfig& model_cfg,
                         const MtTrainConfig& cfg, std::ostream* log) {
  ValidateModelConfig(model_cfg);
  if (train.empty()) throw Error(ErrorCode::kConfigInvalid, "empty MT training set");
  MtTrainResult result{InitMtModel(model_cfg, cfg.seed), {}, 0.0};
  std::vector<Parameter*> params = Trainable(Parameters(result.model));
  AdamW opt;
  BatchSampler sampler(train.size(), MixSeed(cfg.seed, 0x4D54));
  const int threads = ThreadsFromEnv(1);
  const auto batch = static_cast<std::size_t>(std::max(1, cfg.batch_size));

  for (int step = 1; step <= cfg.steps; ++step) {
    const std::vector<std::size_t> idx = sampler.Next(batch);
    std::vector<GradientSet> grads(idx.size());
    std::vector<double> losses(idx.size());
    std::vector<std::size_t> tokens(idx.size());
    ParallelFor(idx.size(), threads, [&](std::size_t k) {
      Graph g;
      const MtExample ex = PrepareMt(train[idx[k]], vocab);
      Var loss = ops::SmoothedNll(ops::LogSoftmaxRows(MtLogits(g, result.model, ex, model_cfg.heads)),
                                  ex.targets, cfg.label_smoothing);
      g.Backward(loss);
      g.CollectParamGrads(grads[k]);
      losses[k] = loss.value().item();
      tokens[k] = ex.targets.size();
    });
    GradientSet total;
    double loss_sum = 0.0;
    std::size_t token_sum = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      total.Add(grads[k]);
      loss_sum += losses[k];
      token_sum += tokens[k];
    }
    total.Scale(1.0 / static_cast<double>(token_sum));
    const double lr = InverseSqrtLr(step, cfg.base_lr, cfg.warmup);
    opt.Step(params, total, lr);
    result.losses.push_back(loss_sum / static_cast<double>(token_sum));
    if (log && cfg.log_every > 0 && step % cfg.log_every == 0) {
      nlohmann::json j = {{"step", step}, {"lr", lr}, {"loss", result.losses.back()}};
      *log << j.dump() << '\n';
    }
  }
  if (!valid.empty()) result.valid_accuracy = TeacherForcedAccuracy(result.model, valid, vocab, model_cfg);
  return result;
}

// ---------------------------------------------------------------------------

LossWeights EffectiveWeights(const TrainConfig& cfg, int num_layers) {
  LossWeights w = cfg.weights;
  if (cfg.no_aux_wass) w.taps = {num_layers};
  ValidateLossWeights(w, num_layers);
  return w;
}

std::string ToJsonLine(const StepMetrics& m) {
  nlohmann::json wass = nlohmann::json::object();
  for (const auto& [l, v] : m.loss_wass) wass[std::to_string(l)] = v;
  nlohmann::ordered_json j;
  j["step"] = m.step;
  j["lr"] = m.lr;
  j["loss_total"] = m.loss_total;
  j["loss_ctc"] = m.loss_ctc;
  j["loss_wass_per_layer"] = wass;
  j["skipped_infeasible"] = m.skipped_infeasible;
  return j.dump();
}

ExampleLoss SpeechExampleLoss(Graph& g, const SpeechEncoder& enc, const TextBranch& text,
                              const SpeechContext& ctx, const Tensor& frames,
                              std::string_view transcription, const TapSet& targets) {
  const TrainConfig& tcfg = ctx.train_cfg;
  const LossWeights w = EffectiveWeights(tcfg, ctx.model_cfg.shared_layers);
  ExampleLoss out;
  SpeechPath path = RunSpeechPath(g, enc, ctx, frames, false, nullptr);
  const CtcLabels labels =
      BuildCtcLabels(transcription, tcfg.label_mode, ctx.letters, ctx.subwords);
  bool feasible = true;
  Var ctc = CtcLoss(path.log_probs, labels.ids, &feasible, ctx.letters.blank_id());
  if (!feasible) {
    out.feasible = false;
    return out;
  }
  out.ctc = ctc.value().item();
  Var total;
  if (!path.embedded) {
    out.compressed = false;
    total = ops::Scale(ctc, 1.0 - w.alpha);
  } else {
    EncoderOutput speech =
        EncodeWithTaps(g, text.encoder, *path.embedded, ctx.model_cfg.heads, w.taps);
    std::map<int, Var> text_taps;
    for (int l : w.taps) {
      auto it = targets.find(l);
      if (it == targets.end()) {
        throw Error(ErrorCode::kTapMismatch, "stored targets lack tap " + std::to_string(l));
      }
      text_taps[l] = g.Constant(it->second);
    }
    LossBreakdown b = TotalLoss(speech.taps, text_taps, ctc, w, tcfg.ot);
    out.wass = std::move(b.wass);
    total = b.total;
  }
  out.total = total.value().item();
  if (g.recording()) g.Backward(total);
  return out;
}

EncoderOutput SpeechForward(Graph& g, const SpeechEncoder& enc, const TextBranch& text,
                            const SpeechContext& ctx, const Tensor& frames,
                            std::span<const int> taps, bool* used_fallback) {
  SpeechPath path = RunSpeechPath(g, enc, ctx, frames, used_fallback != nullptr, used_fallback);
  if (!path.embedded) throw Error(ErrorCode::kNoChunks, "adapter produced no speech units");
  return EncodeWithTaps(g, text.encoder, *path.embedded, ctx.model_cfg.heads, taps);
}

double ValidationWasserstein(const SpeechEncoder& enc, const TextBranch& text,
                             const SpeechContext& ctx, std::span<const AsrPair> valid,
                             TextTargetStore& targets, int* fallbacks) {
  const int final_layer = ctx.model_cfg.shared_layers;
  const std::vector<int> taps = {final_layer};
  std::vector<const Tensor*> target(valid.size());
  for (std::size_t i = 0; i < valid.size(); ++i) {
    target[i] = &targets.Get(*valid[i].id, *valid[i].transcription).at(final_layer);
  }
  std::vector<double> values(valid.size());
  std::vector<char> fell_back(valid.size(), 0);
  ParallelFor(valid.size(), ctx.train_cfg.threads, [&](std::size_t i) {
    Graph g(false);
    bool used = false;
    EncoderOutput out = SpeechForward(g, enc, text, ctx, *valid[i].frames, taps, &used);
    fell_back[i] = used;
    values[i] = WassersteinLoss(out.taps.at(final_layer), g.Constant(*target[i]), ctx.train_cfg.ot)
                    .loss.value()
                    .item();
  });
  if (fallbacks) *fallbacks = static_cast<int>(std::count(fell_back.begin(), fell_back.end(), 1));
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

SpeechTrainResult TrainSpeechEncoder(std::span<const AsrPair> train,
                                     std::span<const AsrPair> valid, const TextBranch& text,
                                     TextTargetStore& targets, const SpeechContext& ctx,
                                     std::ostream* metrics, std::ostream* validation_log) {
  const ModelConfig& mcfg = ctx.model_cfg;
  const TrainConfig& tcfg = ctx.train_cfg;
  ValidateModelConfig(mcfg);
  ValidateOtConfig(tcfg.ot);
  EffectiveWeights(tcfg, mcfg.shared_layers);
  if (train.empty()) throw Error(ErrorCode::kConfigInvalid, "empty speech training set");

  SpeechTrainResult result;
  result.model = InitSpeechEncoder(mcfg, text, tcfg.seed);
  std::vector<Parameter*> all = Parameters(result.model);
  std::vector<Parameter*> params = Trainable(all);
  AdamW opt;
  BatchSampler sampler(train.size(), MixSeed(tcfg.seed, 0x5C4));
  const auto batch = static_cast<std::size_t>(std::max(1, tcfg.batch_size));
  const bool masking = tcfg.mask.p_time > 0.0 || tcfg.mask.p_chan > 0.0;

  struct Candidate {
    double value;
    int step;
    std::vector<Parameter> params;
  };
  std::vector<Candidate> best;
  const auto keep = static_cast<std::size_t>(std::max(1, tcfg.avg_best_k));
  double best_value = std::numeric_limits<double>::infinity();
  int bad_validations = 0;

  auto validate = [&](int step) {
    ValidationPoint point{step, 0.0, 0};
    point.wass_final =
        ValidationWasserstein(result.model, text, ctx, valid, targets, &point.fallback_uncompressed);
    result.validation.push_back(point);
    if (validation_log) {
      nlohmann::ordered_json j;
      j["step"] = step;
      j["valid_wass_final"] = point.wass_final;
      j["fallback_uncompressed"] = point.fallback_uncompressed;
      *validation_log << j.dump() << '\n';
    }
    best.push_back({point.wass_final, step, Snapshot(all)});
    std::stable_sort(best.begin(), best.end(),
                     [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
    if (best.size() > keep) best.resize(keep);
    if (point.wass_final < best_value) {
      best_value = point.wass_final;
      bad_validations = 0;
    } else {
      ++bad_validations;
    }
  };

  if (!valid.empty()) validate(0);
  for (int step = 1; step <= tcfg.steps; ++step) {
    const std::vector<std::size_t> idx = sampler.Next(batch);
    std::vector<const TapSet*> tgt(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      tgt[k] = &targets.Get(*train[idx[k]].id, *train[idx[k]].transcription);
    }
    std::vector<GradientSet> grads(idx.size());
    std::vector<ExampleLoss> losses(idx.size());
    ParallelFor(idx.size(), tcfg.threads, [&](std::size_t k) {
      const AsrPair& ex = train[idx[k]];
      Tensor frames = masking
                          ? MaskSpeech(*ex.frames, tcfg.mask,
                                       MixSeed(tcfg.seed, static_cast<std::uint64_t>(step) * batch + k))
                          : *ex.frames;
      Graph g;
      losses[k] = SpeechExampleLoss(g, result.model, text, ctx, frames, *ex.transcription, *tgt[k]);
      if (losses[k].feasible) g.CollectParamGrads(grads[k]);
    });

    GradientSet total;
    StepMetrics m;
    m.step = step;
    std::size_t used = 0;
    std::map<int, std::size_t> wass_count;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (!losses[k].feasible) {
        ++result.skipped_infeasible;
        continue;
      }
      ++used;
      total.Add(grads[k]);
      m.loss_total += losses[k].total;
      m.loss_ctc += losses[k].ctc;
      for (const auto& [l, v] : losses[k].wass) {
        m.loss_wass[l] += v;
        ++wass_count[l];
      }
    }
    m.lr = InverseSqrtLr(step, tcfg.base_lr, tcfg.warmup);
    m.skipped_infeasible = result.skipped_infeasible;
    if (used > 0) {
      total.Scale(1.0 / static_cast<double>(used));
      opt.Step(params, total, m.lr);
      m.loss_total /= static_cast<double>(used);
      m.loss_ctc /= static_cast<double>(used);
      for (auto& [l, v] : m.loss_wass) v /= static_cast<double>(wass_count[l]);
    } else {
      m.loss_total = m.loss_ctc = std::numeric_limits<double>::quiet_NaN();
    }
    if (metrics) *metrics << ToJsonLine(m) << '\n';
    result.steps_run = step;

    const bool last = step == tcfg.steps;
    if (!valid.empty() && tcfg.valid_every > 0 && (step % tcfg.valid_every == 0 || last)) {
      validate(step);
      if (bad_validations >= tcfg.patience) {
        result.early_stopped = !last;
        break;
      }
    }
  }

  if (!best.empty()) {
    for (const Candidate& c : best) result.best_snapshots.push_back(c.params);
    AssignCheckpoint(all, AverageCheckpoints(result.best_snapshots));
  }
  return result;
}

int ThreadsFromEnv(int fallback) {
  int n = fallback;
  if (const char* env = std::getenv("ZEROSWOT_THREADS")) {
    try {
      n = std::stoi(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigInvalid, std::string("ZEROSWOT_THREADS is not an integer: ") + env);
    }
  }
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return std::clamp(n, 1, hw);
}

}  // namespace zeroswot
