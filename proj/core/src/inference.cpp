// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "zeroswot/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "zeroswot/compression.hpp"
#include "zeroswot/ctc.hpp"
#include "zeroswot/error.hpp"
#include "zeroswot/ops.hpp"

namespace zeroswot {
namespace {

std::vector<double> NextLogProbs(const MtModel& mt, const Tensor& encoder_out,
                                 std::span<const int> prefix, int heads) {
  Graph g(false);
  Var logits = DecoderForward(g, mt.decoder, mt.text, prefix, g.Constant(encoder_out), heads);
  const Tensor& l = logits.value();
  const auto last = l.row(l.rows() - 1);
  const double lse = ops::LogSumExp(last);
  std::vector<double> out(last.begin(), last.end());
  for (double& v : out) v -= lse;
  return out;
}

std::vector<double> MeanRow(const Tensor& t) {
  std::vector<double> m(t.cols(), 0.0);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) m[c] += t(r, c);
  }
  for (double& v : m) v /= static_cast<double>(t.rows());
  return m;
}

double Cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::sqrt(na) * std::sqrt(nb);
  return denom > 0.0 ? dot / denom : 0.0;
}

Tensor Augment(const Tensor& h, double mu) {
  Graph g(false);
  return PositionalAugment(g.Constant(h), mu).value();
}

Tensor Cost(const Tensor& a, const Tensor& b) {
  Graph g(false);
  return CostMatrix(g.Constant(a), g.Constant(b)).value();
}

}  // namespace

Tensor ZeroShotEncode(const ZeroShotModel& model, const SpeechContext& ctx, const Tensor& frames) {
  Graph g(false);
  return SpeechForward(g, *model.speech, model.mt->text, ctx, frames, {}).final.value();
}

Tensor TextEncode(const MtModel& mt, const SubwordVocab& vocab, std::string_view x,
                  const ModelConfig& cfg) {
  Graph g(false);
  const std::vector<int> ids = EncodeSource(x, vocab);
  return EncodeWithTaps(g, mt.text.encoder, EmbedText(g, mt.text, ids), cfg.heads, {})
      .final.value();
}

std::vector<Hypothesis> BeamSearch(const MtModel& mt, const Tensor& encoder_out,
                                   const SubwordVocab& vocab, int heads, int beam, int max_len) {
  if (beam < 1) throw Error(ErrorCode::kConfigInvalid, "beam must be >= 1");
  const auto width = static_cast<std::size_t>(beam);
  struct Candidate {
    std::size_t parent;
    int token;
    double log_prob;
  };
  std::vector<Hypothesis> active(1);
  std::vector<Hypothesis> finished;
  auto finish = [&](Hypothesis h) {
    h.finished = true;
    h.score = h.tokens.empty() ? h.log_prob : h.log_prob / static_cast<double>(h.tokens.size());
    finished.push_back(std::move(h));
  };

  for (int step = 0; step < max_len && !active.empty(); ++step) {
    std::vector<Candidate> pool;
    for (std::size_t h = 0; h < active.size(); ++h) {
      std::vector<int> prefix = {vocab.lang_id()};
      prefix.insert(prefix.end(), active[h].tokens.begin(), active[h].tokens.end());
      const std::vector<double> lp = NextLogProbs(mt, encoder_out, prefix, heads);
      std::vector<int> order(lp.size());
      std::iota(order.begin(), order.end(), 0);
      const std::size_t k = std::min(width, order.size());
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                        [&](int a, int b) {
                          const auto ua = static_cast<std::size_t>(a);
                          const auto ub = static_cast<std::size_t>(b);
                          return lp[ua] > lp[ub] || (lp[ua] == lp[ub] && a < b);
                        });
      for (std::size_t i = 0; i < k; ++i) {
        pool.push_back({h, order[i], active[h].log_prob + lp[static_cast<std::size_t>(order[i])]});
      }
    }
    std::stable_sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
      return a.log_prob > b.log_prob;
    });
    std::vector<Hypothesis> next;
    for (const Candidate& c : pool) {
      if (next.size() >= width) break;
      Hypothesis h = active[c.parent];
      h.tokens.push_back(c.token);
      h.log_prob = c.log_prob;
      if (c.token == vocab.eos_id()) {
        finish(std::move(h));
      } else {
        next.push_back(std::move(h));
      }
    }
    active = std::move(next);
    if (finished.size() >= width) break;
  }
  for (Hypothesis& h : active) finish(std::move(h));
  for (Hypothesis& h : finished) {
    if (h.tokens.empty() || h.tokens.back() != vocab.eos_id()) h.finished = false;
  }
  std::stable_sort(finished.begin(), finished.end(),
                   [](const Hypothesis& a, const Hypothesis& b) { return a.score > b.score; });
  return finished;
}

std::vector<int> GreedyTranslate(const MtModel& mt, const Tensor& encoder_out,
                                 const SubwordVocab& vocab, int heads, int max_len) {
  std::vector<int> prefix = {vocab.lang_id()};
  for (int step = 0; step < max_len; ++step) {
    const std::vector<double> lp = NextLogProbs(mt, encoder_out, prefix, heads);
    const int best = static_cast<int>(std::max_element(lp.begin(), lp.end()) - lp.begin());
    prefix.push_back(best);
    if (best == vocab.eos_id()) break;
  }
  return {prefix.begin() + 1, prefix.end()};
}

std::vector<int> StripEos(std::vector<int> tokens, const SubwordVocab& vocab) {
  if (!tokens.empty() && tokens.back() == vocab.eos_id()) tokens.pop_back();
  return tokens;
}

void TokenAccuracy::Add(std::span<const int> hyp, std::span<const int> ref) {
  const std::size_t n = std::min(hyp.size(), ref.size());
  for (std::size_t i = 0; i < n; ++i) correct += hyp[i] == ref[i];
  total += std::max(hyp.size(), ref.size());
}

std::string_view ToString(RetrievalMetric m) {
  return m == RetrievalMetric::kWasserstein ? "wasserstein" : "cosine_meanpool";
}

RetrievalReport Retrieve(std::span<const Tensor> speech, std::span<const Tensor> text,
                         std::span<const std::string> ids, RetrievalMetric metric,
                         const OtConfig& cfg, int threads) {
  if (speech.size() != text.size() || ids.size() != speech.size()) {
    throw Error(ErrorCode::kShapeMismatch, "retrieval sets must be aligned");
  }
  ValidateOtConfig(cfg);
  const std::size_t n = speech.size();
  RetrievalReport report;
  report.metric = metric;
  if (n == 0) return report;

  // Higher is better for both metrics.
  std::vector<std::vector<double>> score(n, std::vector<double>(n));
  if (metric == RetrievalMetric::kCosineMeanpool) {
    std::vector<std::vector<double>> s(n), t(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = MeanRow(speech[i]);
      t[i] = MeanRow(text[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) score[i][j] = Cosine(s[i], t[j]);
    }
  } else {
    std::vector<Tensor> sa(n), ta(n);
    std::vector<double> self_s(n, 0.0), self_t(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      sa[i] = Augment(speech[i], cfg.mu);
      ta[i] = Augment(text[i], cfg.mu);
      if (cfg.debiased) {
        self_s[i] = SolveSinkhorn(Cost(sa[i], sa[i]), cfg).objective;
        self_t[i] = SolveSinkhorn(Cost(ta[i], ta[i]), cfg).objective;
      }
    }
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    auto row = [&](std::size_t i) {
      for (std::size_t j = 0; j < n; ++j) {
        double w = SolveSinkhorn(Cost(sa[i], ta[j]), cfg).objective;
        if (cfg.debiased) w -= 0.5 * (self_s[i] + self_t[j]);
        score[i][j] = -w;
      }
    };
    if (workers <= 1) {
      for (std::size_t i = 0; i < n; ++i) row(i);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < n; i += workers) row(i);
        });
      }
      for (auto& th : pool) th.join();
    }
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto best = static_cast<std::size_t>(
        std::max_element(score[i].begin(), score[i].end()) - score[i].begin());
    if (best == i) {
      ++correct;
    } else {
      report.mismatches.push_back(ids[i]);
    }
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  return report;
}

Tensor OracleLogProbs(std::span<const int> alignment, int vocab_size) {
  const auto v = static_cast<std::size_t>(vocab_size);
  const double off = std::log(0.01 / static_cast<double>(v - 1));
  Tensor lp(alignment.size(), v, off);
  for (std::size_t t = 0; t < alignment.size(); ++t) {
    lp(t, static_cast<std::size_t>(alignment[t])) = std::log(0.99);
  }
  return lp;
}

LengthSummary LengthReport(std::span<const SyntheticExample* const> corpus,
                           const SpeechEncoder& speech, const SpeechContext& ctx, bool oracle) {
  const TrainConfig& tcfg = ctx.train_cfg;
  AdapterOptions options;
  options.blank_id = ctx.letters.blank_id();
  options.sep_id = ctx.letters.sep_id();
  options.include_separator = tcfg.include_separator;
  options.heads = ctx.model_cfg.heads;
  const std::size_t specials = tcfg.no_speech_embedder ? 0 : 2;

  LengthSummary summary;
  for (const SyntheticExample* ex : corpus) {
    Graph g(false);
    Var a = AcousticEncode(g, speech.acoustic, ex->frames, ctx.model_cfg);
    Tensor lp = oracle ? OracleLogProbs(ex->alignment, ctx.letters.size())
                       : CtcHead(a, g.Param(speech.ctc.weight), g.Param(speech.ctc.bias)).value();
    std::size_t n_out = 0;
    try {
      n_out = Adapt(g, a, lp, tcfg.adapter, speech.subword, options).output.rows();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoChunks && e.code() != ErrorCode::kNoCharacters) throw;
      ++summary.no_chunks;
      continue;
    }
    LengthRow row;
    row.id = ex->id;
    row.speech_len = n_out + specials;
    row.text_len = EncodeSource(ex->transcription, ctx.subwords).size();
    const LengthGap gap = ComputeLengthGap(row.speech_len, row.text_len);
    row.abs_diff = gap.abs_diff;
    row.ratio = gap.ratio;
    summary.mean_abs_diff += row.abs_diff;
    summary.mean_ratio += row.ratio;
    summary.rows.push_back(std::move(row));
  }
  if (!summary.rows.empty()) {
    summary.mean_abs_diff /= static_cast<double>(summary.rows.size());
    summary.mean_ratio /= static_cast<double>(summary.rows.size());
  }
  return summary;
}

}  // namespace zeroswot
