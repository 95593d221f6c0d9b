// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "zeroswot/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zeroswot/error.hpp"
#include "zeroswot/ops.hpp"

namespace zeroswot {
namespace {

class Initializer {
 public:
  explicit Initializer(std::uint64_t seed) : rng_(seed) {}

  Parameter Xavier(std::string name, std::size_t rows, std::size_t cols) {
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Parameter p{std::move(name), Tensor(rows, cols)};
    for (double& v : p.value.values()) v = dist(rng_);
    return p;
  }

  Parameter Normal(std::string name, std::size_t rows, std::size_t cols, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    Parameter p{std::move(name), Tensor(rows, cols)};
    for (double& v : p.value.values()) v = dist(rng_);
    return p;
  }

  static Parameter Constant(std::string name, std::size_t rows, std::size_t cols, double v) {
    return Parameter{std::move(name), Tensor(rows, cols, v)};
  }

 private:
  std::mt19937_64 rng_;
};

AttentionParams InitAttention(Initializer& init, const std::string& prefix, std::size_t d) {
  return AttentionParams{
      init.Xavier(prefix + ".wq", d, d), Initializer::Constant(prefix + ".bq", 1, d, 0.0),
      init.Xavier(prefix + ".wk", d, d), Initializer::Constant(prefix + ".bk", 1, d, 0.0),
      init.Xavier(prefix + ".wv", d, d), Initializer::Constant(prefix + ".bv", 1, d, 0.0),
      init.Xavier(prefix + ".wo", d, d), Initializer::Constant(prefix + ".bo", 1, d, 0.0),
  };
}

EncoderStack InitStack(Initializer& init, const std::string& prefix, int layers,
                       const ModelConfig& cfg, Activation act) {
  const auto d = static_cast<std::size_t>(cfg.d);
  const auto ff = static_cast<std::size_t>(cfg.ff_dim);
  EncoderStack s;
  s.activation = act;
  for (int l = 0; l < layers; ++l) {
    const std::string p = prefix + ".layers." + std::to_string(l);
    s.layers.push_back(EncoderLayer{
        Initializer::Constant(p + ".ln1.g", 1, d, 1.0),
        Initializer::Constant(p + ".ln1.b", 1, d, 0.0),
        InitAttention(init, p + ".attn", d),
        Initializer::Constant(p + ".ln2.g", 1, d, 1.0),
        Initializer::Constant(p + ".ln2.b", 1, d, 0.0),
        init.Xavier(p + ".ffn.w1", d, ff),
        Initializer::Constant(p + ".ffn.b1", 1, ff, 0.0),
        init.Xavier(p + ".ffn.w2", ff, d),
        Initializer::Constant(p + ".ffn.b2", 1, d, 0.0),
    });
  }
  s.final_g = Initializer::Constant(prefix + ".final_ln.g", 1, d, 1.0);
  s.final_b = Initializer::Constant(prefix + ".final_ln.b", 1, d, 0.0);
  return s;
}

void Append(std::vector<Parameter*>& out, AttentionParams& a) {
  for (Parameter* p : {&a.wq, &a.bq, &a.wk, &a.bk, &a.wv, &a.bv, &a.wo, &a.bo}) {
    out.push_back(p);
  }
}

void Append(std::vector<Parameter*>& out, EncoderStack& s) {
  for (EncoderLayer& l : s.layers) {
    out.push_back(&l.ln1_g);
    out.push_back(&l.ln1_b);
    Append(out, l.attn);
    for (Parameter* p : {&l.ln2_g, &l.ln2_b, &l.w1, &l.b1, &l.w2, &l.b2}) out.push_back(p);
  }
  out.push_back(&s.final_g);
  out.push_back(&s.final_b);
}

Var Linear(Graph& g, Var x, const Parameter& w, const Parameter& b) {
  return ops::AddRowVector(ops::MatMul(x, g.Param(w)), g.Param(b));
}

Var LayerNorm(Graph& g, Var x, const Parameter& gamma, const Parameter& beta) {
  return ops::LayerNormRows(x, g.Param(gamma), g.Param(beta));
}

Var FeedForward(Graph& g, Var x, const Parameter& w1, const Parameter& b1,
                const Parameter& w2, const Parameter& b2, Activation act) {
  Var h = Linear(g, x, w1, b1);
  h = act == Activation::kGelu ? ops::Gelu(h) : ops::Relu(h);
  return Linear(g, h, w2, b2);
}

Var AddPositions(Graph& g, Var x) {
  return ops::Add(x, g.Constant(ops::SinusoidalPositions(x.rows(), x.cols())));
}

}  // namespace

void ValidateModelConfig(const ModelConfig& cfg) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kConfigInvalid, m); };
  if (cfg.d <= 0 || cfg.heads <= 0 || cfg.d % cfg.heads != 0) fail("model.d must be divisible by model.heads");
  if (cfg.ff_dim <= 0) fail("model.ff_dim must be positive");
  if (cfg.downsample < 1) fail("model.downsample must be >= 1");
  if (cfg.feature_dim < 1) fail("model.feature_dim must be >= 1");
  if (cfg.acoustic_layers < 0 || cfg.shared_layers < 1 || cfg.subword_layers < 0 ||
      cfg.decoder_layers < 1) {
    fail("model layer counts out of range");
  }
  if (cfg.taps.empty()) fail("model.taps must not be empty");
  for (int l : cfg.taps) {
    if (l < 1 || l > cfg.shared_layers) fail("model.taps must lie in 1..shared_layers");
  }
  if (std::find(cfg.taps.begin(), cfg.taps.end(), cfg.shared_layers) == cfg.taps.end()) {
    fail("model.taps must include the final shared layer");
  }
}

MtModel InitMtModel(const ModelConfig& cfg, std::uint64_t seed) {
  ValidateModelConfig(cfg);
  Initializer init(seed);
  const auto d = static_cast<std::size_t>(cfg.d);
  MtModel m;
  m.text.embedding = init.Normal("text.embedding", static_cast<std::size_t>(cfg.subword_vocab),
                                 d, 1.0 / std::sqrt(static_cast<double>(d)));
  m.text.encoder = InitStack(init, "text.encoder", cfg.shared_layers, cfg, Activation::kRelu);
  for (int l = 0; l < cfg.decoder_layers; ++l) {
    const std::string p = "decoder.layers." + std::to_string(l);
    const auto ff = static_cast<std::size_t>(cfg.ff_dim);
    m.decoder.layers.push_back(DecoderLayer{
        Initializer::Constant(p + ".ln1.g", 1, d, 1.0),
        Initializer::Constant(p + ".ln1.b", 1, d, 0.0),
        InitAttention(init, p + ".self_attn", d),
        Initializer::Constant(p + ".ln2.g", 1, d, 1.0),
        Initializer::Constant(p + ".ln2.b", 1, d, 0.0),
        InitAttention(init, p + ".cross_attn", d),
        Initializer::Constant(p + ".ln3.g", 1, d, 1.0),
        Initializer::Constant(p + ".ln3.b", 1, d, 0.0),
        init.Xavier(p + ".ffn.w1", d, ff),
        Initializer::Constant(p + ".ffn.b1", 1, ff, 0.0),
        init.Xavier(p + ".ffn.w2", ff, d),
        Initializer::Constant(p + ".ffn.b2", 1, d, 0.0),
    });
  }
  m.decoder.final_g = Initializer::Constant("decoder.final_ln.g", 1, d, 1.0);
  m.decoder.final_b = Initializer::Constant("decoder.final_ln.b", 1, d, 0.0);
  return m;
}

SpeechEncoder InitSpeechEncoder(const ModelConfig& cfg, const TextBranch& text,
                                std::uint64_t seed) {
  ValidateModelConfig(cfg);
  Initializer init(seed);
  const auto d = static_cast<std::size_t>(cfg.d);
  const auto window = static_cast<std::size_t>(cfg.downsample * cfg.feature_dim);
  SpeechEncoder s;
  s.acoustic.conv_w = init.Xavier("speech.acoustic.conv.w", window, d);
  s.acoustic.conv_b = Initializer::Constant("speech.acoustic.conv.b", 1, d, 0.0);
  s.acoustic.proj_w = init.Xavier("speech.acoustic.proj.w", d, d);
  s.acoustic.proj_b = Initializer::Constant("speech.acoustic.proj.b", 1, d, 0.0);
  s.acoustic.stack =
      InitStack(init, "speech.acoustic.encoder", cfg.acoustic_layers, cfg, Activation::kGelu);
  s.ctc.weight = init.Xavier("speech.ctc.w", d, static_cast<std::size_t>(cfg.letter_vocab));
  s.ctc.bias =
      Initializer::Constant("speech.ctc.b", 1, static_cast<std::size_t>(cfg.letter_vocab), 0.0);
  s.subword.cls = init.Normal("speech.subword.cls", 1, d, 1.0);
  s.subword.stack =
      InitStack(init, "speech.subword.encoder", cfg.subword_layers, cfg, Activation::kGelu);

  const Tensor& emb = text.embedding.value;
  if (emb.rows() < 2 || emb.cols() != d) {
    throw Error(ErrorCode::kShapeMismatch, "text embedding does not match model.d");
  }
  s.embedder.eps_lang = Parameter{"speech.embedder.lang", Tensor(1, d), true};
  s.embedder.eps_eos = Parameter{"speech.embedder.eos", Tensor(1, d), true};
  // <lang> is row 0 and </s> is row 1 of every SubwordVocab.
  std::copy(emb.row(0).begin(), emb.row(0).end(), s.embedder.eps_lang.value.values().begin());
  std::copy(emb.row(1).begin(), emb.row(1).end(), s.embedder.eps_eos.value.values().begin());
  return s;
}

std::vector<Parameter*> Parameters(TextBranch& m) {
  std::vector<Parameter*> out = {&m.embedding};
  Append(out, m.encoder);
  return out;
}

std::vector<Parameter*> Parameters(Decoder& m) {
  std::vector<Parameter*> out;
  for (DecoderLayer& l : m.layers) {
    out.push_back(&l.ln1_g);
    out.push_back(&l.ln1_b);
    Append(out, l.self_attn);
    out.push_back(&l.ln2_g);
    out.push_back(&l.ln2_b);
    Append(out, l.cross_attn);
    for (Parameter* p : {&l.ln3_g, &l.ln3_b, &l.w1, &l.b1, &l.w2, &l.b2}) out.push_back(p);
  }
  out.push_back(&m.final_g);
  out.push_back(&m.final_b);
  return out;
}

std::vector<Parameter*> Parameters(MtModel& m) {
  auto out = Parameters(m.text);
  auto dec = Parameters(m.decoder);
  out.insert(out.end(), dec.begin(), dec.end());
  return out;
}

std::vector<Parameter*> Parameters(SubwordEncoderParams& m) {
  std::vector<Parameter*> out = {&m.cls};
  Append(out, m.stack);
  return out;
}

std::vector<Parameter*> Parameters(SpeechEncoder& m) {
  std::vector<Parameter*> out = {&m.acoustic.conv_w, &m.acoustic.conv_b, &m.acoustic.proj_w,
                                 &m.acoustic.proj_b};
  Append(out, m.acoustic.stack);
  out.push_back(&m.ctc.weight);
  out.push_back(&m.ctc.bias);
  auto sw = Parameters(m.subword);
  out.insert(out.end(), sw.begin(), sw.end());
  out.push_back(&m.embedder.eps_lang);
  out.push_back(&m.embedder.eps_eos);
  return out;
}

void SetFrozen(std::span<Parameter* const> params, bool frozen) {
  for (Parameter* p : params) p->frozen = frozen;
}

Var MultiHeadAttention(Graph& g, const AttentionParams& p, Var queries, Var keys_values,
                       int heads, bool causal) {
  Var q = Linear(g, queries, p.wq, p.bq);
  Var k = Linear(g, keys_values, p.wk, p.bk);
  Var v = Linear(g, keys_values, p.wv, p.bv);
  const std::size_t d = q.cols();
  const std::size_t dh = d / static_cast<std::size_t>(heads);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Var> outs;
  outs.reserve(static_cast<std::size_t>(heads));
  for (std::size_t h = 0; h < static_cast<std::size_t>(heads); ++h) {
    Var qh = ops::SliceCols(q, h * dh, dh);
    Var kh = ops::SliceCols(k, h * dh, dh);
    Var vh = ops::SliceCols(v, h * dh, dh);
    Var att = ops::SoftmaxRows(ops::Scale(ops::MatMulNT(qh, kh), scale), causal);
    outs.push_back(ops::MatMul(att, vh));
  }
  Var merged = heads == 1 ? outs[0] : ops::ConcatCols(outs);
  return Linear(g, merged, p.wo, p.bo);
}

Var EncoderLayerForward(Graph& g, const EncoderLayer& layer, Var x, int heads,
                        Activation act, Var* normed_input) {
  Var n1 = LayerNorm(g, x, layer.ln1_g, layer.ln1_b);
  if (normed_input) *normed_input = n1;
  x = ops::Add(x, MultiHeadAttention(g, layer.attn, n1, n1, heads, false));
  Var n2 = LayerNorm(g, x, layer.ln2_g, layer.ln2_b);
  return ops::Add(x, FeedForward(g, n2, layer.w1, layer.b1, layer.w2, layer.b2, act));
}

EncoderOutput EncodeWithTaps(Graph& g, const EncoderStack& stack, Var e, int heads,
                             std::span<const int> taps) {
  const int num_layers = static_cast<int>(stack.layers.size());
  auto wanted = [&](int l) { return std::find(taps.begin(), taps.end(), l) != taps.end(); };
  EncoderOutput out;
  Var h = e;
  for (int l = 0; l < num_layers; ++l) {
    Var normed;
    h = EncoderLayerForward(g, stack.layers[static_cast<std::size_t>(l)], h, heads,
                            stack.activation, &normed);
    // `normed` is LN1 of 1-based layer l+1 applied to h_l.
    if (l >= 1 && wanted(l)) out.taps[l] = normed;
  }
  out.final = LayerNorm(g, h, stack.final_g, stack.final_b);
  if (wanted(num_layers)) out.taps[num_layers] = out.final;
  return out;
}

Var EmbedText(Graph& g, const TextBranch& text, std::span<const int> ids) {
  const auto vocab = static_cast<int>(text.embedding.value.rows());
  for (int id : ids) {
    if (id < 0 || id >= vocab) {
      throw Error(ErrorCode::kUnknownTokenId, "token id " + std::to_string(id) +
                                                  " outside vocabulary of " +
                                                  std::to_string(vocab));
    }
  }
  const double scale = std::sqrt(static_cast<double>(text.embedding.value.cols()));
  Var emb = ops::GatherRows(g.Param(text.embedding), ids);
  return AddPositions(g, ops::Scale(emb, scale));
}

std::size_t AcousticOutputLength(std::size_t frames, int downsample) {
  const auto r = static_cast<std::size_t>(downsample);
  return (frames + r - 1) / r;
}

Var AcousticEncode(Graph& g, const AcousticEncoder& enc, const Tensor& frames,
                   const ModelConfig& cfg) {
  const auto r = static_cast<std::size_t>(cfg.downsample);
  const auto f = static_cast<std::size_t>(cfg.feature_dim);
  if (frames.cols() != f) {
    throw Error(ErrorCode::kShapeMismatch, "speech frames have width " +
                                               std::to_string(frames.cols()) + ", expected " +
                                               std::to_string(f));
  }
  if (frames.rows() < r) {
    throw Error(ErrorCode::kInputTooShort, std::to_string(frames.rows()) +
                                               " frames is shorter than the downsample factor");
  }
  const std::size_t n = AcousticOutputLength(frames.rows(), cfg.downsample);
  // Windows of r frames laid side by side; the tail window is zero padded.
  Tensor windows(n, r * f);
  for (std::size_t t = 0; t < frames.rows(); ++t) {
    for (std::size_t c = 0; c < f; ++c) windows(t / r, (t % r) * f + c) = frames(t, c);
  }
  Var x = Linear(g, g.Constant(std::move(windows)), enc.conv_w, enc.conv_b);
  x = Linear(g, ops::Gelu(x), enc.proj_w, enc.proj_b);
  x = AddPositions(g, x);
  return EncodeWithTaps(g, enc.stack, x, cfg.heads, {}).final;
}

Var SubwordEncode(Graph& g, const SubwordEncoderParams& p, Var chunk, int heads) {
  const Var parts[] = {g.Param(p.cls), chunk};
  Var x = AddPositions(g, ops::ConcatRows(parts));
  Var out = EncodeWithTaps(g, p.stack, x, heads, {}).final;
  return ops::SliceRows(out, 0, 1);
}

Var SpeechEmbed(Graph& g, const SpeechEmbedderParams& p, Var compressed, bool with_specials) {
  if (compressed.rows() == 0) {
    throw Error(ErrorCode::kEmptyCompressedInput, "speech embedder got no rows");
  }
  const double scale = std::sqrt(static_cast<double>(compressed.cols()));
  Var body = compressed;
  if (with_specials) {
    const Var parts[] = {g.Param(p.eps_lang), compressed, g.Param(p.eps_eos)};
    body = ops::ConcatRows(parts);
  }
  return AddPositions(g, ops::Scale(body, scale));
}

Var DecoderForward(Graph& g, const Decoder& dec, const TextBranch& text,
                   std::span<const int> prefix, Var encoder_out, int heads) {
  Var x = EmbedText(g, text, prefix);
  for (const DecoderLayer& l : dec.layers) {
    Var n1 = LayerNorm(g, x, l.ln1_g, l.ln1_b);
    x = ops::Add(x, MultiHeadAttention(g, l.self_attn, n1, n1, heads, true));
    Var n2 = LayerNorm(g, x, l.ln2_g, l.ln2_b);
    x = ops::Add(x, MultiHeadAttention(g, l.cross_attn, n2, encoder_out, heads, false));
    Var n3 = LayerNorm(g, x, l.ln3_g, l.ln3_b);
    x = ops::Add(x, FeedForward(g, n3, l.w1, l.b1, l.w2, l.b2, Activation::kRelu));
  }
  Var h = LayerNorm(g, x, dec.final_g, dec.final_b);
  return ops::MatMulNT(h, g.Param(text.embedding));
}

}  // namespace zeroswot
