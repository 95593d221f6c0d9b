// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "zeroswot/autodiff.hpp"

namespace zeroswot {

struct ModelConfig {
  int d = 32;
  int heads = 4;
  int ff_dim = 64;
  int acoustic_layers = 2;  // N
  int shared_layers = 4;    // L
  int downsample = 4;       // r, raw frames per acoustic output step
  int feature_dim = 8;      // width of the synthetic speech frames
  int subword_layers = 3;
  int decoder_layers = 2;
  std::vector<int> taps = {2, 3, 4};  // I, 1-based shared-encoder layers
  int letter_vocab = 0;
  int subword_vocab = 0;
};

/// Throws kConfigInvalid when an invariant does not hold.
void ValidateModelConfig(const ModelConfig& cfg);

enum class Activation { kRelu, kGelu };

struct AttentionParams {
  Parameter wq, bq, wk, bk, wv, bv, wo, bo;
};

/// Pre-layernorm encoder layer: x + Attn(LN1 x), then x + FFN(LN2 x).
struct EncoderLayer {
  Parameter ln1_g, ln1_b;
  AttentionParams attn;
  Parameter ln2_g, ln2_b;
  Parameter w1, b1, w2, b2;
};

/// Stack of pre-LN layers with a final layernorm on top.
struct EncoderStack {
  std::vector<EncoderLayer> layers;
  Parameter final_g, final_b;
  Activation activation = Activation::kRelu;
};

struct DecoderLayer {
  Parameter ln1_g, ln1_b;
  AttentionParams self_attn;
  Parameter ln2_g, ln2_b;
  AttentionParams cross_attn;
  Parameter ln3_g, ln3_b;
  Parameter w1, b1, w2, b2;
};

/// Frozen text branch: subword embedding plus the shared encoder.
struct TextBranch {
  Parameter embedding;  // |B| x d
  EncoderStack encoder;
};

/// Causal decoder with cross-attention; embeddings are tied to the text
/// branch's embedding matrix (input and output projection).
struct Decoder {
  std::vector<DecoderLayer> layers;
  Parameter final_g, final_b;
};

/// Strided convolution (kernel = stride = r) + projection + transformer.
struct AcousticEncoder {
  Parameter conv_w, conv_b;  // (r*f) x d
  Parameter proj_w, proj_b;  // d x d
  EncoderStack stack;
};

struct CtcHeadParams {
  Parameter weight, bias;  // d x |V|, 1 x |V|
};

/// Trainable <cls> vector plus a small transformer applied per chunk.
struct SubwordEncoderParams {
  Parameter cls;  // 1 x d
  EncoderStack stack;
};

struct SpeechEmbedderParams {
  Parameter eps_lang, eps_eos;  // 1 x d each, frozen
};

struct MtModel {
  TextBranch text;
  Decoder decoder;
};

struct SpeechEncoder {
  AcousticEncoder acoustic;
  CtcHeadParams ctc;
  SubwordEncoderParams subword;
  SpeechEmbedderParams embedder;
};

/// Deterministic construction; parameter values depend only on cfg and seed.
MtModel InitMtModel(const ModelConfig& cfg, std::uint64_t seed);
/// The speech embedder copies the <lang> and </s> rows of `text`.
SpeechEncoder InitSpeechEncoder(const ModelConfig& cfg, const TextBranch& text,
                                std::uint64_t seed);

std::vector<Parameter*> Parameters(TextBranch& m);
std::vector<Parameter*> Parameters(Decoder& m);
std::vector<Parameter*> Parameters(MtModel& m);
std::vector<Parameter*> Parameters(SpeechEncoder& m);
std::vector<Parameter*> Parameters(SubwordEncoderParams& m);
void SetFrozen(std::span<Parameter* const> params, bool frozen);

Var MultiHeadAttention(Graph& g, const AttentionParams& p, Var queries, Var keys_values,
                       int heads, bool causal);
Var EncoderLayerForward(Graph& g, const EncoderLayer& layer, Var x, int heads,
                        Activation act, Var* normed_input = nullptr);

struct EncoderOutput {
  Var final;                 // after the stack's final layernorm
  std::map<int, Var> taps;   // keyed by 1-based layer
};

/// Runs the stack. For an intermediate tap l the captured value is layer
/// l+1's first layernorm applied to h_l; tap L is the final output.
EncoderOutput EncodeWithTaps(Graph& g, const EncoderStack& stack, Var e, int heads,
                             std::span<const int> taps);

/// sqrt(d) * Emb(ids) + Pos(m). kUnknownTokenId on ids outside the table.
Var EmbedText(Graph& g, const TextBranch& text, std::span<const int> ids);

/// Output length is ceil(frames / r); kInputTooShort when frames < r.
Var AcousticEncode(Graph& g, const AcousticEncoder& enc, const Tensor& frames,
                   const ModelConfig& cfg);
std::size_t AcousticOutputLength(std::size_t frames, int downsample);

/// Prepend <cls>, add positions, encode, return the <cls> row (1 x d).
Var SubwordEncode(Graph& g, const SubwordEncoderParams& p, Var chunk, int heads);

/// sqrt(d) * [eps_lang; a_sw; eps_eos] + Pos(n'). Without specials the
/// input is only scaled and position-encoded (n' = n_sw).
Var SpeechEmbed(Graph& g, const SpeechEmbedderParams& p, Var compressed,
                bool with_specials = true);

/// Next-token logits (prefix_len x |B|) given a decoder prefix and the
/// encoder output.
Var DecoderForward(Graph& g, const Decoder& dec, const TextBranch& text,
                   std::span<const int> prefix, Var encoder_out, int heads);

}  // namespace zeroswot
