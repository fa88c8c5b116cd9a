#pragma once

#include <cstdint>
#include <vector>

#include "versemt/matrix.hpp"
#include "versemt/vocab.hpp"

namespace versemt {

// Encoder-decoder over the recurrence s_t = relu(U x_t + W s_{t-1} + b),
// with zero initial state, teacher-forced training, optional dot-product
// global attention, softmax output, and exact gradients by backpropagation
// through time.

struct ModelDims {
  std::size_t src_vocab = 0;
  std::size_t tgt_vocab = 0;
  std::size_t embed_dim = 0;
  std::size_t hidden_dim = 0;
};

struct ModelParams {
  ModelDims dims;
  bool attention = false;

  Matrix src_embed;  // src_vocab x embed_dim
  Matrix tgt_embed;  // tgt_vocab x embed_dim
  Matrix enc_u;      // hidden_dim x embed_dim
  Matrix enc_w;      // hidden_dim x hidden_dim
  Vector enc_b;      // hidden_dim
  Matrix dec_u;
  Matrix dec_w;
  Vector dec_b;
  Matrix out_v;      // tgt_vocab x out_width()
  Vector out_c;      // tgt_vocab

  // Output projection reads [state; context] when attention is on.
  std::size_t out_width() const {
    return attention ? 2 * dims.hidden_dim : dims.hidden_dim;
  }
};

// Gradient arrays, one per parameter array, same shapes.
struct Gradients {
  Matrix src_embed, tgt_embed;
  Matrix enc_u, enc_w;
  Vector enc_b;
  Matrix dec_u, dec_w;
  Vector dec_b;
  Matrix out_v;
  Vector out_c;

  static Gradients zeros_like(const ModelParams& params);
};

// Applies f(name, flat_array) to every parameter (or gradient) array, in the
// fixed order used by initialization and checkpoint serialization.
template <typename P, typename F>
void visit_arrays(P& p, F&& f) {
  f("src_embed", p.src_embed.data);
  f("tgt_embed", p.tgt_embed.data);
  f("enc_u", p.enc_u.data);
  f("enc_w", p.enc_w.data);
  f("enc_b", p.enc_b);
  f("dec_u", p.dec_u.data);
  f("dec_w", p.dec_w.data);
  f("dec_b", p.dec_b);
  f("out_v", p.out_v.data);
  f("out_c", p.out_c);
}

// Weights uniform in [-scale, scale] from a seed-keyed generator (drawn in
// visit_arrays order); biases zero.
ModelParams init_params(const ModelDims& dims, std::uint64_t seed, real scale,
                        bool attention);

// relu(enc_u x_embed + enc_w s_prev + enc_b). Throws DataError on a shape
// mismatch.
Vector encoder_step(const Vector& x_embed, const Vector& s_prev,
                    const ModelParams& params);

struct EncodeTrace {
  EncodedSentence src;
  std::vector<Vector> pre;     // pre-activations, one per source position
  std::vector<Vector> states;  // s_1..s_S
};

EncodeTrace encode_with_trace(const EncodedSentence& src, const ModelParams& params);

// s_1..s_S from s_0 = 0; one state per source index (BOS and EOS included).
std::vector<Vector> encode_sequence(const EncodedSentence& src,
                                    const ModelParams& params);

struct AttentionResult {
  Vector context;
  Vector weights;
};

// Dot-product attention: weights = softmax(dec_state . enc_states_i),
// context = sum of weighted encoder states.
AttentionResult attention_context(const Vector& dec_state,
                                  const std::vector<Vector>& enc_states);

struct ForwardTrace {
  EncodedSentence src;
  EncodedSentence tgt;
  std::vector<Vector> enc_pre;
  std::vector<Vector> enc_states;
  std::vector<Vector> dec_pre;
  std::vector<Vector> dec_states;    // d_1..d_T
  std::vector<Vector> attn_weights;  // per decoder step; empty without attention
  std::vector<Vector> contexts;
  std::vector<Vector> probs;         // one distribution per predicted position
  real loss = 0;
};

// Teacher-forced decode: d_0 is the final encoder state, step t consumes
// gold token t-1 (starting with BOS), and the loss is the mean over target
// positions of -log p(gold).
ForwardTrace decoder_forward(const EncodedSentence& tgt, const EncodeTrace& enc,
                             const ModelParams& params);

// encode_with_trace + decoder_forward.
ForwardTrace forward(const EncodedSentence& src, const EncodedSentence& tgt,
                     const ModelParams& params);

// Exact loss gradient for every parameter, including flow through attention
// and into the encoder via the final state and contexts. The relu
// subgradient at 0 is 0.
Gradients backward(const ForwardTrace& trace, const ModelParams& params);

double gradient_norm(const Gradients& grads);

// Scales all gradients by clip_norm/norm when the global L2 norm exceeds
// clip_norm (clip_norm <= 0 disables clipping), then applies
// params -= lr * grads. Throws NumericError on non-finite gradients.
void sgd_step(ModelParams& params, const Gradients& grads, real lr, real clip_norm);

// Argmax decoding (ties to the lowest index), stopping at EOS or after
// max_len emitted tokens, with EOS forced at the length limit.
EncodedSentence greedy_decode(const EncodedSentence& src, const ModelParams& params,
                              std::size_t max_len);

}  // namespace versemt
