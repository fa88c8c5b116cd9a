#include "versemt/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "versemt/errors.hpp"
#include "versemt/kernels.hpp"
#include "versemt/rng.hpp"

namespace versemt {

namespace {

void check_index(std::uint32_t index, std::size_t vocab, const char* side) {
  if (index >= vocab) {
    throw DataError(std::string(side) + " token index " + std::to_string(index) +
                    " out of range for vocabulary of size " + std::to_string(vocab));
  }
}

void check_sentence(const EncodedSentence& sent, std::size_t vocab, const char* side) {
  if (sent.size() < 2) {
    throw DataError(std::string(side) + " sentence must contain at least BOS and EOS");
  }
  for (std::uint32_t index : sent) check_index(index, vocab, side);
}

Vector relu(const Vector& pre) {
  Vector out(pre.size());
  for (std::size_t i = 0; i < pre.size(); ++i) out[i] = pre[i] > 0 ? pre[i] : 0;
  return out;
}

// pre = u x + w s_prev + b for one recurrence step.
Vector step_pre(const Matrix& u, const Matrix& w, const Vector& b,
                const real* x_embed, const Vector& s_prev) {
  Vector pre = b;
  kernels::matvec_add(u, x_embed, pre.data());
  kernels::matvec_add(w, s_prev.data(), pre.data());
  return pre;
}

}  // namespace

Gradients Gradients::zeros_like(const ModelParams& params) {
  Gradients g;
  g.src_embed = Matrix(params.src_embed.rows, params.src_embed.cols);
  g.tgt_embed = Matrix(params.tgt_embed.rows, params.tgt_embed.cols);
  g.enc_u = Matrix(params.enc_u.rows, params.enc_u.cols);
  g.enc_w = Matrix(params.enc_w.rows, params.enc_w.cols);
  g.enc_b = Vector(params.enc_b.size(), 0);
  g.dec_u = Matrix(params.dec_u.rows, params.dec_u.cols);
  g.dec_w = Matrix(params.dec_w.rows, params.dec_w.cols);
  g.dec_b = Vector(params.dec_b.size(), 0);
  g.out_v = Matrix(params.out_v.rows, params.out_v.cols);
  g.out_c = Vector(params.out_c.size(), 0);
  return g;
}

ModelParams init_params(const ModelDims& dims, std::uint64_t seed, real scale,
                        bool attention) {
  if (dims.src_vocab == 0 || dims.tgt_vocab == 0 || dims.embed_dim == 0 ||
      dims.hidden_dim == 0) {
    throw DataError("model dimensions must all be positive");
  }
  ModelParams p;
  p.dims = dims;
  p.attention = attention;
  const std::size_t h = dims.hidden_dim;
  p.src_embed = Matrix(dims.src_vocab, dims.embed_dim);
  p.tgt_embed = Matrix(dims.tgt_vocab, dims.embed_dim);
  p.enc_u = Matrix(h, dims.embed_dim);
  p.enc_w = Matrix(h, h);
  p.enc_b = Vector(h, 0);
  p.dec_u = Matrix(h, dims.embed_dim);
  p.dec_w = Matrix(h, h);
  p.dec_b = Vector(h, 0);
  p.out_v = Matrix(dims.tgt_vocab, p.out_width());
  p.out_c = Vector(dims.tgt_vocab, 0);

  Rng rng(seed);
  visit_arrays(p, [&](const char* name, Vector& values) {
    // Biases stay zero; weights are filled in declaration order.
    if (std::strcmp(name, "enc_b") == 0 || std::strcmp(name, "dec_b") == 0 ||
        std::strcmp(name, "out_c") == 0) {
      return;
    }
    for (real& v : values) v = static_cast<real>(rng.symmetric(scale));
  });
  return p;
}

Vector encoder_step(const Vector& x_embed, const Vector& s_prev,
                    const ModelParams& params) {
  if (x_embed.size() != params.dims.embed_dim) {
    throw DataError("encoder_step: embedding size " + std::to_string(x_embed.size()) +
                    " does not match embed_dim " + std::to_string(params.dims.embed_dim));
  }
  if (s_prev.size() != params.dims.hidden_dim) {
    throw DataError("encoder_step: state size " + std::to_string(s_prev.size()) +
                    " does not match hidden_dim " + std::to_string(params.dims.hidden_dim));
  }
  return relu(step_pre(params.enc_u, params.enc_w, params.enc_b, x_embed.data(), s_prev));
}

EncodeTrace encode_with_trace(const EncodedSentence& src, const ModelParams& params) {
  check_sentence(src, params.dims.src_vocab, "source");
  EncodeTrace trace;
  trace.src = src;
  trace.pre.reserve(src.size());
  trace.states.reserve(src.size());
  Vector state(params.dims.hidden_dim, 0);
  for (std::uint32_t index : src) {
    Vector pre = step_pre(params.enc_u, params.enc_w, params.enc_b,
                          params.src_embed.row(index), state);
    state = relu(pre);
    trace.pre.push_back(std::move(pre));
    trace.states.push_back(state);
  }
  return trace;
}

std::vector<Vector> encode_sequence(const EncodedSentence& src, const ModelParams& params) {
  return encode_with_trace(src, params).states;
}

AttentionResult attention_context(const Vector& dec_state,
                                  const std::vector<Vector>& enc_states) {
  if (enc_states.empty()) {
    throw DataError("attention over an empty encoder state sequence");
  }
  AttentionResult result;
  result.weights.resize(enc_states.size());
  for (std::size_t i = 0; i < enc_states.size(); ++i) {
    real dot = 0;
    for (std::size_t j = 0; j < dec_state.size(); ++j) dot += dec_state[j] * enc_states[i][j];
    result.weights[i] = dot;
  }
  kernels::softmax_inplace(result.weights);
  result.context.assign(dec_state.size(), 0);
  for (std::size_t i = 0; i < enc_states.size(); ++i) {
    const real w = result.weights[i];
    for (std::size_t j = 0; j < dec_state.size(); ++j) {
      result.context[j] += w * enc_states[i][j];
    }
  }
  return result;
}

ForwardTrace decoder_forward(const EncodedSentence& tgt, const EncodeTrace& enc,
                             const ModelParams& params) {
  check_sentence(tgt, params.dims.tgt_vocab, "target");
  if (enc.states.empty()) throw DataError("decoder_forward: empty encoder trace");

  ForwardTrace trace;
  trace.src = enc.src;
  trace.tgt = tgt;
  trace.enc_pre = enc.pre;
  trace.enc_states = enc.states;

  const std::size_t h = params.dims.hidden_dim;
  const std::size_t steps = tgt.size() - 1;  // predicted positions tgt[1..]
  trace.dec_pre.reserve(steps);
  trace.dec_states.reserve(steps);
  trace.probs.reserve(steps);

  Vector state = enc.states.back();  // d_0
  double loss_sum = 0;
  for (std::size_t t = 1; t <= steps; ++t) {
    const std::uint32_t input = tgt[t - 1];
    const std::uint32_t gold = tgt[t];
    Vector pre = step_pre(params.dec_u, params.dec_w, params.dec_b,
                          params.tgt_embed.row(input), state);
    state = relu(pre);
    trace.dec_pre.push_back(std::move(pre));
    trace.dec_states.push_back(state);

    Vector logits = params.out_c;
    if (params.attention) {
      AttentionResult attn = attention_context(state, enc.states);
      Vector joint(2 * h);
      std::copy(state.begin(), state.end(), joint.begin());
      std::copy(attn.context.begin(), attn.context.end(), joint.begin() + h);
      kernels::matvec_add(params.out_v, joint.data(), logits.data());
      trace.attn_weights.push_back(std::move(attn.weights));
      trace.contexts.push_back(std::move(attn.context));
    } else {
      kernels::matvec_add(params.out_v, state.data(), logits.data());
    }

    // Softmax and -log p(gold) from one shifted-exponential pass.
    const real mx = *std::max_element(logits.begin(), logits.end());
    double total = 0;
    Vector probs(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) {
      probs[k] = std::exp(logits[k] - mx);
      total += probs[k];
    }
    for (real& v : probs) v = static_cast<real>(v / total);
    loss_sum += std::log(total) - static_cast<double>(logits[gold] - mx);
    trace.probs.push_back(std::move(probs));
  }
  trace.loss = static_cast<real>(loss_sum / static_cast<double>(steps));
  return trace;
}

ForwardTrace forward(const EncodedSentence& src, const EncodedSentence& tgt,
                     const ModelParams& params) {
  return decoder_forward(tgt, encode_with_trace(src, params), params);
}

Gradients backward(const ForwardTrace& trace, const ModelParams& params) {
  Gradients grads = Gradients::zeros_like(params);
  const std::size_t h = params.dims.hidden_dim;
  const std::size_t steps = trace.dec_states.size();
  const std::size_t enc_len = trace.enc_states.size();
  const real inv_steps = static_cast<real>(1.0 / static_cast<double>(steps));

  // Encoder states gather gradient from attention at every decoder step and
  // from the recurrence; collected here, resolved after the decoder pass.
  std::vector<Vector> d_enc_state(enc_len, Vector(h, 0));

  Vector d_state_rec(h, 0);  // gradient flowing into d_t from step t+1
  for (std::size_t t = steps; t-- > 0;) {
    const std::uint32_t gold = trace.tgt[t + 1];
    const std::uint32_t input = trace.tgt[t];
    const Vector& probs = trace.probs[t];
    const Vector& state = trace.dec_states[t];

    Vector d_logits(probs.size());
    for (std::size_t k = 0; k < probs.size(); ++k) d_logits[k] = probs[k] * inv_steps;
    d_logits[gold] -= inv_steps;

    Vector d_state = d_state_rec;
    if (params.attention) {
      const Vector& weights = trace.attn_weights[t];
      const Vector& context = trace.contexts[t];
      Vector joint(2 * h);
      std::copy(state.begin(), state.end(), joint.begin());
      std::copy(context.begin(), context.end(), joint.begin() + h);
      kernels::outer_add(grads.out_v, d_logits.data(), joint.data());

      Vector d_joint(2 * h, 0);
      kernels::matvec_t_add(params.out_v, d_logits.data(), d_joint.data());
      for (std::size_t j = 0; j < h; ++j) d_state[j] += d_joint[j];
      const real* d_context = d_joint.data() + h;

      // context = sum_i w_i s_i; softmax backward for the scores.
      Vector d_weights(enc_len);
      real weighted = 0;
      for (std::size_t i = 0; i < enc_len; ++i) {
        real dot = 0;
        for (std::size_t j = 0; j < h; ++j) dot += d_context[j] * trace.enc_states[i][j];
        d_weights[i] = dot;
        weighted += weights[i] * dot;
        for (std::size_t j = 0; j < h; ++j) {
          d_enc_state[i][j] += weights[i] * d_context[j];
        }
      }
      for (std::size_t i = 0; i < enc_len; ++i) {
        const real d_score = weights[i] * (d_weights[i] - weighted);
        for (std::size_t j = 0; j < h; ++j) {
          d_state[j] += d_score * trace.enc_states[i][j];
          d_enc_state[i][j] += d_score * state[j];
        }
      }
    } else {
      kernels::outer_add(grads.out_v, d_logits.data(), state.data());
      kernels::matvec_t_add(params.out_v, d_logits.data(), d_state.data());
    }
    for (std::size_t k = 0; k < d_logits.size(); ++k) grads.out_c[k] += d_logits[k];

    Vector d_pre(h);
    for (std::size_t j = 0; j < h; ++j) {
      d_pre[j] = trace.dec_pre[t][j] > 0 ? d_state[j] : 0;
    }
    const Vector& prev_state = t == 0 ? trace.enc_states.back() : trace.dec_states[t - 1];
    kernels::outer_add(grads.dec_u, d_pre.data(), params.tgt_embed.row(input));
    kernels::outer_add(grads.dec_w, d_pre.data(), prev_state.data());
    for (std::size_t j = 0; j < h; ++j) grads.dec_b[j] += d_pre[j];
    kernels::matvec_t_add(params.dec_u, d_pre.data(), grads.tgt_embed.row(input));

    d_state_rec.assign(h, 0);
    kernels::matvec_t_add(params.dec_w, d_pre.data(), d_state_rec.data());
  }
  // d_0 is the final encoder state.
  for (std::size_t j = 0; j < h; ++j) d_enc_state[enc_len - 1][j] += d_state_rec[j];

  Vector d_enc_rec(h, 0);
  for (std::size_t t = enc_len; t-- > 0;) {
    const std::uint32_t input = trace.src[t];
    Vector d_state = d_enc_state[t];
    for (std::size_t j = 0; j < h; ++j) d_state[j] += d_enc_rec[j];

    Vector d_pre(h);
    for (std::size_t j = 0; j < h; ++j) {
      d_pre[j] = trace.enc_pre[t][j] > 0 ? d_state[j] : 0;
    }
    kernels::outer_add(grads.enc_u, d_pre.data(), params.src_embed.row(input));
    if (t > 0) {
      kernels::outer_add(grads.enc_w, d_pre.data(), trace.enc_states[t - 1].data());
    }
    // s_0 = 0, so the t = 0 outer product vanishes and s_0 takes no gradient.
    for (std::size_t j = 0; j < h; ++j) grads.enc_b[j] += d_pre[j];
    kernels::matvec_t_add(params.enc_u, d_pre.data(), grads.src_embed.row(input));

    d_enc_rec.assign(h, 0);
    kernels::matvec_t_add(params.enc_w, d_pre.data(), d_enc_rec.data());
  }
  return grads;
}

double gradient_norm(const Gradients& grads) {
  double sum = 0;
  visit_arrays(grads, [&](const char*, const Vector& values) {
    for (real v : values) sum += static_cast<double>(v) * static_cast<double>(v);
  });
  return std::sqrt(sum);
}

void sgd_step(ModelParams& params, const Gradients& grads, real lr, real clip_norm) {
  const double norm = gradient_norm(grads);
  if (!std::isfinite(norm)) {
    throw NumericError("non-finite gradient norm in sgd_step");
  }
  real scale = 1;
  if (clip_norm > 0 && norm > static_cast<double>(clip_norm)) {
    scale = static_cast<real>(static_cast<double>(clip_norm) / norm);
  }
  const real step = lr * scale;
  auto descend = [step](Vector& values, const Vector& g) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= step * g[i];
  };
  descend(params.src_embed.data, grads.src_embed.data);
  descend(params.tgt_embed.data, grads.tgt_embed.data);
  descend(params.enc_u.data, grads.enc_u.data);
  descend(params.enc_w.data, grads.enc_w.data);
  descend(params.enc_b, grads.enc_b);
  descend(params.dec_u.data, grads.dec_u.data);
  descend(params.dec_w.data, grads.dec_w.data);
  descend(params.dec_b, grads.dec_b);
  descend(params.out_v.data, grads.out_v.data);
  descend(params.out_c, grads.out_c);
}

EncodedSentence greedy_decode(const EncodedSentence& src, const ModelParams& params,
                              std::size_t max_len) {
  EncodeTrace enc = encode_with_trace(src, params);
  const std::size_t h = params.dims.hidden_dim;

  EncodedSentence out;
  out.push_back(Vocabulary::kBos);
  Vector state = enc.states.back();
  std::uint32_t prev = Vocabulary::kBos;
  for (std::size_t emitted = 0; emitted < max_len; ++emitted) {
    state = relu(step_pre(params.dec_u, params.dec_w, params.dec_b,
                          params.tgt_embed.row(prev), state));
    Vector logits = params.out_c;
    if (params.attention) {
      AttentionResult attn = attention_context(state, enc.states);
      Vector joint(2 * h);
      std::copy(state.begin(), state.end(), joint.begin());
      std::copy(attn.context.begin(), attn.context.end(), joint.begin() + h);
      kernels::matvec_add(params.out_v, joint.data(), logits.data());
    } else {
      kernels::matvec_add(params.out_v, state.data(), logits.data());
    }
    std::uint32_t best = 0;
    for (std::size_t k = 1; k < logits.size(); ++k) {
      if (logits[k] > logits[best]) best = static_cast<std::uint32_t>(k);
    }
    out.push_back(best);
    if (best == Vocabulary::kEos) return out;
    prev = best;
  }
  out.push_back(Vocabulary::kEos);
  return out;
}

}  // namespace versemt
