#pragma once

#include <string>
#include <vector>

#include "motionauth/errors.hpp"
#include "motionauth/model/encodings.hpp"
#include "motionauth/nn/ops.hpp"
#include "motionauth/nn/param.hpp"
#include "motionauth/nn/tape.hpp"
#include "motionauth/rng.hpp"

namespace motionauth {

// Which global timestamps the decoder-side positional/temporal encodings
// index. The decoder consumes the observed 2D window, so input_window is the
// default; output_window maps decoder positions linearly onto [start,
// start+w) instead.
enum class DecTimeIndexing { input_window, output_window };

struct TrajConfig {
  int d_model = 512;
  int n_head = 8;
  int d_ffn = 2048;
  int n_enc_layers = 3;
  int n_dec_layers = 1;
  int w = 0;
  int w_in = 0;
  int input_features = 0;  // per-timestep features (2*n_in, or 3)
  int output_dim = 3;
  int t_total = 135;
  // 3D-input forecasting mode: the decoder sees the trailing w_in/2 of the
  // observed track plus zero-initialized future slots and predicts only the
  // region beyond the overlap.
  bool li_mode = false;
  DecTimeIndexing dec_time = DecTimeIndexing::input_window;

  int d_k() const { return d_model / n_head; }
  int li_overlap() const { return w_in / 2; }
  int dec_len() const { return li_mode ? li_overlap() + (w - w_in) : w_in; }
  int out_len() const { return li_mode ? w - li_overlap() : w; }

  void validate() const {
    if (w_in < 1 || w <= w_in)
      throw ConfigError("traj config: need 1 <= w_in < w, got w_in=" +
                        std::to_string(w_in) + " w=" + std::to_string(w));
    if (n_head < 1 || d_model % n_head != 0)
      throw ConfigError("traj config: d_model " + std::to_string(d_model) +
                        " is not divisible by n_head " +
                        std::to_string(n_head));
    if (input_features < 1)
      throw ConfigError("traj config: input_features must be positive");
    if (t_total < w)
      throw ConfigError("traj config: w exceeds the series length");
  }
};

// Published-scale and CI-scale hyperparameters. Window sizes and feature
// widths are filled in by the caller.
inline TrajConfig paper_traj_preset() {
  TrajConfig c;
  c.d_model = 512;
  c.n_head = 8;
  c.d_ffn = 2048;
  return c;
}

inline TrajConfig desk_traj_preset() {
  TrajConfig c;
  c.d_model = 64;
  c.n_head = 4;
  c.d_ffn = 128;
  return c;
}

// Closed-form trainable-parameter count for a config.
inline long traj_param_count(const TrajConfig& c) {
  const long d = c.d_model, f = c.d_ffn;
  const long embed = (long(c.input_features) * d + d) * 2;  // enc + dec
  const long attn = 4 * (d * d + d);
  const long ffn = d * f + f + f * d + d;
  const long ln = 2 * d;
  const long enc_layer = attn + ffn + 2 * ln;
  const long dec_layer = 2 * attn + ffn + 3 * ln;
  const long head =
      long(c.dec_len()) * d * long(c.out_len()) * c.output_dim +
      long(c.out_len()) * c.output_dim;
  return embed + c.n_enc_layers * enc_layer + c.n_dec_layers * dec_layer +
         head;
}

// Captured attention weights for inspection (per block, per head).
template <typename S>
struct TrajTrace {
  std::vector<Mat<S>> dec_self;
  std::vector<Mat<S>> dec_cross;
  std::vector<std::vector<Mat<S>>> enc_self;  // per layer
};

// Encoder-decoder forecaster. Batched forward works on block-row stacks: N
// windows of the same shape are processed as one (N*L x d) matrix per stage.
template <typename S>
class TrajModel {
 public:
  TrajModel(const TrajConfig& cfg, nn::ParamStore<S>& store, Rng& rng)
      : cfg_(cfg), store_(&store) {
    cfg_.validate();
    add_linear("traj.enc_embed", cfg_.input_features, cfg_.d_model, rng);
    add_linear("traj.dec_embed", cfg_.input_features, cfg_.d_model, rng);
    for (int l = 0; l < cfg_.n_enc_layers; ++l) {
      const std::string p = "traj.enc" + std::to_string(l);
      add_attn(p + ".attn", rng);
      add_norm(p + ".ln1");
      add_ffn(p + ".ffn", rng);
      add_norm(p + ".ln2");
    }
    for (int l = 0; l < cfg_.n_dec_layers; ++l) {
      const std::string p = "traj.dec" + std::to_string(l);
      add_attn(p + ".self", rng);
      add_norm(p + ".ln1");
      add_attn(p + ".cross", rng);
      add_norm(p + ".ln2");
      add_ffn(p + ".ffn", rng);
      add_norm(p + ".ln3");
    }
    add_linear("traj.head", cfg_.dec_len() * cfg_.d_model,
               cfg_.out_len() * cfg_.output_dim, rng);
  }

  const TrajConfig& config() const { return cfg_; }

  // Learned per-timestep projection into model space.
  nn::Var<S> embed_input(nn::Graph<S>& g, nn::Var<S> x, bool decoder) const {
    const char* name = decoder ? "traj.dec_embed" : "traj.enc_embed";
    if (x.value().cols() != cfg_.input_features)
      throw ShapeError(std::string("embed_input: expected ") +
                       std::to_string(cfg_.input_features) +
                       " features, got " + shape_str(x.value()));
    return nn::linear(x, g.param(store_->at(std::string(name) + ".w")),
                      g.param(store_->at(std::string(name) + ".b")));
  }

  // Positional + temporal encoding constant for N stacked windows.
  Mat<S> encoding_table(const std::vector<int>& starts, int length,
                        bool output_indexed) const {
    const Mat<S> pe = positional_encoding<S>(length, cfg_.d_model);
    Mat<S> table(Eigen::Index(starts.size()) * length, cfg_.d_model);
    for (std::size_t n = 0; n < starts.size(); ++n) {
      auto block = table.middleRows(Eigen::Index(n) * length, length);
      block = pe;
      for (Eigen::Index j = 0; j < length; ++j) {
        double t = double(starts[n]) + double(j);
        if (output_indexed && length > 1)
          t = double(starts[n]) +
              double(j) * double(cfg_.w - 1) / double(length - 1);
        block.row(j).array() +=
            S(temporal_encoding_value(t, double(cfg_.t_total)));
      }
    }
    return table;
  }

  // Three post-norm encoder layers over the summed encodings.
  nn::Var<S> encode(nn::Graph<S>& g, nn::Var<S> x, int n_blocks,
                    TrajTrace<S>* trace = nullptr) const {
    for (int l = 0; l < cfg_.n_enc_layers; ++l) {
      const std::string p = "traj.enc" + std::to_string(l);
      std::vector<Mat<S>>* probs = nullptr;
      if (trace) {
        trace->enc_self.emplace_back();
        probs = &trace->enc_self.back();
      }
      nn::Var<S> a = nn::multi_head_attention(
          x, x, x, attn_vars(g, p + ".attn"), n_blocks, cfg_.n_head,
          /*causal=*/false, probs);
      x = norm(g, p + ".ln1", nn::add(x, a));
      x = norm(g, p + ".ln2", nn::add(x, ffn(g, p + ".ffn", x)));
    }
    return x;
  }

  // One decoder layer (masked self-attention, cross-attention, FFN) plus the
  // flatten->linear->reshape head emitting the full output window.
  nn::Var<S> decode(nn::Graph<S>& g, nn::Var<S> dec_in, nn::Var<S> enc_out,
                    int n_blocks, TrajTrace<S>* trace = nullptr) const {
    nn::Var<S> x = dec_in;
    for (int l = 0; l < cfg_.n_dec_layers; ++l) {
      const std::string p = "traj.dec" + std::to_string(l);
      nn::Var<S> a = nn::multi_head_attention(
          x, x, x, attn_vars(g, p + ".self"), n_blocks, cfg_.n_head,
          /*causal=*/true, trace ? &trace->dec_self : nullptr);
      x = norm(g, p + ".ln1", nn::add(x, a));
      nn::Var<S> c = nn::multi_head_attention(
          x, enc_out, enc_out, attn_vars(g, p + ".cross"), n_blocks,
          cfg_.n_head, /*causal=*/false,
          trace ? &trace->dec_cross : nullptr);
      x = norm(g, p + ".ln2", nn::add(x, c));
      x = norm(g, p + ".ln3", nn::add(x, ffn(g, p + ".ffn", x)));
    }
    nn::Var<S> flat =
        nn::reshape(x, n_blocks, Eigen::Index(cfg_.dec_len()) * cfg_.d_model);
    nn::Var<S> out = nn::linear(flat, g.param(store_->at("traj.head.w")),
                                g.param(store_->at("traj.head.b")));
    return nn::reshape(out, Eigen::Index(n_blocks) * cfg_.out_len(),
                       cfg_.output_dim);
  }

  // x_all stacks N input windows as (N*w_in x input_features); the result
  // stacks N predictions as (N*out_len x output_dim).
  nn::Var<S> forward(nn::Graph<S>& g, nn::Var<S> x_all,
                     const std::vector<int>& starts,
                     TrajTrace<S>* trace = nullptr) const {
    const int n = int(starts.size());
    if (x_all.value().rows() != Eigen::Index(n) * cfg_.w_in)
      throw ShapeError("traj forward: expected " + std::to_string(n) +
                       " windows of " + std::to_string(cfg_.w_in) +
                       " rows, got " + shape_str(x_all.value()));
    nn::Var<S> enc_in =
        nn::add(embed_input(g, x_all, /*decoder=*/false),
                g.constant(encoding_table(starts, cfg_.w_in, false)));
    nn::Var<S> enc_out = encode(g, enc_in, n, trace);

    nn::Var<S> dec_raw = x_all;
    std::vector<int> dec_starts = starts;
    if (cfg_.li_mode) {
      // Trailing overlap plus zero-initialized future slots per window.
      const int ov = cfg_.li_overlap();
      nn::Var<S> zeros = g.constant(
          Mat<S>(Mat<S>::Zero(cfg_.w - cfg_.w_in, cfg_.input_features)));
      std::vector<nn::Var<S>> parts;
      for (int b = 0; b < n; ++b) {
        parts.push_back(nn::slice_rows(
            x_all, Eigen::Index(b) * cfg_.w_in + (cfg_.w_in - ov), ov));
        parts.push_back(zeros);
      }
      dec_raw = nn::vstack(parts);
      for (auto& s : dec_starts) s += cfg_.w_in - ov;
    }
    nn::Var<S> dec_in = nn::add(
        embed_input(g, dec_raw, /*decoder=*/true),
        g.constant(encoding_table(
            dec_starts, cfg_.dec_len(),
            cfg_.dec_time == DecTimeIndexing::output_window)));
    return decode(g, dec_in, enc_out, n, trace);
  }

  // Single-window inference; returns the (out_len x output_dim) prediction.
  Mat<S> predict(const Mat<S>& input, int start) const {
    nn::Graph<S> g;
    nn::Var<S> pred = forward(g, g.constant(input), {start});
    return pred.value();
  }

 private:
  void add_linear(const std::string& name, int rows, int cols, Rng& rng) {
    store_->add(name + ".w", rows, cols, nn::Init::scaled_uniform, &rng);
    store_->add(name + ".b", 1, cols, nn::Init::zeros);
  }
  void add_attn(const std::string& p, Rng& rng) {
    for (const char* part : {".wq", ".wk", ".wv", ".wo"})
      store_->add(p + part, cfg_.d_model, cfg_.d_model,
                  nn::Init::scaled_uniform, &rng);
    for (const char* part : {".bq", ".bk", ".bv", ".bo"})
      store_->add(p + part, 1, cfg_.d_model, nn::Init::zeros);
  }
  void add_ffn(const std::string& p, Rng& rng) {
    store_->add(p + ".w1", cfg_.d_model, cfg_.d_ffn,
                nn::Init::scaled_uniform, &rng);
    store_->add(p + ".b1", 1, cfg_.d_ffn, nn::Init::zeros);
    store_->add(p + ".w2", cfg_.d_ffn, cfg_.d_model,
                nn::Init::scaled_uniform, &rng);
    store_->add(p + ".b2", 1, cfg_.d_model, nn::Init::zeros);
  }
  void add_norm(const std::string& p) {
    store_->add(p + ".g", 1, cfg_.d_model, nn::Init::ones);
    store_->add(p + ".b", 1, cfg_.d_model, nn::Init::zeros);
  }

  nn::AttnVars<S> attn_vars(nn::Graph<S>& g, const std::string& p) const {
    return {g.param(store_->at(p + ".wq")), g.param(store_->at(p + ".bq")),
            g.param(store_->at(p + ".wk")), g.param(store_->at(p + ".bk")),
            g.param(store_->at(p + ".wv")), g.param(store_->at(p + ".bv")),
            g.param(store_->at(p + ".wo")), g.param(store_->at(p + ".bo"))};
  }
  nn::Var<S> ffn(nn::Graph<S>& g, const std::string& p, nn::Var<S> x) const {
    nn::Var<S> h = nn::relu(nn::linear(x, g.param(store_->at(p + ".w1")),
                                       g.param(store_->at(p + ".b1"))));
    return nn::linear(h, g.param(store_->at(p + ".w2")),
                      g.param(store_->at(p + ".b2")));
  }
  nn::Var<S> norm(nn::Graph<S>& g, const std::string& p, nn::Var<S> x) const {
    return nn::layer_norm(x, g.param(store_->at(p + ".g")),
                          g.param(store_->at(p + ".b")));
  }

  TrajConfig cfg_;
  nn::ParamStore<S>* store_;
};

}  // namespace motionauth
