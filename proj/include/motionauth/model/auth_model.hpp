#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "motionauth/errors.hpp"
#include "motionauth/nn/ops.hpp"
#include "motionauth/nn/param.hpp"
#include "motionauth/nn/tape.hpp"
#include "motionauth/rng.hpp"

namespace motionauth {

struct AuthConfig {
  std::vector<int> filters = {128, 256, 128};
  std::vector<int> kernels = {8, 5, 3};
  int in_channels = 3;
  int n_classes = 2;

  int max_kernel() const {
    return *std::max_element(kernels.begin(), kernels.end());
  }
  void validate() const {
    if (filters.size() != 3 || kernels.size() != 3)
      throw ConfigError("auth config: exactly three conv blocks expected");
    if (in_channels < 1) throw ConfigError("auth config: bad channel count");
  }
};

// Fully convolutional time-series classifier: three (conv -> batch norm ->
// relu) blocks, global average pooling, and a softmax pair. Global pooling
// makes one parameter set valid for any window length >= the widest kernel.
template <typename S>
class AuthModel {
 public:
  AuthModel(const AuthConfig& cfg, nn::ParamStore<S>& store, Rng& rng)
      : cfg_(cfg), store_(&store) {
    cfg_.validate();
    int ch = cfg_.in_channels;
    for (int b = 0; b < 3; ++b) {
      const std::string p = "auth.conv" + std::to_string(b + 1);
      store_->add(p + ".w", cfg_.filters[std::size_t(b)],
                  ch * cfg_.kernels[std::size_t(b)],
                  nn::Init::scaled_uniform, &rng);
      store_->add(p + ".b", 1, cfg_.filters[std::size_t(b)],
                  nn::Init::zeros);
      const std::string bn = "auth.bn" + std::to_string(b + 1);
      store_->add(bn + ".g", 1, cfg_.filters[std::size_t(b)],
                  nn::Init::ones);
      store_->add(bn + ".b", 1, cfg_.filters[std::size_t(b)],
                  nn::Init::zeros);
      store_->add(bn + ".rm", 1, cfg_.filters[std::size_t(b)],
                  nn::Init::zeros, nullptr, /*trainable=*/false);
      store_->add(bn + ".rv", 1, cfg_.filters[std::size_t(b)],
                  nn::Init::ones, nullptr, /*trainable=*/false);
      ch = cfg_.filters[std::size_t(b)];
    }
    store_->add("auth.fc.w", ch, cfg_.n_classes, nn::Init::scaled_uniform,
                &rng);
    store_->add("auth.fc.b", 1, cfg_.n_classes, nn::Init::zeros);
  }

  const AuthConfig& config() const { return cfg_; }

  // traj_rows stacks N trajectories as (N*L x in_channels); the result is an
  // (N x 2) row-stochastic matrix with columns (p_impostor, p_genuine).
  nn::Var<S> forward(nn::Graph<S>& g, nn::Var<S> traj_rows, int n_batch,
                     nn::BnMode mode) const {
    if (n_batch < 1 || traj_rows.value().rows() % n_batch != 0)
      throw ShapeError("auth forward: rows not divisible into batch");
    const Eigen::Index len = traj_rows.value().rows() / n_batch;
    if (traj_rows.value().cols() != cfg_.in_channels)
      throw ShapeError("auth forward: expected " +
                       std::to_string(cfg_.in_channels) + " channels, got " +
                       shape_str(traj_rows.value()));
    if (len < cfg_.max_kernel())
      throw ConfigError("auth forward: window length " + std::to_string(len) +
                        " is shorter than the widest kernel " +
                        std::to_string(cfg_.max_kernel()));

    // (N*L x C) -> (N*C x L): channels become rows per sample
    std::vector<nn::Var<S>> channels;
    channels.reserve(std::size_t(n_batch));
    for (int b = 0; b < n_batch; ++b)
      channels.push_back(nn::transpose(
          nn::slice_rows(traj_rows, Eigen::Index(b) * len, len)));
    nn::Var<S> x = n_batch == 1 ? channels[0] : nn::vstack(channels);

    for (int b = 0; b < 3; ++b) {
      const std::string p = "auth.conv" + std::to_string(b + 1);
      const std::string bn = "auth.bn" + std::to_string(b + 1);
      x = nn::conv1d(x, g.param(store_->at(p + ".w")),
                     g.param(store_->at(p + ".b")), n_batch,
                     cfg_.kernels[std::size_t(b)]);
      x = nn::batch_norm1d(x, g.param(store_->at(bn + ".g")),
                           g.param(store_->at(bn + ".b")),
                           store_->at(bn + ".rm"), store_->at(bn + ".rv"),
                           n_batch, mode);
      x = nn::relu(x);
    }
    nn::Var<S> pooled = nn::global_avg_pool(x, n_batch);
    nn::Var<S> logits = nn::linear(pooled, g.param(store_->at("auth.fc.w")),
                                   g.param(store_->at("auth.fc.b")));
    return nn::softmax_rows(logits);
  }

  // Continuous verification score: the genuine-class probability in eval
  // mode.
  double decision_score(const Mat<S>& traj) const {
    nn::Graph<S> g;
    nn::Var<S> probs = forward(g, g.constant(traj), 1, nn::BnMode::eval);
    return double(probs.value()(0, 1));
  }

 private:
  AuthConfig cfg_;
  nn::ParamStore<S>* store_;
};

}  // namespace motionauth
