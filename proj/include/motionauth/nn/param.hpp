#pragma once

#include <cmath>
#include <deque>
#include <string>
#include <unordered_map>

#include "motionauth/errors.hpp"
#include "motionauth/mat.hpp"
#include "motionauth/rng.hpp"

namespace motionauth::nn {

enum class Init { zeros, ones, scaled_uniform };

template <typename S>
struct Param {
  std::string name;
  Mat<S> value;
  Mat<S> grad;
  Mat<S> adam_m;
  Mat<S> adam_v;
  long step_count = 0;
  bool trainable = true;  // false for batch-norm running stats
};

// Ordered, named parameter registry. Creation order is deterministic for a
// given model config, which makes checkpoints and Adam sweeps byte-stable.
template <typename S>
class ParamStore {
 public:
  Param<S>& add(const std::string& name, Eigen::Index rows, Eigen::Index cols,
                Init init, Rng* rng = nullptr, bool trainable = true) {
    if (index_.count(name))
      throw ConfigError("param '" + name + "' already exists");
    params_.push_back(Param<S>{name, Mat<S>(rows, cols),
                               Mat<S>::Zero(rows, cols),
                               Mat<S>::Zero(rows, cols),
                               Mat<S>::Zero(rows, cols), 0, trainable});
    Param<S>& p = params_.back();
    switch (init) {
      case Init::zeros:
        p.value.setZero();
        break;
      case Init::ones:
        p.value.setOnes();
        break;
      case Init::scaled_uniform: {
        if (!rng) throw ConfigError("param '" + name + "': init needs rng");
        const double a = 1.0 / std::sqrt(double(rows));  // fan-in = rows
        for (Eigen::Index i = 0; i < p.value.rows(); ++i)
          for (Eigen::Index j = 0; j < p.value.cols(); ++j)
            p.value(i, j) = S(rng->uniform(-a, a));
        break;
      }
    }
    index_[name] = params_.size() - 1;
    return p;
  }

  Param<S>& at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown param '" + name + "'");
    return params_[it->second];
  }

  bool has(const std::string& name) const { return index_.count(name) > 0; }

  void zero_grads() {
    for (auto& p : params_) p.grad.setZero();
  }

  std::size_t size() const { return params_.size(); }
  Param<S>& operator[](std::size_t i) { return params_[i]; }
  const Param<S>& operator[](std::size_t i) const { return params_[i]; }

  long total_values() const {
    long n = 0;
    for (const auto& p : params_)
      if (p.trainable) n += long(p.value.size());
    return n;
  }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::deque<Param<S>> params_;  // deque: stable references across add()
  std::unordered_map<std::string, std::size_t> index_;
};

template <typename S>
struct AdamConfig {
  S lr = S(1e-4);
  S beta1 = S(0.9);
  S beta2 = S(0.999);
  S eps = S(1e-8);
};

// Standard Adam with bias correction over every trainable param in the store.
// Gradients are left untouched; callers zero them explicitly.
template <typename S>
void adam_step(ParamStore<S>& store, const AdamConfig<S>& cfg) {
  for (auto& p : store) {
    if (!p.trainable) continue;
    if (!all_finite(p.grad))
      throw NumericalError("adam_step: non-finite gradient in '" + p.name +
                           "'");
    p.step_count += 1;
    const S b1 = cfg.beta1, b2 = cfg.beta2;
    p.adam_m = b1 * p.adam_m + (S(1) - b1) * p.grad;
    p.adam_v = b2 * p.adam_v + (S(1) - b2) * p.grad.cwiseProduct(p.grad);
    const S c1 = S(1) - S(std::pow(double(b1), double(p.step_count)));
    const S c2 = S(1) - S(std::pow(double(b2), double(p.step_count)));
    p.value.array() -= cfg.lr * (p.adam_m.array() / c1) /
                       ((p.adam_v.array() / c2).sqrt() + cfg.eps);
  }
}

}  // namespace motionauth::nn
