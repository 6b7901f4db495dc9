#pragma once

#include <memory>

#include "motionauth/model/auth_model.hpp"
#include "motionauth/model/traj_model.hpp"
#include "motionauth/nn/param.hpp"
#include "motionauth/rng.hpp"

namespace motionauth {

// One enrolled user's trained state: forecaster and authenticator sharing a
// parameter store (they are optimized jointly). Fixed in memory; pass around
// by pointer.
template <typename S>
class ModelBundle {
 public:
  ModelBundle(const TrajConfig& tc, const AuthConfig& ac,
              std::uint64_t init_seed)
      : traj_config(tc),
        auth_config(ac),
        init_rng_(init_seed),
        traj(tc, store, init_rng_),
        auth(ac, store, init_rng_) {}

  ModelBundle(const ModelBundle&) = delete;
  ModelBundle& operator=(const ModelBundle&) = delete;

  TrajConfig traj_config;
  AuthConfig auth_config;
  nn::ParamStore<S> store;

 private:
  Rng init_rng_;  // one sequential init stream shared by both models

 public:
  TrajModel<S> traj;
  AuthModel<S> auth;
};

template <typename S>
std::unique_ptr<ModelBundle<S>> make_bundle(const TrajConfig& tc,
                                            const AuthConfig& ac,
                                            std::uint64_t init_seed) {
  return std::make_unique<ModelBundle<S>>(tc, ac, init_seed);
}

}  // namespace motionauth
