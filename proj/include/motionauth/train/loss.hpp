#pragma once

#include "motionauth/nn/ops.hpp"

namespace motionauth {

template <typename S>
struct LossParts {
  nn::Var<S> total;  // traj + lambda * auth
  nn::Var<S> traj;   // batch-mean MSE of predicted trajectories
  nn::Var<S> auth;   // batch-mean BCE of genuine-class probabilities
};

// Joint objective. pred/target stack the batch row-wise with equal window
// shapes, so the mean over windows of per-window MSE equals one global mean.
template <typename S>
LossParts<S> loss_total(nn::Var<S> pred, nn::Var<S> target,
                        nn::Var<S> p_genuine, nn::Var<S> labels, S lambda) {
  LossParts<S> parts{{}, nn::mse_loss(pred, target),
                     nn::bce_loss(p_genuine, labels)};
  parts.total = nn::add_scaled(parts.traj, parts.auth, lambda);
  return parts;
}

}  // namespace motionauth
