#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "motionauth/data/windows.hpp"
#include "motionauth/eval/report.hpp"
#include "motionauth/model/bundle.hpp"
#include "motionauth/run/variants.hpp"

namespace motionauth {

struct TrainConfig {
  int epochs = 50;
  int batch_size = 32;
  float lr = 1e-4f;
  float lambda = 0.5f;
  std::uint64_t seed = 1;
};

struct EpochLog {
  int epoch = 0;
  double loss = 0;
  double loss_traj = 0;
  double loss_auth = 0;
};

// Model shapes implied by a variant at one grid cell.
TrajConfig traj_config_for(const ExperimentVariant& variant, GridCombo combo,
                           const TrajConfig& preset);
AuthConfig auth_config_for(const ExperimentVariant& variant);
std::unique_ptr<ModelBundle<float>> bundle_for(
    const ExperimentVariant& variant, GridCombo combo,
    const TrajConfig& preset, std::uint64_t init_seed);

// One batch of windows pushed through both models. auth_in is what the
// authenticator consumed: the predictions themselves, or, for the 3D-input
// baseline, each observed first half concatenated with the predicted
// remainder (total length exactly w).
struct BatchForward {
  nn::Var<float> pred;       // (N*out_len x output_dim)
  nn::Var<float> auth_in;    // (N*w x output_dim)
  nn::Var<float> p_genuine;  // (N x 1)
  nn::Var<float> target;     // constant aligned with pred
  nn::Var<float> labels;     // constant (N x 1)
};

BatchForward forward_batch(nn::Graph<float>& g, ModelBundle<float>& bundle,
                           const std::vector<const WindowPair*>& batch,
                           nn::BnMode bn_mode);

// Joint optimization of both models over shuffled mini-batches: forward the
// predictor on genuine and impostor windows alike (each reconstructs its own
// target), feed predictions to the authenticator, minimize traj + lambda *
// auth with Adam. Deterministic per seed.
std::vector<EpochLog> train_user(ModelBundle<float>& bundle,
                                 const WindowSet& train,
                                 const TrainConfig& cfg);

// Session-2 metrics: forecast MSE over genuine windows, EER over
// genuine-vs-impostor decision scores. Rejects any session-1 window.
EvalRow eval_user(ModelBundle<float>& bundle, const WindowSet& test);

void write_train_log(const std::filesystem::path& path,
                     const std::vector<EpochLog>& log);

// Single overfit step-count probe used by capacity checks: trains on one
// window (forecasting loss only) and returns the final traj loss.
double overfit_single_window(ModelBundle<float>& bundle,
                             const WindowPair& pair, int steps, float lr);

}  // namespace motionauth
