#include "motionauth/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "motionauth/errors.hpp"
#include "motionauth/rng.hpp"
#include "motionauth/train/loss.hpp"

namespace motionauth {

using nn::BnMode;
using nn::Graph;
using nn::Var;

TrajConfig traj_config_for(const ExperimentVariant& variant, GridCombo combo,
                           const TrajConfig& preset) {
  TrajConfig cfg = preset;
  cfg.w = combo.w;
  cfg.w_in = combo.w_in;
  cfg.input_features = variant.input_features();
  cfg.output_dim = variant.output_dim();
  cfg.li_mode = variant.is_li_baseline();
  cfg.validate();
  return cfg;
}

AuthConfig auth_config_for(const ExperimentVariant& variant) {
  AuthConfig cfg;
  cfg.in_channels = variant.output_dim();
  return cfg;
}

std::unique_ptr<ModelBundle<float>> bundle_for(
    const ExperimentVariant& variant, GridCombo combo,
    const TrajConfig& preset, std::uint64_t init_seed) {
  return make_bundle<float>(traj_config_for(variant, combo, preset),
                            auth_config_for(variant), init_seed);
}

BatchForward forward_batch(Graph<float>& g, ModelBundle<float>& bundle,
                           const std::vector<const WindowPair*>& batch,
                           BnMode bn_mode) {
  const TrajConfig& cfg = bundle.traj_config;
  const int n = int(batch.size());
  MatF x(Eigen::Index(n) * cfg.w_in, cfg.input_features);
  MatF target(Eigen::Index(n) * cfg.out_len(), cfg.output_dim);
  MatF labels(n, 1);
  std::vector<int> starts(static_cast<std::size_t>(n));
  const int ov = cfg.li_mode ? cfg.li_overlap() : 0;
  for (int i = 0; i < n; ++i) {
    const WindowPair& p = *batch[std::size_t(i)];
    x.middleRows(Eigen::Index(i) * cfg.w_in, cfg.w_in) = p.input;
    // The prediction covers [start+ov, start+w); slice the target to match.
    target.middleRows(Eigen::Index(i) * cfg.out_len(), cfg.out_len()) =
        p.target.middleRows(ov, cfg.out_len());
    labels(i, 0) = float(p.label);
    starts[std::size_t(i)] = p.start;
  }

  BatchForward out;
  out.target = g.constant(std::move(target));
  out.labels = g.constant(std::move(labels));
  out.pred = bundle.traj.forward(g, g.constant(std::move(x)), starts);

  out.auth_in = out.pred;
  if (cfg.li_mode) {
    // Authentication input: first half of the observed 3D segment
    // concatenated with the predicted remainder, length exactly w.
    std::vector<Var<float>> parts;
    parts.reserve(2 * std::size_t(n));
    for (int i = 0; i < n; ++i) {
      const WindowPair& p = *batch[std::size_t(i)];
      parts.push_back(g.constant(MatF(p.input.topRows(ov))));
      parts.push_back(nn::slice_rows(
          out.pred, Eigen::Index(i) * cfg.out_len(), cfg.out_len()));
    }
    out.auth_in = nn::vstack(parts);
  }
  Var<float> probs = bundle.auth.forward(g, out.auth_in, n, bn_mode);
  out.p_genuine = nn::slice_cols(probs, 1, 1);
  return out;
}

namespace {

std::vector<const WindowPair*> all_pairs(const WindowSet& set) {
  std::vector<const WindowPair*> out;
  out.reserve(set.total());
  for (const auto& p : set.genuine) out.push_back(&p);
  for (const auto& p : set.impostor) out.push_back(&p);
  return out;
}

}  // namespace

std::vector<EpochLog> train_user(ModelBundle<float>& bundle,
                                 const WindowSet& train,
                                 const TrainConfig& cfg) {
  if (train.genuine.size() != train.impostor.size())
    throw ConfigError("train_user: window set is not balanced (" +
                      std::to_string(train.genuine.size()) + " genuine vs " +
                      std::to_string(train.impostor.size()) + " impostor)");
  if (train.total() == 0) throw ConfigError("train_user: empty window set");

  std::vector<const WindowPair*> pairs = all_pairs(train);
  nn::AdamConfig<float> adam;
  adam.lr = cfg.lr;

  std::vector<EpochLog> log;
  log.reserve(std::size_t(cfg.epochs));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(hash_combine(hash_combine(cfg.seed, "epoch"),
                                 std::uint64_t(epoch)));
    shuffle_rng.shuffle(pairs);
    EpochLog entry;
    entry.epoch = epoch;
    std::size_t seen = 0;
    for (std::size_t at = 0; at < pairs.size(); at += std::size_t(
             cfg.batch_size)) {
      const std::size_t take =
          std::min(std::size_t(cfg.batch_size), pairs.size() - at);
      std::vector<const WindowPair*> batch(pairs.begin() + long(at),
                                           pairs.begin() + long(at + take));
      bundle.store.zero_grads();
      Graph<float> g;
      BatchForward b = forward_batch(g, bundle, batch, BnMode::train);
      LossParts<float> loss =
          loss_total(b.pred, b.target, b.p_genuine, b.labels, cfg.lambda);
      const double lv = double(loss.total.value()(0, 0));
      if (!std::isfinite(lv))
        throw NumericalError("training diverged: non-finite loss at epoch " +
                             std::to_string(epoch) + " batch " +
                             std::to_string(at / std::size_t(
                                 cfg.batch_size)));
      g.backward(loss.total);
      adam_step(bundle.store, adam);
      entry.loss += lv * double(take);
      entry.loss_traj += double(loss.traj.value()(0, 0)) * double(take);
      entry.loss_auth += double(loss.auth.value()(0, 0)) * double(take);
      seen += take;
    }
    entry.loss /= double(seen);
    entry.loss_traj /= double(seen);
    entry.loss_auth /= double(seen);
    log.push_back(entry);
  }
  return log;
}

EvalRow eval_user(ModelBundle<float>& bundle, const WindowSet& test) {
  for (const auto* list : {&test.genuine, &test.impostor})
    for (const auto& p : *list)
      if (p.source.session == 1)
        throw ConfigError(
            "eval_user: window set leaks session-1 data (user '" +
            p.source.user + "' trial " + std::to_string(p.source.trial) +
            ")");

  const TrajConfig& cfg = bundle.traj_config;
  EvalRow row;
  row.variant = test.variant;
  row.w = test.w;
  row.w_in = test.w_in;
  row.user = test.user;
  row.n_genuine = test.genuine.size();
  row.n_impostor = test.impostor.size();

  double mse_sum = 0;
  const auto run_chunk = [&](const std::vector<const WindowPair*>& chunk,
                             std::vector<double>* scores, bool genuine) {
    Graph<float> g;
    BatchForward b = forward_batch(g, bundle, chunk, BnMode::eval);
    const MatF& pred = b.pred.value();
    const MatF& target = b.target.value();
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      scores->push_back(double(b.p_genuine.value()(Eigen::Index(i), 0)));
      if (genuine) {
        const auto pb =
            pred.middleRows(Eigen::Index(i) * cfg.out_len(), cfg.out_len());
        const auto tb =
            target.middleRows(Eigen::Index(i) * cfg.out_len(), cfg.out_len());
        mse_sum += (pb - tb).cast<double>().squaredNorm() /
                   double(pb.size());
      }
    }
  };
  const std::size_t chunk_size = 64;
  for (const auto* list : {&test.genuine, &test.impostor}) {
    const bool genuine = list == &test.genuine;
    std::vector<double>* scores =
        genuine ? &row.genuine_scores : &row.impostor_scores;
    std::vector<const WindowPair*> chunk;
    for (const auto& p : *list) {
      chunk.push_back(&p);
      if (chunk.size() == chunk_size) {
        run_chunk(chunk, scores, genuine);
        chunk.clear();
      }
    }
    if (!chunk.empty()) run_chunk(chunk, scores, genuine);
  }
  row.forecast_mse = mse_sum / double(test.genuine.size());
  EerResult eer = compute_eer(row.genuine_scores, row.impostor_scores);
  row.eer = eer.eer;
  row.threshold = eer.threshold;
  row.curve = std::move(eer.curve);
  return row;
}

void write_train_log(const std::filesystem::path& path,
                     const std::vector<EpochLog>& log) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  char buf[160];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof buf,
                  "{\"epoch\":%d,\"loss\":%.9g,\"loss_traj\":%.9g,"
                  "\"loss_auth\":%.9g}",
                  e.epoch, e.loss, e.loss_traj, e.loss_auth);
    out << buf << '\n';
  }
}

double overfit_single_window(ModelBundle<float>& bundle,
                             const WindowPair& pair, int steps, float lr) {
  nn::AdamConfig<float> adam;
  adam.lr = lr;
  const int ov = bundle.traj_config.li_mode ? bundle.traj_config.li_overlap()
                                            : 0;
  MatF target = pair.target.middleRows(ov, bundle.traj_config.out_len());
  double last = 0;
  for (int step = 0; step < steps; ++step) {
    bundle.store.zero_grads();
    Graph<float> g;
    Var<float> pred = bundle.traj.forward(g, g.constant(MatF(pair.input)),
                                          {pair.start});
    Var<float> loss = nn::mse_loss(pred, g.constant(target));
    last = double(loss.value()(0, 0));
    g.backward(loss);
    adam_step(bundle.store, adam);
  }
  return last;
}

}  // namespace motionauth
