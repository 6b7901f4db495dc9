#include "motionauth/model/checkpoint.hpp"

#include <cstring>

#include "motionauth/data/container.hpp"
#include "motionauth/errors.hpp"

namespace motionauth {

namespace {

nlohmann::json traj_to_json(const TrajConfig& c) {
  return {{"d_model", c.d_model},     {"n_head", c.n_head},
          {"d_ffn", c.d_ffn},         {"n_enc_layers", c.n_enc_layers},
          {"n_dec_layers", c.n_dec_layers},
          {"w", c.w},                 {"w_in", c.w_in},
          {"input_features", c.input_features},
          {"output_dim", c.output_dim},
          {"t_total", c.t_total},     {"li_mode", c.li_mode},
          {"dec_time_output_window",
           c.dec_time == DecTimeIndexing::output_window}};
}

TrajConfig traj_from_json(const nlohmann::json& j) {
  TrajConfig c;
  c.d_model = j.at("d_model").get<int>();
  c.n_head = j.at("n_head").get<int>();
  c.d_ffn = j.at("d_ffn").get<int>();
  c.n_enc_layers = j.at("n_enc_layers").get<int>();
  c.n_dec_layers = j.at("n_dec_layers").get<int>();
  c.w = j.at("w").get<int>();
  c.w_in = j.at("w_in").get<int>();
  c.input_features = j.at("input_features").get<int>();
  c.output_dim = j.at("output_dim").get<int>();
  c.t_total = j.at("t_total").get<int>();
  c.li_mode = j.at("li_mode").get<bool>();
  c.dec_time = j.value("dec_time_output_window", false)
                   ? DecTimeIndexing::output_window
                   : DecTimeIndexing::input_window;
  return c;
}

nlohmann::json auth_to_json(const AuthConfig& c) {
  return {{"filters", c.filters},
          {"kernels", c.kernels},
          {"in_channels", c.in_channels},
          {"n_classes", c.n_classes}};
}

AuthConfig auth_from_json(const nlohmann::json& j) {
  AuthConfig c;
  c.filters = j.at("filters").get<std::vector<int>>();
  c.kernels = j.at("kernels").get<std::vector<int>>();
  c.in_channels = j.at("in_channels").get<int>();
  c.n_classes = j.at("n_classes").get<int>();
  return c;
}

}  // namespace

void save_checkpoint(const ModelBundle<float>& bundle,
                     const std::filesystem::path& path) {
  nlohmann::json header;
  header["kind"] = "bundle";
  header["traj_config"] = traj_to_json(bundle.traj_config);
  header["auth_config"] = auth_to_json(bundle.auth_config);
  nlohmann::json params = nlohmann::json::array();
  std::vector<char> payload;
  for (std::size_t i = 0; i < bundle.store.size(); ++i) {
    const auto& p = bundle.store[i];
    params.push_back({{"name", p.name},
                      {"rows", p.value.rows()},
                      {"cols", p.value.cols()},
                      {"trainable", p.trainable},
                      {"steps", p.step_count}});
    const std::size_t bytes = sizeof(float) * std::size_t(p.value.size());
    const std::size_t at = payload.size();
    payload.resize(at + bytes);
    std::memcpy(payload.data() + at, p.value.data(), bytes);
  }
  header["params"] = std::move(params);
  write_container(path, header, payload.data(), payload.size());
}

std::unique_ptr<ModelBundle<float>> load_checkpoint(
    const std::filesystem::path& path) {
  Container c = read_container(path);
  if (c.header.value("kind", "") != "bundle")
    throw ParseError(path.string() + ": not a model checkpoint");
  auto bundle = make_bundle<float>(traj_from_json(c.header.at("traj_config")),
                                   auth_from_json(c.header.at("auth_config")),
                                   /*init_seed=*/0);
  std::size_t off = 0;
  std::size_t loaded = 0;
  for (const auto& jp : c.header.at("params")) {
    const std::string name = jp.at("name").get<std::string>();
    const Eigen::Index rows = jp.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = jp.at("cols").get<Eigen::Index>();
    if (!bundle->store.has(name))
      throw ParseError(path.string() + ": unexpected param '" + name + "'");
    auto& p = bundle->store.at(name);
    if (p.value.rows() != rows || p.value.cols() != cols)
      throw ParseError(path.string() + ": param '" + name +
                       "' has shape (" + std::to_string(rows) + " x " +
                       std::to_string(cols) + "), model expects " +
                       shape_str(p.value));
    const std::size_t bytes = sizeof(float) * std::size_t(rows * cols);
    if (off + bytes > c.payload.size())
      throw ParseError(path.string() + ": payload out of range for '" + name +
                       "'");
    std::memcpy(p.value.data(), c.payload.data() + off, bytes);
    p.step_count = jp.at("steps").get<long>();
    off += bytes;
    ++loaded;
  }
  if (loaded != bundle->store.size())
    throw ParseError(path.string() + ": checkpoint holds " +
                     std::to_string(loaded) + " params, model expects " +
                     std::to_string(bundle->store.size()));
  return bundle;
}

}  // namespace motionauth
