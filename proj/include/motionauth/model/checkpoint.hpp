#pragma once

#include <filesystem>
#include <memory>

#include "motionauth/model/bundle.hpp"

namespace motionauth {

// Combined (forecaster + authenticator) bundle in one container: JSON header
// with both configs, parameter shapes and step counts, then float32
// row-major payload in store order. Byte-stable for a given bundle state.
void save_checkpoint(const ModelBundle<float>& bundle,
                     const std::filesystem::path& path);

std::unique_ptr<ModelBundle<float>> load_checkpoint(
    const std::filesystem::path& path);

}  // namespace motionauth
