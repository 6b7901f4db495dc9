#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace motionauth {

// Versioned binary container: 8-byte magic, little-endian u64 header length,
// UTF-8 JSON header, raw payload. All serialized tensors are row-major.
inline constexpr char kContainerMagic[8] = {'M', 'A', 'U', 'T',
                                            'H', 'B', 'I', 'N'};
inline constexpr int kContainerVersion = 1;

struct Container {
  nlohmann::json header;
  std::vector<char> payload;
};

void write_container(const std::filesystem::path& path,
                     const nlohmann::json& header,
                     const void* payload, std::size_t payload_bytes);

Container read_container(const std::filesystem::path& path);

}  // namespace motionauth
