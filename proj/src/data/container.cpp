#include "motionauth/data/container.hpp"

#include <cstring>
#include <fstream>

#include "motionauth/errors.hpp"

namespace motionauth {

void write_container(const std::filesystem::path& path,
                     const nlohmann::json& header,
                     const void* payload, std::size_t payload_bytes) {
  nlohmann::json h = header;
  h["container_version"] = kContainerVersion;
  const std::string text = h.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write container " + path.string());
  out.write(kContainerMagic, sizeof kContainerMagic);
  const std::uint64_t len = text.size();
  char lenbuf[8];
  for (int i = 0; i < 8; ++i) lenbuf[i] = char((len >> (8 * i)) & 0xff);
  out.write(lenbuf, 8);
  out.write(text.data(), std::streamsize(text.size()));
  if (payload_bytes > 0)
    out.write(static_cast<const char*>(payload),
              std::streamsize(payload_bytes));
  if (!out) throw ParseError("short write to container " + path.string());
}

Container read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open container " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kContainerMagic, 8) != 0)
    throw ParseError(path.string() + ": not a motionauth container");
  char lenbuf[8];
  in.read(lenbuf, 8);
  if (!in) throw ParseError(path.string() + ": truncated header length");
  std::uint64_t len = 0;
  for (int i = 0; i < 8; ++i)
    len |= std::uint64_t(static_cast<unsigned char>(lenbuf[i])) << (8 * i);
  std::string text(len, '\0');
  in.read(text.data(), std::streamsize(len));
  if (!in) throw ParseError(path.string() + ": truncated header");
  Container c;
  try {
    c.header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": bad container header: " + e.what());
  }
  if (c.header.value("container_version", -1) != kContainerVersion)
    throw ParseError(path.string() + ": unsupported container version");
  c.payload.assign(std::istreambuf_iterator<char>(in),
                   std::istreambuf_iterator<char>());
  return c;
}

}  // namespace motionauth
