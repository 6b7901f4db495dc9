#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>

namespace motionauth {

// Flat key-value settings with INI-style sections ("[train]" + "epochs = 20"
// becomes "train.epochs"). CLI flags overwrite file values through set().
class RunConfig {
 public:
  RunConfig() = default;
  static RunConfig from_file(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_str(const std::string& key, const std::string& fallback)
      const;
  int get_int(const std::string& key, int fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

  // Rejects keys outside the declared schema, naming the field path.
  void validate_known(const std::set<std::string>& allowed) const;

  // Digest over the sorted key=value pairs; embedded in every report.
  std::string digest() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace motionauth
