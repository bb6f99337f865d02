#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pemopt {

inline constexpr const char* kVersion = "0.1.0";

// FNV-1a 64-bit, used for manifest checksums.
std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t fnv1a64_file(const std::string& path);

// Records what a run produced: every artifact with a checksum, the scenario
// hash, solver statistics per outer iteration and the final status.
class RunManifest {
 public:
  RunManifest(std::string scenario_path, std::string scenario_hash);

  void add_stat(const std::string& line) { stats_.push_back(line); }
  void add_file(const std::string& path);
  void set_status(const std::string& s) { status_ = s; }

  // JSON body; timestamps are isolated in one field so byte-level
  // comparisons can exclude them.
  std::string to_json() const;
  void write(const std::string& path) const;

 private:
  std::string scenario_path_, scenario_hash_, status_ = "incomplete";
  std::string started_;
  std::vector<std::string> stats_;
  std::vector<std::pair<std::string, std::uint64_t>> files_;
};

}  // namespace pemopt
