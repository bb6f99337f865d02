#include "pemopt/manifest.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pemopt {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return fnv1a64(ss.str());
}

RunManifest::RunManifest(std::string scenario_path, std::string scenario_hash)
    : scenario_path_(std::move(scenario_path)), scenario_hash_(std::move(scenario_hash)) {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  started_ = buf;
}

void RunManifest::add_file(const std::string& path) {
  files_.emplace_back(std::filesystem::path(path).filename().string(),
                      fnv1a64_file(path));
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["version"] = kVersion;
  j["scenario"] = scenario_path_;
  j["scenario_fnv64"] = scenario_hash_;
  j["status"] = status_;
  j["timestamps"]["started"] = started_;
  j["solver_stats"] = stats_;
  auto& files = j["files"];
  files = nlohmann::json::object();
  char buf[32];
  for (const auto& [name, hash] : files_) {
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    files[name] = buf;
  }
  return j.dump(2);
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path);
  out << to_json() << "\n";
}

}  // namespace pemopt
