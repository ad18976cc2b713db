#pragma once

#include <chrono>
#include <map>
#include <string>
#include <vector>

namespace mg2v::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Record of one CLI run: resolved parameters and content digests of every
// input, enough to re-run the result exactly. Written as JSON next to the
// primary output.
struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> params;  // flag name -> resolved value
  std::map<std::string, std::string> inputs;  // path -> sha256 of contents
  uint64_t seed = 0;
  std::string version = kToolVersion;
  double duration_seconds = 0.0;

  void add_input(const std::string& path);  // digests the file now
  std::string to_json() const;
  void write(const std::string& path) const;
};

std::string sha256_file(const std::string& path);

class StopWatch {
 public:
  StopWatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace mg2v::cli
