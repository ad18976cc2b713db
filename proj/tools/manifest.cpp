#include "manifest.hpp"

#include <fstream>

#include "json.hpp"
#include "mg2v/common.hpp"
#include "sha256.hpp"

namespace mg2v::cli {

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input for digest: " + path);
  Sha256 hash;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    hash.update(buf, static_cast<size_t>(in.gcount()));
  }
  return hash.hex_digest();
}

void RunManifest::add_input(const std::string& path) { inputs[path] = sha256_file(path); }

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["params"] = params;
  j["inputs"] = inputs;
  j["seed"] = seed;
  j["version"] = version;
  j["duration_seconds"] = duration_seconds;
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write manifest: " + path);
  out << to_json();
}

}  // namespace mg2v::cli
