#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace torlevy {

using Json = nlohmann::json;

// FNV-1a over the canonical (sorted-key) dump; embedded in every output
// file so reruns are attributable to their exact configuration.
std::uint64_t fnv1a64(const std::string& bytes);
std::string config_digest(const Json& config);

std::string format_double(double v);

// CSV with LF endings; the digest rides in a leading comment line.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values);
  std::string serialize(const std::string& digest) const;
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace torlevy
