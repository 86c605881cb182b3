#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orl/models.hpp"
#include "orl/offline.hpp"

namespace orl {

// Versioned structured-text model container. Parameters are written as
// decimal floats with 17 significant digits, so reload is bit-exact.
struct StoredModel {
  std::string env_id;
  bool discrete = true;
  DiscreteQ q;
  ActorCritic ac;
};

void save_model(const DiscreteQ& q, const std::string& env_id,
                const std::string& path);
void save_model(const ActorCritic& ac, const std::string& env_id,
                const std::string& path);
StoredModel load_model(const std::string& path);

void save_dataset(const Dataset& data, const std::string& path);
Dataset load_dataset(const std::string& path);

// Flat structured-text config: `key = value` lines with dotted keys,
// '#' comments. No environment-variable lookups.
using Config = std::map<std::string, std::string>;

Config parse_config(const std::string& path);
Config parse_config_text(const std::string& text);
std::string config_get(const Config& cfg, const std::string& key,
                       const std::string& fallback);
double config_get_double(const Config& cfg, const std::string& key,
                         double fallback);
long config_get_long(const Config& cfg, const std::string& key, long fallback);

// Stable hash of a config (keys sorted).
std::uint64_t config_hash(const Config& cfg);

// Minimal CSV support; every file written by the harness has a fixed header.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  void close();
  ~CsvWriter();

 private:
  std::string path_;
  std::string buffer_;
  std::size_t columns_ = 0;
  bool closed_ = false;
};

struct CsvFile {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvFile read_csv(const std::string& path);

std::string fmt_double(double v);  // %.17g

std::uint64_t file_fnv64(const std::string& path);

struct RunManifest {
  std::uint64_t config_hash = 0;
  std::vector<std::pair<std::string, std::uint64_t>> stage_seeds;
  std::vector<std::pair<std::string, std::uint64_t>> file_checksums;

  void save(const std::string& path) const;
};

}  // namespace orl
