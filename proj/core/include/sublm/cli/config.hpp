#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sublm/dsp/mel.hpp"

namespace sublm::cli {

// Flat key=value configuration covering every tunable in the pipeline.
// Unknown keys are rejected; CLI flags override file values; the effective
// config is echoed into every output directory.
class Config {
public:
  static Config defaults();
  static Config from_file(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value); // unknown key -> error
  void apply_override(const std::string& key_eq_value);       // "key=value"

  const std::string& get(const std::string& key) const;
  int get_int(const std::string& key) const;
  size_t get_size(const std::string& key) const;
  double get_double(const std::string& key) const;
  uint64_t get_u64(const std::string& key) const;
  bool has_value(const std::string& key) const; // non-empty
  std::filesystem::path get_path(const std::string& key) const;

  std::string render() const; // sorted key=value lines

private:
  std::map<std::string, std::string> values_;
};

dsp::DspConfig dsp_config_from(const Config& cfg);

// Writes config.effective and inputs.hash (git-style blob hashes) into a run
// directory so any artifact can be reproduced from its outputs alone.
void write_run_stamp(const std::filesystem::path& out_dir, const Config& cfg,
                     const std::vector<std::filesystem::path>& inputs);

} // namespace sublm::cli
