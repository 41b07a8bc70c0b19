#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "kis/types.hpp"

namespace kis::harness {

using json = nlohmann::json;

// All defaults in one place (J = h_z = tau = 1 per the model convention).
json default_config();

// Parse a config file and merge it over the defaults. Unknown keys are
// rejected with a message naming the key.
json load_config(const std::string& path);

// Apply a dotted --set override, e.g. "gap.n_max=80" or "h_x=[0.5,0.9]".
// Values parse as JSON first, falling back to a plain string.
void apply_override(json& cfg, const std::string& key_eq_value);

// Validate against the default schema; throws std::invalid_argument
// naming the offending key.
void validate_config(const json& cfg);

// FNV-1a over the canonical serialization, as a hex string.
std::string config_hash(const json& j);

// All floats in CSV bodies carry 12 significant digits.
std::string fmt_double(double v);

// Checkpoint store: one JSON file per completed sweep point, keyed by the
// hash of the point's own parameters. Re-running with an unchanged
// configuration reuses every completed point.
class ResultStore {
 public:
  explicit ResultStore(const std::filesystem::path& out_dir);
  const std::filesystem::path& dir() const { return out_dir_; }
  bool load_point(const std::string& key, json* out) const;
  void save_point(const std::string& key, const json& value) const;
  void write_text(const std::string& filename, const std::string& body) const;
  void write_json(const std::string& filename, const json& j) const;
  std::atomic<int> computed{0};  // points computed this run
  std::atomic<int> reused{0};    // points restored from checkpoints

 private:
  std::filesystem::path out_dir_;
};

// Commands; each returns a process exit code
// (0 ok, 1 usage, 2 numerical, 3 resource cap).
int cmd_diagnostics(const json& cfg);
int cmd_otoc(const json& cfg);
int cmd_gap(const json& cfg);
int cmd_extrapolate(const json& cfg);
int cmd_parity_gaps(const json& cfg);
int cmd_validate(const json& cfg);
int cmd_sweep(const json& cfg);

int run_command(const std::string& command, const json& cfg);

}  // namespace kis::harness
