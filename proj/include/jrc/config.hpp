#ifndef JRC_CONFIG_HPP
#define JRC_CONFIG_HPP

// Experiment configuration: a versioned `key = value` text format.
//
//   # comment
//   schema = 1
//   k = 4
//   snr_db = 0..12:0.5
//
// Keys are case-sensitive, one per line; later lines override earlier ones.
// Range values accept `a..b[:step]` (step defaults to 1), comma lists, or a
// single number.

#include "jrc/core.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace jrc::cli {

inline constexpr int kSchemaVersion = 1;

enum class ValueType { integer, real, boolean, text, range };

struct KeySpec {
  std::string name;
  ValueType type;
  std::string default_value;
  std::string help;
};

/// Every key the toolkit understands, with its default.
const std::vector<KeySpec>& schema();
const KeySpec* find_key(std::string_view name);

/// Syntax error in a config file; `line` is 1-based, `field` may be empty.
class ConfigParseError : public InvalidInput {
 public:
  ConfigParseError(const std::string& what, int line, std::string field);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

struct Violation {
  int line = 0;  // 0 when the value came from a flag or default
  std::string field;
  std::string message;
};

std::string to_string(const Violation& v);

class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;
    std::string origin;  // "default", "file", "flag"
  };

  /// All schema keys at their defaults.
  static Config defaults();

  void set(const std::string& key, std::string value, std::string origin, int line = 0);
  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const Entry& entry(const std::string& key) const;
  const std::map<std::string, Entry>& entries() const { return entries_; }

  std::string text(const std::string& key) const;
  long integer(const std::string& key) const;
  std::uint64_t unsigned_integer(const std::string& key) const;
  double real(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::vector<double> range(const std::string& key) const;

  /// Sorted `key = value` lines; the resolved config echoed into sidecars and manifests.
  std::string render() const;

 private:
  std::map<std::string, Entry> entries_;
};

/// Parses config text on top of the defaults. Throws ConfigParseError on syntax errors;
/// unknown keys and bad values are left for validate().
Config parse_config(std::string_view text);

/// Reads and parses a file; IoError if it cannot be read.
Config load_config(const std::string& path);

/// Every schema violation in the resolved config.
std::vector<Violation> validate(const Config& config);

/// load_config + validate. Parse failures surface as a single violation carrying line/field.
std::vector<Violation> validate_config(const std::string& path);

/// `a..b[:step]`, `x,y,z` or `x`. Throws InvalidInput on malformed or empty ranges.
std::vector<double> parse_range(std::string_view text);

}  // namespace jrc::cli

#endif  // JRC_CONFIG_HPP
