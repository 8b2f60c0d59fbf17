#include "jrc/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace jrc::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool parse_long(const std::string& s, long& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stol(s, &pos);
  } catch (const std::logic_error&) {
    return false;
  }
  return pos == s.size();
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
  } catch (const std::logic_error&) {
    return false;
  }
  return pos == s.size();
}

bool parse_bool(const std::string& s, bool& out) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0" || s == "no" || s == "off") {
    out = false;
    return true;
  }
  return false;
}

const std::set<std::string> kSetChoices{"can", "tone", "random", "ideal"};
const std::set<std::string> kEpChoices{"barker13", "constant", "optimized"};
const std::set<std::string> kReceiverChoices{"coherent", "noncoherent"};
const std::set<std::string> kCurveChoices{"pd", "pd-mf", "ser-coherent", "ser-noncoherent-bound",
                                          "ser-noncoherent-exact"};
const std::set<std::string> kAfChoices{"direct", "factored", "expanded"};

std::string join(const std::set<std::string>& choices) {
  std::string out;
  for (const auto& c : choices) out += (out.empty() ? "" : "|") + c;
  return out;
}

}  // namespace

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> keys{
      {"schema", ValueType::integer, "1", "config schema version"},
      {"k", ValueType::integer, "2", "alphabet size K (power of two)"},
      {"m", ValueType::integer, "200", "chips per signal M"},
      {"n", ValueType::integer, "13", "symbols per frame N"},
      {"seed", ValueType::integer, "1", "master seed"},
      {"threads", ValueType::integer, "1", "Monte Carlo worker threads"},
      {"set", ValueType::text, "can", "signal set: " + join(kSetChoices)},
      {"set_file", ValueType::text, "", "signal set CSV (overrides set)"},
      {"iterations", ValueType::integer, "1000", "orthogonal-set designer iterations"},
      {"rotate", ValueType::boolean, "true", "apply the per-signal phase rotation to designed sets"},
      {"rotate_generations", ValueType::integer, "200", "rotation optimizer generations"},
      {"rotate_population", ValueType::integer, "50", "rotation optimizer population"},
      {"ep", ValueType::text, "barker13", "EP sequence: " + join(kEpChoices)},
      {"ep_file", ValueType::text, "", "EP CSV (overrides ep)"},
      {"ep_generations", ValueType::integer, "400", "EP optimizer generations"},
      {"ep_population", ValueType::integer, "50", "EP optimizer population"},
      {"tfd_lo", ValueType::real, "-0.3", "EP optimizer Doppler window start (T f_d)"},
      {"tfd_hi", ValueType::real, "0.3", "EP optimizer Doppler window end (T f_d)"},
      {"doppler_points", ValueType::integer, "21", "Doppler grid points"},
      {"bits", ValueType::text, "", "message bits for synth (random message when empty)"},
      {"message_seed", ValueType::integer, "1", "seed of the random message"},
      {"delay", ValueType::integer, "0", "echo delay t0 in samples"},
      {"theta", ValueType::real, "0", "global phase in radians"},
      {"snr_db", ValueType::range, "0..20", "SNR sweep in dB (d for pd, r_b for ser, x axis for theory)"},
      {"input", ValueType::text, "", "received samples CSV for process"},
      {"pfa", ValueType::real, "0.001", "false-alarm probability"},
      {"trials", ValueType::integer, "1000", "Monte Carlo trials per point (frames for ser)"},
      {"receiver", ValueType::text, "coherent", "SER demodulator: " + join(kReceiverChoices)},
      {"full_chain", ValueType::boolean, "false", "pd: run the whole compressed output per trial"},
      {"detected_t0", ValueType::boolean, "false", "ser: take t0 from the detector"},
      {"noise_domain", ValueType::text, "samples", "Monte Carlo noise: samples|projected"},
      {"curve", ValueType::text, "ser-coherent", "theory curve: " + join(kCurveChoices)},
      {"gamma", ValueType::real, "0", "cross-correlation gain for the pd theory curve"},
      {"tfd_max", ValueType::range, "0..0.3:0.1", "psl-sweep Doppler extents (T f_d)"},
      {"af_tfd", ValueType::real, "0.2", "AF Doppler extent (T f_d)"},
      {"af_method", ValueType::text, "direct", "AF route: " + join(kAfChoices)},
      {"mon", ValueType::integer, "500", "message pairs for dissim"},
  };
  return keys;
}

const KeySpec* find_key(std::string_view name) {
  for (const auto& k : schema())
    if (k.name == name) return &k;
  return nullptr;
}

ConfigParseError::ConfigParseError(const std::string& what, int line, std::string field)
    : InvalidInput("line " + std::to_string(line) + (field.empty() ? "" : ", field '" + field + "'") + ": " + what),
      line_(line),
      field_(std::move(field)) {}

std::string to_string(const Violation& v) {
  std::string out;
  if (v.line > 0) out += "line " + std::to_string(v.line) + ": ";
  if (!v.field.empty()) out += v.field + ": ";
  return out + v.message;
}

Config Config::defaults() {
  Config c;
  for (const auto& k : schema()) c.set(k.name, k.default_value, "default");
  return c;
}

void Config::set(const std::string& key, std::string value, std::string origin, int line) {
  entries_[key] = Entry{std::move(value), line, std::move(origin)};
}

const Config::Entry& Config::entry(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw InvalidInput("config: missing key '" + key + "'");
  return it->second;
}

std::string Config::text(const std::string& key) const { return entry(key).value; }

long Config::integer(const std::string& key) const {
  long v = 0;
  if (!parse_long(text(key), v)) throw InvalidInput("config: '" + key + "' is not an integer");
  return v;
}

std::uint64_t Config::unsigned_integer(const std::string& key) const {
  const long v = integer(key);
  if (v < 0) throw InvalidInput("config: '" + key + "' must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

double Config::real(const std::string& key) const {
  double v = 0;
  if (!parse_double(text(key), v)) throw InvalidInput("config: '" + key + "' is not a number");
  return v;
}

bool Config::boolean(const std::string& key) const {
  bool v = false;
  if (!parse_bool(text(key), v)) throw InvalidInput("config: '" + key + "' is not a boolean");
  return v;
}

std::vector<double> Config::range(const std::string& key) const { return parse_range(text(key)); }

std::string Config::render() const {
  std::ostringstream out;
  for (const auto& [k, e] : entries_) out << k << " = " << e.value << "\n";
  return out.str();
}

Config parse_config(std::string_view text) {
  Config config = Config::defaults();
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(std::string_view(raw).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigParseError("expected 'key = value'", line, "");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigParseError("missing key before '='", line, "");
    if (key.find_first_of(" \t") != std::string::npos) throw ConfigParseError("key contains whitespace", line, key);
    config.set(key, value, "file", line);
  }
  return config;
}

Config load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::vector<double> parse_range(std::string_view text) {
  const std::string s = trim(text);
  require(!s.empty(), "range: empty");
  std::vector<double> out;
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      double v = 0;
      require(parse_double(trim(item), v) && std::isfinite(v), "range: '" + item + "' is not a finite number");
      out.push_back(v);
    }
    require(!out.empty(), "range: empty");
    return out;
  }
  const std::string lo_text = trim(std::string_view(s).substr(0, dots));
  std::string rest = s.substr(dots + 2);
  std::string step_text = "1";
  if (const auto colon = rest.find(':'); colon != std::string::npos) {
    step_text = trim(std::string_view(rest).substr(colon + 1));
    rest = rest.substr(0, colon);
  }
  double lo = 0, hi = 0, step = 0;
  require(parse_double(lo_text, lo) && std::isfinite(lo), "range: bad start '" + lo_text + "'");
  require(parse_double(trim(rest), hi) && std::isfinite(hi), "range: bad end '" + trim(rest) + "'");
  require(parse_double(step_text, step) && std::isfinite(step), "range: bad step '" + step_text + "'");
  require(step > 0.0, "range: step must be positive");
  require(hi >= lo, "range: end must not precede start");
  const long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  require(count <= 1000000, "range: more than 10^6 points");
  for (long i = 0; i < count; ++i) {
    // Snap to 15 significant digits so 0..0.3:0.1 yields 0.3 rather than 0.30000000000000004.
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", lo + static_cast<double>(i) * step);
    out.push_back(std::strtod(buf, nullptr));
  }
  return out;
}

std::vector<Violation> validate(const Config& config) {
  std::vector<Violation> out;
  auto add = [&](const std::string& key, const std::string& message) {
    const int line = config.has(key) ? config.entry(key).line : 0;
    out.push_back({line, key, message});
  };

  // Types first; semantic checks only run on keys that parsed.
  std::set<std::string> typed;
  for (const auto& [key, e] : config.entries()) {
    const KeySpec* spec = find_key(key);
    if (!spec) {
      add(key, "unknown key");
      continue;
    }
    bool ok = true;
    long l = 0;
    double d = 0;
    bool b = false;
    switch (spec->type) {
      case ValueType::integer:
        ok = parse_long(e.value, l);
        if (!ok) add(key, "expected an integer, got '" + e.value + "'");
        break;
      case ValueType::real:
        ok = parse_double(e.value, d) && std::isfinite(d);
        if (!ok) add(key, "expected a finite number, got '" + e.value + "'");
        break;
      case ValueType::boolean:
        ok = parse_bool(e.value, b);
        if (!ok) add(key, "expected true or false, got '" + e.value + "'");
        break;
      case ValueType::range:
        try {
          parse_range(e.value);
        } catch (const InvalidInput& err) {
          ok = false;
          add(key, err.what());
        }
        break;
      case ValueType::text:
        break;
    }
    if (ok) typed.insert(key);
  }
  auto ok = [&](const std::string& key) { return typed.count(key) > 0; };
  auto at_least = [&](const std::string& key, long min) {
    if (ok(key) && config.integer(key) < min) add(key, "must be at least " + std::to_string(min));
  };

  if (ok("schema") && config.integer("schema") != kSchemaVersion)
    add("schema", "unsupported schema version (expected " + std::to_string(kSchemaVersion) + ")");
  if (ok("k")) {
    const long k = config.integer("k");
    if (k < 2 || k > (1L << 20) || !is_power_of_two(k)) add("k", "K must be a power of two (>= 2)");
  }
  at_least("m", 1);
  at_least("n", 1);
  at_least("seed", 0);
  at_least("message_seed", 0);
  at_least("threads", 1);
  at_least("iterations", 0);
  at_least("rotate_generations", 0);
  at_least("rotate_population", 2);
  at_least("ep_generations", 0);
  at_least("ep_population", 2);
  at_least("doppler_points", 1);
  at_least("delay", 0);
  at_least("trials", 1);
  at_least("mon", 1);

  if (ok("pfa")) {
    const double pfa = config.real("pfa");
    if (!(pfa > 0.0 && pfa < 1.0)) add("pfa", "pfa must lie in (0, 1)");
  }
  if (ok("tfd_lo") && ok("tfd_hi") && config.real("tfd_lo") > config.real("tfd_hi"))
    add("tfd_hi", "Doppler window end must not precede its start");
  if (ok("tfd_max")) {
    for (double v : config.range("tfd_max"))
      if (v < 0.0) {
        add("tfd_max", "Doppler extents must be nonnegative");
        break;
      }
  }
  if (ok("af_tfd") && config.real("af_tfd") < 0.0) add("af_tfd", "Doppler extent must be nonnegative");

  auto one_of = [&](const std::string& key, const std::set<std::string>& choices) {
    if (config.has(key) && !choices.count(config.text(key)))
      add(key, "must be one of " + join(choices) + ", got '" + config.text(key) + "'");
  };
  one_of("set", kSetChoices);
  one_of("ep", kEpChoices);
  one_of("receiver", kReceiverChoices);
  one_of("curve", kCurveChoices);
  one_of("af_method", kAfChoices);
  one_of("noise_domain", {"samples", "projected"});
  if (config.has("noise_domain") && config.text("noise_domain") == "projected") {
    for (const char* key : {"full_chain", "detected_t0"})
      if (ok(key) && config.boolean(key)) add(key, "cannot be combined with noise_domain = projected");
  }

  if (config.has("ep") && config.has("ep_file") && config.text("ep_file").empty() && config.text("ep") == "barker13" &&
      ok("n") && config.integer("n") != 13)
    add("n", "the Barker-13 EP requires n = 13");

  if (config.has("bits") && !config.text("bits").empty()) {
    const std::string& bits = config.text("bits");
    if (bits.find_first_not_of("01") != std::string::npos) add("bits", "bit string may contain only 0 and 1");
    if (ok("k") && is_power_of_two(config.integer("k")) && config.integer("k") >= 2) {
      const long per_symbol = log2_exact(config.integer("k"));
      if (static_cast<long>(bits.size()) % per_symbol != 0)
        add("bits", "bit length must be a multiple of log2(K) = " + std::to_string(per_symbol));
      else if (ok("n") && static_cast<long>(bits.size()) / per_symbol != config.integer("n"))
        add("bits", "bit length must equal n * log2(K)");
    }
  }
  return out;
}

std::vector<Violation> validate_config(const std::string& path) {
  try {
    return validate(load_config(path));
  } catch (const ConfigParseError& e) {
    return {Violation{e.line(), e.field(), e.what()}};
  }
}

}  // namespace jrc::cli
