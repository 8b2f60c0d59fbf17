#include "jrc/cli.hpp"

#include "jrc/analysis.hpp"
#include "jrc/csv.hpp"
#include "jrc/kernel.hpp"
#include "jrc/receiver.hpp"
#include "jrc/seqdesign.hpp"
#include "jrc/simkit.hpp"
#include "jrc/waveform.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace jrc::cli {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kSetKeys{"k",    "m",    "set", "set_file", "iterations", "rotate", "rotate_generations",
                                        "rotate_population"};
const std::vector<std::string> kEpKeys{"n",      "ep",     "ep_file",       "ep_generations", "ep_population",
                                       "tfd_lo", "tfd_hi", "doppler_points"};

std::vector<std::string> concat(std::initializer_list<std::vector<std::string>> parts) {
  std::vector<std::string> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::string flag_name(const std::string& key) {
  std::string out = key;
  std::replace(out.begin(), out.end(), '_', '-');
  return "--" + out;
}

struct Command {
  std::string name;
  std::string description;
  std::string target;
  std::vector<std::string> keys;
  // Flags that set a key to a fixed value, e.g. --barker13 -> ep = barker13.
  std::vector<std::tuple<std::string, std::string, std::string>> switches;
  // Alternate spellings of a valued key, e.g. --d1-db -> snr_db.
  std::vector<std::pair<std::string, std::string>> aliases;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> list{
      {"design", "design a quasi-orthogonal unimodular signal set", "signal-set design and zero-lag phase rotation",
       {"k", "m", "iterations", "rotate", "rotate_generations", "rotate_population"}, {}, {}},
      {"ep", "build or optimize an external phase (EP) sequence", "EP sequence (Barker-13 or Doppler-optimized)",
       kEpKeys, {{"barker13", "ep", "barker13"}, {"constant", "ep", "constant"}, {"optimized", "ep", "optimized"}}, {}},
      {"synth", "synthesize a frame and pass it through the channel", "composite waveform synthesis",
       concat({kSetKeys, kEpKeys, {"bits", "message_seed", "delay", "theta", "snr_db"}}), {}, {}},
      {"process", "run the receive chain on received samples", "pulse compression, detection and demodulation",
       concat({kSetKeys, kEpKeys, {"input", "pfa", "snr_db"}}), {}, {}},
      {"pd", "Monte Carlo detection probability versus d", "detection probability versus SNR",
       concat({kSetKeys, kEpKeys, {"pfa", "snr_db", "trials", "full_chain", "delay", "noise_domain"}}), {}, {{"d-db", "snr_db"}}},
      {"ser", "Monte Carlo symbol error rate versus r_b", "symbol error rate versus SNR per bit",
       concat({kSetKeys, kEpKeys, {"snr_db", "trials", "receiver", "detected_t0", "delay", "noise_domain"}}),
       {{"coherent", "receiver", "coherent"}, {"noncoherent", "receiver", "noncoherent"}},
       {{"rb-db", "snr_db"}}},
      {"af", "ambiguity function surface", "composite ambiguity function",
       concat({kSetKeys, kEpKeys, {"message_seed", "af_tfd", "af_method"}}), {}, {}},
      {"psl-sweep", "peak sidelobe level versus Doppler extent", "peak sidelobe level versus Doppler",
       concat({kSetKeys, kEpKeys, {"tfd_max", "message_seed"}}), {}, {}},
      {"dissim", "dissimilarity of compressed outputs over random message pairs",
       "information-dependence of the radar output", concat({kSetKeys, kEpKeys, {"mon"}}), {}, {}},
      {"theory", "analytic detection and SER curves", "closed-form performance curves",
       {"k", "m", "n", "curve", "snr_db", "pfa", "gamma"},
       {{"pd", "curve", "pd"},
        {"pd-mf", "curve", "pd-mf"},
        {"ser-coherent", "curve", "ser-coherent"},
        {"ser-noncoherent-bound", "curve", "ser-noncoherent-bound"},
        {"ser-noncoherent-exact", "curve", "ser-noncoherent-exact"}},
       {{"d1-db", "snr_db"}, {"d-db", "snr_db"}}},
  };
  return list;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Everything one subcommand invocation needs.
class Session {
 public:
  Session(const Command& command, Config config, fs::path out_dir)
      : command_(command), config_(std::move(config)), out_dir_(std::move(out_dir)) {
    manifest_.command = command.name;
    manifest_.target = command.target;
    manifest_.config = config_.render();
    manifest_.seed = config_.unsigned_integer("seed");
    manifest_.started_utc = utc_now();
  }

  const Config& config() const { return config_; }
  std::uint64_t seed() const { return manifest_.seed; }
  int threads() const { return static_cast<int>(config_.integer("threads")); }

  void metric(const std::string& key, const std::string& value) { manifest_.metrics.emplace_back(key, value); }
  void metric(const std::string& key, double value) { metric(key, csv::format(value)); }

  std::string read_input(const std::string& path) {
    std::string contents = csv::load(path);
    manifest_.inputs.push_back({path, content_hash(contents), contents.size()});
    return contents;
  }

  void write(const std::string& name, const std::string& contents) {
    ensure_dir();
    const fs::path path = out_dir_ / name;
    csv::save(path.string(), contents);
    manifest_.outputs.push_back({path.string(), content_hash(contents), contents.size()});
  }

  template <typename Writer>
  void write_with(const std::string& name, Writer writer) {
    std::ostringstream ss;
    writer(ss);
    write(name, ss.str());
  }

  void finish(double wall_seconds) {
    manifest_.wall_seconds = wall_seconds;
    nlohmann::ordered_json j;
    j["schema"] = kSchemaVersion;
    j["command"] = manifest_.command;
    j["target"] = manifest_.target;
    j["seed"] = manifest_.seed;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, e] : config_.entries()) cfg[k] = e.value;
    j["config"] = cfg;
    j["config_hash"] = hex64(content_hash(manifest_.config));
    auto files = [](const std::vector<OutputFile>& list) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& f : list) arr.push_back({{"path", f.path}, {"fnv1a64", hex64(f.hash)}, {"bytes", f.bytes}});
      return arr;
    };
    j["inputs"] = files(manifest_.inputs);
    j["outputs"] = files(manifest_.outputs);
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
    for (const auto& [k, v] : manifest_.metrics) metrics[k] = v;
    j["metrics"] = metrics;
    j["started_utc"] = manifest_.started_utc;
    j["wall_seconds"] = manifest_.wall_seconds;
    ensure_dir();
    csv::save((out_dir_ / (command_.name + ".manifest.json")).string(), j.dump(2) + "\n");
  }

 private:
  void ensure_dir() {
    std::error_code ec;
    fs::create_directories(out_dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir_.string() + "': " + ec.message());
  }

  const Command& command_;
  Config config_;
  fs::path out_dir_;
  RunManifest manifest_;
};

// ------------------------------------------------------------------ builders

SignalSet build_set(Session& s) {
  const Config& c = s.config();
  if (!c.text("set_file").empty()) {
    std::istringstream in(s.read_input(c.text("set_file")));
    return csv::read_signal_set(in);
  }
  const int k = static_cast<int>(c.integer("k"));
  const int m = static_cast<int>(c.integer("m"));
  const std::string kind = c.text("set");
  if (kind == "tone") return tone_set(k, m);
  if (kind == "random") return random_set(k, m, s.seed());
  require(kind == "can", "set = ideal has no sample-domain realization for this command");
  DesignResult design = design_orthogonal_set(k, m, static_cast<int>(c.integer("iterations")), s.seed());
  s.metric("design_psl_db", amplitude_db(design.set.metrics().psl));
  s.metric("design_isolation_db", amplitude_db(design.set.metrics().isolation));
  if (!c.boolean("rotate") || k < 2) return design.set;
  RotationResult rot = optimize_phase_rotation(design.set, static_cast<int>(c.integer("rotate_generations")),
                                               static_cast<int>(c.integer("rotate_population")), s.seed());
  s.metric("gamma_before", rot.gamma_before);
  s.metric("gamma_after", rot.gamma_after);
  return rot.set;
}

CorrelationKernel build_kernel(Session& s) {
  const Config& c = s.config();
  if (c.text("set_file").empty() && c.text("set") == "ideal")
    return CorrelationKernel::ideal(static_cast<int>(c.integer("k")), static_cast<int>(c.integer("m")));
  return CorrelationKernel::from_set(build_set(s));
}

EpSequence build_ep(Session& s) {
  const Config& c = s.config();
  if (!c.text("ep_file").empty()) {
    std::istringstream in(s.read_input(c.text("ep_file")));
    return csv::read_ep(in);
  }
  const int n = static_cast<int>(c.integer("n"));
  const std::string kind = c.text("ep");
  if (kind == "barker13") return ep_barker13();
  if (kind == "constant") return ep_constant(n);
  EpOptimizeOptions opt;
  opt.symbols = n;
  opt.tfd_lo = c.real("tfd_lo");
  opt.tfd_hi = c.real("tfd_hi");
  opt.doppler_points = static_cast<int>(c.integer("doppler_points"));
  opt.generations = static_cast<int>(c.integer("ep_generations"));
  opt.population = static_cast<int>(c.integer("ep_population"));
  opt.seed = s.seed();
  const EpOptimizeResult r = optimize_ep_doppler(opt);
  s.metric("ep_initial_peak_sidelobe_db", r.initial_peak_sidelobe_db);
  s.metric("ep_peak_sidelobe_db", r.peak_sidelobe_db);
  return r.ep;
}

InfoSequence build_message(Session& s, int symbols, int alphabet) {
  const Config& c = s.config();
  if (!c.text("bits").empty()) return map_bits(c.text("bits"), alphabet);
  return random_info(symbols, alphabet, c.unsigned_integer("message_seed"));
}

SimConfig sim_config(const Session& s, ExperimentKind kind, int k, int m, int n) {
  const Config& c = s.config();
  SimConfig sc;
  sc.kind = kind;
  sc.alphabet = k;
  sc.chips = m;
  sc.symbols = n;
  sc.ep = c.text("ep_file").empty() ? c.text("ep") : "file:" + c.text("ep_file");
  if (c.has("pfa")) sc.pfa = c.real("pfa");
  sc.snr_db = c.range("snr_db");
  sc.trials = c.integer("trials");
  sc.seed = s.seed();
  sc.threads = s.threads();
  sc.delay = c.integer("delay");
  sc.full_chain = c.boolean("full_chain");
  sc.detected_t0 = c.boolean("detected_t0");
  sc.noise = parse_noise_domain(c.text("noise_domain"));
  return sc;
}

void write_sim(Session& s, const std::string& stem, const SimConfig& sc, const SimResult& result) {
  s.write_with(stem + ".csv", [&](std::ostream& o) { csv::write_sim_result(o, result); });
  // Sidecar: the resolved config without the worker count, and its hash.
  std::string filtered = "kind = " + to_string(sc.kind) + "\n";
  std::istringstream in(s.config().render());
  for (std::string line; std::getline(in, line);)
    if (line.rfind("threads =", 0) != 0) filtered += line + "\n";
  s.write(stem + ".config.txt", "config_hash = " + hex64(content_hash(filtered)) + "\n" + filtered);
}

// ------------------------------------------------------------------ commands

void cmd_design(Session& s) {
  const Config& c = s.config();
  const int k = static_cast<int>(c.integer("k"));
  const int m = static_cast<int>(c.integer("m"));
  DesignResult design = design_orthogonal_set(k, m, static_cast<int>(c.integer("iterations")), s.seed());
  s.write_with("design_trace.csv", [&](std::ostream& o) {
    o << "iteration,psl_db,isolation_db,gamma\n";
    for (const auto& cp : design.trace)
      o << cp.iteration << ',' << csv::format(amplitude_db(cp.metrics.psl)) << ','
        << csv::format(amplitude_db(cp.metrics.isolation)) << ',' << csv::format(cp.metrics.gamma) << '\n';
  });
  s.metric("initial_psl_db", amplitude_db(design.initial.psl));
  s.metric("initial_isolation_db", amplitude_db(design.initial.isolation));
  s.metric("best_iteration", std::to_string(design.best_iteration));
  SignalSet out = design.set;
  if (c.boolean("rotate") && k >= 2) {
    RotationResult rot = optimize_phase_rotation(design.set, static_cast<int>(c.integer("rotate_generations")),
                                                 static_cast<int>(c.integer("rotate_population")), s.seed());
    s.metric("gamma_before", rot.gamma_before);
    s.metric("gamma_after", rot.gamma_after);
    s.write_with("rotation.csv", [&](std::ostream& o) {
      o << "k,alpha_rad\n";
      for (Eigen::Index i = 0; i < rot.rotation.alphas.size(); ++i)
        o << i << ',' << csv::format(rot.rotation.alphas(i)) << '\n';
    });
    out = rot.set;
  }
  const CorrelationMetrics metrics = out.metrics();
  s.metric("psl_db", amplitude_db(metrics.psl));
  s.metric("isolation_db", amplitude_db(metrics.isolation));
  s.metric("gamma", metrics.gamma);
  s.write_with("set.csv", [&](std::ostream& o) { csv::write_signal_set(o, out); });
}

void cmd_ep(Session& s) {
  const EpSequence ep = build_ep(s);
  std::vector<int> lags;
  for (int l = -(ep.size() - 1); l < ep.size(); ++l)
    if (l != 0) lags.push_back(l);
  if (!lags.empty())
    s.metric("zero_doppler_psl_db", amplitude_db(ep_peak_sidelobe(ep, lags, {0.0}) / ep.size()));
  s.write_with("ep.csv", [&](std::ostream& o) { csv::write_ep(o, ep); });
}

void cmd_synth(Session& s) {
  const Config& c = s.config();
  const SignalSet set = build_set(s);
  const EpSequence ep = build_ep(s);
  const InfoSequence info = build_message(s, ep.size(), set.count());
  const Waveform w = synthesize(set, info, ep);
  s.metric("bits", unmap_bits(info));
  s.write_with("waveform.csv", [&](std::ostream& o) { csv::write_samples(o, w.samples); });
  ChannelConfig ch;
  ch.delay = c.integer("delay");
  ch.theta = c.real("theta");
  ch.seed = s.seed();
  // Noise only when an SNR was requested explicitly; the first sweep value is used.
  ch.snr_db = c.entry("snr_db").origin == "default" ? std::numeric_limits<double>::infinity()
                                                     : c.range("snr_db").front();
  const CVector r = awgn_channel(w, ch, set.length());
  s.write_with("received.csv", [&](std::ostream& o) { csv::write_samples(o, r); });
}

void cmd_process(Session& s) {
  const Config& c = s.config();
  require(!c.text("input").empty(), "process: 'input' (received samples CSV) is required");
  std::istringstream in(s.read_input(c.text("input")));
  const CVector r = csv::read_samples(in);
  const SignalSet set = build_set(s);
  const EpSequence ep = build_ep(s);
  const ReceiveChain chain(set, ep);
  const long frame = static_cast<long>(ep.size()) * set.length();
  require(static_cast<long>(r.size()) >= frame, "process: input is shorter than one frame");
  const LagSeries out = radar_process(r, chain);
  const double n0 = noise_variance(static_cast<double>(frame), c.range("snr_db").front());
  const double var = chain.output_noise_variance(n0);
  const DetectionReport report = detect(out, var, c.real("pfa"), 0, static_cast<long>(r.size()) - frame);
  s.write_with("trace.csv", [&](std::ostream& o) { csv::write_trace(o, out); });
  s.write_with("detections.csv", [&](std::ostream& o) { csv::write_detections(o, {{0, report}}); });
  const CMatrix peaks = sample_bank(r, set, report.peak_index, ep.size());
  s.metric("decoded_bits_noncoherent", unmap_bits(demodulate_noncoherent(peaks)));
}

void cmd_pd(Session& s) {
  const SignalSet set = build_set(s);
  const EpSequence ep = build_ep(s);
  const ReceiveChain chain(set, ep);
  const SimConfig sc = sim_config(s, ExperimentKind::pd, set.count(), set.length(), ep.size());
  const SimResult result = simulate_pd(chain, sc);
  s.metric("gamma", set.metrics().gamma);
  write_sim(s, "pd", sc, result);
}

void cmd_ser(Session& s) {
  const SignalSet set = build_set(s);
  const EpSequence ep = build_ep(s);
  const ExperimentKind kind = s.config().text("receiver") == "coherent" ? ExperimentKind::ser_coherent
                                                                         : ExperimentKind::ser_noncoherent;
  const SimConfig sc = sim_config(s, kind, set.count(), set.length(), ep.size());
  write_sim(s, "ser", sc, simulate_ser(set, ep, sc));
}

void cmd_af(Session& s) {
  const Config& c = s.config();
  const std::string method = c.text("af_method");
  const CorrelationKernel kernel = build_kernel(s);
  const EpSequence ep = build_ep(s);
  const int n = ep.size();
  const int m = kernel.chips();
  const double tfd = c.real("af_tfd");
  const int points = static_cast<int>(c.integer("doppler_points"));
  std::vector<double> dopplers;
  for (int i = 0; i < points; ++i) {
    const double x = points == 1 ? 0.0 : -tfd + 2.0 * tfd * i / (points - 1);
    dopplers.push_back(tfd_to_doppler(x, n, m));
  }
  const std::vector<long> delays = full_delay_grid(n, m);
  const InfoSequence info = random_info(n, kernel.alphabet(), c.unsigned_integer("message_seed"));
  AmbiguitySurface surface;
  if (method == "factored") {
    surface = ambiguity_factored(kernel, ep, delays, dopplers);
  } else if (method == "expanded" || kernel.is_ideal()) {
    surface = ambiguity_expanded(kernel, info, ep, delays, dopplers);
  } else {
    const ReceiveChain chain(*kernel.set(), ep);
    surface = ambiguity_direct(synthesize(*kernel.set(), info, ep), chain, delays, dopplers);
  }
  s.write_with("af.csv", [&](std::ostream& o) { csv::write_surface(o, surface, n, m); });
}

void cmd_psl_sweep(Session& s) {
  const Config& c = s.config();
  const CorrelationKernel kernel = build_kernel(s);
  const EpSequence ep = build_ep(s);
  PslSweepOptions opt;
  opt.doppler_points = static_cast<int>(c.integer("doppler_points"));
  opt.message_seed = c.unsigned_integer("message_seed");
  opt.expanded = kernel.is_ideal();
  const auto rows = psl_vs_doppler(kernel, ep, c.range("tfd_max"), opt);
  s.write_with("psl.csv", [&](std::ostream& o) {
    o << "tfd_max,psl_a_db,psl_r2_db,psl_a_row_db,psl_r2_row_db\n";
    for (const auto& r : rows)
      o << csv::format(r.tfd_max) << ',' << csv::format(r.psl_a_db) << ',' << csv::format(r.psl_r2_db) << ','
        << csv::format(r.psl_a_row_db) << ',' << csv::format(r.psl_r2_row_db) << '\n';
  });
}

void cmd_dissim(Session& s) {
  const Config& c = s.config();
  const CorrelationKernel kernel = build_kernel(s);
  const EpSequence ep = build_ep(s);
  const DissimilarityReport report =
      dissimilarity(kernel, ep, static_cast<int>(c.integer("mon")), s.seed(), s.threads());
  s.metric("d_mean_db", report.d_mean_db);
  s.write_with("dissim.csv", [&](std::ostream& o) { csv::write_dissimilarity(o, report); });
}

void cmd_theory(Session& s) {
  const Config& c = s.config();
  const std::string curve = c.text("curve");
  const int k = static_cast<int>(c.integer("k"));
  std::vector<std::pair<double, double>> points;
  for (double x : c.range("snr_db")) {
    const double lin = from_db(x);
    double y = 0.0;
    if (curve == "pd")
      y = pd_theory(lin * (1.0 + c.real("gamma")) / k, c.real("pfa"));
    else if (curve == "pd-mf")
      y = pd_theory(lin, c.real("pfa"));
    else if (curve == "ser-coherent")
      y = ser_coherent_theory(k, lin);
    else if (curve == "ser-noncoherent-bound")
      y = ser_noncoherent_bound(k, lin);
    else
      y = ser_noncoherent_exact(k, lin);
    points.emplace_back(x, y);
  }
  s.write_with("theory.csv", [&](std::ostream& o) { csv::write_curve(o, points); });
}

const std::map<std::string, std::function<void(Session&)>>& handlers() {
  static const std::map<std::string, std::function<void(Session&)>> h{
      {"design", cmd_design}, {"ep", cmd_ep},   {"synth", cmd_synth},         {"process", cmd_process},
      {"pd", cmd_pd},         {"ser", cmd_ser}, {"af", cmd_af},               {"psl-sweep", cmd_psl_sweep},
      {"dissim", cmd_dissim}, {"theory", cmd_theory}};
  return h;
}

fs::path default_out_dir() {
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "jrc_out";
}

// Parsed flags for one subcommand.
struct FlagState {
  std::string config_path;
  std::string out_dir;
  std::map<std::string, std::string> values;  // key -> value given on the command line
  std::vector<std::pair<CLI::Option*, std::pair<std::string, std::string>>> switches;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Composite-modulation joint radar and communication toolkit", "jrc"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand help for every subcommand");

  std::map<std::string, FlagState> state;
  std::map<std::string, CLI::App*> subs;
  for (const auto& cmd : commands()) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.description);
    FlagState& fs_ = state[cmd.name];
    sub->add_option("--config", fs_.config_path, "key = value config file");
    sub->add_option("--out-dir", fs_.out_dir, std::string("output directory (default $") + kOutDirEnv + " or ./jrc_out)");
    std::vector<std::string> keys = cmd.keys;
    keys.push_back("seed");
    keys.push_back("threads");
    for (const auto& key : keys) {
      const KeySpec* spec = find_key(key);
      sub->add_option_function<std::string>(
          flag_name(key), [&fs_, key](const std::string& v) { fs_.values[key] = v; },
          spec->help + " [" + spec->default_value + "]");
    }
    for (const auto& [alias, key] : cmd.aliases)
      sub->add_option_function<std::string>(
          "--" + alias, [&fs_, key = key](const std::string& v) { fs_.values[key] = v; }, "alias of " + flag_name(key));
    for (const auto& [flag, key, value] : cmd.switches) {
      CLI::Option* opt = sub->add_flag("--" + flag);
      opt->description("shorthand for " + flag_name(key) + " " + value);
      fs_.switches.push_back({opt, {key, value}});
    }
    subs[cmd.name] = sub;
  }
  std::string validate_path;
  CLI::App* validate_cmd = app.add_subcommand("validate", "check a config file against the schema");
  std::string validate_flag;
  validate_cmd->add_option("path", validate_path, "config file");
  validate_cmd->add_option("--config", validate_flag, "config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate_cmd->parsed()) {
      if (validate_path.empty()) validate_path = validate_flag;
      if (validate_path.empty()) {
        err << "validate: a config file is required\n";
        return kExitUsage;
      }
      const auto violations = validate_config(validate_path);
      for (const auto& v : violations) out << to_string(v) << "\n";
      if (violations.empty()) out << "ok\n";
      return violations.empty() ? kExitOk : kExitValidation;
    }

    const Command* cmd = nullptr;
    for (const auto& c : commands())
      if (subs[c.name]->parsed()) cmd = &c;
    if (!cmd) return kExitUsage;
    FlagState& flags = state[cmd->name];

    Config config = flags.config_path.empty() ? Config::defaults() : load_config(flags.config_path);
    for (const auto& [opt, kv] : flags.switches)
      if (opt->count() > 0) config.set(kv.first, kv.second, "flag");
    for (const auto& [key, value] : flags.values) config.set(key, value, "flag");

    const auto violations = validate(config);
    if (!violations.empty()) {
      for (const auto& v : violations) err << "error: " << to_string(v) << "\n";
      return kExitValidation;
    }

    const fs::path out_dir = flags.out_dir.empty() ? default_out_dir() : fs::path(flags.out_dir);
    Session session(*cmd, std::move(config), out_dir);
    const auto start = std::chrono::steady_clock::now();
    handlers().at(cmd->name)(session);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    session.finish(elapsed.count());
    out << cmd->name << ": wrote outputs to " << out_dir.string() << "\n";
    return kExitOk;
  } catch (const ConfigParseError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"jrc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace jrc::cli
