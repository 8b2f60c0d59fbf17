#include "jrc/analysis.hpp"
#include "jrc/cli.hpp"
#include "jrc/config.hpp"
#include "jrc/csv.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace jrc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("jrc_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

int run(const std::vector<std::string>& args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const std::string& path) { return csv::load(path); }

void write_file(const std::string& path, const std::string& text) { csv::save(path, text); }

bool has_violation(const std::vector<cli::Violation>& v, const std::string& field, const std::string& text) {
  for (const auto& x : v)
    if (x.field == field && x.message.find(text) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("range syntax") {
    CHECK(cli::parse_range("0..3") == std::vector<double>{0, 1, 2, 3});
    CHECK(cli::parse_range("0..0.3:0.1") == std::vector<double>{0, 0.1, 0.2, 0.3});
    CHECK(cli::parse_range("1, 2.5,4") == std::vector<double>{1, 2.5, 4});
    CHECK(cli::parse_range("7") == std::vector<double>{7});
    CHECK_THROWS_AS(cli::parse_range("3..1"), InvalidInput);
    CHECK_THROWS_AS(cli::parse_range("0..1:0"), InvalidInput);
    CHECK_THROWS_AS(cli::parse_range("a..b"), InvalidInput);
  }

  TEST_CASE("config parsing and validation") {
    TempDir dir("config");
    write_file(dir / "ok.cfg", "# comment\nschema = 1\nk = 4\nsnr_db = 0..10:2  # sweep\n");
    CHECK(cli::validate_config(dir / "ok.cfg").empty());
    const cli::Config c = cli::load_config(dir / "ok.cfg");
    CHECK(c.integer("k") == 4);
    CHECK(c.entry("k").line == 3);
    CHECK(c.range("snr_db").size() == 6);

    write_file(dir / "bad.cfg", "k = 3\npfa = 0\nbits = 101\nmon = x\ncolour = blue\ntfd_lo = 1\n");
    const auto v = cli::validate_config(dir / "bad.cfg");
    CHECK(has_violation(v, "k", "K must be a power of two"));
    CHECK(has_violation(v, "pfa", "(0, 1)"));
    CHECK(has_violation(v, "mon", "integer"));
    CHECK(has_violation(v, "colour", "unknown key"));
    CHECK(has_violation(v, "tfd_hi", "precede"));
    for (const auto& x : v)
      if (x.field == "pfa") CHECK(x.line == 2);

    write_file(dir / "bits.cfg", "k = 4\nbits = 101\n");
    CHECK(has_violation(cli::validate_config(dir / "bits.cfg"), "bits", "multiple of log2(K)"));

    write_file(dir / "syntax.cfg", "k = 2\nthis line has no equals\n");
    const auto s = cli::validate_config(dir / "syntax.cfg");
    REQUIRE(s.size() == 1);
    CHECK(s[0].line == 2);
    CHECK_THROWS_AS(cli::load_config(dir / "missing.cfg"), IoError);
  }

  TEST_CASE("validate command reports and exits") {
    TempDir dir("validate");
    write_file(dir / "k3.cfg", "k = 3\n");
    write_file(dir / "ok.cfg", "k = 8\n");
    std::ostringstream out, err;
    CHECK(cli::run({"validate", dir / "k3.cfg"}, out, err) == cli::kExitValidation);
    CHECK(out.str().find("K must be a power of two") != std::string::npos);
    CHECK(run({"validate", "--config", dir / "ok.cfg"}) == cli::kExitOk);
    CHECK(fs::directory_iterator(dir.path) != fs::directory_iterator());
    CHECK(std::distance(fs::directory_iterator(dir.path), fs::directory_iterator()) == 2);
  }

  TEST_CASE("exit codes") {
    TempDir dir("exit");
    CHECK(run({"frobnicate"}) == cli::kExitUsage);
    CHECK(run({"theory", "--no-such-flag", "1"}) == cli::kExitUsage);
    CHECK(run({"theory", "--k", "3", "--out-dir", dir / "o"}) == cli::kExitValidation);
    CHECK(run({"theory", "--pfa", "0", "--out-dir", dir / "o"}) == cli::kExitValidation);
    CHECK(run({"process", "--input", dir / "missing.csv", "--set", "tone", "--out-dir", dir / "o"}) == cli::kExitIo);
    write_file(dir / "blocker", "x");
    CHECK(run({"theory", "--out-dir", (dir / "blocker") + "/sub"}) == cli::kExitIo);
  }

  TEST_CASE("theory command matches the library pointwise") {
    TempDir dir("theory");
    REQUIRE(run({"theory", "--ser-coherent", "--k", "2", "--d1-db", "0..20", "--out-dir", dir / "o"}) == 0);
    std::istringstream in(slurp(dir / "o/theory.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "snr_db,value");
    int rows = 0;
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      const double x = std::stod(line.substr(0, comma));
      const double y = std::stod(line.substr(comma + 1));
      CHECK(y == ser_coherent_theory(2, from_db(x)));
      ++rows;
    }
    CHECK(rows == 21);
    CHECK(fs::exists(dir / "o/theory.manifest.json"));
  }

  TEST_CASE("ep then psl-sweep reproduces the 1/13 zero-Doppler row") {
    TempDir dir("psl");
    REQUIRE(run({"ep", "--barker13", "--out-dir", dir / "o"}) == 0);
    REQUIRE(run({"psl-sweep", "--ep-file", dir / "o/ep.csv", "--set", "ideal", "--tfd-max", "0", "--out-dir",
                 dir / "o"}) == 0);
    std::istringstream in(slurp(dir / "o/psl.csv"));
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    std::stringstream fields(row);
    std::string tfd, a_db;
    std::getline(fields, tfd, ',');
    std::getline(fields, a_db, ',');
    CHECK(std::stod(a_db) == doctest::Approx(-20.0 * std::log10(13.0)).epsilon(1e-9));
  }

  TEST_CASE("dissim reruns are byte-identical") {
    TempDir dir("dissim");
    const std::vector<std::string> base{"dissim", "--k", "2", "--m", "200", "--n", "13", "--mon", "200", "--seed", "7"};
    auto with_out = [&](const std::string& o, const std::string& threads) {
      auto args = base;
      args.insert(args.end(), {"--out-dir", dir / o, "--threads", threads});
      return args;
    };
    REQUIRE(run(with_out("a", "1")) == 0);
    REQUIRE(run(with_out("b", "1")) == 0);
    REQUIRE(run(with_out("c", "3")) == 0);
    const std::string a = slurp(dir / "a/dissim.csv");
    CHECK(a == slurp(dir / "b/dissim.csv"));
    CHECK(a == slurp(dir / "c/dissim.csv"));
    CHECK(a.rfind("pair,D_linear\n", 0) == 0);
    CHECK(a.find("D_mean_db,") != std::string::npos);
  }

  TEST_CASE("design, synth and process round trip") {
    TempDir dir("chain");
    const std::string o = dir / "o";
    REQUIRE(run({"design", "--k", "4", "--m", "32", "--iterations", "50", "--out-dir", o}) == 0);
    REQUIRE(run({"synth", "--k", "4", "--set-file", o + "/set.csv", "--bits", "00011011000110110001101100", "--delay", "40",
                 "--out-dir", o}) == 0);
    REQUIRE(run({"process", "--k", "4", "--set-file", o + "/set.csv", "--input", o + "/received.csv", "--snr-db", "20",
                 "--out-dir", o}) == 0);
    const std::string det = slurp(o + "/detections.csv");
    CHECK(det.rfind("trial,detected,peak_index,peak_amp,threshold\n0,1,40,", 0) == 0);
    const std::string manifest = slurp(o + "/process.manifest.json");
    CHECK(manifest.find("\"decoded_bits_noncoherent\": \"00011011000110110001101100\"") != std::string::npos);
    std::istringstream set_in(slurp(o + "/set.csv"));
    const SignalSet set = csv::read_signal_set(set_in);
    CHECK(set.count() == 4);
    CHECK(set.length() == 32);
    const std::string trace = slurp(o + "/trace.csv");
    CHECK(trace.rfind("lag,abs,re,im\n", 0) == 0);
  }

  TEST_CASE("Monte Carlo commands are byte-identical across worker counts") {
    TempDir dir("mc");
    for (const std::string cmd : {"pd", "ser"}) {
      std::vector<std::string> args{cmd, "--set", "tone", "--m", "16", "--snr-db", "0..6:3", "--trials", "200"};
      auto a = args, b = args;
      a.insert(a.end(), {"--threads", "1", "--out-dir", dir / "a"});
      b.insert(b.end(), {"--threads", "4", "--out-dir", dir / "b"});
      REQUIRE(run(a) == 0);
      REQUIRE(run(b) == 0);
      CHECK(slurp(dir / ("a/" + cmd + ".csv")) == slurp(dir / ("b/" + cmd + ".csv")));
      CHECK(slurp(dir / ("a/" + cmd + ".config.txt")) == slurp(dir / ("b/" + cmd + ".config.txt")));
    }
  }

  TEST_CASE("output directory from the environment") {
    TempDir dir("env");
    setenv(cli::kOutDirEnv, (dir / "env_out").c_str(), 1);
    CHECK(run({"theory", "--snr-db", "0"}) == 0);
    unsetenv(cli::kOutDirEnv);
    CHECK(fs::exists(dir / "env_out/theory.csv"));
  }

  TEST_CASE("CSV round trips") {
    const SignalSet set = random_set(3, 7, 2);
    std::stringstream s;
    csv::write_signal_set(s, set);
    CHECK((csv::read_signal_set(s).chips() - set.chips()).cwiseAbs().maxCoeff() == 0.0);

    std::stringstream e;
    csv::write_ep(e, ep_barker13());
    CHECK((csv::read_ep(e).phases - ep_barker13().phases).cwiseAbs().maxCoeff() == 0.0);

    CVector x(3);
    x << cd(0.1, -0.2), cd(1.0 / 3.0, 2e-17), cd(-5, 7);
    std::stringstream w;
    csv::write_samples(w, x);
    CHECK((csv::read_samples(w) - x).cwiseAbs().maxCoeff() == 0.0);

    std::stringstream bad("k,m,re,im\n0,0,1,0\n0,1,oops,0\n");
    try {
      csv::read_signal_set(bad);
      CHECK(false);
    } catch (const csv::ParseError& err) {
      CHECK(err.line() == 3);
    }
    std::stringstream wrong("n,phase\n0,1\n");
    CHECK_THROWS_AS(csv::read_ep(wrong), csv::ParseError);
  }
}
