#ifndef JRC_CLI_HPP
#define JRC_CLI_HPP

// Command-line front end. `run` is the whole program; tools/jrc_main.cpp only
// forwards argv so tests can drive it in-process.

#include "jrc/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace jrc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,       // unknown command or bad flag syntax
  kExitValidation = 3,  // schema violation or invalid input data
  kExitIo = 4,          // file system failure
  kExitNumeric = 5,     // numerical procedure failed
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "JRC_OUT_DIR";

struct OutputFile {
  std::string path;
  std::uint64_t hash = 0;  // FNV-1a 64 of the bytes written
  std::size_t bytes = 0;
};

struct RunManifest {
  std::string command;
  std::string target;  // what the command reproduces
  std::string config;  // resolved key = value text
  std::vector<OutputFile> inputs;
  std::vector<OutputFile> outputs;
  std::uint64_t seed = 0;
  std::string started_utc;
  double wall_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> metrics;
};

/// Subcommands: design, ep, synth, process, pd, ser, af, psl-sweep, dissim, theory, validate.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jrc::cli

#endif  // JRC_CLI_HPP
