#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "dexp/model.hpp"

namespace dexp::cli {

enum Exit : int {
  kOk = 0,
  kFailed = 1,  // verification failed or a numerical routine gave up
  kUsage = 2,   // bad flags, bad config, invalid parameters
};

/// Everything a command needs once flags, config file and JSON input are merged.
struct Options {
  std::string command;
  MarketParams params;
  Bias bias;
  TaxSpec tax;
  SolverSettings settings;
  std::uint64_t seed = 42;
  std::size_t points = 0;  // 0 picks the command default
  bool json = false;
  std::string out_dir;

  std::string axis = "theta";
  double lo = 0.0;
  double hi = 0.0;
  bool range_given = false;

  std::string figure;

  std::uint64_t agents = 10000;
  std::uint64_t reps = 100000;
  bool antithetic = false;
  std::string sampling = "sufficient";
  unsigned threads = 1;

  bool quick = false;
  std::uint64_t draws = 20;
};

nlohmann::json to_json(const Options& o);
Options options_from_json(const nlohmann::json& j);

/// Record written next to every output file; replaying it reruns the command.
struct RunManifest {
  std::string tool = "dexp";
  std::string version;
  Options options;
  std::vector<std::string> outputs;  // file names relative to options.out_dir
  std::vector<std::string> notes;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Parses a flat key=value file ('#' starts a comment). Throws Error(InvalidInput).
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path);

/// Entry point shared by main() and the tests. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in);

std::string version();

}  // namespace dexp::cli
