#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace prstab::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,  // precondition or invalid arguments
  kIoError = 3,      // unreadable or malformed input, unwritable output
};

struct AnalyzeArgs {
  std::filesystem::path matrix;
  std::string method = "auto";  // exact | numeric | auto
  int restarts = 32;
  std::uint64_t seed = 0;
  std::filesystem::path json;
};

struct HarmonicArgs {
  std::string m_range = "3..15";
  int exact_max = 24;
  std::filesystem::path csv;
};

struct GaussianArgs {
  std::string field = "real";
  std::size_t d = 2;
  std::vector<std::size_t> m_values;
  int trials = 10;
  std::uint64_t seed = 0;
  int restarts = 0;
  std::filesystem::path csv;
};

struct KernelArgs {
  std::string field = "real";
  int grid = 7;
  long mc_samples = 1000000;
  std::uint64_t seed = 0;
  std::filesystem::path csv;
};

struct RecoverArgs {
  std::filesystem::path matrix;
  std::string gaussian;  // "m,d"
  std::string field = "real";
  double noise = 0.1;
  int trials = 100;
  std::uint64_t seed = 0;
  double delta = 0.05;
  int restarts = 16;
  std::filesystem::path csv;
};

struct OptimizeArgs {
  int m = 4;
  int restarts = 16;
  std::uint64_t seed = 0;
  long budget = 20000;
  std::filesystem::path json;
};

// Each command returns an ExitCode and reports problems on stderr.
int cmd_analyze(const AnalyzeArgs& args, unsigned threads);
int cmd_harmonic(const HarmonicArgs& args, unsigned threads);
int cmd_gaussian(const GaussianArgs& args, unsigned threads);
int cmd_kernel(const KernelArgs& args, unsigned threads);
int cmd_recover(const RecoverArgs& args, unsigned threads);
int cmd_optimize(const OptimizeArgs& args, unsigned threads);

/// Full command line: `prstab [--threads N] <subcommand> [options]`.
/// PRSTAB_THREADS supplies the worker count when --threads is absent.
int run_cli(int argc, const char* const* argv);

}  // namespace prstab::cli
