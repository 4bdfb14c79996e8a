#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "eaclutch/errors.hpp"

namespace eaclutch::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode { kOk = 0, kRuntimeFailure = 1, kUsageError = 2 };

class UsageError : public Error {
public:
    using Error::Error;
};

struct CommonArgs {
    std::string config;                  // path; empty means the bundled nominal config
    std::vector<std::string> overrides;  // key.path=value
    std::string out_dir = "out";
    unsigned long long seed = 0;
};

/// Written as manifest.json next to every output.
struct RunManifest {
    std::string config_path;
    std::string command;
    std::vector<std::string> overrides;
    std::string output_dir;
    unsigned long long seed = 0;
    std::string tool_version = kToolVersion;
    std::string config_hash;

    void write(const std::string& dir) const;
};

/// Path of the bundled nominal config.
std::string nominal_config_path();

// Each command reports to out/err and returns an ExitCode; nothing escapes.

int cmd_simulate(const std::string& kind, const CommonArgs& args, double threshold, std::ostream& out,
                 std::ostream& err);

struct SweepArgs {
    std::string spec;                // JSON sweep spec; may be empty when axes are given
    std::vector<std::string> axes;   // name=v1,v2,...
    std::string metric;              // overrides the sweep file's metric when set
    int threads = 0;
    bool serial = false;
    bool quiet = false;
};
int cmd_sweep(const CommonArgs& args, const SweepArgs& sweep, std::ostream& out, std::ostream& err);

int cmd_fit(const std::string& kind, const std::string& data_file, const CommonArgs& args, std::ostream& out,
            std::ostream& err);

struct AnalyzeArgs {
    std::vector<std::string> files;
    std::string out_dir = "out";
    std::string config;  // for preload; empty means nominal
    std::vector<std::string> overrides;
    double cutoff_hz = 250.0;
    bool filter_release = false;
    int threads = 0;
};
int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err);

struct BodeArgs {
    std::vector<double> frequencies;  // explicit list wins over the range
    double f_min = 1.0;
    double f_max = 30e3;
    int points = 25;
    bool quasi_static = false;
};
int cmd_bode(const CommonArgs& args, const BodeArgs& bode, std::ostream& out, std::ostream& err);

/// Full command line front end (CLI11). argv[0] is the program name.
int run(int argc, char** argv);

}  // namespace eaclutch::cli
