#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gvc/demos.hpp"
#include "gvc/forward.hpp"
#include "gvc/grid.hpp"
#include "gvc/optimize.hpp"

namespace gvc::cli {

/// Exit codes shared by every subcommand.
enum Exit : int {
    kOk = 0,
    kConfigError = 1,
    kDivergence = 2,   ///< solver divergence, numerical breakdown, or optimizer failure
    kCheckFailed = 3,  ///< a reported check (gradcheck threshold, Gronwall bound) failed
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GradcheckConfig {
    int directions = 10;
    double eps = 1e-5;
    double threshold = 1e-4;
};

struct ExtremumConfig {
    int samples = 33;
    double tol = 1e-4;
};

struct GronwallConfig {
    double A0 = 1.0;
    double B1 = 1.0;
    double B2 = 1.0;
    double B12 = 1.0;
    int order = 8;           ///< coefficient table printed up to this order
    double ds_max = 1.0;
    double dt_max = 1.0;
    int points = 10;         ///< lattice points per axis, ds = ds_max * k / points
};

struct RunConfig {
    std::string problem = "manufactured_linear";
    double A = 1.0;
    double B = 1.0;
    int Ns = 16;
    int Nt = 16;
    std::uint64_t seed = 1;
    ForwardOptions forward;
    OptimizeOptions optimizer;
    GradcheckConfig gradcheck;
    ExtremumConfig extremum;
    GronwallConfig gronwall;
    LqOptions lq;
    ChromatographyParams chromatography;
    double kappa = 0.5;   ///< exponential memory kernel amplitude
    double lambda = 1.0;  ///< exponential memory kernel decay
    std::string out_dir = "out";
};

/// Parses a JSON document; unknown keys and ill-typed values raise ConfigError
/// naming the key.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Throws ConfigError for non-positive tolerances, bad grids or an
/// unregistered problem name.
void validate_config(const RunConfig& cfg);

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_optimize(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_gronwall(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// gvctl entry point: `gvctl <solve|gradcheck|optimize|gronwall> CONFIG [flags]`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Shortest decimal string that round-trips to x.
std::string format_double(double x);

}  // namespace gvc::cli
