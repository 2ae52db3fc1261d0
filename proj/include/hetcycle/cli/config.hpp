#pragma once

// Flat INI-style run configuration: [model], [sim] and one optional section
// per subcommand. Values are kept as canonical strings so sweeps can override
// a key and rebuild.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetcycle/dynamics.hpp"
#include "hetcycle/model.hpp"

namespace hetcycle::cli {

/// All validation problems of one configuration, one per line.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

using RawConfig = std::map<std::string, std::map<std::string, std::string>>;

/// Parses a number or a multiple of pi: "1.2", "pi", "-pi/4", "0.55*pi", "2pi/3".
double parse_angle(const std::string& text);

struct SimSection {
    double dt = 0.01;
    double T = 100.0;
    double eta = 0.0;
    std::uint64_t seed = 0;
};

struct EigenSection {
    double fd_step = 1e-6;
};

struct SimulateSection {
    std::string initial;  // S/D word; empty picks the first equilibrium of the default cycle
    long long stride = 0; // output stride in steps; 0 means one row per 0.1 time units
    double eps_near = 1.2;
    double eps_leave = 1.4;
};

struct BasinSection {
    std::string cycle;    // C2, C2_hat or C2_check; empty picks C2 (M=3) or C2_hat (M=4)
    int connection = 1;   // 1-based
    double epsilon = 1e-3;
    long long n = 1000;
    double T_max = 500.0;
    double dt = 0.01;
    double max_distance = 0.5;
    std::vector<double> ladder;  // optional decreasing epsilons for a sign estimate
    int workers = 0;
};

struct WedgeSection {
    int resolution = 200;
    double T_max = 2000.0;
    double dt = 0.05;
    double tol = 0.05;
    int workers = 0;
};

struct FreqSection {
    std::string initial;
    double T = 1000.0;
    double tol = 1e-2;
};

struct SweepAxis {
    std::string section;
    std::string key;
    double from = 0.0;
    double to = 0.0;
    int points = 1;

    std::vector<double> values() const;
};

struct SweepSection {
    std::string command;
    std::vector<SweepAxis> axes;  // one or two
    int workers = 0;
};

struct RunConfig {
    ModelParams model;
    FieldKind kind = FieldKind::NonpairwiseApprox;
    SimSection sim;
    EigenSection eigen;
    SimulateSection simulate;
    BasinSection basin;
    WedgeSection wedge;
    FreqSection freq;
    SweepSection sweep;
    RawConfig effective;  // every known key with its applied value
};

/// Key = value lines grouped in [sections]; '#' and ';' start comments.
RawConfig parse_raw(const std::string& text);

/// Validates a raw configuration, applying defaults. Throws ConfigError
/// listing every missing key, unknown key, type mismatch and range error.
RunConfig build_config(const RawConfig& raw);

RunConfig parse_config(const std::string& text);

/// Applies "section.key=value" (a bare key means [model]).
void apply_override(RawConfig& raw, const std::string& assignment);

}  // namespace hetcycle::cli
