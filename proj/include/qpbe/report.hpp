#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qpbe {

inline constexpr const char* kToolName = "qpbe";
inline constexpr const char* kToolVersion = "1.0.0";

// Resolved experiment settings. One struct for every subcommand; unused fields
// stay at their defaults and are echoed in the report for provenance.
struct ExperimentConfig {
    std::string command;        // partitions | kernel | bound | rate | demo
    std::string model;          // binomial | binomial2 | correlated2 | steplaw | grammar |
                                // dissection | rademacher
    std::string grammar_file;
    std::string classes_spec;   // e.g. "all" or "3" or "3;4,5"
    std::string step_atoms;     // e.g. "0:0.5;1:0.5" or "0,0:0.25;..."
    int m = 0;                  // partitions/kernel dimension
    std::vector<long long> n_list;
    std::string T_policy = "sqrt-phi";  // or "explicit"
    double T = 0.0;
    int nodes = 0;              // 0 = default per dimension
    double tol = 1e-9;
    int dissection_max_n = 22;
    bool ambiguous_ok = false;  // grammar: caller asserts derivation counts suffice
    bool parallel = true;
    std::string output;         // empty = stdout
    std::string format = "csv"; // csv | json
};

// Throws qpbe::config_error on invalid settings.
void validate_config(const ExperimentConfig& cfg);

// Produces the full report (CSV or JSON) as a string. Identical configs yield
// byte-identical strings.
std::string run_experiment(const ExperimentConfig& cfg);

// Command-line entry: parses argv, runs, writes the report. Exit codes:
// 0 success, 2 configuration error, 3 model error, 4 numeric error.
int run_cli(int argc, const char* const* argv);

struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Deterministic float rendering used by all reports: %.17g.
std::string format_double(double v);

}  // namespace qpbe
