#pragma once

// Subcommand dispatch. Every command writes its artifacts plus manifest.json
// (artifact list, effective configuration, timestamp) into the output
// directory and returns a process exit code.

#include <exception>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hetcycle/cli/config.hpp"
#include "hetcycle/stability.hpp"
#include "json.hpp"

namespace hetcycle::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitPrecondition = 4 };

/// A required existence or nonresonance condition fails.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 2 for configuration problems, 4 for unmet preconditions, 3 otherwise.
int exit_code_for(const std::exception_ptr& e);

/// Finite values as numbers, infinities as "inf" / "-inf".
nlohmann::json index_to_json(const IndexValue& v);
nlohmann::json report_to_json(const StabilityReport& r);

using Row = std::vector<std::pair<std::string, std::string>>;

/// One sweep row for a single grid point of `command`.
Row summarize(const std::string& command, const RunConfig& cfg, int inner_workers);

/// Runs a subcommand, writing artifacts to out_dir. Messages go to log.
int dispatch(const std::string& command, const RunConfig& cfg, const RawConfig& raw,
             const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace hetcycle::cli
