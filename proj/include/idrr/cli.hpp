#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace idrr::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kConfigError = 2, kDataError = 3, kRuntimeError = 4 };

struct GlobalOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool force = false;
};

struct EvaluateOptions {
    std::string run_dir;
    std::string test = "discogem";  // discogem | lin | ji | cross
    std::string data_dir;           // prepared DiscoGeM data (for --test discogem)
    std::string pdtb_path;          // overrides the run config's pdtb_path
};

// Each command writes into `out_dir` (created if needed) together with a manifest.json, and
// refuses to overwrite an existing manifest unless `force` is set.
void cmd_prepare(const GlobalOptions& options, std::ostream& log);
void cmd_train(const GlobalOptions& options, const std::string& data_dir, std::ostream& log);
void cmd_evaluate(const GlobalOptions& options, const EvaluateOptions& eval, std::ostream& log);
void cmd_analyze(const GlobalOptions& options, const std::string& data_dir, const std::string& run_dir,
                 std::ostream& log);
void cmd_baseline(const GlobalOptions& options, const std::string& data_dir, std::ostream& log);

// Maps an exception to the documented exit code (2 config, 3 data, 4 anything else).
int exit_code_for(const std::exception& e);

// Recomputes the hashes recorded in `dir`/manifest.json; returns the mismatching paths.
std::vector<std::string> verify_manifest(const std::string& dir);

}  // namespace idrr::cli
