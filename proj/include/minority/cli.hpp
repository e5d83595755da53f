#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace minority::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "MINORITY_OUT_DIR";

std::string version();

/// Fully resolved run description. Together with the binary version it
/// determines every byte the run writes.
struct RunManifest {
    std::string subcommand;
    nlohmann::json config;  // every setting, defaults made explicit
    std::uint64_t seed = 0;
    std::string artifact_version;
    std::filesystem::path out_dir;
    std::vector<std::string> outputs;  // file names relative to out_dir

    nlohmann::json to_json() const;
    /// FNV-1a 64 of the canonical manifest JSON, as 16 hex digits.
    std::string hash() const;
};

/// Parses `subcommand [flags]`. Precedence: flags > --config file > defaults.
/// Throws ConfigError (offending key named) or UsageError.
RunManifest parse_config(const std::vector<std::string>& args);

/// Runs the subcommand, writing its files into manifest.out_dir. Returns an
/// exit status; numeric failures surface as kExitNumeric with a diagnostic on `err`.
int dispatch(RunManifest& manifest, std::ostream& out, std::ostream& err);

/// parse_config + dispatch with usage errors mapped to kExitUsage.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "a:b:step" (inclusive) or a comma-separated list.
std::vector<double> parse_range(const std::string& text);

}  // namespace minority::cli
