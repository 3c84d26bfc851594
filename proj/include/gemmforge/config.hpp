#pragma once

// Tunables for the engines and the benchmark driver.
//
// Sources, lowest to highest precedence: built-in defaults, a `key = value`
// file, BLISLAB_* environment variables, command-line overrides.
//
// File grammar: one `key = value` per line, `#` starts a comment, blank
// lines are ignored. Keys:
//   mr nr mc kc nc kernel parallel_loop threads
//   size_min size_max size_step check algorithms seed format shapes
// `algorithms` is a comma list; `shapes` is `m,n,k;m,n,k;...`.
//
// Environment: BLISLAB_IC_NT -> threads, BLISLAB_KERNEL -> kernel,
// BLISLAB_THREAD_LOOP -> parallel_loop.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gemmforge/goto.hpp"
#include "gemmforge/parallel.hpp"

namespace gemmforge {

class KernelRegistry;

enum class OutputFormat { table, csv, matlab };

std::string_view to_string(OutputFormat format) noexcept;
OutputFormat parse_output_format(std::string_view text);

struct Shape {
    index_t m, n, k;
    bool operator==(const Shape&) const = default;
};

/// Parses `m,n,k;m,n,k;...`.
std::vector<Shape> parse_shapes(std::string_view text);

struct BenchSettings {
    index_t size_min = 16;
    index_t size_max = 1024;
    index_t size_step = 16;
    bool check = false;
    std::vector<std::string> algorithms{"goto"};
    std::uint64_t seed = 1;
    /// When non-empty, replaces the square size sweep.
    std::vector<Shape> shapes;

    bool operator==(const BenchSettings&) const = default;
};

struct Config {
    GotoParams goto_params;
    LoopChoice parallel_loop = LoopChoice::ic;
    index_t threads = 1;
    BenchSettings bench;
    OutputFormat format = OutputFormat::table;

    bool operator==(const Config&) const = default;
};

/// Raised for malformed input or a config that breaks an invariant. For
/// validation failures `violations()` lists every broken invariant.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, std::vector<std::string> violations = {})
        : std::runtime_error(what), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Every violated blocking-parameter invariant, in a fixed order. Empty means valid.
std::vector<std::string> validate(const GotoParams& params);
std::vector<std::string> validate(const GotoParams& params, const KernelRegistry& registry);
std::vector<std::string> validate(const Config& config, const KernelRegistry& registry);

struct ConfigLine {
    std::string key;
    std::string value;
    std::size_t line;
};

/// Parses `key = value` text. `source` names the input in error messages.
/// Throws ConfigError("<source>:<line>: ...") on a malformed line.
std::vector<ConfigLine> parse_config_text(std::string_view text, std::string_view source = "<config>");

/// Applies one key to `config`. Throws ConfigError for an unknown key or a
/// value of the wrong type.
void apply_setting(Config& config, std::string_view key, std::string_view value);

/// Builds a validated Config from defaults, then `file` (if any), then the
/// BLISLAB_* entries of `env`, then `cli` (keys as in the file grammar).
Config load_config(const std::optional<std::filesystem::path>& file, const KeyValues& env,
                   const KeyValues& cli);
Config load_config(const std::optional<std::filesystem::path>& file, const KeyValues& env,
                   const KeyValues& cli, const KernelRegistry& registry);

/// BLISLAB_* variables present in the process environment.
KeyValues environment_overlay();

/// Config as file text; load_config on the result reproduces `config`.
std::string to_text(const Config& config);

}  // namespace gemmforge
