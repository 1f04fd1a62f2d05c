#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nhstark/chain_model.hpp"
#include "nhstark/dynamics.hpp"
#include "nhstark/gauge.hpp"

namespace nhstark {

enum class Command { SkinFactor, Classify, LocalizationMap, Entanglement, Spectrum };

const char* to_string(Command command);
Command parse_command(std::string_view name);

struct GridSpec {
  double first = 0.0;
  double last = 0.0;
  int count = 0;
  std::vector<double> extras;

  bool operator==(const GridSpec&) const = default;
};

/// Everything that determines the content of a run's output files.
struct RunConfig {
  Command command = Command::Spectrum;
  ChainParams params;
  int max_sites = kDefaultMaxDenseSites;
  double tolerance = 1e-9;  // critical-branch tolerance for classify
  double fraction = 0.2;    // selective IPR fraction
  std::optional<SiteWindow> fit_window;        // power-law window, default [10, N-10]
  std::optional<SiteWindow> increment_window;  // bond window, default [N/2, N-1]
  GridSpec gamma_grid{0.01, 0.5, 30, {}};  // cuts are always added as exact rows
  GridSpec ratio_grid{0.05, 4.0, 40, {}};
  std::vector<double> cuts{0.081, 0.219, 0.362, 0.481};
  std::vector<double> ratios;  // entanglement: F1/F2 values; empty uses F1
  DynamicsOptions dynamics;
  std::string output_dir = ".";

  SiteWindow resolved_fit_window() const;
  SiteWindow resolved_increment_window() const;

  bool operator==(const RunConfig&) const = default;
};

/// Applies `key = value` lines on top of `config`. Blank lines and `#`
/// comments are ignored. Errors name the source, line and key.
void apply_config_text(RunConfig& config, std::string_view text, std::string_view source);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// Throws Error(Config) or Error(InvalidArgument) on an unusable config.
void validate(const RunConfig& config);

nlohmann::json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

struct OutputFile {
  std::filesystem::path path;
  std::string sha256;
};

struct RunResult {
  std::vector<OutputFile> files;
  nlohmann::json summary;
};

/// Executes one command. `threads` changes wall time only.
RunResult run(const RunConfig& config, int threads = 1);

enum class Figure { Fig1, Fig2, Fig3 };

Figure parse_figure(std::string_view name);
const char* to_string(Figure figure);

/// Compiled-in configurations for the three reference figures.
std::vector<RunConfig> figure_recipe(Figure figure, const std::string& output_dir);

/// Runs a recipe and writes manifest.json listing every output with its hash.
RunResult reproduce(Figure figure, const std::string& output_dir, int threads = 1);

std::string sha256_hex(std::string_view bytes);

/// Shortest round-trip-safe text used in file names, e.g. 0.481 -> "0.481".
std::string format_label(double value);

}  // namespace nhstark
