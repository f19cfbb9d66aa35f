#pragma once

#include "mdres/sweeps.hpp"

#include <filesystem>

namespace mdres {

/// Depth or uncertainty sweep requested by a configuration file.
struct SweepConfig {
  enum class Kind { Depth, Uncertainty };
  Kind kind = Kind::Depth;
  std::vector<double> depths;
  std::vector<DepthStrategy> strategies{DepthStrategy::Interface, DepthStrategy::Truncated};
  UncertaintySpec uncertainty;
};

struct AnalyticConfig {
  double rho = 29.0;
  double spacing = 0.03;
  std::vector<double> depths;
};

struct OutputConfig {
  std::filesystem::path dir = "out";
  bool vtk = true;
};

/**
 * @brief Parsed configuration file (JSON, SI units only).
 *
 * The scenario is parsed only when a command needs it, so an analytic-only
 * file needs no domain. Every parse error is a ConfigError whose message
 * starts with the offending field path, e.g. "survey.spacing".
 */
class RunConfig {
public:
  static RunConfig from_file(const std::filesystem::path& path);
  static RunConfig from_string(const std::string& text);

  [[nodiscard]] ScenarioSpec scenario() const;
  [[nodiscard]] SweepConfig sweep() const;
  [[nodiscard]] AnalyticConfig analytic() const;
  [[nodiscard]] OutputConfig output() const;

  /// Directory of the configuration file; relative paths resolve against it.
  [[nodiscard]] const std::filesystem::path& base_dir() const { return base_dir_; }

private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  std::filesystem::path base_dir_;
};

} // namespace mdres
