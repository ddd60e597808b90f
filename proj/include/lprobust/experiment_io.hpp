#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "lprobust/transform.hpp"

namespace lprobust::io {

/// Optional ground truth carried alongside a synthetic experiment.
struct TruthMetadata {
  Transform truth;
  std::size_t n_ideal;
};

struct ExperimentFile {
  Experiment experiment;
  std::optional<TruthMetadata> truth;
};

/// Schema:
///   {"dim_in": int, "dim_out": int,
///    "pairs": [{"input": [..], "output": [..]}, ...],
///    "truth": {"group": str, "params": [..], "n_ideal": int}}   (optional)
nlohmann::json to_json(const Experiment& exp, const std::optional<TruthMetadata>& truth = {});
ExperimentFile from_json(const nlohmann::json& j);

ExperimentFile read_experiment(const std::filesystem::path& path);
void write_experiment(const std::filesystem::path& path, const Experiment& exp,
                      const std::optional<TruthMetadata>& truth = {});

}  // namespace lprobust::io
