#pragma once

#include "sgmtl/datagen.hpp"
#include "sgmtl/types.hpp"

#include <json.hpp>

#include <optional>
#include <string>

// On-disk dataset format and helpers shared by the CLI commands and tests.
//
// A dataset directory holds:
//   manifest.json   {"d": ..., "loss_kind": "squared", "tasks": ["task_00", ...]}
//   task_<id>.csv   header "target,f0,...,f{d-1}", one example per row,
//                   floats printed with 17 significant digits
//   truth.json      optional generating ground truth
namespace sgmtl {

// %.17g rendering used for every float that goes to disk (round-trips exactly).
std::string format_double(double value);

void save_dataset(const std::string& dir, const Problem& problem,
                  const GroundTruth* truth = nullptr);

struct LoadedDataset {
  Problem problem;
  std::optional<GroundTruth> truth;
};

// Throws IoError on missing/unreadable/malformed files.
LoadedDataset load_dataset(const std::string& dir);

// FNV-1a over the manifest and every task CSV (in manifest order), as a
// 16-hex-digit string. Stable across runs; changes if any byte changes.
std::string dataset_fingerprint(const std::string& dir);

// JSON <-> matrix helpers ({"rows": r, "cols": c, "data": [...]} row-major).
nlohmann::json matrix_to_json(const Eigen::MatrixXd& matrix);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

}  // namespace sgmtl
