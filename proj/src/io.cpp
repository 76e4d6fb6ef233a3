#include "sgmtl/io.hpp"

#include "sgmtl/rng.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace sgmtl {

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("short write to " + path.string());
}

nlohmann::json parse_json_file(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

std::string task_csv(const TaskDataset& task) {
  std::string out = "target";
  for (Eigen::Index j = 0; j < task.d(); ++j) out += ",f" + std::to_string(j);
  out += "\n";
  for (Eigen::Index i = 0; i < task.n(); ++i) {
    out += format_double(task.targets[i]);
    for (Eigen::Index j = 0; j < task.d(); ++j) {
      out += ',';
      out += format_double(task.features(i, j));
    }
    out += "\n";
  }
  return out;
}

TaskDataset task_from_csv(const std::string& content, const std::string& task_id,
                          Eigen::Index d, LossKind loss, const fs::path& path) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV " + path.string());

  std::string expected_header = "target";
  for (Eigen::Index j = 0; j < d; ++j) expected_header += ",f" + std::to_string(j);
  if (line != expected_header) throw IoError("unexpected CSV header in " + path.string());

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(d) + 1);
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t comma = line.find(',', start);
      const std::string field =
          line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      try {
        std::size_t used = 0;
        row.push_back(std::stod(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw IoError("bad numeric field '" + field + "' in " + path.string());
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (static_cast<Eigen::Index>(row.size()) != d + 1)
      throw IoError("row with " + std::to_string(row.size()) + " fields in " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("no data rows in " + path.string());

  TaskDataset task;
  task.task_id = task_id;
  task.loss = loss;
  task.features.resize(static_cast<Eigen::Index>(rows.size()), d);
  task.targets.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    task.targets[static_cast<Eigen::Index>(i)] = rows[i][0];
    for (Eigen::Index j = 0; j < d; ++j)
      task.features(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j) + 1];
  }
  return task;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& matrix) {
  nlohmann::json j;
  j["rows"] = matrix.rows();
  j["cols"] = matrix.cols();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(matrix.size()));
  for (Eigen::Index r = 0; r < matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) data.push_back(matrix(r, c));
  j["data"] = std::move(data);
  return j;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  try {
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
      throw IoError("matrix data length does not match rows*cols");
    Eigen::MatrixXd out(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = data[k++];
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed matrix JSON: ") + e.what());
  }
}

void save_dataset(const std::string& dir, const Problem& problem, const GroundTruth* truth) {
  validate_problem(problem);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir);

  nlohmann::ordered_json manifest;
  manifest["d"] = problem.d();
  manifest["loss_kind"] = to_string(problem.tasks.front().loss);
  std::vector<std::string> ids;
  for (const auto& task : problem.tasks) ids.push_back(task.task_id);
  manifest["tasks"] = ids;
  write_file(fs::path(dir) / "manifest.json", manifest.dump(2) + "\n");

  for (const auto& task : problem.tasks)
    write_file(fs::path(dir) / (task.task_id + ".csv"), task_csv(task));

  if (truth != nullptr) {
    nlohmann::ordered_json tj;
    tj["group_of_task"] = truth->group_of_task;
    tj["supports"] = truth->supports;
    tj["weights"] = matrix_to_json(truth->weights);
    write_file(fs::path(dir) / "truth.json", tj.dump(2) + "\n");
  }
}

LoadedDataset load_dataset(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::exists(root)) throw IoError("dataset directory not found: " + dir);
  const nlohmann::json manifest = parse_json_file(root / "manifest.json");

  LoadedDataset loaded;
  try {
    const Eigen::Index d = manifest.at("d").get<Eigen::Index>();
    const LossKind loss = loss_kind_from_string(manifest.at("loss_kind").get<std::string>());
    for (const auto& id : manifest.at("tasks")) {
      const std::string task_id = id.get<std::string>();
      const fs::path csv = root / (task_id + ".csv");
      loaded.problem.tasks.push_back(task_from_csv(read_file(csv), task_id, d, loss, csv));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest in " + dir + ": " + e.what());
  }
  validate_problem(loaded.problem);

  const fs::path truth_path = root / "truth.json";
  if (fs::exists(truth_path)) {
    const nlohmann::json tj = parse_json_file(truth_path);
    try {
      GroundTruth truth;
      truth.group_of_task = tj.at("group_of_task").get<std::vector<int>>();
      truth.supports = tj.at("supports").get<std::vector<std::vector<int>>>();
      truth.weights = matrix_from_json(tj.at("weights"));
      loaded.truth = std::move(truth);
    } catch (const nlohmann::json::exception& e) {
      throw IoError("malformed truth.json in " + dir + ": " + e.what());
    }
  }
  return loaded;
}

std::string dataset_fingerprint(const std::string& dir) {
  const fs::path root(dir);
  const std::string manifest_text = read_file(root / "manifest.json");
  std::uint64_t hash = fnv1a(manifest_text);

  // Hash task files in manifest order so the fingerprint is layout-stable.
  const nlohmann::json manifest = parse_json_file(root / "manifest.json");
  try {
    for (const auto& id : manifest.at("tasks")) {
      const std::string csv = read_file(root / (id.get<std::string>() + ".csv"));
      hash = fnv1a(csv.data(), csv.size(), hash);
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest in " + dir + ": " + e.what());
  }

  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace sgmtl
