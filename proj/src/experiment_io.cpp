#include "lprobust/experiment_io.hpp"

#include <fstream>

namespace lprobust::io {

namespace {

Point point_from(const nlohmann::json& j, std::size_t dim, const char* what) {
  if (!j.is_array()) throw InvalidArgument(std::string(what) + " must be an array");
  if (j.size() != dim) {
    throw InvalidArgument(std::string(what) + " has " + std::to_string(j.size()) +
                          " components, expected " + std::to_string(dim));
  }
  std::vector<double> c;
  c.reserve(dim);
  for (const auto& v : j) {
    if (!v.is_number()) throw InvalidArgument(std::string(what) + " component is not a number");
    c.push_back(v.get<double>());
  }
  return Point(std::move(c));
}

std::size_t positive_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() <= 0) {
    throw InvalidArgument(std::string("field '") + key + "' must be a positive integer");
  }
  return j.at(key).get<std::size_t>();
}

}  // namespace

nlohmann::json to_json(const Experiment& exp, const std::optional<TruthMetadata>& truth) {
  nlohmann::json j;
  j["dim_in"] = exp.dim_in();
  j["dim_out"] = exp.dim_out();
  auto& pairs = j["pairs"] = nlohmann::json::array();
  for (const auto& pr : exp.pairs()) {
    pairs.push_back({{"input", pr.input.coords}, {"output", pr.output.coords}});
  }
  if (truth) {
    j["truth"] = {{"group", std::string(to_string(truth->truth.group()))},
                  {"params", truth->truth.params()},
                  {"n_ideal", truth->n_ideal}};
  }
  return j;
}

ExperimentFile from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("experiment JSON must be an object");
  const std::size_t dim_in = positive_int(j, "dim_in");
  const std::size_t dim_out = positive_int(j, "dim_out");
  if (!j.contains("pairs") || !j.at("pairs").is_array()) {
    throw InvalidArgument("field 'pairs' must be an array");
  }
  std::vector<ObservationPair> pairs;
  for (const auto& pj : j.at("pairs")) {
    if (!pj.is_object() || !pj.contains("input") || !pj.contains("output")) {
      throw InvalidArgument("each pair needs 'input' and 'output'");
    }
    pairs.push_back({point_from(pj.at("input"), dim_in, "input"),
                     point_from(pj.at("output"), dim_out, "output")});
  }
  ExperimentFile f{Experiment(dim_in, dim_out, std::move(pairs)), std::nullopt};
  if (j.contains("truth")) {
    const auto& tj = j.at("truth");
    const Group g = parse_group(tj.at("group").get<std::string>());
    auto params = tj.at("params").get<std::vector<double>>();
    const std::size_t n_ideal = tj.value("n_ideal", std::size_t{0});
    f.truth = TruthMetadata{Transform(g, dim_in, std::move(params)), n_ideal};
  }
  return f;
}

ExperimentFile read_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("malformed experiment JSON in " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

void write_experiment(const std::filesystem::path& path, const Experiment& exp,
                      const std::optional<TruthMetadata>& truth) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(exp, truth).dump(2) << '\n';
}

}  // namespace lprobust::io
