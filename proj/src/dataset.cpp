#include "lsr/dataset.hpp"

#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lsr/io_util.hpp"
#include "lsr/metric.hpp"

namespace lsr {

using nlohmann::json;

namespace {

json header_json(const DatasetHeader& h) {
  return json{{"latent_dim", h.latent_dim},
              {"metric", to_string(h.metric)},
              {"seed", h.seed},
              {"generator", h.generator}};
}

DatasetHeader parse_header(const json& j) {
  DatasetHeader h;
  h.latent_dim = j.at("latent_dim").get<int>();
  h.metric = metric_from_string(j.at("metric").get<std::string>());
  h.seed = j.at("seed").get<std::uint64_t>();
  h.generator = j.value("generator", std::string{});
  return h;
}

json action_json(const ActionSpec& u) {
  return json{{"pick", {u.pick.row, u.pick.col}},
              {"release", {u.release.row, u.release.col}}};
}

ActionSpec parse_action(const json& j) {
  ActionSpec u;
  u.pick = {j.at("pick")[0].get<int>(), j.at("pick")[1].get<int>()};
  u.release = {j.at("release")[0].get<int>(), j.at("release")[1].get<int>()};
  return u;
}

json coords_json(const Vector& z) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < z.size(); ++i) arr.push_back(z[i]);
  return arr;
}

Vector parse_coords(const json& arr) {
  Vector z(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) z[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return z;
}

}  // namespace

void save_dataset(const LatentDataset& ds, const std::filesystem::path& file) {
  std::ostringstream out;
  out << header_json(ds.header).dump() << '\n';
  for (const auto& t : ds.tuples) {
    json rec{{"z1", coords_json(t.z1)},
             {"z2", coords_json(t.z2)},
             {"a", t.action ? 1 : 0},
             {"u", t.u ? action_json(*t.u) : json(nullptr)},
             {"class1", t.class1 ? json(*t.class1) : json(nullptr)},
             {"class2", t.class2 ? json(*t.class2) : json(nullptr)}};
    out << rec.dump() << '\n';
  }
  write_file_atomic(file, out.str());
}

LatentDataset load_dataset(const std::filesystem::path& file) {
  std::istringstream in(read_file(file));
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset file is empty: " + file.string());
  LatentDataset ds;
  ds.header = parse_header(json::parse(line));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    TransitionTuple t;
    t.z1 = parse_coords(rec.at("z1"));
    t.z2 = parse_coords(rec.at("z2"));
    t.action = rec.at("a").get<int>() != 0;
    if (!rec.at("u").is_null()) t.u = parse_action(rec.at("u"));
    if (!rec.at("class1").is_null()) t.class1 = rec.at("class1").get<int>();
    if (!rec.at("class2").is_null()) t.class2 = rec.at("class2").get<int>();
    validate_tuple(t);
    if (t.z1.size() != ds.header.latent_dim)
      throw std::runtime_error("dataset record dimension differs from header latent_dim");
    ds.tuples.push_back(std::move(t));
  }
  return ds;
}

void save_symbolic_dataset(const SymbolicDataset& ds, const std::filesystem::path& file) {
  std::ostringstream out;
  out << header_json(ds.header).dump() << '\n';
  for (const auto& t : ds.tuples) {
    json rec{{"a", t.action ? 1 : 0},
             {"u", t.u ? action_json(*t.u) : json(nullptr)},
             {"class1", t.class1},
             {"class2", t.class2}};
    out << rec.dump() << '\n';
  }
  write_file_atomic(file, out.str());
}

SymbolicDataset load_symbolic_dataset(const std::filesystem::path& file) {
  std::istringstream in(read_file(file));
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset file is empty: " + file.string());
  SymbolicDataset ds;
  ds.header = parse_header(json::parse(line));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    SymbolicTuple t;
    t.action = rec.at("a").get<int>() != 0;
    if (!rec.at("u").is_null()) t.u = parse_action(rec.at("u"));
    if (rec.at("class1").is_null() || rec.at("class2").is_null())
      throw std::runtime_error("symbolic dataset record is missing class labels");
    t.class1 = rec.at("class1").get<int>();
    t.class2 = rec.at("class2").get<int>();
    if (t.action && !t.u)
      throw std::runtime_error("symbolic action record is missing action specifics");
    ds.tuples.push_back(std::move(t));
  }
  return ds;
}

std::vector<TransitionTuple> filter_tuples(std::span<const TransitionTuple> tuples,
                                           bool action) {
  std::vector<TransitionTuple> out;
  for (const auto& t : tuples)
    if (t.action == action) out.push_back(t);
  return out;
}

}  // namespace lsr
