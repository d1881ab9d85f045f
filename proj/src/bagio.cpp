#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "umauc/bagdata.hpp"
#include "umauc/textfmt.hpp"

namespace umauc {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kFormatVersion = 1;

void write_instance_row(std::ostream& out, const Instance& ins) {
  for (double f : ins.features) out << format_double(f) << ',';
  if (ins.hidden_label)
    out << (*ins.hidden_label > 0 ? "+1" : "-1");
  else
    out << "NA";
  out << '\n';
}

Instance parse_instance_row(const std::string& line, const std::string& context) {
  Instance ins;
  std::size_t start = 0;
  std::vector<std::string_view> fields;
  const std::string_view view(line);
  while (true) {
    const std::size_t comma = view.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(view.substr(start));
      break;
    }
    fields.push_back(view.substr(start, comma - start));
    start = comma + 1;
  }
  if (fields.size() < 2)
    throw std::runtime_error(context + ": row needs features and a label column");
  for (std::size_t i = 0; i + 1 < fields.size(); ++i)
    ins.features.push_back(parse_double(fields[i], context));
  const std::string_view label = fields.back();
  if (label == "NA")
    ins.hidden_label = std::nullopt;
  else if (label == "+1" || label == "1")
    ins.hidden_label = +1;
  else if (label == "-1")
    ins.hidden_label = -1;
  else
    throw std::runtime_error(context + ": bad label '" + std::string(label) + "'");
  return ins;
}

std::vector<Instance> read_instance_csv(const fs::path& path, int expect_d) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<Instance> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Instance ins = parse_instance_row(line, path.filename().string());
    if (expect_d >= 0 && static_cast<int>(ins.features.size()) != expect_d)
      throw std::runtime_error(path.filename().string() +
                               ": feature dimension mismatch");
    out.push_back(std::move(ins));
  }
  return out;
}

std::string bag_file_name(int id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "bag_%03d.csv", id);
  return buf;
}

}  // namespace

void write_bags(const BagCollection& collection, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path root(dir);

  json manifest;
  manifest["format_version"] = kFormatVersion;
  manifest["m"] = collection.m();
  manifest["d"] = collection.d();
  manifest["seed"] = collection.seed();

  json files = json::array();
  json order = json::array();
  for (const Bag& bag : collection.bags()) {
    const std::string name = bag_file_name(bag.id);
    files.push_back(name);
    order.push_back(bag.id);
    std::ofstream out(root / name);
    if (!out) throw std::runtime_error("cannot write " + (root / name).string());
    for (const Instance& ins : bag.instances) write_instance_row(out, ins);
  }
  manifest["bag_files"] = files;
  manifest["asserted_order"] = order;

  if (collection.has_priors()) {
    json priors = json::array();
    for (const Bag& bag : collection.bags()) priors.push_back(*bag.true_prior);
    manifest["true_priors"] = priors;
  } else {
    manifest["true_priors"] = nullptr;
  }

  std::ofstream mout(root / "manifest.json");
  if (!mout)
    throw std::runtime_error("cannot write " + (root / "manifest.json").string());
  mout << manifest.dump(2) << '\n';
}

BagCollection read_bags(const std::string& dir) {
  const fs::path root(dir);
  const fs::path mpath = root / "manifest.json";
  std::ifstream min(mpath);
  if (!min) throw std::runtime_error("cannot open " + mpath.string());

  json manifest;
  try {
    min >> manifest;
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed manifest: " + std::string(e.what()));
  }

  if (!manifest.contains("format_version") ||
      manifest["format_version"].get<int>() != kFormatVersion)
    throw std::runtime_error("malformed manifest: unsupported format_version");
  for (const char* key : {"m", "d", "bag_files", "asserted_order"})
    if (!manifest.contains(key))
      throw std::runtime_error(std::string("malformed manifest: missing ") + key);

  const int m = manifest["m"].get<int>();
  const int d = manifest["d"].get<int>();
  const auto files = manifest["bag_files"].get<std::vector<std::string>>();
  const auto order = manifest["asserted_order"].get<std::vector<int>>();
  if (static_cast<int>(files.size()) != m)
    throw std::runtime_error("malformed manifest: bag_files count != m");
  if (static_cast<int>(order.size()) != m)
    throw std::runtime_error("malformed manifest: asserted_order count != m");

  std::vector<char> seen(static_cast<std::size_t>(m), 0);
  for (int id : order) {
    if (id < 1 || id > m || seen[static_cast<std::size_t>(id - 1)])
      throw std::runtime_error(
          "malformed manifest: asserted_order is not a permutation of 1..m");
    seen[static_cast<std::size_t>(id - 1)] = 1;
  }

  std::vector<double> priors;
  const bool has_priors = !manifest["true_priors"].is_null();
  if (has_priors) {
    priors = manifest["true_priors"].get<std::vector<double>>();
    if (static_cast<int>(priors.size()) != m)
      throw std::runtime_error("malformed manifest: true_priors count != m");
  }

  std::vector<Bag> bags(static_cast<std::size_t>(m));
  for (int pos = 0; pos < m; ++pos) {
    const int rank = order[static_cast<std::size_t>(pos)];
    const fs::path bpath = root / files[static_cast<std::size_t>(pos)];
    if (!fs::exists(bpath))
      throw std::runtime_error("missing bag file " + bpath.string());
    Bag& bag = bags[static_cast<std::size_t>(rank - 1)];
    bag.id = rank;
    bag.instances = read_instance_csv(bpath, d);
    if (has_priors) bag.true_prior = priors[static_cast<std::size_t>(pos)];
  }

  const std::uint64_t seed =
      manifest.contains("seed") ? manifest["seed"].get<std::uint64_t>() : 0;
  // BagCollection validation rejects unsorted or degenerate priors. Surface
  // those as file errors here: on this path they mean a tampered manifest,
  // not a caller bug.
  try {
    return BagCollection(std::move(bags), d, seed);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error("malformed manifest in " + dir + ": " + e.what());
  }
}

void write_labeled_csv(std::span<const Instance> instances,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const Instance& ins : instances) {
    if (!ins.hidden_label)
      throw std::invalid_argument("write_labeled_csv: instance lacks label");
    write_instance_row(out, ins);
  }
}

std::vector<Instance> read_labeled_csv(const std::string& path) {
  auto out = read_instance_csv(path, -1);
  if (out.empty()) throw std::runtime_error(path + ": no rows");
  const int d = static_cast<int>(out.front().features.size());
  for (const Instance& ins : out) {
    if (!ins.hidden_label)
      throw std::runtime_error(path + ": labeled csv row with NA label");
    if (static_cast<int>(ins.features.size()) != d)
      throw std::runtime_error(path + ": feature dimension mismatch");
  }
  return out;
}

}  // namespace umauc
