#include "plap/experiments/artifacts.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace plap::experiments {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw std::invalid_argument("CSV row width mismatch");
  rows_.push_back(std::move(row));
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string CsvTable::render(const Provenance& prov) const {
  std::ostringstream os;
  os << "# plap " << prov.command << " schema_version=" << kSchemaVersion << "\n";
  os << "# seed: " << prov.seed << "\n";
  os << "# config: " << prov.config.dump() << "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << quote(columns_[i]);
  os << "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ",";
      std::visit(
          [&os](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) os << quote(v);
            else if constexpr (std::is_same_v<T, double>) os << format_number(v);
            else os << v;
          },
          row[i]);
    }
    os << "\n";
  }
  return os.str();
}

void CsvTable::write(const std::filesystem::path& path, const Provenance& prov) const {
  write_text(path, render(prov));
}

nlohmann::json with_provenance(nlohmann::json body, const Provenance& prov) {
  body["schema_version"] = kSchemaVersion;
  body["command"] = prov.command;
  body["seed"] = prov.seed;
  body["config"] = prov.config;
  return body;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  // Non-finite numbers become null in JSON; callers store them as strings where it matters.
  write_text(path, j.dump(2) + "\n");
}

}  // namespace plap::experiments
