#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace plap::experiments {

inline constexpr int kSchemaVersion = 1;

/// Who produced an artifact: embedded in every CSV, JSON and SVG we write.
struct Provenance {
  std::string command;
  nlohmann::json config;
  std::uint64_t seed = 0;
};

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite values.
std::string format_number(double v);

class CsvTable {
 public:
  using Cell = std::variant<std::string, double, std::int64_t>;

  explicit CsvTable(std::vector<std::string> columns);

  void add_row(std::vector<Cell> row);
  std::size_t size() const { return rows_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }

  /// Header comment lines ("# ...") carry the provenance, then the column row.
  std::string render(const Provenance& prov) const;
  void write(const std::filesystem::path& path, const Provenance& prov) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// Adds schema_version, command, seed and the resolved config to `body`.
nlohmann::json with_provenance(nlohmann::json body, const Provenance& prov);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace plap::experiments
