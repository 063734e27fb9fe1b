#pragma once

#include "damcc/cc.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace damcc::io {

inline constexpr const char* kCcSeriesSchema = "ccseries-v1";
inline constexpr const char* kGraphSeriesSchema = "graphseries-v1";

/// Malformed or mismatched input. `path()` is a JSON pointer to the
/// offending element ("" for whole-document problems).
class FormatError : public std::runtime_error {
public:
  FormatError(std::string json_path, const std::string& what)
      : std::runtime_error(json_path.empty() ? what : json_path + ": " + what), path_(std::move(json_path)) {}
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

// All node indices in files are 0-based.

nlohmann::json to_json(const GraphSeries& series);
nlohmann::json to_json(const CcSeries& series);
nlohmann::json to_json(const CoIncidenceSeries& series);

GraphSeries graph_series_from_json(const nlohmann::json& j);
/// Validating reader: every step must be a valid CC.
CcSeries cc_series_from_json(const nlohmann::json& j);
/// Non-validating reader for scored matrices: keeps empty and duplicate rows.
CoIncidenceSeries co_incidence_series_from_json(const nlohmann::json& j);

nlohmann::json read_json(const std::filesystem::path& path);
/// Writes `j` with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Schema tag of a parsed document; throws FormatError if absent.
std::string schema_of(const nlohmann::json& j);

GraphSeries read_graph_series(const std::filesystem::path& path);
CcSeries read_cc_series(const std::filesystem::path& path);
CoIncidenceSeries read_co_incidence_series(const std::filesystem::path& path);
void write_series(const std::filesystem::path& path, const GraphSeries& series);
void write_series(const std::filesystem::path& path, const CcSeries& series);
void write_series(const std::filesystem::path& path, const CoIncidenceSeries& series);

}  // namespace damcc::io
