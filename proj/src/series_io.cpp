#include "damcc/series_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace damcc::io {

using nlohmann::json;

namespace {

std::string at(const std::string& base, const std::string& key) { return base + "/" + key; }
std::string at(const std::string& base, std::size_t idx) { return base + "/" + std::to_string(idx); }

const json& member(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) throw FormatError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(at(path, key), "missing required field");
  return *it;
}

std::size_t as_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw FormatError(path, "expected a non-negative integer");
  return v.get<std::size_t>();
}

NodeSet as_cell(const json& v, const std::string& path) {
  if (!v.is_array()) throw FormatError(path, "expected an array of node indices");
  NodeSet cell;
  for (std::size_t i = 0; i < v.size(); ++i) cell.push_back(static_cast<NodeIndex>(as_count(v[i], at(path, i))));
  return cell;
}

std::vector<NodeSet> as_cells(const json& v, const std::string& path) {
  if (!v.is_array()) throw FormatError(path, "expected an array of cells");
  std::vector<NodeSet> cells;
  for (std::size_t i = 0; i < v.size(); ++i) cells.push_back(as_cell(v[i], at(path, i)));
  return cells;
}

std::optional<FeatureMatrix> as_features(const json& step, const std::string& path, std::size_t num_nodes) {
  auto it = step.find("features");
  if (it == step.end() || it->is_null()) return std::nullopt;
  const std::string fpath = at(path, "features");
  if (!it->is_array() || it->size() != num_nodes)
    throw FormatError(fpath, "expected " + std::to_string(num_nodes) + " feature rows");
  std::size_t width = num_nodes == 0 ? 0 : (*it)[0].size();
  FeatureMatrix f(num_nodes, width);
  for (std::size_t r = 0; r < num_nodes; ++r) {
    const auto& row = (*it)[r];
    if (!row.is_array() || row.size() != width) throw FormatError(at(fpath, r), "ragged feature row");
    for (std::size_t c = 0; c < width; ++c) {
      if (!row[c].is_number()) throw FormatError(at(at(fpath, r), c), "expected a number");
      f(r, c) = row[c].get<double>();
    }
  }
  return f;
}

json features_json(const FeatureMatrix& f) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < f.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < f.cols(); ++c) row.push_back(f(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json cells_json(const std::vector<NodeSet>& cells) {
  json out = json::array();
  for (const auto& c : cells) out.push_back(c);
  return out;
}

void expect_schema(const json& j, const char* schema) {
  const auto got = schema_of(j);
  if (got != schema)
    throw FormatError("/schema", "schema-version mismatch: expected \"" + std::string(schema) + "\", found \"" +
                                     got + "\"");
}

void reject_unknown(const json& step, const std::string& path, std::initializer_list<const char*> allowed) {
  for (auto it = step.begin(); it != step.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) {
      std::string why = "unknown field";
      if (it.key().rfind("cells_", 0) == 0) why = "only cells of rank 1 and 2 are representable";
      throw FormatError(at(path, it.key()), why);
    }
  }
}

template <typename F>
void for_each_step(const json& j, F&& f) {
  const json& steps = member(j, "", "timesteps");
  if (!steps.is_array()) throw FormatError("/timesteps", "expected an array");
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const std::string path = at(std::string("/timesteps"), t);
    if (!steps[t].is_object()) throw FormatError(path, "expected an object");
    f(steps[t], path);
  }
}

}  // namespace

std::string schema_of(const json& j) {
  if (!j.is_object()) throw FormatError("", "expected a JSON object at top level");
  auto it = j.find("schema");
  if (it == j.end() || !it->is_string()) throw FormatError("/schema", "missing schema tag");
  return it->get<std::string>();
}

json to_json(const GraphSeries& series) {
  json steps = json::array();
  for (std::size_t t = 0; t < series.steps.size(); ++t) {
    json edges = json::array();
    for (auto [u, v] : series.steps[t].edges()) edges.push_back({u, v});
    json step = {{"edges", std::move(edges)}};
    if (const auto& f = series.features_at(t)) step["features"] = features_json(*f);
    steps.push_back(std::move(step));
  }
  return {{"schema", kGraphSeriesSchema}, {"num_nodes", series.num_nodes}, {"timesteps", std::move(steps)}};
}

json to_json(const CcSeries& series) {
  json steps = json::array();
  for (const auto& cc : series.steps) {
    json step = {{"cells_1", cells_json(cc.cells1())}, {"cells_2", cells_json(cc.cells2())}};
    if (cc.features()) step["features"] = features_json(*cc.features());
    steps.push_back(std::move(step));
  }
  return {{"schema", kCcSeriesSchema}, {"num_nodes", series.num_nodes}, {"timesteps", std::move(steps)}};
}

json to_json(const CoIncidenceSeries& series) {
  json steps = json::array();
  for (const auto& s : series.steps)
    steps.push_back({{"cells_1", cells_json(s.rank1.rows)}, {"cells_2", cells_json(s.rank2.rows)}});
  return {{"schema", kCcSeriesSchema}, {"num_nodes", series.num_nodes}, {"timesteps", std::move(steps)}};
}

GraphSeries graph_series_from_json(const json& j) {
  expect_schema(j, kGraphSeriesSchema);
  GraphSeries gs;
  gs.num_nodes = as_count(member(j, "", "num_nodes"), "/num_nodes");
  bool any_features = false;
  for_each_step(j, [&](const json& step, const std::string& path) {
    reject_unknown(step, path, {"edges", "features"});
    const json& edges = member(step, path, "edges");
    const std::string epath = at(path, "edges");
    if (!edges.is_array()) throw FormatError(epath, "expected an array of edges");
    std::vector<Edge> list;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto cell = as_cell(edges[i], at(epath, i));
      if (cell.size() != 2) throw FormatError(at(epath, i), "an edge has exactly two endpoints");
      list.emplace_back(cell[0], cell[1]);
    }
    try {
      gs.steps.emplace_back(gs.num_nodes, std::move(list));
    } catch (const CcError& e) {
      throw FormatError(epath, e.what());
    }
    gs.features.push_back(as_features(step, path, gs.num_nodes));
    any_features = any_features || gs.features.back().has_value();
  });
  if (!any_features) gs.features.clear();
  if (gs.steps.empty()) throw FormatError("/timesteps", "a series needs at least one timestep");
  return gs;
}

CcSeries cc_series_from_json(const json& j) {
  expect_schema(j, kCcSeriesSchema);
  CcSeries cs;
  cs.num_nodes = as_count(member(j, "", "num_nodes"), "/num_nodes");
  for_each_step(j, [&](const json& step, const std::string& path) {
    reject_unknown(step, path, {"cells_1", "cells_2", "features"});
    auto c1 = as_cells(member(step, path, "cells_1"), at(path, "cells_1"));
    auto c2 = step.contains("cells_2") ? as_cells(step["cells_2"], at(path, "cells_2")) : std::vector<NodeSet>{};
    for (int rank = 1; rank <= 2; ++rank) {
      const auto& cells = rank == 1 ? c1 : c2;
      for (std::size_t r = 0; r < cells.size(); ++r)
        for (auto v : cells[r])
          if (v >= cs.num_nodes)
            throw FormatError(at(at(path, "cells_" + std::to_string(rank)), r), "node index out of range");
    }
    auto f = as_features(step, path, cs.num_nodes);
    try {
      cs.steps.push_back(CombinatorialComplex::create(cs.num_nodes, std::move(c1), std::move(c2), std::move(f)));
    } catch (const CcError& e) {
      throw FormatError(path, e.what());
    }
  });
  if (cs.steps.empty()) throw FormatError("/timesteps", "a series needs at least one timestep");
  return cs;
}

CoIncidenceSeries co_incidence_series_from_json(const json& j) {
  expect_schema(j, kCcSeriesSchema);
  CoIncidenceSeries s;
  s.num_nodes = as_count(member(j, "", "num_nodes"), "/num_nodes");
  for_each_step(j, [&](const json& step, const std::string& path) {
    reject_unknown(step, path, {"cells_1", "cells_2", "features"});
    CoIncidenceStep out;
    out.rank1 = {as_cells(member(step, path, "cells_1"), at(path, "cells_1")), s.num_nodes};
    if (step.contains("cells_2")) out.rank2 = {as_cells(step["cells_2"], at(path, "cells_2")), s.num_nodes};
    out.rank2.num_cols = s.num_nodes;
    for (int rank = 1; rank <= 2; ++rank) {
      auto& rows = rank == 1 ? out.rank1.rows : out.rank2.rows;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        std::sort(rows[r].begin(), rows[r].end());
        for (auto v : rows[r])
          if (v >= s.num_nodes)
            throw FormatError(at(at(path, "cells_" + std::to_string(rank)), r), "node index out of range");
        if (std::adjacent_find(rows[r].begin(), rows[r].end()) != rows[r].end())
          throw FormatError(at(at(path, "cells_" + std::to_string(rank)), r), "duplicate node in row");
      }
    }
    s.steps.push_back(std::move(out));
  });
  return s;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("", "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("", path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

namespace {
template <typename F>
auto with_file(const std::filesystem::path& path, F&& f) {
  try {
    return f(read_json(path));
  } catch (const FormatError& e) {
    throw FormatError(e.path(), path.string() + ": " + e.what());
  }
}
}  // namespace

GraphSeries read_graph_series(const std::filesystem::path& path) {
  return with_file(path, [](const json& j) { return graph_series_from_json(j); });
}
CcSeries read_cc_series(const std::filesystem::path& path) {
  return with_file(path, [](const json& j) { return cc_series_from_json(j); });
}
CoIncidenceSeries read_co_incidence_series(const std::filesystem::path& path) {
  return with_file(path, [](const json& j) { return co_incidence_series_from_json(j); });
}
void write_series(const std::filesystem::path& path, const GraphSeries& s) { write_json(path, to_json(s)); }
void write_series(const std::filesystem::path& path, const CcSeries& s) { write_json(path, to_json(s)); }
void write_series(const std::filesystem::path& path, const CoIncidenceSeries& s) { write_json(path, to_json(s)); }

}  // namespace damcc::io
