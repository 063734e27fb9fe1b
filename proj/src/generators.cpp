#include "damcc/generators.hpp"

#include "damcc/series_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace damcc {

void CommunityDecayParams::check() const {
  if (T < 1) throw CcError("community decay: T must be >= 1");
  if (num_communities < 1 || nodes_per_community < 1) throw CcError("community decay: empty communities");
  if (p_int < 0 || p_int > 1 || p_ext < 0 || p_ext > 1) throw CcError("community decay: probabilities outside [0,1]");
  if (f_dec < 0 || f_dec > 1) throw CcError("community decay: f_dec outside [0,1]");
  if (decay_community >= num_communities) throw CcError("community decay: decay community out of range");
}

void BaParams::check() const {
  if (m < 1 || m >= n) throw CcError("BA: need 1 <= m < n");
}

namespace {

using EdgeSet = std::set<Edge>;

Edge ordered(NodeIndex u, NodeIndex v) { return u < v ? Edge{u, v} : Edge{v, u}; }

Graph to_graph(std::size_t n, const EdgeSet& edges) { return Graph(n, {edges.begin(), edges.end()}); }

}  // namespace

GeneratedSeries gen_community_decay(const CommunityDecayParams& p) {
  p.check();
  Rng rng(p.seed);
  const std::size_t n = p.num_communities * p.nodes_per_community;
  auto community = [&](std::size_t v) { return v / p.nodes_per_community; };
  auto in_decay = [&](std::size_t v) { return community(v) == p.decay_community; };

  EdgeSet edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.bernoulli(community(i) == community(j) ? p.p_int : p.p_ext))
        edges.insert({static_cast<NodeIndex>(i), static_cast<NodeIndex>(j)});

  GeneratedSeries out;
  out.series.num_nodes = n;
  out.series.steps.push_back(to_graph(n, edges));

  for (std::size_t t = 1; t < p.T; ++t) {
    std::vector<Edge> internal;
    for (const auto& e : edges)
      if (in_decay(e.first) && in_decay(e.second)) internal.push_back(e);
    const auto k = static_cast<std::size_t>(std::ceil(p.f_dec * static_cast<double>(internal.size())));
    for (std::size_t r = 0; r < k && !internal.empty(); ++r) {
      const auto pick = rng.uniform_int(internal.size());
      const Edge e = internal[pick];
      internal.erase(internal.begin() + static_cast<std::ptrdiff_t>(pick));
      const NodeIndex keep = rng.bernoulli(0.5) ? e.first : e.second;
      std::vector<NodeIndex> eligible;
      for (std::size_t w = 0; w < n; ++w)
        if (!in_decay(w) && !edges.count(ordered(keep, static_cast<NodeIndex>(w))))
          eligible.push_back(static_cast<NodeIndex>(w));
      if (eligible.empty()) {
        out.warnings.push_back("step " + std::to_string(t) + ": node " + std::to_string(keep) +
                               " has no eligible external partner; edge kept");
        continue;
      }
      edges.erase(e);
      edges.insert(ordered(keep, eligible[rng.uniform_int(eligible.size())]));
    }
    out.series.steps.push_back(to_graph(n, edges));
  }
  return out;
}

GeneratedSeries gen_ba(const BaParams& p) {
  p.check();
  Rng rng(p.seed);
  EdgeSet edges;
  std::vector<std::size_t> degree(p.n, 0);
  for (std::size_t i = 0; i < p.m; ++i)
    for (std::size_t j = i + 1; j < p.m; ++j) {
      edges.insert({static_cast<NodeIndex>(i), static_cast<NodeIndex>(j)});
      ++degree[i];
      ++degree[j];
    }
  GeneratedSeries out;
  out.series.num_nodes = p.n;
  out.series.steps.push_back(to_graph(p.n, edges));

  for (std::size_t t = 1; t < p.n - p.m; ++t) {
    const std::size_t arrival = p.m + t - 1;
    std::vector<std::size_t> pool(arrival);
    for (std::size_t i = 0; i < arrival; ++i) pool[i] = i;
    std::vector<std::size_t> chosen;
    for (std::size_t draw = 0; draw < p.m; ++draw) {
      std::size_t total = 0;
      for (auto v : pool) total += degree[v];
      std::size_t idx = 0;
      if (total == 0) {
        idx = rng.uniform_int(pool.size());
      } else {
        double target = rng.uniform() * static_cast<double>(total);
        double acc = 0;
        idx = pool.size() - 1;
        for (std::size_t i = 0; i < pool.size(); ++i) {
          acc += static_cast<double>(degree[pool[i]]);
          if (target < acc) {
            idx = i;
            break;
          }
        }
        while (degree[pool[idx]] == 0) --idx;  // guard against rounding onto a zero-weight tail
      }
      chosen.push_back(pool[idx]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    for (auto v : chosen) {
      edges.insert(ordered(static_cast<NodeIndex>(v), static_cast<NodeIndex>(arrival)));
      ++degree[v];
      ++degree[arrival];
    }
    out.series.steps.push_back(to_graph(p.n, edges));
  }
  return out;
}

DatasetKind parse_dataset_kind(const std::string& name) {
  if (name == "ba") return DatasetKind::Ba;
  if (name == "community-decay") return DatasetKind::CommunityDecay;
  if (name == "tiny-ba") return DatasetKind::TinyBa;
  throw std::invalid_argument("unknown dataset model '" + name + "' (ba, community-decay, tiny-ba)");
}

std::string to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::Ba: return "ba";
    case DatasetKind::CommunityDecay: return "community-decay";
    case DatasetKind::TinyBa: return "tiny-ba";
  }
  return "?";
}

Dataset gen_dataset(const DatasetSpec& spec) {
  if (spec.split[0] + spec.split[1] + spec.split[2] != spec.count)
    throw std::invalid_argument("dataset split does not sum to count");
  Dataset ds;
  for (std::size_t i = 0; i < spec.count; ++i) {
    const auto seed = derive_seed(spec.seed, "series", i);
    GeneratedSeries g;
    switch (spec.kind) {
      case DatasetKind::Ba: {
        auto p = spec.ba;
        p.seed = seed;
        g = gen_ba(p);
        break;
      }
      case DatasetKind::TinyBa:
        g = gen_ba({6, 1, seed});
        break;
      case DatasetKind::CommunityDecay: {
        auto p = spec.community_decay;
        p.seed = seed;
        g = gen_community_decay(p);
        break;
      }
    }
    for (auto& w : g.warnings) ds.warnings.push_back("series " + std::to_string(i) + ": " + w);
    auto& bucket = i < spec.split[0] ? ds.train : i < spec.split[0] + spec.split[1] ? ds.val : ds.test;
    bucket.push_back(std::move(g.series));
  }
  return ds;
}

NodeSet random_row(Rng& rng, std::size_t num_nodes, std::size_t min, std::size_t max) {
  // Allowed cardinalities: 0, min, min+1, ..., max.
  const std::size_t choices = 1 + (max - min + 1);
  const auto pick = rng.uniform_int(choices);
  if (pick == 0) return {};
  const std::size_t n = min + pick - 1;
  auto row = rng.sample_without_replacement(static_cast<std::uint32_t>(num_nodes), static_cast<std::uint32_t>(n));
  std::sort(row.begin(), row.end());
  return row;
}

CoIncidenceSeries random_prediction(const CcSeries& target, const RandomBaselineParams& p) {
  if (target.steps.empty()) throw CcError("random baseline: empty target");
  if (p.min1 == 0 || p.min2 == 0 || p.min1 > p.max1 || p.min2 > p.max2)
    throw CcError("random baseline: need 0 < min <= max");
  if (p.max1 > target.num_nodes || p.max2 > target.num_nodes)
    throw CcError("random baseline: max row cardinality exceeds the node count " + std::to_string(target.num_nodes));
  Rng rng(p.seed);
  CoIncidenceSeries out;
  out.num_nodes = target.num_nodes;
  for (const auto& cc : target.steps) {
    CoIncidenceStep step;
    step.rank1.num_cols = step.rank2.num_cols = target.num_nodes;
    for (std::size_t i = 0; i < cc.num_cells(1); ++i)
      step.rank1.rows.push_back(random_row(rng, target.num_nodes, p.min1, p.max1));
    for (std::size_t i = 0; i < cc.num_cells(2); ++i)
      step.rank2.rows.push_back(random_row(rng, target.num_nodes, p.min2, p.max2));
    out.steps.push_back(std::move(step));
  }
  return out;
}

GeneratedSeries ingest_covid(const std::filesystem::path& edges_json, const std::filesystem::path& cases_csv,
                             std::size_t window) {
  const auto j = io::read_json(edges_json);
  if (!j.is_object() || !j.contains("num_nodes") || !j.contains("days"))
    throw io::FormatError("", edges_json.string() + ": expected {\"num_nodes\", \"days\"}");
  const auto n = j["num_nodes"].get<std::size_t>();
  const auto& days = j["days"];

  std::ifstream in(cases_csv);
  if (!in) throw std::runtime_error("cannot open " + cases_csv.string());
  std::vector<std::vector<double>> counts(n);
  std::vector<bool> seen(n, false);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> fields;
    while (std::getline(ss, cell, ',')) fields.push_back(cell);
    std::size_t region = 0;
    try {
      std::size_t pos = 0;
      region = std::stoul(fields.at(0), &pos);
    } catch (const std::exception&) {
      if (lineno == 1) continue;  // header
      throw std::runtime_error(cases_csv.string() + ":" + std::to_string(lineno) + ": bad region index");
    }
    if (region >= n || seen[region])
      throw std::runtime_error(cases_csv.string() + ":" + std::to_string(lineno) + ": region out of range or repeated");
    seen[region] = true;
    for (std::size_t k = 1; k < fields.size(); ++k) counts[region].push_back(std::stod(fields[k]));
  }

  GeneratedSeries out;
  out.series.num_nodes = n;
  for (std::size_t t = 0; t < days.size(); ++t) {
    EdgeSet edges;
    std::size_t dropped = 0;
    for (const auto& e : days[t]) {
      const auto u = e.at(0).get<NodeIndex>(), v = e.at(1).get<NodeIndex>();
      if (u >= n || v >= n)
        throw io::FormatError("/days/" + std::to_string(t), "node index out of range");
      if (u == v) {
        ++dropped;
        continue;
      }
      edges.insert(ordered(u, v));
    }
    if (dropped) out.warnings.push_back("day " + std::to_string(t) + ": dropped " + std::to_string(dropped) + " self-loops");
    out.series.steps.push_back(to_graph(n, edges));
    FeatureMatrix f = FeatureMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(window));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t w = 0; w < window; ++w) {
        // column window-1 is day t, column 0 is day t-window+1
        const std::ptrdiff_t day = static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(window - 1 - w);
        if (day >= 0 && static_cast<std::size_t>(day) < counts[r].size())
          f(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(w)) = counts[r][static_cast<std::size_t>(day)];
      }
    out.series.features.push_back(std::move(f));
  }
  if (out.series.steps.empty()) throw io::FormatError("/days", "no days in edge file");
  return out;
}

}  // namespace damcc
