#pragma once

#include "damcc/cc.hpp"
#include "damcc/rng.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace damcc {

struct CommunityDecayParams {
  std::size_t T = 40;
  std::size_t num_communities = 3;
  std::size_t nodes_per_community = 15;
  double p_int = 0.9;
  double p_ext = 0.01;
  double f_dec = 0.3;
  std::size_t decay_community = 0;
  std::uint64_t seed = 0;

  void check() const;
};

struct BaParams {
  std::size_t n = 50;
  std::size_t m = 4;
  std::uint64_t seed = 0;

  void check() const;
};

struct GeneratedSeries {
  GraphSeries series;
  std::vector<std::string> warnings;
};

/// Nodes are assigned to communities in contiguous blocks. Step t >= 1 moves
/// ceil(f_dec * |D_int|) internal edges of the decay community to external
/// partners; the total edge count never changes.
GeneratedSeries gen_community_decay(const CommunityDecayParams& p);

/// Step 0 is K_m on nodes 0..m-1; step t adds node m+t-1 joined to m distinct
/// nodes drawn one at a time proportionally to degree. Length n - m, node set
/// fixed at n throughout.
GeneratedSeries gen_ba(const BaParams& p);

enum class DatasetKind { Ba, CommunityDecay, TinyBa };

DatasetKind parse_dataset_kind(const std::string& name);
std::string to_string(DatasetKind kind);

struct DatasetSpec {
  DatasetKind kind = DatasetKind::TinyBa;
  std::size_t count = 10;
  std::array<std::size_t, 3> split{5, 2, 3};
  std::uint64_t seed = 0;
  BaParams ba{};                          // used for Ba (TinyBa forces n=6, m=1)
  CommunityDecayParams community_decay{};  // used for CommunityDecay
};

struct Dataset {
  std::vector<GraphSeries> train, val, test;
  std::vector<std::string> warnings;
};

/// Series i gets seed derive_seed(spec.seed, "series", i); the first split[0]
/// go to train, the next split[1] to val, the rest to test.
Dataset gen_dataset(const DatasetSpec& spec);

struct RandomBaselineParams {
  std::size_t min1 = 2, max1 = 2;
  std::size_t min2 = 3, max2 = 15;
  std::uint64_t seed = 0;
};

/// Random co-incidence matrices with the target's row counts. Each row draws
/// n uniformly from {0} u [min, max] and places n ones uniformly. Throws
/// CcError if a max exceeds the node count or a min is zero.
CoIncidenceSeries random_prediction(const CcSeries& target, const RandomBaselineParams& p);

/// One row of the random baseline.
NodeSet random_row(Rng& rng, std::size_t num_nodes, std::size_t min, std::size_t max);

/// Covid-style ingest. `edges_json` holds {"num_nodes": N, "days": [[[u,v],...], ...]}
/// (directed, possibly with self-loops and repeats). `cases_csv` has one line
/// per region: region index followed by one count per day; a non-numeric first
/// line is treated as a header. Node features at day t are the counts of days
/// t-window+1 .. t, zero where the day precedes the data.
GeneratedSeries ingest_covid(const std::filesystem::path& edges_json, const std::filesystem::path& cases_csv,
                             std::size_t window = 8);

}  // namespace damcc
