// Acceptance run: one PASS/FAIL line per criterion, exit code 1 if any fails.

#include "damcc/autodiff.hpp"
#include "damcc/commands.hpp"
#include "damcc/decoder.hpp"
#include "damcc/generators.hpp"
#include "damcc/gradcheck_suite.hpp"
#include "damcc/lifting.hpp"
#include "damcc/matching.hpp"
#include "damcc/metrics.hpp"
#include "damcc/series_io.hpp"
#include "damcc/training.hpp"
#include "metric_oracles.hpp"
#include "test_util.hpp"
#include "walk_script.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

using namespace damcc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

int failures = 0;

void report(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= limit_s) o.require(false, "runtime over limit");
  if (!o.pass) ++failures;
  std::printf("%s  %2d  %-34s %8.2f s (limit %g s)  %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, limit_s,
              o.detail.c_str());
  std::fflush(stdout);
}

Eigen::MatrixXd uniform_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Eigen::MatrixXd m(r, c);
  for (auto& x : m.reshaped()) x = rng.uniform();
  return m;
}

double brute_assignment(const Eigen::MatrixXd& c) {
  std::vector<int> p(static_cast<std::size_t>(c.cols()));
  std::iota(p.begin(), p.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    std::vector<double> picked;
    for (Eigen::Index i = 0; i < c.rows(); ++i) picked.push_back(c(i, p[static_cast<std::size_t>(i)]));
    std::sort(picked.begin(), picked.end());
    double s = 0;
    for (double x : picked) s += x;
    best = std::min(best, s);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

CombinatorialComplex random_cc(Rng& rng) {
  const std::size_t n = 2 + rng.uniform_int(19);
  const Graph g = testutil::random_graph(rng, n, rng.uniform());
  std::set<NodeSet> cells2;
  const std::size_t extra = rng.uniform_int(6);
  for (std::size_t k = 0; k < extra; ++k) {
    const auto size = static_cast<std::uint32_t>(2 + rng.uniform_int(std::min<std::size_t>(n - 1, 6)));
    auto pick = rng.sample_without_replacement(static_cast<std::uint32_t>(n), size);
    NodeSet s(pick.begin(), pick.end());
    std::sort(s.begin(), s.end());
    if (s.size() == 2 && g.has_edge(s[0], s[1])) continue;
    cells2.insert(s);
  }
  std::vector<NodeSet> c1;
  for (auto [u, v] : g.edges()) c1.push_back({u, v});
  return CombinatorialComplex::create(n, c1, {cells2.begin(), cells2.end()});
}

Outcome criterion1() {
  Outcome o;
  Rng rng(101);
  for (int i = 0; i < 500; ++i) {
    const auto cc = random_cc(rng);
    o.require(from_co_incidence(co_incidence(cc, 1), co_incidence(cc, 2), cc.num_nodes()) == cc,
              "round trip differs at case " + std::to_string(i));
  }
  // Two complexes whose top cells differ only by node 5. Their boundary view
  // (incidence of rank-2 cells in the rank-3 cell) is the same zero column,
  // so only the membership rows tell them apart, and the rank <= 2 model
  // cannot hold either.
  const std::vector<NodeSet> top1{{0, 4, 5, 6, 7, 8, 9}}, top2{{0, 4, 6, 7, 8, 9}};
  const std::vector<NodeSet> twos{{1, 2, 6}, {1, 7, 8, 9}};
  auto contains = [](const NodeSet& big, const NodeSet& small) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
  };
  for (const auto& c : twos) o.require(!contains(top1[0], c) && !contains(top2[0], c), "boundary views differ");
  o.require(top1 != top2, "membership rows coincide");
  auto doc = [](const std::vector<NodeSet>& top) {
    nlohmann::json j = {{"schema", io::kCcSeriesSchema}, {"num_nodes", 10}};
    j["timesteps"] = nlohmann::json::array(
        {{{"cells_1", {{1, 2}, {1, 6}, {1, 7}, {1, 8}, {2, 3}, {2, 6}, {3, 4}, {4, 5}, {6, 7}, {7, 8}, {8, 9}}},
          {"cells_2", {{1, 2, 6}, {1, 7, 8, 9}}},
          {"cells_3", top}}});
    return j;
  };
  for (const auto& top : {top1, top2}) {
    bool rejected = false;
    try {
      io::cc_series_from_json(doc(top));
    } catch (const io::FormatError&) {
      rejected = true;
    }
    o.require(rejected, "rank-3 complex accepted");
  }
  bool api_rejects = false;
  try {
    co_incidence(random_cc(rng), 3);
  } catch (const std::exception&) {
    api_rejects = true;
  }
  o.require(api_rejects, "co_incidence accepted rank 3");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const Graph g(9, {{1, 2}, {1, 6}, {2, 6}, {1, 7}, {6, 7}, {1, 8}, {7, 8}, {2, 3}, {3, 4}, {4, 5}});
  auto subset_oracle = [](const Graph& gr) {
    std::set<NodeSet> out;
    const std::size_t n = gr.num_nodes();
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      NodeSet s;
      for (std::uint32_t v = 0; v < n; ++v)
        if (mask >> v & 1u) s.push_back(v);
      if (s.size() < 3 || s.size() > 15) continue;
      bool ok = true;
      for (std::size_t a = 0; a < s.size() && ok; ++a)
        for (std::size_t b = a + 1; b < s.size() && ok; ++b) ok = gr.has_edge(s[a], s[b]);
      if (ok) out.insert(s);
    }
    return out;
  };
  const auto lifted = clique_lift(g);
  const std::set<NodeSet> got(lifted.cells2().begin(), lifted.cells2().end());
  o.require(got == std::set<NodeSet>{{1, 2, 6}, {1, 6, 7}, {1, 7, 8}}, "worked example cells differ");
  o.require(got == subset_oracle(g), "worked example disagrees with oracle");
  Rng rng(202);
  for (int i = 0; i < 200; ++i) {
    const Graph h = testutil::random_graph(rng, 3 + rng.uniform_int(10), rng.uniform());
    const auto cc = clique_lift(h);
    o.require(skeleton(cc) == h, "skeleton(lift(g)) != g");
    o.require(clique_lift(skeleton(cc)) == cc, "lift(skeleton(cc)) != cc");
    const std::set<NodeSet> c2(cc.cells2().begin(), cc.cells2().end());
    o.require(c2 == subset_oracle(h), "random graph disagrees with oracle");
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  Rng rng(303);
  for (int i = 0; i < 1000; ++i) {
    const auto n = static_cast<Eigen::Index>(1 + rng.uniform_int(7));
    Eigen::MatrixXd c(n, n);
    for (auto& x : c.reshaped()) x = std::floor(rng.uniform() * 100) - 20 + rng.uniform();
    o.require(hungarian(c).total_cost == brute_assignment(c), "mismatch at matrix " + std::to_string(i));
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  Rng rng(404);
  double worst_marg = 0, worst_gap = 0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::MatrixXd c = uniform_matrix(rng, 5, 5);
    const double exact = hungarian(c).total_cost;
    const auto t = sinkhorn(c, 0.01, 50);
    for (Eigen::Index k = 0; k < 5; ++k) {
      worst_marg = std::max(worst_marg, std::abs(t.plan.row(k).sum() - 0.2));
      worst_marg = std::max(worst_marg, std::abs(t.plan.col(k).sum() - 0.2));
    }
    o.require(t.distance >= exact - 1e-6, "entropic cost below assignment cost");
    worst_gap = std::max(worst_gap, (t.distance - exact) / exact);
  }
  o.require(worst_marg <= 1e-3, "marginal error " + std::to_string(worst_marg));
  o.require(worst_gap <= 0.05, "relative gap " + std::to_string(worst_gap));
  std::ostringstream s;
  s << "max marginal err " << worst_marg << ", max rel gap " << worst_gap;
  if (o.pass) o.detail = s.str();
  else o.detail += " (" + s.str() + ")";
  return o;
}

Outcome criterion5() {
  Outcome o;
  Rng rng(505);
  auto shuffle_rows = [&](const Eigen::MatrixXd& m) {
    const auto p = testutil::random_permutation(rng, static_cast<std::size_t>(m.rows()));
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.row(i) = m.row(p[static_cast<std::size_t>(i)]);
    return out;
  };
  for (int i = 0; i < 200; ++i) {
    const auto ra = static_cast<Eigen::Index>(1 + rng.uniform_int(6));
    const auto rb = static_cast<Eigen::Index>(1 + rng.uniform_int(6));
    const Eigen::MatrixXd a = uniform_matrix(rng, ra, 7);
    const Eigen::MatrixXd b = (uniform_matrix(rng, rb, 7).array() > 0.6).cast<double>();
    for (const char* name : {"hbce", "hc"}) {
      const auto opt = rwpl_variant(name);
      const double base = rwpl(a, b, opt).value;
      const double pa = rwpl(shuffle_rows(a), b, opt).value;
      const double pb = rwpl(a, shuffle_rows(b), opt).value;
      o.require(pa - base == 0 && pb - base == 0, std::string(name) + " changed under row permutation");
    }
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  nn::ParameterSet ps;
  Rng init(606);
  const DecoderParams dec(ps, "dec", {16}, init);
  DecoderHyperparams hp;
  hp.n_max = 8;
  {
    testutil::ScriptedDecisions script(testutil::eight_leaf_script());
    Rng rng(0);
    const auto s = sample_row(Tensor::constant(Matrix::Random(1, 16)), 8, hp, dec, script, rng);
    o.require(s.row == NodeSet{2, 4, 7}, "forced walk row differs");
    o.require(script.log == testutil::eight_leaf_log(), "forced walk order differs");
  }
  // Free sampling through the matrix sampler, both traversal modes.
  const std::size_t n = 20;
  const auto depth = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n))));
  std::size_t rows = 0, worst_visited = 0;
  double worst_ratio = 0;
  // Per row the count is only bounded by the tree size: a gate may open into
  // a subtree that emits nothing. The logarithmic bound is checked on the
  // mean visited count for each number of ones k.
  std::map<std::size_t, std::pair<double, std::size_t>> by_k;  // k -> (sum visited, rows)
  Rng rng(607);
  for (auto traversal : {Traversal::Deterministic, Traversal::Stochastic}) {
    DecoderHyperparams h;
    h.n_max = 15;
    h.p_min = 0.5;
    h.traversal = traversal;
    const std::size_t until = rows + 5000;
    while (rows < until) {
      const Tensor H = Tensor::constant(Matrix::NullaryExpr(10, 16, [&] { return 4 * rng.uniform() - 2; }));
      const auto m = sample_incidence_matrix(H, n, h, dec, rng);
      for (const auto& r : m.matrix.rows) {
        o.require(r.size() <= h.n_max, "row exceeds n_max");
        o.require(r.size() != 1, "singleton row returned");
      }
      for (const auto& t : m.traces) {
        worst_visited = std::max(worst_visited, t.visited);
        o.require(t.visited <= 2 * n - 1, "visited more nodes than the tree has");
      }
      for (int k = 0; k < 10; ++k) {
        SamplingDecisions d(rng, h.p_min);
        const auto s = sample_row(Tensor::constant(H.value().row(k)), n, h, dec, d, rng);
        o.require(s.trace.visited <= 2 * n - 1, "visited more nodes than the tree has");
        auto& e = by_k[s.row.size()];
        e.first += static_cast<double>(s.trace.visited);
        ++e.second;
        worst_ratio = std::max(worst_ratio, static_cast<double>(s.trace.visited) /
                                                static_cast<double>((s.row.size() + 1) * (depth + 1)));
      }
      rows += static_cast<std::size_t>(H.rows());
    }
  }
  double worst_mean_ratio = 0;
  for (const auto& [k, e] : by_k) {
    if (e.second < 30) continue;
    const double ratio = e.first / static_cast<double>(e.second) / static_cast<double>((k + 1) * (depth + 1));
    worst_mean_ratio = std::max(worst_mean_ratio, ratio);
  }
  o.require(worst_mean_ratio <= 1.0,
            "mean visited exceeds (k+1)(ceil log2|S| + 1) by factor " + std::to_string(worst_mean_ratio));
  std::ostringstream s;
  s << rows << " matrix rows + " << rows << " direct rows, max visited " << worst_visited << " (tree has "
    << 2 * n - 1 << "), worst mean visited/((k+1)(log+1)) " << worst_mean_ratio << ", worst single-row ratio "
    << worst_ratio;
  o.detail = o.pass ? s.str() : o.detail + " (" + s.str() + ")";
  return o;
}

// Central differences at h = 1e-5. Each coordinate must satisfy
//   |analytic - numeric| <= 1e-4 * max(|analytic|, |numeric|) + noise,
// where noise = 8 u max(|f(x+h)|, |f(x-h)|) / h bounds the rounding error of
// the difference quotient itself (u = double epsilon). Without that term a
// 1e-6 gradient on a loss of size 10 cannot be resolved by the oracle.
// The same test is applied tensor-wise with Euclidean norms.
Outcome criterion7() {
  Outcome o;
  constexpr double h = 1e-5, tol = 1e-4;
  double worst = 0, worst_norm = 0;
  std::string worst_name, worst_norm_name;
  std::size_t coords = 0, noise_limited = 0;
  for (auto& p : gradcheck_problems(707)) {
    for (auto& t : p.params) t.zero_grad();
    ad::backward(p.f());
    for (auto& t : p.params) {
      const Matrix analytic = t.grad().size() ? t.grad() : Matrix::Zero(t.rows(), t.cols());
      Matrix numeric(t.rows(), t.cols()), noise(t.rows(), t.cols());
      Matrix& x = t.mutable_value();
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double keep = x(i);
        double up, down;
        {
          ad::NoGradGuard ng;
          x(i) = keep + h;
          up = p.f().item();
          x(i) = keep - h;
          down = p.f().item();
        }
        x(i) = keep;
        numeric(i) = (up - down) / (2 * h);
        noise(i) = 8 * std::numeric_limits<double>::epsilon() * std::max(std::abs(up), std::abs(down)) / h;
        const double scale = std::max(std::abs(numeric(i)), std::abs(analytic(i)));
        const double err = std::abs(numeric(i) - analytic(i));
        ++coords;
        if (err > tol * scale) ++noise_limited;
        // Error in units of the allowed error; pass iff < 1.
        const double ratio = err / (tol * scale + noise(i));
        if (ratio > worst) {
          worst = ratio;
          worst_name = p.name;
        }
      }
      const double rel = (analytic - numeric).norm() / (tol * std::max(analytic.norm(), numeric.norm()) + noise.norm());
      if (rel > worst_norm) {
        worst_norm = rel;
        worst_norm_name = p.name;
      }
    }
  }
  o.require(worst < 1, "coordinate error above tolerance in " + worst_name);
  o.require(worst_norm < 1, "tensor-wise error above tolerance in " + worst_norm_name);
  std::ostringstream s;
  s << coords << " coords, worst err/allowed " << worst << " (" << worst_name << "), worst tensor err/allowed "
    << worst_norm << " (" << worst_norm_name << "), " << noise_limited << " coords needed the rounding term";
  o.detail = o.pass ? s.str() : o.detail + ": " + s.str();
  return o;
}

Outcome criterion8() {
  Outcome o;
  DatasetSpec spec;  // tiny-BA, 10 series split 5/2/3
  const auto ds = gen_dataset(spec);
  std::vector<CcSeries> train_set, val_set;
  for (const auto& s : ds.train) train_set.push_back(lift_series(s));
  for (const auto& s : ds.val) val_set.push_back(lift_series(s));
  AblationOptions opt;  // seeds 1..5, 200 epochs, hidden 256
  const auto runs = run_ablation(train_set, val_set, opt);
  const fs::path dir = "acceptance_ablation";
  fs::create_directories(dir);
  std::size_t learned = 0;
  std::ostringstream s;
  for (const auto& r : runs) {
    const int m = static_cast<int>(r.model);
    write_curve_csv(dir / ("model" + std::to_string(m) + "_seed" + std::to_string(r.seed) + ".csv"), r.curve);
    std::printf("      model %d seed %llu: epochs %zu, first val %.4f, best val %.4f, ratio %.3f\n", m,
                static_cast<unsigned long long>(r.seed), r.curve.size(), r.first_val, r.best_val, r.ratio());
    if (r.model == AblationModel::Model1 && r.learned()) ++learned;
  }
  o.require(learned >= 4, "model 1 learned on " + std::to_string(learned) + "/5 seeds");
  s << "model 1 learned on " << learned << "/5 seeds; curves in " << dir.string();
  o.detail = o.pass ? s.str() : o.detail;
  return o;
}

Outcome criterion9() {
  Outcome o;
  namespace m = damcc::metrics;
  Rng rng(909);
  for (int i = 0; i < 200; ++i) {
    const Graph g = testutil::random_graph(rng, 1 + rng.uniform_int(8), rng.uniform());
    const auto a = oracle::adjacency(g);
    const std::size_t n = g.num_nodes();
    const auto tri = oracle::triangles(a), triples = oracle::connected_triples(a);
    o.require(m::transitivity(g) ==
                  (triples ? 3.0 * static_cast<double>(tri) / static_cast<double>(triples) : 0.0),
              "transitivity");
    o.require(m::local_clustering(g) == oracle::local_clustering(a), "local clustering");
    const auto d = oracle::distances(a);
    const auto cl = m::closeness_centrality(g);
    const auto dc = m::degree_centrality(g);
    for (std::size_t v = 0; v < n; ++v) {
      double r = 0, sum = 0, k = 0;
      for (std::size_t u = 0; u < n; ++u) {
        k += a[v][u];
        if (u != v && std::isfinite(d[v][u])) {
          r += 1;
          sum += d[v][u];
        }
      }
      const double want = r > 0 ? (r / sum) * (r / static_cast<double>(n - 1)) : 0.0;
      o.require(std::abs(cl[v] - want) <= 1e-15 * std::max(1.0, want), "closeness");
      o.require(dc[v] == (n > 1 ? k / static_cast<double>(n - 1) : 0.0), "degree centrality");
    }
    const auto ec = m::eigenvector_centrality(g);
    const auto ec_want = oracle::eigenvector_centrality(a);
    for (std::size_t v = 0; v < n; ++v) o.require(std::abs(ec.values[v] - ec_want[v]) < 1e-8, "eigenvector centrality");
    const auto sp = m::laplacian_spectrum(g), sp_want = oracle::laplacian_spectrum(a);
    for (std::size_t v = 0; v < n; ++v) o.require(std::abs(sp[v] - sp_want[v]) < 1e-8, "laplacian spectrum");
  }
  for (std::size_t n = 2; n <= 10; ++n) {
    std::vector<Edge> e;
    for (NodeIndex u = 0; u < n; ++u)
      for (NodeIndex v = u + 1; v < n; ++v) e.emplace_back(u, v);
    const auto sp = m::laplacian_spectrum(Graph(n, e));
    o.require(std::abs(sp[0]) < 1e-8, "K_n zero eigenvalue");
    for (std::size_t k = 1; k < n; ++k) o.require(std::abs(sp[k] - static_cast<double>(n)) < 1e-8, "K_n eigenvalue n");
  }
  for (int i = 0; i < 300; ++i) {
    const std::size_t la = 1 + rng.uniform_int(5), lb = 1 + rng.uniform_int(5), dim = 1 + rng.uniform_int(3);
    oracle::Dense a(la, std::vector<double>(dim)), b(lb, std::vector<double>(dim));
    for (auto& r : a)
      for (auto& x : r) x = rng.uniform();
    for (auto& r : b)
      for (auto& x : r) x = rng.uniform();
    const double want = oracle::dtw_enumerate(a, b);
    o.require(std::abs(m::dtw(a, b) - want) <= 1e-12 * std::max(1.0, want), "dtw");
  }
  return o;
}

Outcome criterion10() {
  Outcome o;
  Rng rng(1010);
  const std::size_t n = 20, draws = 10000;
  std::map<std::size_t, std::size_t> c1, c2;
  for (std::size_t i = 0; i < draws; ++i) {
    const auto r1 = random_row(rng, n, 2, 2);
    const auto r2 = random_row(rng, n, 3, 15);
    for (const auto* r : {&r1, &r2}) {
      o.require(std::is_sorted(r->begin(), r->end()) && std::adjacent_find(r->begin(), r->end()) == r->end(),
                "row indices not distinct");
      o.require(r->empty() || r->back() < n, "row index out of range");
    }
    ++c1[r1.size()];
    ++c2[r2.size()];
  }
  o.require(c1.size() == 2 && c1.count(0) && c1.count(2), "rank-1 cardinality outside {0,2}");
  for (const auto& [k, cnt] : c2) o.require(k == 0 || (k >= 3 && k <= 15), "rank-2 cardinality outside {0}u[3,15]");
  o.require(c2.size() == 14, "rank-2 cardinality set incomplete");
  double worst_z = 0;
  auto z_check = [&](const std::map<std::size_t, std::size_t>& counts, std::size_t outcomes) {
    const double p = 1.0 / static_cast<double>(outcomes);
    const double mean = p * static_cast<double>(draws), sd = std::sqrt(static_cast<double>(draws) * p * (1 - p));
    for (const auto& kv : counts) worst_z = std::max(worst_z, std::abs(static_cast<double>(kv.second) - mean) / sd);
  };
  z_check(c1, 2);
  z_check(c2, 14);
  o.require(worst_z <= 3.0, "frequency off by " + std::to_string(worst_z) + " sigma");
  std::ostringstream s;
  s << "max |z| " << worst_z;
  o.detail = o.pass ? s.str() : o.detail;
  return o;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = testutil::slurp(e.path());
  return files;
}

Outcome criterion11() {
  Outcome o;
  const fs::path dir = "acceptance_pipeline";
  fs::remove_all(dir);
  cli::ExperimentConfig cfg;
  cfg.dataset.seed = 11;
  cfg.train.max_epochs = 5;
  cfg.train.hidden = 32;
  cfg.train.seed = 12;
  cfg.sample_seed = 13;
  cfg.baseline_seed = 14;
  std::ostringstream log;
  cli::run_pipeline(cfg, dir, log);
  const auto first = snapshot(dir);
  // Keep only the manifest, then rebuild everything from it.
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename() != "manifest.json") fs::remove_all(e.path());
  std::ostringstream out, err;
  const int code = cli::run({"rerun", "--manifest", (dir / "manifest.json").string()}, out, err);
  o.require(code == 0, "rerun exit code " + std::to_string(code) + ": " + err.str());
  const auto second = snapshot(dir);
  o.require(first.size() == second.size(), "file sets differ");
  std::size_t differ = 0;
  for (const auto& [name, bytes] : first) {
    auto it = second.find(name);
    if (it == second.end() || it->second != bytes) ++differ;
  }
  o.require(differ == 0, std::to_string(differ) + " files differ");
  if (o.pass) o.detail = std::to_string(first.size()) + " files byte-identical";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto want = [&](int id) { return only.empty() || only.count(id) > 0; };
  if (want(1)) report(1, "representation round-trip", 10, criterion1);
  if (want(2)) report(2, "clique lifting", 5, criterion2);
  if (want(3)) report(3, "hungarian vs brute force", 30, criterion3);
  if (want(4)) report(4, "sinkhorn marginals and cost", 10, criterion4);
  if (want(5)) report(5, "rwpl permutation invariance", 10, criterion5);
  if (want(6)) report(6, "tree traversal fidelity", 30, criterion6);
  if (want(7)) report(7, "gradient correctness", 120, criterion7);
  if (want(8)) report(8, "ablation (model 1 learns)", 900, criterion8);
  if (want(9)) report(9, "metrics vs brute force", 60, criterion9);
  if (want(10)) report(10, "random baseline contract", 10, criterion10);
  if (want(11)) report(11, "end-to-end determinism", 300, criterion11);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
