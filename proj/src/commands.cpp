#include "damcc/commands.hpp"

#include "damcc/gradcheck_suite.hpp"
#include "damcc/matching.hpp"
#include "damcc/metrics.hpp"
#include "damcc/series_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace damcc::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kBadInput = 3, kCheckFailed = 4 };

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string index_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return buf;
}

bool is_manifest(const fs::path& p) {
  const auto name = p.filename().string();
  return name == "manifest.json" || name.ends_with(".manifest.json");
}

/// Series files of a directory, sorted by name.
std::vector<fs::path> list_series(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json" && !is_manifest(e.path())) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<CcSeries> read_cc_dir(const fs::path& dir) {
  std::vector<CcSeries> out;
  for (const auto& f : list_series(dir)) {
    try {
      out.push_back(io::read_cc_series(f));
    } catch (const io::FormatError& e) {
      throw io::FormatError(e.path(), f.string() + ": " + e.what());
    }
  }
  return out;
}

fs::path manifest_path_for(const fs::path& out, bool is_dir) {
  if (is_dir) return out / "manifest.json";
  auto p = out;
  p += ".manifest.json";
  return p;
}

struct Manifest {
  Manifest(std::string cmd, std::vector<std::string> args) : command(std::move(cmd)), argv(std::move(args)) {}

  std::string command;
  std::vector<std::string> argv;
  json seeds = json::object();
  json config = json();
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  json steps = json();  // pipeline only: the command lines it ran

  void write(const fs::path& path) const {
    json j = {{"format", kManifestFormat}, {"tool", "damcc"}, {"version", kVersion}, {"command", command},
              {"argv", argv},             {"seeds", seeds}, {"outputs", outputs}, {"warnings", warnings}};
    if (!config.is_null()) j["config"] = config;
    if (!steps.is_null()) j["steps"] = steps;
    io::write_json(path, j);
  }
};

std::string rel(const fs::path& p) { return p.generic_string(); }

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

// Series with co-incidence rows read without CC validation, reduced to graphs.
GraphSeries load_as_graphs(const fs::path& path) {
  const json j = io::read_json(path);
  const auto schema = io::schema_of(j);
  if (schema == io::kGraphSeriesSchema) return io::graph_series_from_json(j);
  if (schema != io::kCcSeriesSchema)
    throw io::FormatError("/schema", "unsupported schema '" + schema + "' in " + path.string());
  const auto cs = io::co_incidence_series_from_json(j);
  GraphSeries gs;
  gs.num_nodes = cs.num_nodes;
  for (const auto& step : cs.steps) {
    std::set<Edge> edges;
    for (const auto& row : step.rank1.rows)
      if (row.size() == 2 && row[0] != row[1]) edges.insert({std::min(row[0], row[1]), std::max(row[0], row[1])});
    gs.steps.emplace_back(cs.num_nodes, std::vector<Edge>(edges.begin(), edges.end()));
  }
  return gs;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

template <class T>
std::vector<T> parse_numbers(const std::string& s, const char* what) {
  std::vector<T> out;
  for (const auto& item : split_list(s)) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<T>(v));
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": '" + item + "' is not a non-negative integer");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands. Each takes the full argv (for the manifest) plus parsed options.

struct GenOptions {
  std::string model = "tiny-ba";
  std::uint64_t seed = 0;
  std::size_t count = 10;
  std::string split = "5,2,3";
  std::string out;
  std::size_t n = 50, m = 4;
  std::size_t t = 40, communities = 3, community_size = 15;
  double p_int = 0.9, p_ext = 0.01, f_dec = 0.3;
};

DatasetSpec dataset_spec(const GenOptions& o) {
  DatasetSpec spec;
  spec.kind = parse_dataset_kind(o.model);
  spec.count = o.count;
  const auto parts = parse_numbers<std::size_t>(o.split, "--split");
  if (parts.size() != 3) throw UsageError("--split expects three counts, e.g. 5,2,3");
  std::copy(parts.begin(), parts.end(), spec.split.begin());
  spec.seed = o.seed;
  spec.ba.n = o.n;
  spec.ba.m = o.m;
  spec.community_decay.T = o.t;
  spec.community_decay.num_communities = o.communities;
  spec.community_decay.nodes_per_community = o.community_size;
  spec.community_decay.p_int = o.p_int;
  spec.community_decay.p_ext = o.p_ext;
  spec.community_decay.f_dec = o.f_dec;
  return spec;
}

json to_json(const DatasetSpec& s) {
  json j = {{"model", to_string(s.kind)}, {"count", s.count}, {"split", s.split}, {"seed", s.seed}};
  if (s.kind == DatasetKind::Ba) {
    j["n"] = s.ba.n;
    j["m"] = s.ba.m;
  } else if (s.kind == DatasetKind::CommunityDecay) {
    j["t"] = s.community_decay.T;
    j["communities"] = s.community_decay.num_communities;
    j["community_size"] = s.community_decay.nodes_per_community;
    j["p_int"] = s.community_decay.p_int;
    j["p_ext"] = s.community_decay.p_ext;
    j["f_dec"] = s.community_decay.f_dec;
  }
  return j;
}

int cmd_gen(const std::vector<std::string>& argv, const GenOptions& o, std::ostream& out) {
  const auto spec = dataset_spec(o);
  const auto ds = gen_dataset(spec);
  const fs::path dir = o.out;
  Manifest man{"gen", argv};
  man.seeds = {{"dataset", spec.seed}};
  man.config = to_json(spec);
  man.warnings = ds.warnings;
  auto dump = [&](const std::vector<GraphSeries>& part, const char* name) {
    for (std::size_t i = 0; i < part.size(); ++i) {
      const auto path = dir / name / (index_name(i) + ".json");
      io::write_series(path, part[i]);
      man.outputs.push_back(rel(path));
    }
  };
  fs::create_directories(dir);
  dump(ds.train, "train");
  dump(ds.val, "val");
  dump(ds.test, "test");
  man.write(manifest_path_for(dir, true));
  out << "gen: " << ds.train.size() << "/" << ds.val.size() << "/" << ds.test.size() << " series -> " << rel(dir)
      << "\n";
  return kOk;
}

int cmd_lift(const std::vector<std::string>& argv, const fs::path& in, const fs::path& outp, const LiftConfig& cfg,
             std::ostream& out) {
  cfg.check();
  Manifest man{"lift", argv};
  man.config = {{"min_clique", cfg.min_clique_size}, {"max_clique", cfg.max_clique_size}};
  std::vector<std::pair<fs::path, fs::path>> jobs;
  const bool dir_mode = fs::is_directory(in);
  if (dir_mode) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(in))
      if (e.is_regular_file() && e.path().extension() == ".json" && !is_manifest(e.path())) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) jobs.emplace_back(f, outp / fs::relative(f, in));
  } else {
    jobs.emplace_back(in, outp);
  }
  for (const auto& [src, dst] : jobs) {
    GraphSeries gs;
    try {
      gs = io::read_graph_series(src);
    } catch (const io::FormatError& e) {
      throw io::FormatError(e.path(), src.string() + ": " + e.what());
    }
    io::write_series(dst, lift_series(gs, cfg));
    man.outputs.push_back(rel(dst));
  }
  if (dir_mode) fs::create_directories(outp);
  man.write(manifest_path_for(outp, dir_mode));
  out << "lift: " << jobs.size() << " series -> " << rel(outp) << "\n";
  return kOk;
}

int cmd_ingest(const std::vector<std::string>& argv, const fs::path& edges, const fs::path& cases, std::size_t window,
               const fs::path& outp, std::ostream& out, std::ostream& err) {
  const auto g = ingest_covid(edges, cases, window);
  for (const auto& w : g.warnings) err << "warning: " << w << "\n";
  io::write_series(outp, g.series);
  Manifest man{"ingest-covid", argv};
  man.config = {{"window", window}};
  man.outputs = {rel(outp)};
  man.warnings = g.warnings;
  man.write(manifest_path_for(outp, false));
  out << "ingest-covid: " << g.series.steps.size() << " days, " << g.series.num_nodes << " regions\n";
  return kOk;
}

int cmd_train(const std::vector<std::string>& argv, const fs::path& config, const fs::path& data,
              const fs::path& outp, std::ostream& out) {
  const auto cfg = train_config_from_json(io::read_json(config));
  const auto train_set = read_cc_dir(data / "train");
  const auto val_set = read_cc_dir(data / "val");
  if (train_set.empty()) throw TrainError("train: no series in " + (data / "train").string());
  auto res = train(cfg, train_set, val_set);
  fs::create_directories(outp);
  res.model->save(outp / "model", {{"train", to_json(cfg)}, {"best_epoch", res.best_epoch}, {"best_val", res.best_val}});
  write_curve_csv(outp / "curve.csv", res.curve);
  Manifest man{"train", argv};
  man.seeds = {{"train", cfg.seed}};
  man.config = to_json(cfg);
  man.outputs = {rel(outp / "model.json"), rel(outp / "model.bin"), rel(outp / "curve.csv")};
  man.write(manifest_path_for(outp, true));
  out << "train: " << res.curve.size() << " epochs, best val " << res.best_val << " at epoch " << res.best_epoch
      << "\n";
  return kOk;
}

fs::path model_stem(const fs::path& p) {
  if (fs::is_directory(p)) return p / "model";
  if (p.extension() == ".json" || p.extension() == ".bin") return fs::path(p).replace_extension();
  return p;
}

int cmd_sample(const std::vector<std::string>& argv, const fs::path& model_path, const fs::path& in,
               const fs::path& outp, std::uint64_t seed, bool rollout, std::ostream& out) {
  const auto model = Model::load(model_stem(model_path));
  const auto series = io::read_cc_series(in);
  if (series.steps.empty()) throw std::runtime_error("sample: input series is empty");
  CcSeries pred;
  pred.num_nodes = series.num_nodes;
  pred.steps.push_back(series.steps[0]);
  for (std::size_t t = 0; t + 1 < series.steps.size(); ++t) {
    Rng rng(derive_seed(seed, "sample", t));
    const CombinatorialComplex& src =
        rollout ? pred.steps.back().with_features(series.steps[t].features()) : series.steps[t];
    pred.steps.push_back(predict_next_cc(src, model->net(), rng).with_features(series.steps[t + 1].features()));
  }
  io::write_series(outp, pred);
  Manifest man{"sample", argv};
  man.seeds = {{"sample", seed}};
  man.config = {{"rollout", rollout}};
  man.outputs = {rel(outp)};
  man.write(manifest_path_for(outp, false));
  out << "sample: " << pred.steps.size() << " steps -> " << rel(outp) << "\n";
  return kOk;
}

int cmd_baseline(const std::vector<std::string>& argv, const fs::path& target_path, const fs::path& outp,
                 RandomBaselineParams p, bool max2_given, std::ostream& out) {
  const auto target = io::read_cc_series(target_path);
  if (!max2_given) p.max2 = std::min<std::size_t>(p.max2, target.num_nodes);
  const auto pred = random_prediction(target, p);
  io::write_series(outp, pred);
  Manifest man{"baseline", argv};
  man.seeds = {{"baseline", p.seed}};
  man.config = {{"min1", p.min1}, {"max1", p.max1}, {"min2", p.min2}, {"max2", p.max2}};
  man.outputs = {rel(outp)};
  man.write(manifest_path_for(outp, false));
  out << "baseline: " << pred.steps.size() << " steps -> " << rel(outp) << "\n";
  return kOk;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

int cmd_eval_graph(const std::vector<std::string>& argv, const fs::path& pred_path, const fs::path& target_path,
                   const fs::path& outp, std::ostream& out) {
  const auto pred = load_as_graphs(pred_path);
  const auto target = load_as_graphs(target_path);
  if (pred.steps.size() != target.steps.size())
    throw std::runtime_error("eval-graph: series lengths differ (" + std::to_string(pred.steps.size()) + " vs " +
                             std::to_string(target.steps.size()) + ")");
  const auto rows = metrics::evaluate(pred, target);
  ensure_parent(outp);
  std::ofstream f(outp);
  if (!f) throw std::runtime_error("cannot write " + outp.string());
  f << "metric,value\n";
  for (const auto& r : rows) f << r.metric << ',' << format_double(r.value) << '\n';
  f.close();
  Manifest man{"eval-graph", argv};
  man.outputs = {rel(outp)};
  man.write(manifest_path_for(outp, false));
  out << "eval-graph: " << rows.size() << " metrics -> " << rel(outp) << "\n";
  return kOk;
}

int cmd_eval_cc(const std::vector<std::string>& argv, const fs::path& pred_path, const fs::path& target_path,
                const std::vector<std::string>& losses, double eps, int iters, const fs::path& outp,
                std::ostream& out) {
  const auto pred = io::read_co_incidence_series(pred_path);
  const auto target = io::read_co_incidence_series(target_path);
  if (pred.num_nodes != target.num_nodes) throw std::runtime_error("eval-cc: node counts differ");
  if (pred.steps.size() != target.steps.size()) throw std::runtime_error("eval-cc: series lengths differ");
  json report = {{"losses", losses}, {"num_steps", pred.steps.size()}};
  json ranks = json::object();
  json overall = json::object();
  for (const auto& name : losses) {
    const auto opt = rwpl_variant(name, eps, iters);
    double total = 0;
    std::size_t count = 0;
    for (int r : {1, 2}) {
      std::vector<double> per_step;
      for (std::size_t t = 0; t < pred.steps.size(); ++t) {
        const auto& a = r == 1 ? pred.steps[t].rank1 : pred.steps[t].rank2;
        const auto& b = r == 1 ? target.steps[t].rank1 : target.steps[t].rank2;
        const auto res = rwpl(a.to_dense(), b.to_dense(), opt);
        per_step.push_back(res.value);
      }
      double mean = 0;
      for (double v : per_step) mean += v;
      total += mean;
      count += per_step.size();
      if (!per_step.empty()) mean /= static_cast<double>(per_step.size());
      ranks[std::to_string(r)][name] = {{"per_step", per_step}, {"mean", mean}};
    }
    overall[name] = count ? total / static_cast<double>(count) : 0.0;
  }
  report["ranks"] = ranks;
  report["mean"] = overall;
  io::write_json(outp, report);
  Manifest man{"eval-cc", argv};
  man.config = {{"sinkhorn_eps", eps}, {"sinkhorn_iters", iters}};
  man.outputs = {rel(outp)};
  man.write(manifest_path_for(outp, false));
  out << "eval-cc:";
  for (const auto& name : losses) out << ' ' << name << '=' << overall[name].get<double>();
  out << "\n";
  return kOk;
}

const char* model_label(AblationModel m) {
  switch (m) {
    case AblationModel::Model1: return "model1";
    case AblationModel::Model2: return "model2";
    case AblationModel::Model3: return "model3";
    case AblationModel::Model4: return "model4";
  }
  return "?";
}

int cmd_ablation(const std::vector<std::string>& argv, const fs::path& data, const AblationOptions& opt,
                 const fs::path& outp, std::ostream& out) {
  const auto train_set = read_cc_dir(data / "train");
  const auto val_set = read_cc_dir(data / "val");
  if (train_set.empty()) throw TrainError("ablation: no series in " + (data / "train").string());
  const auto runs = run_ablation(train_set, val_set, opt);
  fs::create_directories(outp / "curves");
  Manifest man{"ablation", argv};
  man.seeds = {{"seeds", opt.seeds}};
  man.config = {{"max_epochs", opt.max_epochs}, {"hidden", opt.hidden}, {"lr", opt.lr}};

  std::ofstream summary(outp / "summary.csv");
  summary << "model,seed,loss,traversal,epochs,first_val,best_val,ratio,learned\n";
  std::map<int, std::pair<std::size_t, std::size_t>> tally;  // model -> (learned, runs)
  for (const auto& r : runs) {
    const auto cfg = TrainConfig::for_ablation(r.model);
    const auto curve = outp / "curves" / (std::string(model_label(r.model)) + "_seed" + std::to_string(r.seed) + ".csv");
    write_curve_csv(curve, r.curve);
    man.outputs.push_back(rel(curve));
    summary << model_label(r.model) << ',' << r.seed << ',' << (cfg.loss == LossMode::Bce ? "bce" : "sinkhorn-cosine")
            << ',' << (cfg.traversal == Traversal::Deterministic ? "deterministic" : "stochastic") << ','
            << r.curve.size() << ',' << format_double(r.first_val) << ',' << format_double(r.best_val) << ','
            << format_double(r.ratio()) << ',' << (r.learned() ? 1 : 0) << '\n';
    auto& t = tally[static_cast<int>(r.model)];
    t.first += r.learned();
    ++t.second;
  }
  summary.close();
  json rows = json::array();
  for (const auto& [m, t] : tally) {
    const auto cfg = TrainConfig::for_ablation(static_cast<AblationModel>(m));
    const bool improved = 2 * t.first > t.second;
    rows.push_back({{"model", model_label(static_cast<AblationModel>(m))},
                    {"loss", cfg.loss == LossMode::Bce ? "bce" : "sinkhorn-cosine"},
                    {"traversal", cfg.traversal == Traversal::Deterministic ? "deterministic" : "stochastic"},
                    {"seeds_learned", t.first},
                    {"seeds", t.second},
                    {"improved", improved}});
    out << model_label(static_cast<AblationModel>(m)) << ": learned in " << t.first << "/" << t.second << " seeds"
        << (improved ? " (improved)" : "") << "\n";
  }
  io::write_json(outp / "report.json", {{"criterion", "best val loss < 0.5 * epoch-1 val loss"}, {"models", rows}});
  man.outputs.push_back(rel(outp / "summary.csv"));
  man.outputs.push_back(rel(outp / "report.json"));
  man.write(manifest_path_for(outp, true));
  return kOk;
}

int cmd_gradcheck(const std::vector<std::string>& argv, double tol, std::uint64_t seed, const std::string& outp,
                  std::ostream& out) {
  const auto cases = run_gradcheck_suite(seed);
  bool ok = true;
  json rows = json::array();
  for (const auto& c : cases) {
    const bool pass = c.result.max_rel_error < tol;
    ok = ok && pass;
    out << (pass ? "ok   " : "FAIL ") << std::left << std::setw(22) << c.name << " max rel err "
        << c.result.max_rel_error << " over " << c.result.coords_checked << " coords\n";
    rows.push_back({{"name", c.name},
                    {"max_rel_error", c.result.max_rel_error},
                    {"coords", c.result.coords_checked},
                    {"worst", c.result.worst},
                    {"pass", pass}});
  }
  if (!outp.empty()) {
    io::write_json(outp, {{"tolerance", tol}, {"checks", rows}, {"pass", ok}});
    Manifest man{"gradcheck", argv};
    man.seeds = {{"gradcheck", seed}};
    man.outputs = {outp};
    man.write(manifest_path_for(outp, false));
  }
  out << (ok ? "gradcheck: all checks passed\n" : "gradcheck: some checks failed\n");
  return ok ? kOk : kCheckFailed;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth);

int cmd_rerun(const fs::path& manifest_path, std::ostream& out, std::ostream& err, int depth) {
  if (depth > 0) throw UsageError("rerun: a manifest cannot point at another rerun");
  const json m = io::read_json(manifest_path);
  if (!m.is_object() || m.value("format", "") != kManifestFormat)
    throw io::FormatError("/format", manifest_path.string() + ": not a " + std::string(kManifestFormat) + " manifest");
  if (m.at("command") == "pipeline") {
    run_pipeline(experiment_config_from_json(m.at("config")), manifest_path.parent_path(), out);
    return kOk;
  }
  return dispatch(m.at("argv").get<std::vector<std::string>>(), out, err, depth + 1);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
  CLI::App app{"Dynamic combinatorial complex generation toolkit", "damcc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic temporal graph dataset");
  g->add_option("--model", gen.model, "ba | community-decay | tiny-ba")->capture_default_str();
  g->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
  g->add_option("--count", gen.count, "Number of series")->capture_default_str();
  g->add_option("--split", gen.split, "Train,val,test counts")->capture_default_str();
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--n", gen.n, "BA: nodes")->capture_default_str();
  g->add_option("--m", gen.m, "BA: edges per new node")->capture_default_str();
  g->add_option("--t", gen.t, "Community decay: steps")->capture_default_str();
  g->add_option("--communities", gen.communities, "Community decay: communities")->capture_default_str();
  g->add_option("--community-size", gen.community_size, "Community decay: nodes per community")
      ->capture_default_str();
  g->add_option("--p-int", gen.p_int, "Community decay: internal edge probability")->capture_default_str();
  g->add_option("--p-ext", gen.p_ext, "Community decay: external edge probability")->capture_default_str();
  g->add_option("--f-dec", gen.f_dec, "Community decay: decay fraction")->capture_default_str();

  std::string in, outp, edges, cases, config, data, model, target, pred, losses = "hbce,hc,sbce,sc", seeds = "1,2,3,4,5";
  LiftConfig lift_cfg;
  auto* l = app.add_subcommand("lift", "Clique-lift graph series into combinatorial complexes");
  l->add_option("--in", in, "Graph series file or directory")->required();
  l->add_option("--out", outp, "Output file or directory")->required();
  l->add_option("--min-clique", lift_cfg.min_clique_size, "Smallest clique kept as a 2-cell")->capture_default_str();
  l->add_option("--max-clique", lift_cfg.max_clique_size, "Largest clique kept as a 2-cell")->capture_default_str();

  std::size_t window = 8;
  auto* ic = app.add_subcommand("ingest-covid", "Build a graph series from mobility edges and case counts");
  ic->add_option("--edges", edges, "Per-day edge list JSON")->required();
  ic->add_option("--cases", cases, "Per-region case CSV")->required();
  ic->add_option("--window", window, "Days of case history per feature vector")->capture_default_str();
  ic->add_option("--out", outp, "Output graph series")->required();

  auto* tr = app.add_subcommand("train", "Train a model");
  tr->add_option("--config", config, "Training config JSON")->required();
  tr->add_option("--data", data, "Directory with train/ and val/ complex series")->required();
  tr->add_option("--out", outp, "Checkpoint directory")->required();

  std::uint64_t seed = 0;
  bool rollout = false;
  auto* sm = app.add_subcommand("sample", "One-step predictions for every step of a series");
  sm->add_option("--model", model, "Checkpoint directory or stem")->required();
  sm->add_option("--in", in, "Input complex series")->required();
  sm->add_option("--out", outp, "Prediction series")->required();
  sm->add_option("--seed", seed, "Sampling seed")->capture_default_str();
  sm->add_flag("--rollout", rollout, "Feed predictions back instead of the observed steps");

  RandomBaselineParams bp;
  auto* bl = app.add_subcommand("baseline", "Random co-incidence baseline");
  bl->add_option("--target", target, "Target complex series")->required();
  bl->add_option("--out", outp, "Prediction series")->required();
  bl->add_option("--seed", bp.seed, "Seed")->capture_default_str();
  bl->add_option("--min1", bp.min1)->capture_default_str();
  bl->add_option("--max1", bp.max1)->capture_default_str();
  bl->add_option("--min2", bp.min2)->capture_default_str();
  auto* max2_opt = bl->add_option("--max2", bp.max2, "Default: min(15, node count)");

  auto* eg = app.add_subcommand("eval-graph", "Graph statistics DTW report");
  eg->add_option("--pred", pred)->required();
  eg->add_option("--target", target)->required();
  eg->add_option("--out", outp, "CSV report")->required();

  double eps = 0.1;
  int iters = 50;
  auto* ec = app.add_subcommand("eval-cc", "Row-wise permutation-invariant losses per rank and step");
  ec->add_option("--pred", pred)->required();
  ec->add_option("--target", target)->required();
  ec->add_option("--losses", losses, "Comma-separated subset of hbce,hc,sbce,sc")->capture_default_str();
  ec->add_option("--eps", eps, "Sinkhorn regularisation")->capture_default_str();
  ec->add_option("--iters", iters, "Sinkhorn iterations")->capture_default_str();
  ec->add_option("--out", outp, "JSON report")->required();

  AblationOptions ab;
  auto* ab_cmd = app.add_subcommand("ablation", "Train Models 1-4 on the 1-cells of a dataset");
  ab_cmd->add_option("--data", data, "Directory with train/ and val/ complex series")->required();
  ab_cmd->add_option("--seeds", seeds)->capture_default_str();
  ab_cmd->add_option("--max-epochs", ab.max_epochs)->capture_default_str();
  ab_cmd->add_option("--hidden", ab.hidden)->capture_default_str();
  ab_cmd->add_option("--lr", ab.lr)->capture_default_str();
  ab_cmd->add_option("--out", outp, "Output directory")->required();

  double tol = 1e-4;
  std::string report;
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of every differentiable component");
  gc->add_option("--tol", tol)->capture_default_str();
  gc->add_option("--seed", seed)->capture_default_str();
  gc->add_option("--out", report, "Optional JSON report");

  std::string manifest;
  auto* rr = app.add_subcommand("rerun", "Re-execute a run from its manifest");
  rr->add_option("--manifest", manifest)->required();

  auto* pl = app.add_subcommand("pipeline", "gen -> lift -> train -> sample -> baseline -> eval");
  pl->add_option("--config", config, "Experiment config JSON")->required();
  pl->add_option("--out", outp, "Output directory")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (g->parsed()) return cmd_gen(args, gen, out);
  if (l->parsed()) return cmd_lift(args, in, outp, lift_cfg, out);
  if (ic->parsed()) return cmd_ingest(args, edges, cases, window, outp, out, err);
  if (tr->parsed()) return cmd_train(args, config, data, outp, out);
  if (sm->parsed()) return cmd_sample(args, model, in, outp, seed, rollout, out);
  if (bl->parsed()) return cmd_baseline(args, target, outp, bp, max2_opt->count() > 0, out);
  if (eg->parsed()) return cmd_eval_graph(args, pred, target, outp, out);
  if (ec->parsed()) {
    const auto names = split_list(losses);
    if (names.empty()) throw UsageError("--losses: empty list");
    return cmd_eval_cc(args, pred, target, names, eps, iters, outp, out);
  }
  if (ab_cmd->parsed()) {
    ab.seeds = parse_numbers<std::uint64_t>(seeds, "--seeds");
    if (ab.seeds.empty()) throw UsageError("--seeds: empty list");
    return cmd_ablation(args, data, ab, outp, out);
  }
  if (gc->parsed()) return cmd_gradcheck(args, tol, seed, report, out);
  if (rr->parsed()) return cmd_rerun(manifest, out, err, depth);
  if (pl->parsed()) {
    run_pipeline(experiment_config_from_json(io::read_json(config)), outp, out);
    return kOk;
  }
  throw UsageError("no subcommand");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err, 0);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const io::FormatError& e) {
    err << "error: malformed input at " << (e.path().empty() ? "/" : e.path()) << ": " << e.what() << "\n";
    return kBadInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

json to_json(const ExperimentConfig& c) {
  return {{"dataset", to_json(c.dataset)},
          {"lift", {{"min_clique", c.lift.min_clique_size}, {"max_clique", c.lift.max_clique_size}}},
          {"train", to_json(c.train)},
          {"sample_seed", c.sample_seed},
          {"baseline_seed", c.baseline_seed},
          {"losses", c.losses}};
}

namespace {

void reject_unknown(const json& j, const char* where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw io::FormatError(where, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
      throw io::FormatError(std::string(where) + "/" + it.key(), "unknown key");
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j) {
  reject_unknown(j, "", {"dataset", "lift", "train", "sample_seed", "baseline_seed", "losses"});
  ExperimentConfig c;
  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    reject_unknown(d, "/dataset",
                   {"model", "count", "split", "seed", "n", "m", "t", "communities", "community_size", "p_int", "p_ext",
                    "f_dec"});
    GenOptions o;
    o.model = d.value("model", o.model);
    o.count = d.value("count", o.count);
    if (d.contains("split")) {
      const auto s = d["split"].get<std::vector<std::size_t>>();
      if (s.size() != 3) throw io::FormatError("/dataset/split", "expected three counts");
      o.split = std::to_string(s[0]) + "," + std::to_string(s[1]) + "," + std::to_string(s[2]);
    }
    o.seed = d.value("seed", o.seed);
    o.n = d.value("n", o.n);
    o.m = d.value("m", o.m);
    o.t = d.value("t", o.t);
    o.communities = d.value("communities", o.communities);
    o.community_size = d.value("community_size", o.community_size);
    o.p_int = d.value("p_int", o.p_int);
    o.p_ext = d.value("p_ext", o.p_ext);
    o.f_dec = d.value("f_dec", o.f_dec);
    c.dataset = dataset_spec(o);
  }
  if (j.contains("lift")) {
    reject_unknown(j["lift"], "/lift", {"min_clique", "max_clique"});
    c.lift.min_clique_size = j["lift"].value("min_clique", c.lift.min_clique_size);
    c.lift.max_clique_size = j["lift"].value("max_clique", c.lift.max_clique_size);
  }
  if (j.contains("train")) c.train = train_config_from_json(j["train"]);
  c.sample_seed = j.value("sample_seed", c.sample_seed);
  c.baseline_seed = j.value("baseline_seed", c.baseline_seed);
  if (j.contains("losses")) c.losses = j["losses"].get<std::vector<std::string>>();
  for (const auto& name : c.losses) rwpl_variant(name);
  return c;
}

void run_pipeline(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& out) {
  std::vector<std::vector<std::string>> steps;
  auto step = [&](std::vector<std::string> args) {
    std::ostringstream err;
    const int code = dispatch(args, out, err, 1);
    if (code != kOk) throw std::runtime_error("pipeline step '" + args[0] + "' failed: " + err.str());
    steps.push_back(std::move(args));
  };
  const auto d = [&](const fs::path& p) { return rel(out_dir / p); };
  fs::create_directories(out_dir);

  const auto& ds = cfg.dataset;
  std::vector<std::string> gen = {"gen", "--model", to_string(ds.kind), "--seed", std::to_string(ds.seed),
                                  "--count", std::to_string(ds.count), "--split",
                                  std::to_string(ds.split[0]) + "," + std::to_string(ds.split[1]) + "," +
                                      std::to_string(ds.split[2]),
                                  "--out", d("data")};
  if (ds.kind == DatasetKind::Ba)
    gen.insert(gen.end(), {"--n", std::to_string(ds.ba.n), "--m", std::to_string(ds.ba.m)});
  if (ds.kind == DatasetKind::CommunityDecay) {
    const auto& c = ds.community_decay;
    gen.insert(gen.end(), {"--t", std::to_string(c.T), "--communities", std::to_string(c.num_communities),
                           "--community-size", std::to_string(c.nodes_per_community), "--p-int",
                           format_double(c.p_int), "--p-ext", format_double(c.p_ext), "--f-dec",
                           format_double(c.f_dec)});
  }
  step(gen);
  step({"lift", "--in", d("data"), "--out", d("cc"), "--min-clique", std::to_string(cfg.lift.min_clique_size),
        "--max-clique", std::to_string(cfg.lift.max_clique_size)});
  io::write_json(out_dir / "train_config.json", to_json(cfg.train));
  step({"train", "--config", d("train_config.json"), "--data", d("cc"), "--out", d("ckpt")});

  std::string losses;
  for (const auto& l : cfg.losses) losses += (losses.empty() ? "" : ",") + l;
  const auto tests = list_series(out_dir / "cc" / "test");
  for (std::size_t i = 0; i < tests.size(); ++i) {
    const auto name = index_name(i);
    const auto test = rel(tests[i]);
    step({"sample", "--model", d("ckpt"), "--in", test, "--out", d("pred/" + name + ".json"), "--seed",
          std::to_string(derive_seed(cfg.sample_seed, "sample", i))});
    step({"baseline", "--target", test, "--out", d("baseline/" + name + ".json"), "--seed",
          std::to_string(derive_seed(cfg.baseline_seed, "baseline", i))});
    for (const char* who : {"pred", "baseline"}) {
      const std::string src = d(std::string(who) + "/" + name + ".json");
      step({"eval-graph", "--pred", src, "--target", test, "--out", d("eval/graph_" + std::string(who) + "_" + name + ".csv")});
      step({"eval-cc", "--pred", src, "--target", test, "--losses", losses, "--eps", format_double(cfg.train.sinkhorn_eps),
            "--iters", std::to_string(cfg.train.sinkhorn_iters), "--out",
            d("eval/cc_" + std::string(who) + "_" + name + ".json")});
    }
  }
  Manifest man{"pipeline", {"pipeline", "--out", rel(out_dir)}};
  man.seeds = {{"dataset", ds.seed}, {"train", cfg.train.seed}, {"sample", cfg.sample_seed},
               {"baseline", cfg.baseline_seed}};
  man.config = to_json(cfg);
  man.steps = steps;
  man.write(out_dir / "manifest.json");
}

}  // namespace damcc::cli
