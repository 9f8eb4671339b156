#include "cli.hpp"

#include "hybowave/checkpoint.hpp"
#include "hybowave/config.hpp"
#include "hybowave/errors.hpp"
#include "hybowave/graph.hpp"
#include "hybowave/synthetic.hpp"
#include "hybowave/trainer.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace hwn::cli {

namespace {

namespace fs = std::filesystem;

struct ConfigArgs {
  std::string config_path;
  std::vector<std::string> overrides;
};

void add_config_options(CLI::App& cmd, ConfigArgs& args) {
  cmd.add_option("--config", args.config_path, "flat JSON configuration file");
  cmd.add_option("--set", args.overrides, "key=value override (repeatable)");
}

TrainConfig resolve_config(const ConfigArgs& args) {
  TrainConfig config;
  if (!args.config_path.empty()) {
    const nlohmann::json j = nlohmann::json::parse(read_text_file(args.config_path), nullptr, false);
    if (j.is_discarded()) throw InputError("config '" + args.config_path + "' is not valid JSON");
    config = config_from_json(j);
  }
  for (const auto& o : args.overrides) apply_override(config, o);
  return config;
}

struct Data {
  Graph graph;
  EdgeSplit split;
};

Data load_data(const std::string& edges_path, const std::string& split_path, std::uint64_t seed) {
  Data d{load_edge_list(edges_path).graph, {}};
  if (split_path.empty()) {
    d.split = split_edges(d.graph, {}, seed);
  } else {
    d.split = parse_split_manifest(read_text_file(split_path));
    if (d.split.num_nodes != d.graph.num_nodes()) {
      throw InputError("split manifest has " + std::to_string(d.split.num_nodes) + " nodes, edge list has " +
                       std::to_string(d.graph.num_nodes()));
    }
    for (const auto* part : {&d.split.train_pos, &d.split.val_pos, &d.split.test_pos}) {
      for (const Edge& e : *part) {
        if (!d.graph.has_edge(e.u, e.v)) throw InputError("split manifest edge not present in edge list");
      }
    }
  }
  return d;
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(precision) << v;
  return ss.str();
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / double(v.size() - 1));
}

// --- commands ---------------------------------------------------------------

struct SplitArgs {
  std::string edges;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_split(const SplitArgs& a, std::ostream& out) {
  const LoadedGraph loaded = load_edge_list(a.edges);
  const EdgeSplit split = split_edges(loaded.graph, {}, a.seed);
  ensure_parent(a.out);
  write_text_file(a.out, split_manifest_json(split));
  out << "split: nodes=" << loaded.graph.num_nodes() << " edges=" << loaded.graph.num_edges()
      << " train=" << split.train_pos.size() << " val=" << split.val_pos.size() << " test=" << split.test_pos.size()
      << " self_loops_skipped=" << loaded.summary.self_loops_skipped << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string edges;
  std::string split;
  ConfigArgs config;
  std::string out = ".";
  int repeats = 1;
  bool verbose = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const TrainConfig config = resolve_config(a.config);
  if (a.repeats < 1) throw InputError("--repeats must be >= 1");
  const Data data = load_data(a.edges, a.split, config.seed);
  const fs::path dir(a.out);
  fs::create_directories(dir);

  EpochCallback log;
  if (a.verbose) {
    log = [&err](const EpochLog& e) {
      err << "epoch " << e.epoch << " loss " << fmt(e.loss.total) << " val_auc " << fmt(e.val_auc) << "\n";
    };
  }

  TrainResult first = train(data.graph, data.split, config, log);
  std::string metrics_text = metrics_to_json(first.metrics, config);
  std::vector<double> aucs{first.metrics.auc};
  std::vector<double> auprs{first.metrics.aupr};
  if (a.repeats > 1) {
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(metrics_text);
    std::vector<std::uint64_t> seeds{config.seed};
    for (int r = 1; r < a.repeats; ++r) {
      TrainConfig c = config;
      c.seed = config.seed + static_cast<std::uint64_t>(r);
      const Metrics m = train(data.graph, data.split, c).metrics;
      seeds.push_back(c.seed);
      aucs.push_back(m.auc);
      auprs.push_back(m.aupr);
    }
    j["repeats"] = {{"seeds", seeds},          {"auc", aucs},
                    {"aupr", auprs},           {"auc_mean", mean_of(aucs)},
                    {"auc_std", std_of(aucs)}, {"aupr_mean", mean_of(auprs)},
                    {"aupr_std", std_of(auprs)}};
    metrics_text = j.dump(1) + "\n";
  }
  save_checkpoint(first.checkpoint, dir / "checkpoint.json");
  write_text_file(dir / "metrics.json", metrics_text);
  out << "train: test_auc=" << fmt(mean_of(aucs)) << " (std " << fmt(std_of(aucs)) << ")"
      << " test_aupr=" << fmt(mean_of(auprs)) << " (std " << fmt(std_of(auprs)) << ")"
      << " best_epoch=" << first.metrics.best_epoch << " epochs=" << first.metrics.epochs_run
      << " repeats=" << a.repeats << "\n";
  return kExitOk;
}

struct PredictArgs {
  std::string checkpoint;
  std::string pairs;
  int topk = 0;
  std::string out;
};

struct Scored {
  NodeId u;
  NodeId v;
  double score;
};

EdgeList read_label_pairs(const std::string& path, const NodeIndex& index) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  EdgeList pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(path, lineno, "expected two tab-separated labels");
    }
    const std::string a = line.substr(0, tab);
    const std::string b = line.substr(tab + 1);
    const auto ia = index.find(a);
    if (!ia) throw InputError("unknown node label '" + a + "' (" + path + " line " + std::to_string(lineno) + ")");
    const auto ib = index.find(b);
    if (!ib) throw InputError("unknown node label '" + b + "' (" + path + " line " + std::to_string(lineno) + ")");
    pairs.push_back({*ia, *ib});  // orientation kept as given; (u, u) allowed
  }
  return pairs;
}

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  if (a.pairs.empty() == (a.topk <= 0)) throw InputError("give exactly one of --pairs or --topk K (K > 0)");
  const Checkpoint ck = load_checkpoint(a.checkpoint);
  const Graph g = ck.graph();
  const Model model(g, ck.config.model_config());
  const Eigen::MatrixXd emb = model.embed(ck.params);

  EdgeList pairs;
  if (!a.pairs.empty()) {
    pairs = read_label_pairs(a.pairs, g.index());
  } else {
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
      for (NodeId v = u + 1; v < g.num_nodes(); ++v) {
        if (!g.has_edge(u, v)) pairs.push_back({u, v});
      }
    }
  }
  const Eigen::VectorXd scores = model.scores(emb, pairs);
  std::vector<Scored> rows;
  rows.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) rows.push_back({pairs[i].u, pairs[i].v, scores(Eigen::Index(i))});
  std::stable_sort(rows.begin(), rows.end(), [](const Scored& x, const Scored& y) { return x.score > y.score; });
  if (a.topk > 0 && rows.size() > std::size_t(a.topk)) rows.resize(std::size_t(a.topk));

  std::ostringstream tsv;
  tsv << std::setprecision(17);
  for (const auto& r : rows) {
    tsv << g.index().label(r.u) << '\t' << g.index().label(r.v) << '\t' << r.score << '\t'
        << link_probability(-r.score, ck.params.decoder) << '\n';
  }
  ensure_parent(a.out);
  write_text_file(a.out, tsv.str());
  out << "predict: pairs=" << rows.size() << " out=" << a.out << "\n";
  return kExitOk;
}

struct ExperimentArgs {
  std::string edges;
  std::string split;
  ConfigArgs config;
  int repeats = 1;
  std::string out;
  std::vector<std::string> scales;
};

int cmd_ablate(const ExperimentArgs& a, std::ostream& out) {
  const TrainConfig config = resolve_config(a.config);
  const Data data = load_data(a.edges, a.split, config.seed);
  const auto rows = ablate(data.graph, data.split, config, a.repeats);
  std::ostringstream csv;
  csv << "encoder,wavelet_contrastive,auc,aupr,auc_std,aupr_std,repeats\n";
  for (const auto& r : rows) {
    csv << to_string(r.encoder) << ',' << (r.wavelet_contrastive ? "on" : "off") << ',' << fmt(r.auc) << ','
        << fmt(r.aupr) << ',' << fmt(r.auc_std) << ',' << fmt(r.aupr_std) << ',' << a.repeats << '\n';
  }
  ensure_parent(a.out);
  write_text_file(a.out, csv.str());
  out << "ablate: rows=" << rows.size() << " full_auc=" << fmt(rows.front().auc) << " out=" << a.out << "\n";
  return kExitOk;
}

int cmd_scale_sweep(const ExperimentArgs& a, std::ostream& out) {
  const TrainConfig config = resolve_config(a.config);
  std::vector<ScaleSet> sweep;
  for (const auto& s : a.scales) sweep.push_back(ScaleSet::parse(s));
  if (sweep.empty()) sweep = default_scale_sweep();
  const Data data = load_data(a.edges, a.split, config.seed);
  const auto rows = scale_sweep(data.graph, data.split, config, sweep, a.repeats);
  std::ostringstream csv;
  csv << "scales,k,auc,aupr,auc_std,aupr_std,repeats\n";
  const SweepRow* best = &rows.front();
  for (const auto& r : rows) {
    csv << '"' << r.scales.to_string() << "\"," << r.scales.size() << ',' << fmt(r.auc) << ',' << fmt(r.aupr) << ','
        << fmt(r.auc_std) << ',' << fmt(r.aupr_std) << ',' << a.repeats << '\n';
    if (r.auc > best->auc) best = &r;
  }
  ensure_parent(a.out);
  write_text_file(a.out, csv.str());
  out << "scale-sweep: rows=" << rows.size() << " best=(" << best->scales.to_string() << ") auc=" << fmt(best->auc)
      << " out=" << a.out << "\n";
  return kExitOk;
}

struct ImportanceArgs {
  std::string checkpoint;
  std::string out;
  int top = 10;
};

int cmd_importance(const ImportanceArgs& a, std::ostream& out) {
  const Checkpoint ck = load_checkpoint(a.checkpoint);
  const Eigen::VectorXd importance =
      apply_feature_attention(ck.params.encoder.features, ck.params.encoder.feature_gate).importance;
  const auto top = top_features(importance, static_cast<std::size_t>(a.top));
  std::ostringstream csv;
  csv << "rank,feature,weight\n" << std::setprecision(17);
  for (std::size_t i = 0; i < top.size(); ++i) csv << i + 1 << ',' << top[i].first << ',' << top[i].second << '\n';
  ensure_parent(a.out);
  write_text_file(a.out, csv.str());
  out << "importance: rows=" << top.size() << " top_feature=" << top.front().first
      << " weight=" << fmt(top.front().second) << " out=" << a.out << "\n";
  return kExitOk;
}

struct GradArgs {
  ConfigArgs config;
  int probe = 6;
  bool all_variants = false;
};

int cmd_verify_gradients(const GradArgs& a, std::ostream& out, std::ostream& err) {
  const TrainConfig base = resolve_config(a.config);
  std::vector<TrainConfig> configs{base};
  if (a.all_variants) {
    configs.clear();
    for (bool w : {true, false}) {
      for (bool c : {true, false}) {
        TrainConfig cfg = base;
        cfg.model.use_wavelet = w;
        cfg.model.use_contrastive = c;
        configs.push_back(cfg);
      }
    }
  }
  bool passed = true;
  double worst = 0.0;
  for (const auto& cfg : configs) {
    const GradientReport report = verify_gradients(cfg, a.probe);
    for (const auto& t : report.tensors) {
      err << "wavelet=" << cfg.model.use_wavelet << " contrastive=" << cfg.model.use_contrastive << " " << t.name
          << " rel=" << t.max_rel_error << "\n";
      worst = std::max(worst, t.max_rel_error);
    }
    passed = passed && report.passed;
  }
  out << "verify-gradients: " << (passed ? "PASS" : "FAIL") << " configs=" << configs.size()
      << " max_rel_error=" << worst << "\n";
  return passed ? kExitOk : kExitNumerical;
}

struct SynthArgs {
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const Graph g = hierarchical_benchmark(a.seed);
  std::ostringstream tsv;
  for (const Edge& e : g.edges()) tsv << g.index().label(e.u) << '\t' << g.index().label(e.v) << '\n';
  ensure_parent(a.out);
  write_text_file(a.out, tsv.str());
  out << "synth: nodes=" << g.num_nodes() << " edges=" << g.num_edges() << " out=" << a.out << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hybowave: hyperbolic wavelet link prediction"};
  app.require_subcommand(1);

  SplitArgs split_args;
  auto* split = app.add_subcommand("split", "split an edge list into train/val/test");
  split->add_option("--edges", split_args.edges, "edge list (label<TAB>label)")->required();
  split->add_option("--seed", split_args.seed, "split seed");
  split->add_option("--out", split_args.out, "manifest JSON path")->required();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train and evaluate");
  train_cmd->add_option("--edges", train_args.edges, "edge list")->required();
  train_cmd->add_option("--split", train_args.split, "split manifest (default: split with the config seed)");
  add_config_options(*train_cmd, train_args.config);
  train_cmd->add_option("--out", train_args.out, "output directory for checkpoint.json and metrics.json");
  train_cmd->add_option("--repeats", train_args.repeats, "runs with seeds seed, seed+1, ...");
  train_cmd->add_flag("--verbose", train_args.verbose, "log every epoch to stderr");

  PredictArgs predict_args;
  auto* predict = app.add_subcommand("predict", "score node pairs with a checkpoint");
  predict->add_option("--checkpoint", predict_args.checkpoint, "checkpoint.json")->required();
  predict->add_option("--pairs", predict_args.pairs, "pairs file (label<TAB>label)");
  predict->add_option("--topk", predict_args.topk, "score all non-training pairs, keep the best K");
  predict->add_option("--out", predict_args.out, "output TSV")->required();

  ExperimentArgs ablate_args;
  auto* ablate_cmd = app.add_subcommand("ablate", "encoder x (wavelet+contrastive) ablation grid");
  ablate_cmd->add_option("--edges", ablate_args.edges)->required();
  ablate_cmd->add_option("--split", ablate_args.split);
  add_config_options(*ablate_cmd, ablate_args.config);
  ablate_cmd->add_option("--repeats", ablate_args.repeats);
  ablate_cmd->add_option("--out", ablate_args.out, "output CSV")->required();

  ExperimentArgs sweep_args;
  auto* sweep = app.add_subcommand("scale-sweep", "compare diffusion scale lists");
  sweep->add_option("--edges", sweep_args.edges)->required();
  sweep->add_option("--split", sweep_args.split);
  add_config_options(*sweep, sweep_args.config);
  sweep->add_option("--repeats", sweep_args.repeats);
  sweep->add_option("--scales", sweep_args.scales, "scale list like 1,2,3 (repeatable; default sweep otherwise)");
  sweep->add_option("--out", sweep_args.out, "output CSV")->required();

  ImportanceArgs importance_args;
  auto* importance = app.add_subcommand("importance", "top input features by attention weight");
  importance->add_option("--checkpoint", importance_args.checkpoint)->required();
  importance->add_option("--top", importance_args.top)->check(CLI::PositiveNumber);
  importance->add_option("--out", importance_args.out, "output CSV")->required();

  GradArgs grad_args;
  auto* grad = app.add_subcommand("verify-gradients", "finite-difference gradient check");
  add_config_options(*grad, grad_args.config);
  grad->add_option("--probe", grad_args.probe, "probe graph size (3..10)");
  grad->add_flag("--all-variants", grad_args.all_variants, "check wavelet/contrastive on/off combinations");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "write the hierarchical benchmark graph");
  synth->add_option("--seed", synth_args.seed);
  synth->add_option("--out", synth_args.out, "output edge list")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*split) return cmd_split(split_args, out);
    if (*train_cmd) return cmd_train(train_args, out, err);
    if (*predict) return cmd_predict(predict_args, out);
    if (*ablate_cmd) return cmd_ablate(ablate_args, out);
    if (*sweep) return cmd_scale_sweep(sweep_args, out);
    if (*importance) return cmd_importance(importance_args, out);
    if (*grad) return cmd_verify_gradients(grad_args, out, err);
    if (*synth) return cmd_synth(synth_args, out);
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {  // ContractViolation included
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::runtime_error& e) {  // InputError, ParseError, filesystem
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace hwn::cli
