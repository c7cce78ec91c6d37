// Command-line front end: ingest raw ratings, split them, train the model,
// evaluate checkpoints, emit recommendations, sweep hyperparameter grids, and
// run the gradient check.

#include <CLI11.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "pane/config.hpp"
#include "pane/gradcheck.hpp"
#include "pane/graph.hpp"
#include "pane/loss.hpp"
#include "pane/ranking.hpp"
#include "pane/trainer.hpp"

namespace fs = std::filesystem;
using pane::ErrorCategory;
using pane::fail;

namespace {

struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> assignments;  // key -> raw value

  // flags > file > defaults
  pane::config::RunConfig resolve() const {
    pane::config::RunConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& [key, value] : assignments) cfg.apply(key, value);
    return cfg;
  }
};

// Registers one --flag per config key; supplied flags override the file.
void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.config_path, "flat key=value config file");
  static const char* keys[] = {
      "embedding_dim", "gnn_layers", "edge_drop_prob", "feedback_coeff", "filter_threshold",
      "contrastive_weight", "reg_weight", "temperature", "learning_rate", "batch_size",
      "epochs", "neg_samples_per_edge", "dropout_rate", "seed", "variant",
      "distort_per_epoch", "global_attention", "step_per_epoch", "early_stop",
      "early_stop_patience", "checkpoint_every", "eval_k", "filter_keep", "capped_idcg",
      "backfill"};
  for (const char* key : keys) {
    std::string flag = "--" + std::string(key);
    for (char& c : flag) {
      if (c == '_') c = '-';
    }
    cmd->add_option_function<std::string>(
            flag, [&flags, key](const std::string& value) { flags.assignments[key] = value; },
            "config key " + std::string(key))
        ->take_last();
  }
}

std::uint32_t infer_count(const std::vector<pane::datasets::SignedEdge>& edges, bool users) {
  std::uint32_t max_idx = 0;
  for (const auto& e : edges) max_idx = std::max(max_idx, users ? e.user : e.item);
  return edges.empty() ? 0 : max_idx + 1;
}

pane::graph::SignedBipartiteGraph load_train_graph(const std::string& path,
                                                   std::uint32_t n_users,
                                                   std::uint32_t n_items) {
  const auto edges = pane::datasets::read_edge_file(path);
  if (n_users == 0) n_users = infer_count(edges, true);
  if (n_items == 0) n_items = infer_count(edges, false);
  return pane::graph::build(edges, n_users, n_items);
}

pane::model::ForwardResult<float> eval_forward(const pane::model::Params<float>& params,
                                               const pane::graph::SignedBipartiteGraph& graph,
                                               const pane::config::RunConfig& cfg) {
  if (params.n_nodes() != static_cast<Eigen::Index>(graph.n_nodes())) {
    fail(ErrorCategory::dimension,
         "checkpoint holds " + std::to_string(params.n_nodes()) + " node rows but the graph has " +
             std::to_string(graph.n_nodes()) + " nodes (" + std::to_string(graph.n_users) +
             " users + " + std::to_string(graph.n_items) + " items)");
  }
  pane::model::ForwardOptions fo;
  fo.layers = cfg.hp.gnn_layers;
  fo.train_mode = false;
  fo.global_attention = cfg.train.global_attention;
  fo.need_interest = cfg.train.variant != pane::Variant::a;
  fo.need_disinterest = true;
  return pane::model::forward<float>(params, graph, nullptr, fo, nullptr);
}

pane::ranking::RecommendOptions recommend_options(const pane::config::RunConfig& cfg,
                                                  int list_size) {
  pane::ranking::RecommendOptions ro;
  ro.list_size = list_size;
  // Only the full variant filters by disinterest score.
  ro.threshold = cfg.train.variant == pane::Variant::full
                     ? static_cast<float>(cfg.hp.filter_threshold)
                     : std::numeric_limits<float>::infinity();
  ro.keep = cfg.filter_keep;
  ro.backfill = cfg.backfill;
  return ro;
}

pane::ranking::MetricsReport run_evaluation(const pane::model::Checkpoint& cp,
                                            const pane::config::RunConfig& cfg,
                                            const std::string& dump_path) {
  const auto graph = load_train_graph(cfg.train_edges, cp.n_users, cp.n_items);
  const auto test_edges = pane::datasets::read_edge_file(cfg.test_edges);
  for (const auto& e : test_edges) {
    if (e.user >= cp.n_users || e.item >= cp.n_items) {
      fail(ErrorCategory::dimension, "test edge (" + std::to_string(e.user) + ", " +
                                         std::to_string(e.item) +
                                         ") outside the checkpoint's " +
                                         std::to_string(cp.n_users) + " users x " +
                                         std::to_string(cp.n_items) + " items");
    }
  }

  const auto emb = eval_forward(cp.params, graph, cfg);
  const auto truth = pane::ranking::ground_truth_from_edges(test_edges, cp.n_users);

  int max_k = 1;
  for (const int k : cfg.eval_k) max_k = std::max(max_k, k);
  const auto ro = recommend_options(cfg, max_k);

  std::vector<pane::ranking::RankedList> lists;
  for (std::uint32_t u = 0; u < graph.n_users; ++u) {
    if (truth[u].empty() && dump_path.empty()) continue;
    lists.push_back(pane::ranking::recommend(
        u, pane::ranking::score_user(emb, graph, u, cfg.train.variant), ro));
  }
  if (!dump_path.empty()) pane::ranking::write_recommendations(dump_path, lists);

  pane::ranking::MetricOptions mo;
  mo.capped_idcg = cfg.capped_idcg;
  return pane::ranking::evaluate(lists, truth, cfg.eval_k, mo);
}

void cmd_ingest(const std::string& input, const std::string& out_dir, const std::string& format,
                std::string delimiter, const std::string& columns, bool skip_header,
                const std::string& rule_name, double threshold, int min_interactions) {
  pane::datasets::FormatSpec spec;
  if (format == "ml1m") {
    spec = pane::datasets::FormatSpec::ml_1m();
  } else if (format == "watch-csv") {
    spec = pane::datasets::FormatSpec::watch_ratio_csv();
  } else {
    fail(ErrorCategory::usage, "unknown format '" + format + "' (expected ml1m|watch-csv)");
  }
  if (!delimiter.empty()) spec.delimiter = delimiter;
  if (skip_header) spec.skip_header = true;
  if (!columns.empty()) {
    spec.columns.clear();
    std::stringstream stream(columns);
    std::string part;
    while (std::getline(stream, part, ',')) {
      if (part == "user") spec.columns.push_back(pane::datasets::ColumnRole::user);
      else if (part == "item") spec.columns.push_back(pane::datasets::ColumnRole::item);
      else if (part == "value") spec.columns.push_back(pane::datasets::ColumnRole::value);
      else if (part == "timestamp")
        spec.columns.push_back(pane::datasets::ColumnRole::timestamp);
      else if (part == "ignore") spec.columns.push_back(pane::datasets::ColumnRole::ignore);
      else fail(ErrorCategory::usage, "unknown column role '" + part + "'");
    }
  }

  pane::datasets::BinarizationRule rule;
  if (rule_name == "stars") {
    rule = pane::datasets::BinarizationRule::stars();
  } else if (rule_name == "watch-ratio") {
    rule = pane::datasets::BinarizationRule::watch_ratio();
  } else {
    fail(ErrorCategory::usage, "unknown rule '" + rule_name + "' (expected stars|watch-ratio)");
  }
  if (threshold == threshold) rule.threshold = threshold;  // NaN = keep the rule default

  auto table = pane::datasets::load_ratings(input, spec);
  if (min_interactions > 0) {
    table =
        pane::datasets::filter_min_interactions(table, static_cast<std::size_t>(min_interactions));
  }
  const auto edges = pane::datasets::binarize(table.records, rule);

  fs::create_directories(out_dir);
  pane::datasets::write_edge_file(out_dir + "/edges.tsv", edges);
  pane::datasets::write_id_map(out_dir + "/users.tsv", table.users);
  pane::datasets::write_id_map(out_dir + "/items.tsv", table.items);

  std::size_t positives = 0;
  for (const auto& e : edges) {
    if (e.sign == pane::datasets::Sign::positive) ++positives;
  }
  std::cout << "ingested " << edges.size() << " edges (" << positives << " positive, "
            << edges.size() - positives << " negative) over " << table.users.size()
            << " users and " << table.items.size() << " items\n";
}

void cmd_split(const std::string& edges_path, const std::string& out_dir, int folds,
               int fold_index, std::uint64_t seed) {
  const auto edges = pane::datasets::read_edge_file(edges_path);
  const auto split = pane::datasets::kfold_split(edges, folds, fold_index, seed);
  fs::create_directories(out_dir);
  pane::datasets::write_edge_file(out_dir + "/train.tsv", split.train);
  pane::datasets::write_edge_file(out_dir + "/test.tsv", split.test);
  std::cout << "split " << edges.size() << " edges into " << split.train.size() << " train / "
            << split.test.size() << " test (fold " << fold_index << " of " << folds << ")\n";
}

void write_train_artifacts(const pane::config::RunConfig& cfg,
                           const pane::trainer::TrainResult& result, std::uint32_t n_users,
                           std::uint32_t n_items) {
  fs::create_directories(cfg.out_dir);
  cfg.save_file(cfg.out_dir + "/config.kv");
  std::ofstream log(cfg.out_dir + "/train.log");
  if (!log) fail(ErrorCategory::io, "cannot write training log");
  log << pane::trainer::format_epoch_log(result.log);
  pane::model::save_checkpoint(cfg.out_dir + "/checkpoint.pane", result.params, n_users, n_items);
}

pane::trainer::TrainResult run_training(pane::config::RunConfig& cfg, std::uint32_t n_users,
                                        std::uint32_t n_items) {
  if (cfg.train_edges.empty()) fail(ErrorCategory::usage, "train requires --train-edges");
  if (cfg.out_dir.empty()) fail(ErrorCategory::usage, "train requires --out-dir");
  const auto graph = load_train_graph(cfg.train_edges, n_users, n_items);

  fs::create_directories(cfg.out_dir);
  pane::trainer::CheckpointSink sink;
  if (cfg.train.checkpoint_every > 0) {
    sink = [&](int epoch, const pane::model::Params<float>& params) {
      pane::model::save_checkpoint(
          cfg.out_dir + "/checkpoint_epoch_" + std::to_string(epoch) + ".pane", params,
          graph.n_users, graph.n_items);
    };
  }
  auto result = pane::trainer::train(graph, cfg.hp, cfg.train, sink);
  write_train_artifacts(cfg, result, graph.n_users, graph.n_items);
  return result;
}

void cmd_train(const ConfigFlags& flags, std::uint32_t n_users, std::uint32_t n_items) {
  auto cfg = flags.resolve();
  const auto result = run_training(cfg, n_users, n_items);
  std::cout << "trained " << result.epochs_run << " epochs; final loss "
            << (result.log.empty() ? 0.0 : result.log.back().total) << "; artifacts in "
            << cfg.out_dir << '\n';
}

void cmd_evaluate(const ConfigFlags& flags, const std::string& checkpoint,
                  const std::string& out_path, const std::string& dump_path) {
  auto cfg = flags.resolve();
  if (cfg.train_edges.empty() || cfg.test_edges.empty()) {
    fail(ErrorCategory::usage, "evaluate requires --train-edges and --test-edges");
  }
  const auto cp = pane::model::load_checkpoint(checkpoint);
  const auto report = run_evaluation(cp, cfg, dump_path);
  const std::string text = pane::ranking::format_metrics_report(report);
  std::cout << text;
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) fail(ErrorCategory::io, "cannot write metrics report '" + out_path + "'");
    out << text;
  }
}

void cmd_recommend(const ConfigFlags& flags, const std::string& checkpoint,
                   const std::string& users_arg, const std::string& users_map_path,
                   int list_size, const std::string& out_path) {
  auto cfg = flags.resolve();
  if (cfg.train_edges.empty()) fail(ErrorCategory::usage, "recommend requires --train-edges");
  const auto cp = pane::model::load_checkpoint(checkpoint);
  const auto graph = load_train_graph(cfg.train_edges, cp.n_users, cp.n_items);
  const auto emb = eval_forward(cp.params, graph, cfg);

  pane::datasets::IdMap users_map;
  if (!users_map_path.empty()) users_map = pane::datasets::read_id_map(users_map_path);

  std::vector<std::uint32_t> users;
  std::stringstream stream(users_arg);
  std::string part;
  while (std::getline(stream, part, ',')) {
    if (part.empty()) continue;
    if (!users_map.raw_ids.empty()) {
      const auto it = users_map.to_dense.find(part);
      if (it == users_map.to_dense.end()) {
        fail(ErrorCategory::usage, "unknown user id '" + part + "'");
      }
      users.push_back(it->second);
    } else {
      std::uint32_t dense = 0;
      const char* begin = part.data();
      const auto r = std::from_chars(begin, begin + part.size(), dense);
      if (r.ec != std::errc{} || r.ptr != begin + part.size() || dense >= graph.n_users) {
        fail(ErrorCategory::usage, "unknown user id '" + part + "'");
      }
      users.push_back(dense);
    }
  }
  if (users.empty()) fail(ErrorCategory::usage, "recommend requires --users");

  const auto ro = recommend_options(cfg, list_size);
  std::vector<pane::ranking::RankedList> lists;
  for (const std::uint32_t u : users) {
    lists.push_back(pane::ranking::recommend(
        u, pane::ranking::score_user(emb, graph, u, cfg.train.variant), ro));
  }
  pane::ranking::write_recommendations(out_path, lists);
  std::cout << "wrote " << lists.size() << " recommendation lists to " << out_path << '\n';
}

// Grid keys may be config keys or the conventional short names.
std::string grid_key_to_config_key(const std::string& key) {
  if (key == "K") return "gnn_layers";
  if (key == "b") return "feedback_coeff";
  if (key == "p") return "edge_drop_prob";
  if (key == "delta") return "filter_threshold";
  if (key == "lambda1") return "contrastive_weight";
  if (key == "lambda2") return "reg_weight";
  if (key == "tau") return "temperature";
  if (key == "H") return "embedding_dim";
  return key;
}

void cmd_sweep(const ConfigFlags& flags, const std::vector<std::string>& grid_specs,
               const std::string& out_dir) {
  std::vector<std::pair<std::string, std::vector<std::string>>> grid;
  for (const std::string& spec : grid_specs) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCategory::usage, "grid spec must look like key=v1,v2,... got '" + spec + "'");
    }
    std::vector<std::string> values;
    std::stringstream stream(spec.substr(eq + 1));
    std::string part;
    while (std::getline(stream, part, ',')) {
      if (!part.empty()) values.push_back(part);
    }
    if (values.empty()) fail(ErrorCategory::usage, "grid spec '" + spec + "' has no values");
    grid.emplace_back(grid_key_to_config_key(spec.substr(0, eq)), values);
  }

  fs::create_directories(out_dir);
  std::ofstream table(out_dir + "/sweep.tsv");
  if (!table) fail(ErrorCategory::io, "cannot write sweep table");

  const auto base_cfg = flags.resolve();
  table << "point";
  for (const auto& [key, values] : grid) table << '\t' << key;
  table << "\tstatus";
  for (const int k : base_cfg.eval_k) {
    table << "\tprecision@" << k << "\trecall@" << k << "\tndcg@" << k;
  }
  table << '\n';

  std::size_t points = 1;
  for (const auto& [key, values] : grid) points *= values.size();
  if (grid.empty()) points = 0;

  for (std::size_t point = 0; point < points; ++point) {
    std::vector<std::pair<std::string, std::string>> assignment;
    std::size_t rest = point;
    for (const auto& [key, values] : grid) {
      assignment.emplace_back(key, values[rest % values.size()]);
      rest /= values.size();
    }

    table << point;
    for (const auto& [key, value] : assignment) table << '\t' << value;

    try {
      auto cfg = flags.resolve();
      for (const auto& [key, value] : assignment) cfg.apply(key, value);
      char name[32];
      std::snprintf(name, sizeof(name), "point_%03zu", point);
      cfg.out_dir = out_dir + "/" + name;
      run_training(cfg, 0, 0);
      const auto cp = pane::model::load_checkpoint(cfg.out_dir + "/checkpoint.pane");
      const auto report = run_evaluation(cp, cfg, "");
      pane::ranking::write_metrics_report(cfg.out_dir + "/metrics.tsv", report);
      table << "\tok";
      table.precision(6);
      table << std::fixed;
      for (const auto& m : report.at_k) {
        table << '\t' << m.precision << '\t' << m.recall << '\t' << m.ndcg;
      }
    } catch (const pane::Error& e) {
      table << "\terror:" << pane::to_string(e.category());
      std::cerr << "sweep point " << point << " failed: " << e.what() << '\n';
    }
    table << '\n';
  }
  std::cout << "sweep wrote " << points << " rows to " << out_dir << "/sweep.tsv\n";
}

int cmd_gradcheck(const pane::gradcheck::Options& options) {
  const auto report = pane::gradcheck::run(options);
  std::cout << "gradcheck: " << report.configs_run << " configurations, max relative error "
            << report.max_rel_error << " (tolerance " << options.tolerance << ", "
            << report.seconds << " s)\n";
  return report.passed(options) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PANE-GNN: signed bipartite graph recommendation"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "binarize a raw rating file into signed edges");
  std::string in_path, in_out_dir, in_format = "ml1m", in_delim, in_columns, in_rule = "stars";
  bool in_skip_header = false;
  double in_threshold = std::numeric_limits<double>::quiet_NaN();
  int in_min_interactions = 0;
  ingest->add_option("input", in_path, "raw rating file")->required();
  ingest->add_option("--out-dir", in_out_dir, "output directory")->required();
  ingest->add_option("--format", in_format, "ml1m|watch-csv");
  ingest->add_option("--delimiter", in_delim, "field delimiter override");
  ingest->add_option("--columns", in_columns, "comma list of user,item,value,timestamp,ignore");
  ingest->add_flag("--skip-header", in_skip_header, "skip the first line");
  ingest->add_option("--rule", in_rule, "stars|watch-ratio");
  ingest->add_option("--threshold", in_threshold, "binarization threshold override");
  ingest->add_option("--min-interactions", in_min_interactions,
                     "drop users/items with fewer interactions (pre-binarization)");

  // split
  auto* split = app.add_subcommand("split", "deterministic k-fold train/test split");
  std::string sp_edges, sp_out_dir;
  int sp_folds = 5, sp_fold_index = 0;
  std::uint64_t sp_seed = 42;
  split->add_option("edges", sp_edges, "canonical edge file")->required();
  split->add_option("--out-dir", sp_out_dir, "output directory")->required();
  split->add_option("--folds", sp_folds, "number of folds");
  split->add_option("--fold-index", sp_fold_index, "which fold becomes the test set");
  split->add_option("--seed", sp_seed, "shuffle seed");

  // train
  auto* train = app.add_subcommand("train", "train the model and persist artifacts");
  ConfigFlags train_flags;
  std::uint32_t tr_users = 0, tr_items = 0;
  add_config_flags(train, train_flags);
  train->add_option_function<std::string>(
      "--train-edges",
      [&train_flags](const std::string& v) { train_flags.assignments["train_edges"] = v; },
      "training edge file")
      ->take_last();
  train->add_option_function<std::string>(
      "--out-dir",
      [&train_flags](const std::string& v) { train_flags.assignments["out_dir"] = v; },
      "output directory")
      ->take_last();
  train->add_option("--n-users", tr_users, "user count (0 = infer from edges)");
  train->add_option("--n-items", tr_items, "item count (0 = infer from edges)");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "filtered top-K metrics for a checkpoint");
  ConfigFlags eval_flags;
  std::string ev_checkpoint, ev_out, ev_dump;
  add_config_flags(evaluate, eval_flags);
  evaluate->add_option("--checkpoint", ev_checkpoint, "checkpoint file")->required();
  evaluate->add_option_function<std::string>(
      "--train-edges",
      [&eval_flags](const std::string& v) { eval_flags.assignments["train_edges"] = v; },
      "training edge file (graph + candidate exclusions)")
      ->take_last();
  evaluate->add_option_function<std::string>(
      "--test-edges",
      [&eval_flags](const std::string& v) { eval_flags.assignments["test_edges"] = v; },
      "test edge file (ground truth)")
      ->take_last();
  evaluate->add_option("--out", ev_out, "write the metrics report here too");
  evaluate->add_option("--dump-recommendations", ev_dump, "write per-user ranked lists");

  // recommend
  auto* recommend = app.add_subcommand("recommend", "write ranked lists for specific users");
  ConfigFlags rec_flags;
  std::string rc_checkpoint, rc_users, rc_users_map, rc_out = "recommendations.tsv";
  int rc_k = 10;
  add_config_flags(recommend, rec_flags);
  recommend->add_option("--checkpoint", rc_checkpoint, "checkpoint file")->required();
  recommend->add_option_function<std::string>(
      "--train-edges",
      [&rec_flags](const std::string& v) { rec_flags.assignments["train_edges"] = v; },
      "training edge file")
      ->take_last();
  recommend->add_option("--users", rc_users, "comma list of user ids")->required();
  recommend->add_option("--users-map", rc_users_map, "raw-to-dense user id map");
  recommend->add_option("--list-size", rc_k, "entries per user");
  recommend->add_option("--out", rc_out, "output file");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "train+evaluate over a hyperparameter grid");
  ConfigFlags sweep_flags;
  std::vector<std::string> sw_grid;
  std::string sw_out_dir;
  add_config_flags(sweep, sweep_flags);
  sweep->add_option_function<std::string>(
      "--train-edges",
      [&sweep_flags](const std::string& v) { sweep_flags.assignments["train_edges"] = v; },
      "training edge file")
      ->take_last();
  sweep->add_option_function<std::string>(
      "--test-edges",
      [&sweep_flags](const std::string& v) { sweep_flags.assignments["test_edges"] = v; },
      "test edge file")
      ->take_last();
  sweep->add_option("--grid", sw_grid,
                    "key=v1,v2,... (repeatable; K,b,p,delta,lambda1,lambda2,tau,H)");
  sweep->add_option("--out-dir", sw_out_dir, "sweep output directory")->required();

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient verification");
  pane::gradcheck::Options gc_options;
  gradcheck->add_option("--configs", gc_options.configs, "random configurations to probe");
  gradcheck->add_option("--seed", gc_options.seed, "base seed");
  gradcheck->add_option("--step", gc_options.step, "central-difference half-step");
  gradcheck->add_option("--tolerance", gc_options.tolerance, "pass/fail bound");
  gradcheck->add_flag("-v,--verbose", gc_options.verbose, "per-configuration errors");

  try {
    app.parse(argc, argv);
    if (ingest->parsed()) {
      cmd_ingest(in_path, in_out_dir, in_format, in_delim, in_columns, in_skip_header, in_rule,
                 in_threshold, in_min_interactions);
    } else if (split->parsed()) {
      cmd_split(sp_edges, sp_out_dir, sp_folds, sp_fold_index, sp_seed);
    } else if (train->parsed()) {
      cmd_train(train_flags, tr_users, tr_items);
    } else if (evaluate->parsed()) {
      cmd_evaluate(eval_flags, ev_checkpoint, ev_out, ev_dump);
    } else if (recommend->parsed()) {
      cmd_recommend(rec_flags, rc_checkpoint, rc_users, rc_users_map, rc_k, rc_out);
    } else if (sweep->parsed()) {
      cmd_sweep(sweep_flags, sw_grid, sw_out_dir);
    } else if (gradcheck->parsed()) {
      return cmd_gradcheck(gc_options);
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error:usage: " << e.what() << '\n';
    return 1;
  } catch (const pane::Error& e) {
    std::cerr << "error:" << pane::to_string(e.category()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error:internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
