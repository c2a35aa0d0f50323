// candlecast: hourly OHLC forecasting and strategy backtesting.
//
// Subcommands cover the whole workflow: ingest candles (HTTP or CSV),
// preprocess them into a normalized feature matrix, train the recurrent
// network, walk-forward cross-validate, sweep hyperparameters, predict the
// next bar, backtest strategies, and merge reports.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccast/artifacts.hpp"
#include "ccast/backtest.hpp"
#include "ccast/checkpoint.hpp"
#include "ccast/config.hpp"
#include "ccast/csv.hpp"
#include "ccast/error.hpp"
#include "ccast/fetch.hpp"
#include "ccast/pipeline.hpp"
#include "ccast/timeutil.hpp"
#include "ccast/training.hpp"
#include "ccast/validation.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ccast;

struct GlobalArgs {
  std::string config_path;
  std::string out_dir;
  uint64_t seed = 0;
  bool seed_given = false;
};

EngineConfig effective_config(const GlobalArgs& g) {
  EngineConfig cfg;
  std::string path = g.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("ENGINE_CONFIG")) path = env;
  }
  if (!path.empty()) cfg = load_config_file(path);
  if (g.seed_given) {
    cfg.seed = g.seed;
    propagate_seed(cfg);
  }
  return cfg;
}

// Relative outputs land in --out-dir when one is given.
std::string resolve_out(const GlobalArgs& g, const std::string& path) {
  if (path.empty() || g.out_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(g.out_dir) / path).string();
}

void ensure_parent_dir(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void write_artifact(const GlobalArgs& g, const std::string& path, const std::string& content,
                    const Provenance& prov) {
  const std::string full = resolve_out(g, path);
  ensure_parent_dir(full);
  write_text_file(full, content);
  write_meta(full, prov);
}

CandleSeries load_series(const std::string& path, int64_t interval) {
  return load_candles_csv(path, interval);
}

ModelBundle load_bundle(const std::string& path) { return load_checkpoint(path); }

int run(int argc, char** argv) {
  CLI::App app{"hourly OHLC forecasting and strategy backtesting"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs g;
  app.add_option("--config", g.config_path, "JSON config file (or ENGINE_CONFIG env var)");
  app.add_option("--out-dir", g.out_dir, "directory for relative output paths");
  auto* seed_opt = app.add_option("--seed", g.seed, "override the config seed");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "fetch or clean candle history");
  std::string ingest_csv, ingest_pair, ingest_from, ingest_to, ingest_endpoint, ingest_out;
  ingest->add_option("--csv", ingest_csv, "read candles from a CSV file");
  ingest->add_option("--pair", ingest_pair, "fetch this pair from the HTTP endpoint");
  ingest->add_option("--from", ingest_from, "fetch range start, ISO-8601");
  ingest->add_option("--to", ingest_to, "fetch range end, ISO-8601");
  ingest->add_option("--endpoint", ingest_endpoint, "override the configured endpoint URL");
  ingest->add_option("--out", ingest_out, "output candle CSV")->required();

  // preprocess
  auto* preprocess = app.add_subcommand("preprocess", "candles -> normalized feature matrix");
  std::string pre_in, pre_out, pre_stats;
  preprocess->add_option("--in", pre_in, "input candle CSV")->required();
  preprocess->add_option("--out", pre_out, "output matrix file")->required();
  preprocess->add_option("--stats", pre_stats, "output stats JSON")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "fit the network on a feature matrix");
  std::string train_matrix, train_stats, train_out;
  bool train_with_optimizer = false;
  train_cmd->add_option("--matrix", train_matrix, "feature matrix file")->required();
  train_cmd->add_option("--stats", train_stats, "stats JSON from preprocess")->required();
  train_cmd->add_option("--out", train_out, "output model checkpoint")->required();
  train_cmd->add_flag("--with-optimizer", train_with_optimizer,
                      "persist optimizer state in the checkpoint");

  // cross-validate
  auto* cv_cmd = app.add_subcommand("cross-validate", "walk-forward evaluation");
  std::string cv_matrix, cv_stats, cv_report, cv_summary;
  int cv_k = 0;
  cv_cmd->add_option("--matrix", cv_matrix, "feature matrix file")->required();
  cv_cmd->add_option("--stats", cv_stats, "stats JSON from preprocess")->required();
  cv_cmd->add_option("--k", cv_k, "predictions per cycle (overrides config)");
  cv_cmd->add_option("--report", cv_report, "output per-cycle CSV")->required();
  cv_cmd->add_option("--summary", cv_summary,
                     "output summary JSON (default: <report>.summary.json)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "grid-search one hyperparameter");
  std::string sweep_matrix, sweep_stats, sweep_param, sweep_report;
  std::vector<double> sweep_grid;
  sweep_cmd->add_option("--matrix", sweep_matrix, "feature matrix file")->required();
  sweep_cmd->add_option("--stats", sweep_stats, "stats JSON from preprocess")->required();
  sweep_cmd
      ->add_option("--param", sweep_param,
                   "one of init_range, learning_rate, rho, hidden_dim")
      ->required();
  sweep_cmd->add_option("--grid", sweep_grid, "comma-separated grid values")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--report", sweep_report, "output CSV")->required();

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "one-step forecast from a checkpoint");
  std::string predict_model, predict_candles, predict_out;
  predict_cmd->add_option("--model", predict_model, "model checkpoint")->required();
  predict_cmd->add_option("--candles", predict_candles, "recent candle CSV")->required();
  predict_cmd->add_option("--out", predict_out, "also write the prediction JSON here");

  // backtest
  auto* backtest_cmd = app.add_subcommand("backtest", "replay a strategy over history");
  std::string bt_candles, bt_model, bt_strategy, bt_rules, bt_out, bt_trades, bt_summary,
      bt_alpha;
  backtest_cmd->add_option("--candles", bt_candles, "candle CSV")->required();
  backtest_cmd->add_option("--model", bt_model, "model checkpoint")->required();
  backtest_cmd->add_option("--strategy", bt_strategy,
                           "roc, rsi, dema, macd, random, or buyhold");
  backtest_cmd->add_option("--rules", bt_rules, "execution rules JSON file");
  backtest_cmd->add_option("--out", bt_out, "output equity CSV")->required();
  backtest_cmd->add_option("--trades", bt_trades, "output trades CSV");
  backtest_cmd->add_option("--summary", bt_summary, "output summary JSON");
  backtest_cmd->add_option("--alpha", bt_alpha, "output buy-and-hold benchmark equity CSV");

  // report
  auto* report_cmd = app.add_subcommand("report", "merge artifacts into tables");
  std::string rep_equity, rep_alpha, rep_summary, rep_out;
  std::vector<std::string> rep_cv;
  report_cmd->add_option("--equity", rep_equity, "equity CSV (with --alpha)");
  report_cmd->add_option("--alpha", rep_alpha, "benchmark equity CSV (with --equity)");
  report_cmd->add_option("--cv", rep_cv, "cv summary JSONs for an RMSE-vs-k table")
      ->delimiter(',');
  report_cmd->add_option("--summary", rep_summary, "backtest summary JSON for a Sharpe table");
  report_cmd->add_option("--out", rep_out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  g.seed_given = seed_opt->count() > 0;
  EngineConfig cfg = effective_config(g);
  const Provenance prov{config_hash(cfg), cfg.seed};

  if (*ingest) {
    const bool from_csv = !ingest_csv.empty();
    const bool from_http = !ingest_pair.empty();
    if (from_csv == from_http)
      throw Error("ingest needs exactly one of --csv or --pair");
    CandleSeries series;
    if (from_csv) {
      series = load_series(ingest_csv, cfg.data.interval);
    } else {
      if (ingest_from.empty() || ingest_to.empty())
        throw Error("ingest --pair needs --from and --to");
      EndpointConfig ep;
      ep.base_url = !ingest_endpoint.empty() ? ingest_endpoint : cfg.data.endpoint;
      if (ep.base_url.empty())
        throw Error("no endpoint configured: set data.endpoint or pass --endpoint");
      series = fetch_history(ep, ingest_pair, cfg.data.interval,
                             parse_iso8601_utc(ingest_from), parse_iso8601_utc(ingest_to));
    }
    const SeriesValidationReport report = validate_series(series);
    if (!report.clean())
      std::cerr << "repaired series: " << report.duplicates.size() << " duplicates, "
                << report.gaps.size() << " gaps, " << report.non_monotonic.size()
                << " out-of-order, " << report.off_grid.size() << " off-grid\n";
    CandleSeries cleaned = truncate_before(report.repaired, cfg.data.cutoff);
    if (cleaned.empty()) throw Error("no candles remain after the cutoff");
    write_artifact(g, ingest_out, write_candles_csv(cleaned), prov);
    std::cerr << "wrote " << cleaned.size() << " candles\n";
    return 0;
  }

  if (*preprocess) {
    const CandleSeries series = load_series(pre_in, cfg.data.interval);
    const PipelineArtifacts art = run_pipeline(series, cfg.indicators, cfg.cv.split_ratio);
    const std::string matrix_path = resolve_out(g, pre_out);
    ensure_parent_dir(matrix_path);
    save_matrix(art.normalized, matrix_path, prov);
    write_meta(matrix_path, prov);
    write_artifact(g, pre_stats, stats_to_json(art, cfg.indicators, config_to_json(cfg), prov),
                   prov);
    std::cerr << "matrix: " << art.normalized.rows() << " x " << art.normalized.cols()
              << " columns\n";
    return 0;
  }

  if (*train_cmd) {
    const FeatureMatrix matrix = load_matrix(train_matrix);
    const StatsArtifact stats = stats_from_json(read_text_file(train_stats));
    Hyperparameters hyper = cfg.network;
    hyper.input_dim = static_cast<int>(matrix.rows());
    const TrainedModel model = train(matrix, hyper);

    ModelBundle bundle;
    bundle.hyper = hyper;
    bundle.indicators = stats.indicators;
    bundle.params = model.params;
    bundle.stats = stats.stats;
    bundle.last_candle = stats.last_candle;
    bundle.interval = stats.interval;
    if (train_with_optimizer) bundle.optimizer = model.adam;
    bundle.provenance = prov;

    write_artifact(g, train_out, checkpoint_to_json(bundle), prov);
    std::cerr << "trained " << model.log.epochs_run << " epochs"
              << (model.log.stopped_early ? " (early stop)" : "") << ", final loss "
              << (model.log.epoch_loss.empty() ? 0.0 : model.log.epoch_loss.back()) << "\n";
    return 0;
  }

  if (*cv_cmd) {
    const FeatureMatrix matrix = load_matrix(cv_matrix);
    const StatsArtifact stats = stats_from_json(read_text_file(cv_stats));
    Hyperparameters hyper = cfg.network;
    hyper.input_dim = static_cast<int>(matrix.rows());
    CvConfig cv = cfg.cv;
    if (cv_k > 0) cv.k = cv_k;
    const CvReport report = tskcv(matrix, stats.stats, hyper, cv);
    write_artifact(g, cv_report, cv_cycles_to_csv(report), prov);
    const std::string summary_path =
        cv_summary.empty() ? cv_report + ".summary.json" : cv_summary;
    write_artifact(g, summary_path, cv_summary_to_json(report, prov), prov);
    std::cerr << report.cycles.size() << " cycles, close RMSE " << report.channel_rmse[3]
              << "\n";
    return 0;
  }

  if (*sweep_cmd) {
    const FeatureMatrix matrix = load_matrix(sweep_matrix);
    const StatsArtifact stats = stats_from_json(read_text_file(sweep_stats));
    Hyperparameters hyper = cfg.network;
    hyper.input_dim = static_cast<int>(matrix.rows());
    const SweepReport report = sweep(matrix, stats.stats, hyper, cfg.cv, sweep_param,
                                     sweep_grid);
    write_artifact(g, sweep_report, sweep_to_csv(report), prov);
    return 0;
  }

  if (*predict_cmd) {
    const ModelBundle bundle = load_bundle(predict_model);
    const CandleSeries series = load_series(predict_candles, bundle.interval);
    const FeatureMatrix features = build_features(series, bundle.indicators);
    const FeatureMatrix diff = difference(features);
    const FeatureMatrix norm = apply_normalization(diff, bundle.stats);
    const auto y = predict_next(bundle.params, bundle.hyper, norm);
    const Candle predicted =
        reconstruct_prediction(y, bundle.stats, series.candles.back(), series.interval);
    const std::string out = prediction_to_json(predicted, bundle.provenance);
    std::cout << out;
    if (!predict_out.empty()) write_artifact(g, predict_out, out, bundle.provenance);
    return 0;
  }

  if (*backtest_cmd) {
    const ModelBundle bundle = load_bundle(bt_model);
    const CandleSeries series = load_series(bt_candles, bundle.interval);
    const StrategyKind kind =
        bt_strategy.empty() ? cfg.strategy : strategy_from_name(bt_strategy);
    ExecutionRules rules = cfg.rules;
    if (!bt_rules.empty()) rules = parse_rules_json(read_text_file(bt_rules));

    BacktestOptions opts;
    opts.initial_quote = cfg.backtest.initial_quote;
    const BacktestResult result = run_backtest(series, bundle, kind, cfg.strategy_cfg, rules,
                                               opts);
    const auto windows = sharpe_by_window(result.curve, cfg.backtest.rf_annual,
                                          cfg.backtest.sharpe_window_days);

    write_artifact(g, bt_out, equity_to_csv(result.curve), prov);
    if (!bt_trades.empty()) write_artifact(g, bt_trades, trades_to_csv(result.trades), prov);
    if (!bt_summary.empty())
      write_artifact(g, bt_summary,
                     backtest_summary_to_json(result, windows, to_string(kind), prov), prov);
    if (!bt_alpha.empty()) {
      CandleSeries tail;
      tail.interval = series.interval;
      tail.candles.assign(series.candles.begin() + result.first_decision_index,
                          series.candles.end());
      const BacktestResult alpha = alpha_baseline(tail, cfg.backtest.initial_quote, rules);
      write_artifact(g, bt_alpha, equity_to_csv(alpha.curve), prov);
    }
    std::cerr << to_string(kind) << ": final value " << result.final_value << ", "
              << result.trades.size() << " trades\n";
    return 0;
  }

  if (*report_cmd) {
    const bool growth = !rep_equity.empty() || !rep_alpha.empty();
    const bool rmse_table = !rep_cv.empty();
    const bool sharpe_table = !rep_summary.empty();
    if (growth + rmse_table + sharpe_table != 1)
      throw Error("report needs exactly one of --equity/--alpha, --cv, or --summary");

    std::string content;
    if (growth) {
      if (rep_equity.empty() || rep_alpha.empty())
        throw Error("report growth table needs both --equity and --alpha");
      content = growth_to_csv(equity_from_csv(read_text_file(rep_equity)),
                              equity_from_csv(read_text_file(rep_alpha)));
    } else if (rmse_table) {
      std::vector<CvSummary> summaries;
      for (const std::string& path : rep_cv)
        summaries.push_back(cv_summary_from_json(read_text_file(path)));
      content = rmse_vs_k_to_csv(std::move(summaries));
    } else {
      content = sharpe_to_csv(sharpe_windows_from_summary_json(read_text_file(rep_summary)));
    }
    write_artifact(g, rep_out, content, prov);
    return 0;
  }

  throw Error("no subcommand selected");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ccast::Error& e) {
    std::string msg = e.what();
    for (char& ch : msg)
      if (ch == '\n') ch = ' ';
    std::cerr << "error: " << msg << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
