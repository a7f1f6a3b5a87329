#include "ddgf/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ddgf/checkpoint.hpp"
#include "ddgf/comparison.hpp"
#include "ddgf/config.hpp"
#include "ddgf/container.hpp"
#include "ddgf/error.hpp"
#include "ddgf/log.hpp"

namespace ddgf {

namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
}

std::string slug(const std::string& name) {
  std::string s;
  for (char c : name) {
    s.push_back(std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(c)) : '-');
  }
  return s;
}

std::vector<TripRecord> load_trips(const std::vector<std::string>& paths, const std::string& rejections_csv = {}) {
  std::vector<TripRecord> trips;
  std::ostringstream rej;
  rej << "file,line,reason,detail\n";
  std::size_t rejected = 0;
  for (const auto& p : paths) {
    ParseResult r = parse_trips_file(p);
    for (const auto& x : r.rejections) {
      std::string detail = x.detail;
      std::replace(detail.begin(), detail.end(), ',', ';');
      rej << p << ',' << x.line << ',' << x.reason << ',' << detail << '\n';
    }
    rejected += r.rejections.size();
    log_info(p + ": " + std::to_string(r.trips.size()) + " trips, " + std::to_string(r.rejections.size()) +
             " rejected");
    trips.insert(trips.end(), std::make_move_iterator(r.trips.begin()), std::make_move_iterator(r.trips.end()));
  }
  if (rejected > 0) log_warn(std::to_string(rejected) + " malformed rows rejected");
  if (!rejections_csv.empty()) write_text(rejections_csv, rej.str());
  return trips;
}

std::optional<std::set<std::string>> parse_station_filter(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto ids = split_list(text);
  return std::set<std::string>(ids.begin(), ids.end());
}

DemandMatrix restrict_to_filter(const DemandMatrix& d, const std::optional<std::set<std::string>>& filter) {
  if (!filter) return d;
  std::vector<std::string> keep;
  for (const auto& s : d.stations()) {
    if (filter->contains(s)) keep.push_back(s);
  }
  if (keep.empty()) throw DataError("station filter matches no station in the demand matrix");
  return d.restrict_to(keep);
}

// Model stations in model order; every one must exist in the matrix.
DemandMatrix align_to_model(const DemandMatrix& d, const TrainedModel& model) {
  std::vector<std::string> dropped;
  DemandMatrix aligned = d.restrict_to(model.stations, &dropped);
  if (!dropped.empty()) {
    std::string msg = "demand matrix lacks stations the model was trained on:";
    for (const auto& s : dropped) msg += " " + s;
    throw DataError(msg);
  }
  return aligned;
}

struct Options {
  // ingest
  std::vector<std::string> inputs;
  std::string out;
  std::string stations;
  std::string rejections;
  // build-graph
  std::string kind = "DC";
  std::vector<std::string> trips;
  std::string demand;
  double threshold_km = 1.0;
  std::size_t window = 24;
  double train_ratio = 0.6, val_ratio = 0.2, test_ratio = 0.2;
  // train / evaluate / predict / export-filter / report
  std::string config;
  std::string models;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::string model_path;
  std::string split = "test";
  std::size_t layer = 1;
  std::vector<std::string> runs;
};

int cmd_ingest(const Options& o) {
  const auto trips = load_trips(o.inputs, o.rejections);
  const DemandMatrix d = build_demand_matrix(trips, parse_station_filter(o.stations));
  save_demand(o.out, d);
  std::cout << "wrote " << o.out << ": " << d.stations_count() << " stations x " << d.hours()
            << " hours, " << d.total() << " trips\n";
  return 0;
}

int cmd_build_graph(const Options& o) {
  const GraphKind kind = graph_kind_from_string(o.kind);
  const SplitRatios ratios{o.train_ratio, o.val_ratio, o.test_ratio};
  TrainConfig check;
  check.ratios = ratios;
  check.validate();
  const DemandMatrix demand = load_demand(o.demand);
  const PreparedData data = prepare_data(demand, o.window, ratios);
  std::vector<TripRecord> trips;
  if (kind == GraphKind::SparseDistance || kind == GraphKind::Demand || kind == GraphKind::AverageTripDuration) {
    if (o.trips.empty()) throw ConfigError(o.kind + " graph needs --trips");
    trips = load_trips(o.trips);
  }
  const GraphFilter f = build_training_filter(kind, trips, data, GraphParams{o.threshold_km});
  save_filter(o.out, f);
  std::cout << "wrote " << o.out << ": " << o.kind << " filter over " << f.n() << " stations\n";
  return 0;
}

int cmd_train(const Options& o) {
  IniFile ini = IniFile::load(o.config);
  if (!o.out.empty()) ini.set("output", "dir", o.out);
  if (o.seed) ini.set("train", "seed", std::to_string(*o.seed));
  if (o.epochs) ini.set("train", "epochs", std::to_string(*o.epochs));
  if (!o.models.empty()) ini.set("models", "run", o.models);
  ExperimentConfig cfg = ExperimentConfig::from_ini(ini);
  // Data paths in the config are relative to the config file.
  const fs::path base = fs::path(o.config).parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && fs::path(p).is_relative()) p = (base / p).string();
  };
  for (auto& p : cfg.trip_paths) resolve(p);
  if (cfg.demand_path) resolve(*cfg.demand_path);
  for (auto& [k, p] : cfg.filter_paths) resolve(p);
  cfg.validate_paths();

  std::vector<TripRecord> trips;
  if (!cfg.trip_paths.empty()) trips = load_trips(cfg.trip_paths);
  const DemandMatrix demand = cfg.demand_path ? restrict_to_filter(load_demand(*cfg.demand_path), cfg.station_filter)
                                              : build_demand_matrix(trips, cfg.station_filter);
  const PreparedData data = prepare_data(demand, cfg.window, cfg.train.ratios);
  log_info("prepared " + std::to_string(data.demand.stations_count()) + " stations, " +
           std::to_string(data.raw.train.size()) + "/" + std::to_string(data.raw.val.size()) + "/" +
           std::to_string(data.raw.test.size()) + " windows");

  const fs::path out_dir = cfg.output_dir;
  fs::create_directories(out_dir);
  std::vector<ComparisonRow> rows;
  for (const auto& spec : cfg.models) {
    std::optional<GraphFilter> filter;
    if (spec.architecture == Architecture::GcnnFixed && spec.graph != GraphKind::Identity) {
      if (const auto it = cfg.filter_paths.find(spec.graph); it != cfg.filter_paths.end()) {
        filter = load_filter(it->second);
        if (filter->stations != data.demand.stations()) {
          throw DataError("filter '" + it->second + "' was built for a different station set");
        }
      } else {
        if (spec.graph != GraphKind::DemandCorrelation && trips.empty()) {
          throw ConfigError(spec.display_name() + " needs [data] trips or [graph] filter." +
                            std::string(to_string(spec.graph)));
        }
        filter = build_training_filter(spec.graph, trips, data, cfg.graph);
      }
    }
    log_info("training " + spec.display_name());
    ModelRun run = run_model(spec, data, cfg.train, filter);
    run.model.provenance["config_hash"] = cfg.config_hash;
    run.model.provenance["tool_version"] = kToolVersion;
    const std::string name = slug(spec.display_name());
    save_model((out_dir / (name + ".mdl")).string(), run.model);
    if (!run.history.empty()) write_text(out_dir / (name + ".history.csv"), history_csv(run.history));
    nlohmann::json metrics = run.test.metrics.to_json();
    metrics["model"] = spec.display_name();
    metrics["config_hash"] = cfg.config_hash;
    write_text(out_dir / (name + ".metrics.json"), metrics.dump(2) + "\n");
    rows.push_back({spec.display_name(), run.test.metrics});
  }
  const ComparisonTable table(std::move(rows));
  write_text(out_dir / "report.csv", table.to_csv());
  write_text(out_dir / "report.txt", table.to_text());
  nlohmann::json manifest = base_manifest("run");
  manifest["config_hash"] = cfg.config_hash;
  manifest["config"] = ini.canonical();
  manifest["rng"] = Rng::kAlgorithm;
  manifest["seed"] = cfg.train.seed;
  write_text(out_dir / "run.json", manifest.dump(2) + "\n");
  std::cout << table.to_text();
  return 0;
}

int cmd_evaluate(const Options& o) {
  const TrainedModel model = load_model(o.model_path);
  const DemandMatrix demand = align_to_model(load_demand(o.demand), model);
  const auto windows = make_windows(demand, model.spec.window);
  std::vector<WindowedSample> eval;
  if (o.split == "all") {
    eval = windows;
  } else {
    auto parts = chronological_split(windows, {o.train_ratio, o.val_ratio, o.test_ratio});
    if (o.split == "test") eval = std::move(parts.test);
    else if (o.split == "val") eval = std::move(parts.val);
    else if (o.split == "train") eval = std::move(parts.train);
    else throw ConfigError("--split must be train, val, test or all");
  }
  const Evaluation e = evaluate(model, eval);
  nlohmann::json j = e.metrics.to_json();
  j["model"] = model.spec.display_name();
  j["split"] = o.split;
  if (!o.out.empty()) write_text(o.out, j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_predict(const Options& o) {
  const TrainedModel model = load_model(o.model_path);
  const DemandMatrix demand = align_to_model(load_demand(o.demand), model);
  const std::size_t c0 = model.spec.window;
  if (demand.hours() < c0) {
    throw DataError("demand matrix has " + std::to_string(demand.hours()) + " hours, model needs " +
                    std::to_string(c0));
  }
  const Tensor x = demand.slice(demand.hours() - c0, c0);
  const LocalHour target = demand.t0() + static_cast<LocalHour>(demand.hours());
  const Tensor p = predict(model, x, hour_of_day(target));
  std::ostringstream os;
  os.precision(10);
  os << "station,hour,forecast\n";
  for (std::size_t j = 0; j < model.station_count(); ++j) {
    os << model.stations[j] << ',' << format_timestamp(target * 3600) << ',' << p(j, 0) << '\n';
  }
  if (!o.out.empty()) write_text(o.out, os.str());
  std::cout << os.str();
  return 0;
}

int cmd_export_filter(const Options& o) {
  const TrainedModel model = load_model(o.model_path);
  const GraphFilter f = export_filter(model, o.layer);
  save_filter(o.out, f);
  std::cout << "wrote " << o.out << ": layer " << o.layer << " filter of " << model.spec.display_name() << "\n";
  return 0;
}

int cmd_report(const Options& o) {
  std::vector<ComparisonRow> rows;
  for (const auto& dir : o.runs) {
    if (!fs::is_directory(dir)) throw ConfigError("run directory '" + dir + "' does not exist");
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.ends_with(".metrics.json")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      std::ifstream in(f);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw DataError("'" + f.string() + "': " + e.what());
      }
      std::string label = j.value("model", f.stem().string());
      if (o.runs.size() > 1) label += " [" + fs::path(dir).filename().string() + "]";
      rows.push_back({label, MetricsReport::from_json(j)});
    }
  }
  if (rows.empty()) throw DataError("no *.metrics.json files found");
  const ComparisonTable table(std::move(rows));
  if (!o.out.empty()) write_text(o.out, table.to_csv());
  std::cout << table.to_text();
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Station-level demand forecasting with data-driven graph filters"};
  app.require_subcommand(1);
  Options o;

  auto* ingest = app.add_subcommand("ingest", "Aggregate trip CSVs into an hourly demand matrix (.dmx)");
  ingest->add_option("--in", o.inputs, "Trip CSV file(s), optionally gzip-compressed")->required();
  ingest->add_option("--out", o.out, "Output .dmx path")->required();
  ingest->add_option("--stations", o.stations, "Comma-separated station ids to keep");
  ingest->add_option("--rejections", o.rejections, "Write rejected rows to this CSV");

  auto* graph = app.add_subcommand("build-graph", "Build a normalized fixed graph filter (.gfl)");
  graph->add_option("--kind", o.kind, "SD, DE, ATD, DC or Identity")->capture_default_str();
  graph->add_option("--demand", o.demand, "Demand matrix (.dmx)")->required();
  graph->add_option("--trips", o.trips, "Trip CSV file(s); needed for SD, DE and ATD");
  graph->add_option("--out", o.out, "Output .gfl path")->required();
  graph->add_option("--threshold-km", o.threshold_km, "SD distance cutoff")->capture_default_str();
  graph->add_option("--window", o.window, "Lag window C0 (fixes the training period)")->capture_default_str();
  graph->add_option("--train", o.train_ratio, "Training fraction")->capture_default_str();
  graph->add_option("--val", o.val_ratio, "Validation fraction")->capture_default_str();
  graph->add_option("--test", o.test_ratio, "Test fraction")->capture_default_str();

  auto* train = app.add_subcommand("train", "Train and evaluate the models listed in a config file");
  train->add_option("--config", o.config, "Experiment config (INI)")->required();
  train->add_option("--out", o.out, "Output directory (overrides [output] dir)");
  train->add_option("--models", o.models, "Model list (overrides [models] run)");
  train->add_option("--seed", o.seed, "Random seed (overrides [train] seed)");
  train->add_option("--epochs", o.epochs, "Epoch limit (overrides [train] epochs)");

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint on a demand matrix");
  evaluate->add_option("--model", o.model_path, "Checkpoint (.mdl)")->required();
  evaluate->add_option("--demand", o.demand, "Demand matrix (.dmx)")->required();
  evaluate->add_option("--split", o.split, "train, val, test or all")->capture_default_str();
  evaluate->add_option("--train", o.train_ratio, "Training fraction")->capture_default_str();
  evaluate->add_option("--val", o.val_ratio, "Validation fraction")->capture_default_str();
  evaluate->add_option("--test", o.test_ratio, "Test fraction")->capture_default_str();
  evaluate->add_option("--out", o.out, "Write metrics JSON here");

  auto* pred = app.add_subcommand("predict", "Forecast the hour after the end of a demand matrix");
  pred->add_option("--model", o.model_path, "Checkpoint (.mdl)")->required();
  pred->add_option("--demand", o.demand, "Demand matrix (.dmx) holding at least C0 hours")->required();
  pred->add_option("--out", o.out, "Also write the CSV here");

  auto* exp = app.add_subcommand("export-filter", "Write a learned DDGF filter as .gfl");
  exp->add_option("--model", o.model_path, "Checkpoint (.mdl)")->required();
  exp->add_option("--layer", o.layer, "1-based DDGF layer")->capture_default_str();
  exp->add_option("--out", o.out, "Output .gfl path")->required();

  auto* report = app.add_subcommand("report", "Collect metrics from run directories into one table");
  report->add_option("--runs", o.runs, "Run directories")->required();
  report->add_option("--out", o.out, "Also write the table as CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*ingest) return cmd_ingest(o);
    if (*graph) return cmd_build_graph(o);
    if (*train) return cmd_train(o);
    if (*evaluate) return cmd_evaluate(o);
    if (*pred) return cmd_predict(o);
    if (*exp) return cmd_export_filter(o);
    if (*report) return cmd_report(o);
  } catch (const UserError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace ddgf
