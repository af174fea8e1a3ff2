#include "logrepair/cli/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "logrepair/error.hpp"
#include "logrepair/graph/encoders.hpp"
#include "logrepair/graph/mask.hpp"
#include "logrepair/log/csv.hpp"
#include "logrepair/log/schema_io.hpp"
#include "logrepair/log/split.hpp"
#include "logrepair/log/synthetic.hpp"
#include "logrepair/model/hgnn.hpp"
#include "logrepair/random.hpp"
#include "logrepair/train/evaluate.hpp"
#include "logrepair/train/repair.hpp"
#include "logrepair/train/search.hpp"
#include "logrepair/train/trainer.hpp"

namespace logrepair::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kSubcommands[] = {"generate", "mask", "tune", "train", "evaluate", "repair"};

struct Options {
  // shared
  std::string schema_path;
  std::string config_path;
  std::uint64_t seed = 123;
  bool seed_given = false;
  std::string missing_token = "-";
  bool deterministic = true;
  bool verbose = false;
  // positionals
  std::string input;
  std::string output;
  std::string artifacts;
  // generate
  std::size_t traces = 1000;
  std::string schema_out;
  // mask
  std::string strategy;
  double random_p = 0.5;
  bool random_p_given = false;
  // model / training overrides
  std::optional<std::size_t> hidden;
  std::optional<std::size_t> layers;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> patience;
  std::optional<std::size_t> batch_size;
  std::optional<double> learning_rate;
  std::optional<double> weight_decay;
  std::optional<std::string> aggregator;
  // tune / evaluate
  std::size_t trials = 20;
  std::size_t runs = 10;
};

struct Settings {
  TrainConfig train;
  ModelConfig model;
  SplitRatios split;
  SearchSpace space;
};

std::string read_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::InvalidFlag, "input file not found: " + path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::FormatError, path + ": " + e.what());
  }
}

/// Writes through a sibling temporary file so readers never see a partial file.
template <class Fn>
void write_atomic(const fs::path& path, Fn&& write, bool binary = false) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
    write(out);
    out.flush();
    if (!out) throw Error(ErrorCode::IoFailure, "failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoFailure, "cannot move output into place: " + path.string());
  }
}

void check_output_dir(const fs::path& path) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  if (!fs::is_directory(dir)) throw Error(ErrorCode::InvalidFlag, "output directory does not exist: " + dir.string());
}

CsvOptions csv_options(const Options& o) { return {o.missing_token, ','}; }

EventLog load_log(const std::string& path, const Options& o) {
  const std::string text = read_file(path);
  AttributeSchema schema;
  if (!o.schema_path.empty()) {
    schema = schema_from_json(read_json(o.schema_path));
  } else {
    SchemaHints hints;
    hints.missing_token = o.missing_token;
    std::istringstream in(text);
    schema = infer_schema(in, hints);
  }
  std::istringstream in(text);
  return parse_csv_log(in, schema, csv_options(o));
}

Settings load_settings(const Options& o) {
  Settings s;
  if (!o.config_path.empty()) {
    const json j = read_json(o.config_path);
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
    if (j.contains("train")) s.train = train_config_from_json(j.at("train"));
    if (j.contains("model")) s.model = model_config_from_json(j.at("model"));
    if (j.contains("split")) {
      const json& sp = j.at("split");
      s.split.train = sp.value("train", s.split.train);
      s.split.validation = sp.value("validation", s.split.validation);
      s.split.test = sp.value("test", s.split.test);
    }
    if (j.contains("search")) {
      const json& sp = j.at("search");
      s.space.min_learning_rate = sp.value("min_learning_rate", s.space.min_learning_rate);
      s.space.max_learning_rate = sp.value("max_learning_rate", s.space.max_learning_rate);
      s.space.min_weight_decay = sp.value("min_weight_decay", s.space.min_weight_decay);
      s.space.max_weight_decay = sp.value("max_weight_decay", s.space.max_weight_decay);
      if (sp.contains("batch_sizes")) s.space.batch_sizes = sp.at("batch_sizes").get<std::vector<std::size_t>>();
    }
    if (!j.contains("train") || !j.at("train").contains("seed") || o.seed_given) s.train.seed = o.seed;
    if (!j.contains("model") || !j.at("model").contains("seed") || o.seed_given) s.model.seed = o.seed;
  } else {
    s.train.seed = o.seed;
    s.model.seed = o.seed;
  }
  if (o.hidden) s.model.hidden_size = *o.hidden;
  if (o.layers) s.model.layers = *o.layers;
  if (o.epochs) s.train.max_epochs = *o.epochs;
  if (o.patience) s.train.patience = *o.patience;
  if (o.batch_size) s.train.batch_size = *o.batch_size;
  if (o.learning_rate) s.train.learning_rate = *o.learning_rate;
  if (o.weight_decay) s.train.weight_decay = *o.weight_decay;
  if (o.aggregator) s.train.aggregator = parse_aggregator(*o.aggregator);
  if (o.random_p_given) s.train.random_p = o.random_p;
  s.model.aggregator = s.train.aggregator;
  s.train.validate();
  s.model.validate();
  return s;
}

EpochCallback progress(const Options& o, std::ostream& err) {
  if (!o.verbose) return {};
  return [&err](const EpochRecord& r) {
    err << "epoch " << r.epoch << " train " << r.train_loss << " val " << r.val_loss << '\n';
  };
}

int cmd_generate(const Options& o, std::ostream& out) {
  const ProcessSpec spec = process_spec_from_json(read_json(o.input));
  spec.validate();
  if (o.traces == 0) throw Error(ErrorCode::InvalidFlag, "--traces must be positive");
  check_output_dir(o.output);
  if (!o.schema_out.empty()) check_output_dir(o.schema_out);
  const EventLog log = generate_synthetic_log(spec, o.traces, o.seed);
  write_atomic(o.output, [&](std::ostream& s) { write_csv_log(log, s, csv_options(o)); });
  if (!o.schema_out.empty()) {
    write_atomic(o.schema_out, [&](std::ostream& s) { s << schema_to_json(log.schema).dump(2) << '\n'; });
  }
  out << "generated " << log.traces.size() << " traces, " << log.event_count() << " events\n";
  return kOk;
}

int cmd_mask(const Options& o, std::ostream& out) {
  const MaskStrategy strategy = parse_mask_strategy(o.strategy, o.random_p);
  EventLog log = load_log(o.input, o);
  check_output_dir(o.output);
  std::size_t masked = 0;
  for (std::size_t t = 0; t < log.traces.size(); ++t) {
    Trace& trace = log.traces[t];
    const EventMask mask = apply_mask(trace.size(), strategy, derive_seed(o.seed, t));
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (!mask[i]) continue;
      for (Cell& c : trace.events[i].values) c = Cell::missing();
      ++masked;
    }
  }
  write_atomic(o.output, [&](std::ostream& s) { write_csv_log(log, s, csv_options(o)); });
  out << "masked " << masked << " of " << log.event_count() << " events\n";
  return kOk;
}

struct Prepared {
  Settings settings;
  LogSplits splits;
  EncoderSet enc;
};

Prepared prepare(const Options& o) {
  Prepared p;
  p.settings = load_settings(o);
  const EventLog log = load_log(o.input, o);
  p.splits = split_log(log, p.settings.split, p.settings.train.seed);
  if (p.splits.train.traces.empty() || p.splits.validation.traces.empty()) {
    throw Error(ErrorCode::EmptyLog, "log too small for a train/validation split");
  }
  p.enc = fit_encoders(p.splits.train);
  return p;
}

int cmd_tune(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.trials == 0) throw Error(ErrorCode::InvalidFlag, "--trials must be positive");
  Prepared p = prepare(o);
  check_output_dir(o.output);
  const ModelConfig model = p.settings.model;
  std::size_t index = 0;
  const SearchResult result = random_search(
      p.settings.space, o.trials, derive_seed(p.settings.train.seed, 0x5ea2c4),
      [&](const TrainConfig& cfg) {
        double loss = std::numeric_limits<double>::infinity();
        try {
          loss = train_model(p.splits.train, p.splits.validation, p.enc, cfg, model).best_val_loss;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NonFiniteLoss) throw;
          err << "trial " << index << " diverged\n";
        }
        if (o.verbose) err << "trial " << index << " val " << loss << '\n';
        ++index;
        return loss;
      },
      p.settings.train);

  ModelConfig best_model = model;
  best_model.aggregator = result.best.aggregator;
  json trials = json::array();
  for (const auto& t : result.trials) {
    trials.push_back({{"train", train_config_to_json(t.config)},
                      {"val_loss", std::isfinite(t.objective) ? json(t.objective) : json(nullptr)}});
  }
  const json doc{{"train", train_config_to_json(result.best)},
                 {"model", model_config_to_json(best_model)},
                 {"best_trial", result.best_index},
                 {"best_val_loss", std::isfinite(result.best_objective) ? json(result.best_objective) : json(nullptr)},
                 {"trials", std::move(trials)}};
  write_atomic(o.output, [&](std::ostream& s) { s << doc.dump(2) << '\n'; });
  out << "best trial " << result.best_index << " val loss " << result.best_objective << '\n';
  return kOk;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  Prepared p = prepare(o);
  const fs::path dir(o.output);
  if (fs::exists(dir) && !fs::is_directory(dir)) throw Error(ErrorCode::InvalidFlag, "not a directory: " + o.output);
  const TrainResult result =
      train_model(p.splits.train, p.splits.validation, p.enc, p.settings.train, p.settings.model, progress(o, err));

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + o.output);
  write_atomic(dir / "params.bin", [&](std::ostream& s) { write_params(s, result.params); }, true);
  write_atomic(dir / "encoders.json", [&](std::ostream& s) { s << encoders_to_json(p.enc).dump(2) << '\n'; });
  write_atomic(dir / "history.csv", [&](std::ostream& s) { write_history_csv(s, result.history); });
  const json cfg{{"train", train_config_to_json(p.settings.train)},
                 {"model", model_config_to_json(result.params.config)},
                 {"best_epoch", result.best_epoch},
                 {"best_val_loss", result.best_val_loss}};
  write_atomic(dir / "config.json", [&](std::ostream& s) { s << cfg.dump(2) << '\n'; });
  out << "best epoch " << result.best_epoch << " of " << result.history.size() << ", val loss "
      << result.best_val_loss << '\n';
  return kOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  if (o.runs == 0) throw Error(ErrorCode::InvalidFlag, "--runs must be positive");
  Prepared p = prepare(o);
  check_output_dir(o.output);
  MultiRunOptions opts;
  opts.n_runs = o.runs;
  opts.parallel = !o.deterministic;
  const RunReport report = evaluate_multi_run(p.splits, p.enc, p.settings.train, p.settings.model, opts);
  write_atomic(o.output, [&](std::ostream& s) { s << report_to_json(report).dump(2) << '\n'; });
  for (const auto& s : report.strategies) {
    for (const auto& m : s.attributes) {
      out << s.strategy << ' ' << m.attribute << ' ' << to_string(m.metric) << ' ';
      if (m.mean) {
        out << *m.mean << " +- " << m.std;
      } else {
        out << "n/a";
      }
      out << '\n';
    }
  }
  return kOk;
}

int cmd_repair(const Options& o, std::ostream& out) {
  const fs::path dir(o.artifacts);
  const EncoderSet enc = encoders_from_json(read_json((dir / "encoders.json").string()));
  const std::string params_text = read_file((dir / "params.bin").string());
  std::istringstream params_in(params_text, std::ios::binary);
  const ModelParams params = read_params(params_in, enc);

  const std::string text = read_file(o.input);
  AttributeSchema schema = enc.schema;
  if (!o.schema_path.empty()) schema = schema_from_json(read_json(o.schema_path));
  std::istringstream in(text);
  const EventLog damaged = parse_csv_log(in, schema, csv_options(o));
  check_output_dir(o.output);
  const EventLog repaired = repair_log(damaged, params, enc);
  write_atomic(o.output, [&](std::ostream& s) { write_csv_log(repaired, s, csv_options(o)); });
  std::size_t filled = 0;
  for (std::size_t t = 0; t < damaged.traces.size(); ++t) {
    for (const auto& e : damaged.traces[t].events) {
      for (const auto& c : e.values) filled += c.is_missing() ? 1 : 0;
    }
  }
  out << "filled " << filled << " cells\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (!args.empty() && !args.front().empty() && args.front()[0] != '-') {
    bool known = false;
    for (const char* s : kSubcommands) known = known || args.front() == s;
    if (!known) {
      err << "error: " << to_string(ErrorCode::UnknownSubcommand) << ": '" << args.front() << "'\n";
      return kValidationError;
    }
  }

  Options o;
  CLI::App app{"Event log repair with heterogeneous graph networks", "logrepair"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "logrepair 0.1.0");

  auto shared = [&](CLI::App* sub) {
    sub->add_option("--schema", o.schema_path, "Schema JSON (inferred from the CSV when absent)");
    sub->add_option("--config", o.config_path, "JSON with train/model/split/search sections");
    sub->add_option("--seed", o.seed, "Seed for every random choice")->each([&](const std::string&) {
      o.seed_given = true;
    });
    sub->add_option("--missing-token", o.missing_token, "CSV token for a missing value");
    sub->add_flag("--deterministic,!--no-deterministic", o.deterministic, "Serialize all work (default on)");
    sub->add_flag("-v,--verbose", o.verbose, "Per-epoch progress on stderr");
  };
  auto model_flags = [&](CLI::App* sub) {
    sub->add_option("--hidden", o.hidden, "Hidden size (default 128)");
    sub->add_option("--layers", o.layers, "Message-passing layers (default 2)");
    sub->add_option("--epochs", o.epochs, "Maximum epochs (default 50)");
    sub->add_option("--patience", o.patience, "Early-stopping patience, 0 disables (default 5)");
    sub->add_option("--batch-size", o.batch_size, "Graphs per batch (default 64)");
    sub->add_option("--lr", o.learning_rate, "Learning rate (default 1e-3)");
    sub->add_option("--weight-decay", o.weight_decay, "L2 weight decay (default 1e-2)");
    sub->add_option("--aggregator", o.aggregator, "sum | mean | max")->check(CLI::IsMember({"sum", "mean", "max"}));
    sub->add_option("--random-p", o.random_p, "Removal probability of the RANDOM strategy")->each(
        [&](const std::string&) { o.random_p_given = true; });
  };

  CLI::App* gen = app.add_subcommand("generate", "Sample a synthetic log from a process spec");
  gen->add_option("spec", o.input, "Process spec JSON")->required();
  gen->add_option("out", o.output, "Output CSV")->required();
  gen->add_option("--traces", o.traces, "Number of traces");
  gen->add_option("--schema-out", o.schema_out, "Also write the schema JSON here");
  shared(gen);

  CLI::App* mask = app.add_subcommand("mask", "Blank out events of a log");
  mask->add_option("in", o.input, "Input CSV")->required();
  mask->add_option("out", o.output, "Damaged CSV")->required();
  mask->add_option("--strategy", o.strategy, "odd | even | window | random")->required();
  mask->add_option("--random-p", o.random_p, "Removal probability for random");
  shared(mask);

  CLI::App* tune = app.add_subcommand("tune", "Random hyperparameter search");
  tune->add_option("log", o.input, "Training CSV")->required();
  tune->add_option("out", o.output, "Best-config JSON")->required();
  tune->add_option("--trials", o.trials, "Number of trials (default 20)");
  shared(tune);
  model_flags(tune);

  CLI::App* train = app.add_subcommand("train", "Train a model and write its artifacts");
  train->add_option("log", o.input, "Training CSV")->required();
  train->add_option("outdir", o.output, "Artifact directory")->required();
  shared(train);
  model_flags(train);

  CLI::App* eval = app.add_subcommand("evaluate", "Multi-run evaluation on the test split");
  eval->add_option("log", o.input, "CSV log")->required();
  eval->add_option("report", o.output, "Report JSON")->required();
  eval->add_option("--runs", o.runs, "Number of trained models (default 10)");
  shared(eval);
  model_flags(eval);

  CLI::App* rep = app.add_subcommand("repair", "Fill the missing cells of a damaged log");
  rep->add_option("damaged", o.input, "Damaged CSV")->required();
  rep->add_option("artifacts", o.artifacts, "Directory written by train")->required();
  rep->add_option("out", o.output, "Repaired CSV")->required();
  shared(rep);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (gen->parsed()) return cmd_generate(o, out);
    if (mask->parsed()) return cmd_mask(o, out);
    if (tune->parsed()) return cmd_tune(o, out, err);
    if (train->parsed()) return cmd_train(o, out, err);
    if (eval->parsed()) return cmd_evaluate(o, out);
    if (rep->parsed()) return cmd_repair(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_validation() ? kValidationError : kRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kValidationError;
}

}  // namespace logrepair::cli
