// barlink: simulate, fit, predict, evaluate, sweep, figure-q.
//
// Every subcommand accepts --config FILE with flat key=value lines whose keys
// are long flag names. Values on the command line win. The resolved
// configuration is written as config.txt into the output directory.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "barlink/bar_model.hpp"
#include "barlink/edge_list_io.hpp"
#include "barlink/errors.hpp"
#include "barlink/evaluation.hpp"
#include "barlink/experiment.hpp"
#include "barlink/gft.hpp"
#include "barlink/logistic.hpp"
#include "barlink/model_io.hpp"
#include "barlink/parallel.hpp"
#include "barlink/sgd.hpp"
#include "barlink/simulator.hpp"

namespace fs = std::filesystem;
using namespace barlink;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitScale = 5;

class UsageError : public Error {
 public:
  using Error::Error;
};

// ---- configuration files ----

std::string trim(std::string s) {
  auto first = s.find_first_not_of(" \t\r");
  auto last = s.find_last_not_of(" \t\r");
  return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
}

// key=value lines become "--key=value" tokens placed before the user's own
// arguments, so later command-line values take precedence.
std::vector<std::string> config_tokens(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path.string());
  std::vector<std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config lines are key=value", line_no);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty config key", line_no);
    if (key == "config") throw ParseError("config files cannot include other config files", line_no);
    std::replace(key.begin(), key.end(), '_', '-');
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> config;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) config = args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) config = args[k].substr(9);
  }
  if (!config || args.empty()) return args;
  auto from_file = config_tokens(*config);
  std::vector<std::string> out{args.front()};  // subcommand name
  out.insert(out.end(), from_file.begin(), from_file.end());
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

void write_resolved_config(const CLI::App& cmd, const fs::path& dir) {
  std::ofstream out(dir / "config.txt");
  if (!out) throw Error("cannot write " + (dir / "config.txt").string());
  out << "# barlink " << cmd.get_name() << '\n';
  for (const CLI::Option* opt : cmd.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& results = opt->reduced_results();
      for (std::size_t k = 0; k < results.size(); ++k) value += (k ? "," : "") + results[k];
    } else {
      value = opt->get_default_str();
    }
    if (value.empty()) continue;
    std::string key = name;
    std::replace(key.begin(), key.end(), '-', '_');
    out << key << '=' << value << '\n';
  }
}

// ---- shared helpers ----

fs::path output_dir(const std::string& flag, const std::string& command) {
  if (!flag.empty()) return flag;
  if (const char* root = std::getenv("BARLINK_OUTPUT_ROOT"); root && *root) return fs::path(root) / command;
  throw UsageError("--out is required when BARLINK_OUTPUT_ROOT is not set");
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string("malformed ") + what + " entry '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + " list is empty");
  return out;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) out += (k ? " " : "") + format_double(values[k]);
  return out;
}

struct SgdFlags {
  SgdConfig config;
  std::string schedule = "constant";
  std::optional<double> q0;

  void add(CLI::App* cmd) {
    cmd->add_option("--eta", config.eta, "SGD step size")->capture_default_str();
    cmd->add_option("--iterations", config.iterations, "SGD iteration budget")->capture_default_str();
    cmd->add_option("--seed", config.seed, "random seed")->capture_default_str();
    cmd->add_option("--schedule", schedule, "step schedule: constant | inverse-sqrt")
        ->check(CLI::IsMember({"constant", "inverse-sqrt"}))
        ->capture_default_str();
    cmd->add_option("--zero-sample", config.zero_sample, "zero terms per sender (0: all)")->capture_default_str();
    cmd->add_option("--tolerance", config.tolerance, "stop when the mean update norm falls below this")
        ->capture_default_str();
    cmd->add_option("--window", config.window, "update-norm window")->capture_default_str();
    cmd->add_option("--trace-every", config.trace_every, "objective trace interval (0: off)")->capture_default_str();
    cmd->add_option("--q0", q0, "initial probability (default: density of the first step)");
  }

  SgdConfig resolve() const {
    SgdConfig out = config;
    out.schedule = schedule == "inverse-sqrt" ? StepSchedule::inverse_sqrt : StepSchedule::constant;
    out.q0 = q0;
    return out;
  }
};

struct GftFlags {
  GftConfig config;
  void add(CLI::App* cmd) {
    cmd->add_option("--k", config.k, "GFT feature-map rank")->capture_default_str();
    cmd->add_option("--nu", config.nu, "GFT feature-tracking weight")->capture_default_str();
    cmd->add_option("--tau", config.tau, "GFT nuclear-norm weight")->capture_default_str();
    cmd->add_option("--ridge", config.ridge, "GFT forecast ridge penalty")->capture_default_str();
    cmd->add_option("--gft-iterations", config.iterations, "GFT proximal iterations")->capture_default_str();
    cmd->add_option("--node-cap", config.node_cap, "largest main universe GFT accepts")->capture_default_str();
  }
};

struct DataFlags {
  std::string dir;
  std::size_t dim = 0;
  void add(CLI::App* cmd) {
    cmd->add_option("--data", dir, "dataset directory")->required();
    cmd->add_option("--dim", dim, "feature dimension (0: infer)")->capture_default_str();
  }
  Dataset load() const { return load_dataset_dir(dir, dim); }
};

std::shared_ptr<const Dataset> prefix(const Dataset& data, TimeIndex last) {
  if (last == data.steps()) return std::make_shared<const Dataset>(data);
  return std::make_shared<const Dataset>(truncate_dataset(data, last));
}

// ---- simulate ----

struct SimulateCmd {
  int row = 0;
  double scale = 1.0;
  std::size_t reps = 1;
  std::size_t jobs = 1;
  std::string out;
  ScenarioConfig scenario;
  std::optional<std::size_t> N, n;
  std::optional<double> p, p_add, p_del, lambda;
  std::optional<int> T;
  std::optional<std::size_t> d;

  void add(CLI::App* cmd) {
    cmd->add_option("--table1-row", row, "named scenario row 1..7 (0: explicit parameters)")
        ->check(CLI::Range(0, kTable1Rows))
        ->capture_default_str();
    cmd->add_option("--scale", scale, "node-count scale applied to the named row")->capture_default_str();
    cmd->add_option("--reps", reps, "number of seeded replicates")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--seed", scenario.seed, "seed of the first replicate; replicate r uses seed + r")
        ->capture_default_str();
    cmd->add_option("--jobs", jobs, "worker threads (0: all cores)")->capture_default_str();
    cmd->add_option("--out", out, "output directory");
    cmd->add_option("--N", N, "auxiliary node count");
    cmd->add_option("--n", n, "main node count");
    cmd->add_option("--p", p, "initial edge probability");
    cmd->add_option("--p-add", p_add, "per-step birth probability");
    cmd->add_option("--p-del", p_del, "per-step death probability");
    cmd->add_option("--T", T, "time steps");
    cmd->add_option("--d", d, "feature dimension");
    cmd->add_option("--lambda", lambda, "generating decay");
    cmd->add_option("--walk-variance", scenario.walk_variance, "variance of the feature-mean walk")
        ->capture_default_str();
    cmd->add_option("--mu0", scenario.mu0, "initial feature mean")->capture_default_str();
  }

  int run(const CLI::App& cmd) {
    ScenarioConfig base = scenario;
    if (row > 0) {
      base = table1_row(row, scale);
      base.seed = scenario.seed;
      base.walk_variance = scenario.walk_variance;
      base.mu0 = scenario.mu0;
    }
    if (N) base.N = *N;
    if (n) base.n = *n;
    if (N && !n && row == 0) base.n = *N;
    if (p) base.p = *p;
    if (p_add) base.p_add = *p_add;
    if (p_del) base.p_del = *p_del;
    if (T) base.T = *T;
    if (d) base.d = *d;
    if (lambda) base.lambda = *lambda;
    base.validate();
    fs::path dir = output_dir(out, "simulate");
    fs::create_directories(dir);
    write_resolved_config(cmd, dir);
    const int width = static_cast<int>(std::to_string(reps).size());
    parallel_for(reps, jobs, [&](std::size_t r) {
      ScenarioConfig config = base;
      config.seed = base.seed + r;
      Scenario sc = simulate(config);
      std::string name = std::to_string(r + 1);
      name = "rep-" + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(name.size()))), '0') + name;
      write_dataset_dir(dir / name, sc.data);
      write_truth(dir / name / "truth.txt", sc.truth);
    });
    std::cout << "wrote " << reps << " replicate(s) of N=" << base.N << " n=" << base.n << " T=" << base.T << " to "
              << dir.string() << '\n';
    return 0;
  }
};

// ---- fit ----

struct FitCmd {
  DataFlags data;
  std::string model = "bar";
  double lambda = 0.5;
  double alpha = 0.0;
  int train_steps = 0;
  std::string out;
  SgdFlags sgd;
  GftFlags gft;
  std::size_t logistic_iterations = 500;
  double logistic_eta = 1.0;

  void add(CLI::App* cmd) {
    data.add(cmd);
    cmd->add_option("--model", model, "bar | logistic | logistic-raw | gft")
        ->check(CLI::IsMember({"bar", "logistic", "logistic-raw", "gft"}))
        ->capture_default_str();
    cmd->add_option("--lambda", lambda, "BAR decay")->capture_default_str();
    cmd->add_option("--alpha", alpha, "BAR regularizer weight")->capture_default_str();
    cmd->add_option("--train-steps", train_steps, "fit on steps 1..k (0: all)")->capture_default_str();
    cmd->add_option("--out", out, "output directory");
    sgd.add(cmd);
    gft.add(cmd);
    cmd->add_option("--logistic-iterations", logistic_iterations, "logistic gradient-descent iterations")
        ->capture_default_str();
    cmd->add_option("--logistic-eta", logistic_eta, "logistic initial step")->capture_default_str();
  }

  int run(const CLI::App& cmd) {
    fs::path dir = output_dir(out, "fit");
    Dataset full = data.load();
    TimeIndex last = train_steps ? train_steps : full.steps();
    auto train = prefix(full, last);
    fs::create_directories(dir);
    write_resolved_config(cmd, dir);

    ModelArtifact artifact;
    artifact.kind = parse_kind(model);
    std::ofstream report(dir / "fit_report.txt");
    report << "model=" << model << "\ntrain_steps=" << last << '\n';
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::pair<std::size_t, double>> trajectory;
    if (artifact.kind == ModelKind::bar) {
      SgdConfig config = sgd.resolve();
      config.lambda = lambda;
      config.alpha = alpha;
      FitReport fit = sgd_fit(*train, config);
      artifact.lambda = fit.lambda;
      artifact.alpha = fit.alpha;
      artifact.q0 = fit.q0;
      artifact.beta = fit.beta;
      trajectory = fit.trajectory;
      report << "iterations=" << fit.iterations << "\nconverged=" << (fit.converged ? "true" : "false") << '\n';
    } else if (artifact.kind == ModelKind::gft) {
      artifact.gft = gft.config;
      GftModel m = gft_fit(*train, gft.config);
      report << "iterations=" << m.iterations << "\nconverged=" << (m.converged ? "true" : "false") << '\n';
    } else {
      LogisticConfig config;
      config.variant = artifact.kind == ModelKind::logistic ? LogisticVariant::averaged : LogisticVariant::raw;
      config.descent.iterations = logistic_iterations;
      config.descent.eta = logistic_eta;
      LogisticModel m = logistic_fit(*train, config);
      artifact.beta = m.beta;
      trajectory = m.trajectory;
      report << "iterations=" << m.iterations << "\nconverged=" << (m.converged ? "true" : "false") << '\n';
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!artifact.beta.empty()) report << "beta=" << join(artifact.beta) << '\n';
    write_model(dir / "model.txt", artifact);
    if (!trajectory.empty()) {
      std::ofstream traj(dir / "trajectory.csv");
      traj << "iteration,objective\n";
      for (const auto& [k, v] : trajectory) traj << k << ',' << format_double(v) << '\n';
    }
    std::cout << "fit " << model << " on steps 1.." << last << " in " << seconds << " s -> "
              << (dir / "model.txt").string() << '\n';
    return 0;
  }
};

// ---- predict ----

struct PredictCmd {
  DataFlags data;
  std::string model_path;
  std::string pairs_path;
  int train_steps = 0;
  std::size_t max_pairs = 4000000;
  std::string out;

  void add(CLI::App* cmd) {
    data.add(cmd);
    cmd->add_option("--model", model_path, "model artifact")->required();
    cmd->add_option("--pairs", pairs_path, "file of 'src dst' lines (default: every main pair)");
    cmd->add_option("--train-steps", train_steps, "condition on steps 1..k (0: all)")->capture_default_str();
    cmd->add_option("--max-pairs", max_pairs, "refuse to enumerate more main pairs than this")
        ->capture_default_str();
    cmd->add_option("--out", out, "output directory");
  }

  int run(const CLI::App& cmd) {
    fs::path dir = output_dir(out, "predict");
    Dataset full = data.load();
    TimeIndex last = train_steps ? train_steps : full.steps();
    auto train = prefix(full, last);
    auto score = artifact_scorer(read_model(model_path), train);
    std::vector<Edge> pairs;
    if (!pairs_path.empty()) {
      std::ifstream in(pairs_path);
      if (!in) throw Error("cannot open " + pairs_path);
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        std::istringstream tokens(line);
        std::string a, b, extra;
        if (!(tokens >> a) || a.front() == '#') continue;
        if (!(tokens >> b) || (tokens >> extra)) throw ParseError("pair lines are 'src dst'", line_no);
        auto i = full.nodes.find(a);
        auto j = full.nodes.find(b);
        if (!i || !j) throw ParseError("unknown node in pair", line_no);
        pairs.push_back({*i, *j});
      }
    } else {
      const std::size_t n = full.main_nodes;
      if (n * (n - 1) > max_pairs) {
        throw ScaleError("enumerating " + std::to_string(n * (n - 1)) + " main pairs exceeds --max-pairs");
      }
      for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = 0; j < n; ++j) {
          if (i != j) pairs.push_back({i, j});
        }
      }
    }
    fs::create_directories(dir);
    write_resolved_config(cmd, dir);
    std::ofstream csv(dir / "predictions.csv");
    csv << "src,dst,score\n";
    for (const auto& e : pairs) {
      csv << full.nodes.label(e.src) << ',' << full.nodes.label(e.dst) << ',' << format_double(score(e.src, e.dst))
          << '\n';
    }
    std::cout << "scored " << pairs.size() << " pairs for step " << last + 1 << " -> "
              << (dir / "predictions.csv").string() << '\n';
    return 0;
  }
};

// ---- evaluate ----

struct EvaluateCmd {
  DataFlags data;
  std::vector<std::string> models;
  int test_step = 0;
  std::string ones = "existed,new";
  std::string zeros = "main2aux,aux2main";
  std::string recall_n = "10,100,1000";
  std::size_t exact_limit = 2000;
  std::size_t zeros_per_segment = 50000;
  std::uint64_t seed = 1;
  std::string out;

  void add(CLI::App* cmd) {
    data.add(cmd);
    cmd->add_option("--model", models, "model artifact(s); repeat or separate with commas")
        ->required()
        ->delimiter(',');
    cmd->add_option("--test-step", test_step, "held-out step (0: last)")->capture_default_str();
    cmd->add_option("--ones", ones, "positive segments: existed, new")->capture_default_str();
    cmd->add_option("--zeros", zeros, "zero segments: main2main, aux2aux, main2aux, aux2main, or all")
        ->capture_default_str();
    cmd->add_option("--recall-n", recall_n, "cutoffs of the recall curve")->capture_default_str();
    cmd->add_option("--exact-limit", exact_limit, "enumerate zero segments up to this many main nodes")
        ->capture_default_str();
    cmd->add_option("--zeros-per-segment", zeros_per_segment, "sampled zeros per segment above the limit")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "zero-sampling seed")->capture_default_str();
    cmd->add_option("--out", out, "output directory");
  }

  int run(const CLI::App& cmd) {
    fs::path dir = output_dir(out, "evaluate");
    Dataset full = data.load();
    const TimeIndex test = test_step ? test_step : full.steps();
    if (test < 2 || test > full.steps()) throw UsageError("--test-step must lie in 2.." + std::to_string(full.steps()));

    std::vector<Segment> one_segments;
    for (const auto& name : split_names(ones)) {
      if (name == "existed") one_segments.push_back(Segment::ones_existed);
      else if (name == "new") one_segments.push_back(Segment::ones_new);
      else throw UsageError("unknown ones segment '" + name + "'");
    }
    std::vector<Segment> zero_segments;
    for (const auto& name : split_names(zeros)) {
      if (name == "all") {
        zero_segments.assign(kZeroSegments.begin(), kZeroSegments.end());
        break;
      }
      Segment s = parse_segment(name.rfind("zeros_", 0) == 0 ? name : "zeros_" + name);
      zero_segments.push_back(s);
    }
    if (one_segments.empty() || zero_segments.empty()) throw UsageError("empty segment selection");
    std::vector<std::size_t> cutoffs;
    for (double v : parse_list(recall_n, "recall cutoff")) {
      if (v < 1 || v != std::floor(v)) throw UsageError("recall cutoffs are positive integers");
      cutoffs.push_back(static_cast<std::size_t>(v));
    }

    SplitOptions options;
    options.exact_limit = exact_limit;
    options.zeros_per_segment = zeros_per_segment;
    options.seed = seed;
    EvaluationSplit split = build_split(full, test, options);
    std::vector<Edge> positives;
    std::map<Segment, std::vector<Edge>> by_segment;
    for (Segment s : one_segments) {
      const auto& v = s == Segment::ones_existed ? split.ones_existed : split.ones_new;
      by_segment[s] = v;
      positives.insert(positives.end(), v.begin(), v.end());
    }
    std::vector<Edge> negatives;
    for (Segment s : zero_segments) {
      const auto& v = split.zero_segment(s);
      negatives.insert(negatives.end(), v.begin(), v.end());
    }
    if (positives.empty()) throw NumericError("the selected positive segments are empty at step " + std::to_string(test));
    if (negatives.empty()) {
      throw NumericError("the selected zero segments are empty at step " + std::to_string(test) +
                         "; choose others with --zeros (e.g. --zeros all)");
    }

    auto train = prefix(full, test - 1);
    fs::create_directories(dir);
    write_resolved_config(cmd, dir);
    std::vector<RecallPoint> curve;
    std::set<std::string> labels;
    for (const auto& path : models) {
      ModelArtifact artifact = read_model(path);
      std::string label = fs::path(path).parent_path().filename().string();
      if (label.empty() || labels.count(label)) label = std::string(kind_name(artifact.kind));
      for (int k = 2; labels.count(label); ++k) label = std::string(kind_name(artifact.kind)) + "-" + std::to_string(k);
      labels.insert(label);
      auto score = artifact_scorer(artifact, train);

      std::vector<double> neg_scores;
      for (const auto& e : negatives) neg_scores.push_back(score(e.src, e.dst));
      std::vector<MetricRow> rows;
      std::vector<double> pos_scores;
      std::vector<Candidate> candidates;
      for (Segment s : one_segments) {
        std::vector<double> seg_scores;
        for (const auto& e : by_segment[s]) {
          double v = score(e.src, e.dst);
          seg_scores.push_back(v);
          candidates.push_back({e, v, true});
        }
        pos_scores.insert(pos_scores.end(), seg_scores.begin(), seg_scores.end());
        rows.push_back({"count", std::string(segment_name(s)), static_cast<double>(seg_scores.size())});
        if (!seg_scores.empty()) rows.push_back({"auc", std::string(segment_name(s)), auc_roc(seg_scores, neg_scores)});
      }
      for (Segment s : zero_segments) {
        rows.push_back({"count", std::string(segment_name(s)), static_cast<double>(split.zero_segment(s).size())});
        rows.push_back({"sampling_rate", std::string(segment_name(s)), split.sampling_rate(s)});
      }
      rows.push_back({"auc", "all", auc_roc(pos_scores, neg_scores)});
      for (std::size_t k = 0; k < negatives.size(); ++k) candidates.push_back({negatives[k], neg_scores[k], false});
      auto recalls = recall_curve(candidates, positives.size(), cutoffs);
      for (std::size_t k = 0; k < cutoffs.size(); ++k) {
        rows.push_back({"recall@" + std::to_string(cutoffs[k]), "all", recalls[k]});
        curve.push_back({cutoffs[k], recalls[k], label});
      }
      write_metric_csv(dir / ("metrics_" + label + ".csv"), rows);
      std::cout << "== " << label << " (" << kind_name(artifact.kind) << ", test step " << test << ")\n"
                << format_metric_table(rows);
    }
    write_recall_csv(dir / "recall.csv", curve);
    return 0;
  }
};

// ---- sweep ----

struct SweepCmd {
  DataFlags data;
  std::string lambdas = "0.1,0.3,0.5,0.7,0.9";
  std::string alphas = "0";
  int validation_step = 0;
  std::size_t exact_limit = 2000;
  std::size_t jobs = 1;
  std::string out;
  SgdFlags sgd;

  void add(CLI::App* cmd) {
    data.add(cmd);
    cmd->add_option("--lambdas", lambdas, "lambda grid")->capture_default_str();
    cmd->add_option("--alphas", alphas, "alpha grid")->capture_default_str();
    cmd->add_option("--validation-step", validation_step, "step ranked for selection (0: last step - 1)")
        ->capture_default_str();
    cmd->add_option("--exact-limit", exact_limit, "enumerate validation zeros up to this many main nodes")
        ->capture_default_str();
    cmd->add_option("--jobs", jobs, "worker threads (0: all cores)")->capture_default_str();
    cmd->add_option("--out", out, "output directory");
    sgd.add(cmd);
  }

  int run(const CLI::App& cmd) {
    fs::path dir = output_dir(out, "sweep");
    auto lambda_grid = parse_list(lambdas, "lambda");
    auto alpha_grid = parse_list(alphas, "alpha");
    Dataset full = data.load();
    const TimeIndex validation = validation_step ? validation_step : full.steps() - 1;
    if (validation < 2 || validation > full.steps()) {
      throw UsageError("--validation-step must lie in 2.." + std::to_string(full.steps()));
    }
    // The validation step and everything after it stay out of training.
    Dataset head = truncate_dataset(full, validation);
    SgdConfig config = sgd.resolve();
    SweepResult result = sweep_bar(head, validation, lambda_grid, alpha_grid, config, exact_limit, jobs);
    fs::create_directories(dir);
    write_resolved_config(cmd, dir);
    {
      std::ofstream csv(dir / "sweep.csv");
      csv << "lambda,alpha,auc\n";
      for (const auto& r : result.rows) {
        csv << format_double(r.lambda) << ',' << format_double(r.alpha) << ',' << format_double(r.auc) << '\n';
      }
    }
    const SweepRow& best = result.rows[result.best];
    config.lambda = best.lambda;
    config.alpha = best.alpha;
    FitReport fit = sgd_fit(truncate_dataset(full, validation - 1), config);
    ModelArtifact artifact;
    artifact.kind = ModelKind::bar;
    artifact.lambda = fit.lambda;
    artifact.alpha = fit.alpha;
    artifact.q0 = fit.q0;
    artifact.beta = fit.beta;
    write_model(dir / "best_model.txt", artifact);
    for (const auto& r : result.rows) {
      std::cout << "lambda=" << format_double(r.lambda) << " alpha=" << format_double(r.alpha)
                << " auc=" << format_double(r.auc) << (&r == &best ? "  <- best" : "") << '\n';
    }
    return 0;
  }
};

// ---- figure-q ----

struct FigureQCmd {
  double q0 = 0.2;
  double p = 0.8;
  std::string lambdas = "0,0.25,0.5,0.75,0.9,1";
  int T = 15;
  std::string out;

  void add(CLI::App* cmd) {
    cmd->add_option("--q0", q0, "initial probability")->capture_default_str();
    cmd->add_option("--p", p, "constant edge probability")->capture_default_str();
    cmd->add_option("--lambdas", lambdas, "decay values")->capture_default_str();
    cmd->add_option("--T", T, "last step")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--out", out, "output directory");
  }

  int run(const CLI::App& cmd) {
    if (!(q0 >= 0 && q0 <= 1) || !(p >= 0 && p <= 1)) throw UsageError("--q0 and --p must lie in [0, 1]");
    auto grid = parse_list(lambdas, "lambda");
    for (double l : grid) {
      if (!(l >= 0 && l <= 1)) throw UsageError("lambda values must lie in [0, 1]");
    }
    fs::path dir = output_dir(out, "figure-q");
    fs::create_directories(dir);
    write_resolved_config(cmd, dir);
    std::ofstream csv(dir / "figure_q.csv");
    csv << "lambda,t,q\n";
    for (double l : grid) {
      csv << format_double(l) << ",0," << format_double(q0) << '\n';
      for (int t = 1; t <= T; ++t) {
        std::vector<double> probs(static_cast<std::size_t>(t), p);
        csv << format_double(l) << ',' << t << ',' << format_double(q_recursive(q0, probs, l)) << '\n';
      }
    }
    std::cout << "wrote " << (dir / "figure_q.csv").string() << '\n';
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bernoulli autoregressive link prediction toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  SimulateCmd simulate_cmd;
  FitCmd fit_cmd;
  PredictCmd predict_cmd;
  EvaluateCmd evaluate_cmd;
  SweepCmd sweep_cmd;
  FigureQCmd figure_cmd;

  std::string config_path;
  auto subcommand = [&](const char* name, const char* help) {
    CLI::App* cmd = app.add_subcommand(name, help);
    cmd->add_option("--config", config_path, "flat key=value file; command-line values win");
    return cmd;
  };
  CLI::App* simulate_app = subcommand("simulate", "generate simulated dual-sequence datasets");
  CLI::App* fit_app = subcommand("fit", "fit BAR or a baseline and write a model artifact");
  CLI::App* predict_app = subcommand("predict", "score pairs for the step after the data");
  CLI::App* evaluate_app = subcommand("evaluate", "AUC and recall of model artifacts on a held-out step");
  CLI::App* sweep_app = subcommand("sweep", "select lambda and alpha by validation AUC");
  CLI::App* figure_app = subcommand("figure-q", "Q trajectories under a constant edge probability");
  simulate_cmd.add(simulate_app);
  fit_cmd.add(fit_app);
  predict_cmd.add(predict_app);
  evaluate_cmd.add(evaluate_app);
  sweep_cmd.add(sweep_app);
  figure_cmd.add(figure_app);
  // Evaluate takes several artifacts; keep every value rather than the last.
  evaluate_app->get_option("--model")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const barlink::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  }

  try {
    if (simulate_app->parsed()) return simulate_cmd.run(*simulate_app);
    if (fit_app->parsed()) return fit_cmd.run(*fit_app);
    if (predict_app->parsed()) return predict_cmd.run(*predict_app);
    if (evaluate_app->parsed()) return evaluate_cmd.run(*evaluate_app);
    if (sweep_app->parsed()) return sweep_cmd.run(*sweep_app);
    if (figure_app->parsed()) return figure_cmd.run(*figure_app);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const RangeError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const barlink::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const DimensionError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ScaleError& e) {
    std::cerr << "scale error: " << e.what() << '\n';
    return kExitScale;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
