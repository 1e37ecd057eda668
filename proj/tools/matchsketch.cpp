// Experiment runner for the dynamic-graph-stream matching sketch: seeded
// trial runs against the exact oracle, Monte Carlo diagnostics, and the
// k-player hard-instance generator.

#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "msk/calibration.hpp"
#include "msk/diagnostics.hpp"
#include "msk/exact_matching.hpp"
#include "msk/matching_sketch.hpp"
#include "msk/simultaneous.hpp"
#include "msk/stream.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;
constexpr std::uint64_t kTagTrial = 0x7472696cULL;
constexpr std::uint64_t kTagSketch = 0x736b6368ULL;

struct TrialRow {
  std::uint64_t trial = 0;
  std::uint64_t planted_opt = 0;
  std::uint64_t exact_opt = 0;
  std::uint64_t extracted = 0;
  double ratio = 0;
  std::uint64_t active_pairs = 0;
  std::uint64_t sampled_edges = 0;
  std::uint64_t sketch_bytes = 0;
  bool pass = false;
};

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  double pos = q * static_cast<double>(values.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

std::string fmt_double(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void write_output(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << content;
}

struct RunConfig {
  std::uint64_t n = 256;
  double epsilon = 1.0 / 3.0;
  std::uint64_t trials = 10;
  std::uint64_t seed = 1;
  std::string opt_hat = "known";
  std::uint64_t planted_opt = 0;  // 0 -> n/4
  std::uint64_t noise = 0;        // default n/4, set below
  std::uint64_t churn = 0;        // default n/8
  bool noise_set = false, churn_set = false;
  std::uint64_t threads = 0;
  std::string out_path;
  std::string format = "csv";
};

TrialRow run_trial(const RunConfig& cfg, std::uint64_t trial) {
  std::uint64_t trial_seed = msk::derive_seed(cfg.seed, kTagTrial, trial);
  std::uint64_t planted_opt = cfg.planted_opt == 0 ? std::max<std::uint64_t>(1, cfg.n / 4)
                                                   : cfg.planted_opt;
  std::uint64_t noise = cfg.noise_set ? cfg.noise : cfg.n / 4;
  std::uint64_t churn = cfg.churn_set ? cfg.churn : cfg.n / 8;

  msk::PlantedStream planted = msk::gen_planted(cfg.n, planted_opt, noise, churn, trial_seed);
  auto mult = msk::validate(planted.stream);
  std::vector<msk::Edge> final_edges;
  final_edges.reserve(mult.size());
  for (const auto& [key, m] : mult) final_edges.emplace_back(key / cfg.n, key % cfg.n);
  msk::BipartiteGraph final_graph(cfg.n, cfg.n, std::move(final_edges));
  std::uint64_t exact = msk::max_matching(final_graph).size();

  TrialRow row;
  row.trial = trial;
  row.planted_opt = planted_opt;
  row.exact_opt = exact;

  std::uint64_t sketch_seed = msk::derive_seed(trial_seed, kTagSketch, 0);
  if (cfg.opt_hat == "known") {
    msk::Params params = msk::Params::make(cfg.n, cfg.epsilon, std::max<std::uint64_t>(1, exact));
    msk::MatchingSketch sketch(params, sketch_seed);
    sketch.apply(planted.stream.updates);
    row.extracted = sketch.extract().size();
    row.active_pairs = sketch.active_pair_count();
    row.sampled_edges = sketch.sample_edges().size();
    row.sketch_bytes = sketch.serialized_size();
  } else {
    msk::OptSearchSketch sketch(cfg.n, cfg.epsilon, sketch_seed);
    sketch.apply(planted.stream.updates);
    row.extracted = sketch.extract().size();
    for (const msk::MatchingSketch& est : sketch.estimates()) {
      row.active_pairs += est.active_pair_count();
      row.sampled_edges += est.sample_edges().size();
    }
    row.sketch_bytes = sketch.serialized_size();
  }

  row.ratio = row.extracted == 0
                  ? (exact == 0 ? 0.0 : std::numeric_limits<double>::infinity())
                  : static_cast<double>(exact) / static_cast<double>(row.extracted);
  double n_eps = std::pow(static_cast<double>(cfg.n), cfg.epsilon);
  row.pass = static_cast<double>(row.extracted) * msk::kApproxRatioC * n_eps >=
             static_cast<double>(exact);
  return row;
}

int cmd_run(const RunConfig& cfg) {
  auto start = std::chrono::steady_clock::now();

  std::vector<TrialRow> rows(cfg.trials);
  std::uint64_t workers = cfg.threads != 0
                              ? cfg.threads
                              : std::min<std::uint64_t>(4, std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min<std::uint64_t>(workers, cfg.trials);

  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::uint64_t trial = next.fetch_add(1);
      if (trial >= cfg.trials) return;
      rows[trial] = run_trial(cfg, trial);
    }
  };
  std::vector<std::thread> pool;
  for (std::uint64_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  std::vector<double> extracted, ratios, bytes;
  std::uint64_t passing = 0;
  for (const TrialRow& row : rows) {
    extracted.push_back(static_cast<double>(row.extracted));
    ratios.push_back(row.ratio);
    bytes.push_back(static_cast<double>(row.sketch_bytes));
    if (row.pass) ++passing;
  }
  bool pass = cfg.trials > 0 &&
              static_cast<double>(passing) >= 0.9 * static_cast<double>(cfg.trials);

  double median_extracted = percentile(extracted, 0.5);
  double p10_extracted = percentile(extracted, 0.1);
  double median_ratio = percentile(ratios, 0.5);
  double p10_ratio = percentile(ratios, 0.9);  // high ratio is the bad tail
  double median_bytes = percentile(bytes, 0.5);
  double p10_bytes = percentile(bytes, 0.1);

  std::string content;
  if (cfg.format == "csv") {
    std::string csv =
        "schema_version,row_kind,trial,n,epsilon,mode,planted_opt,exact_opt,extracted,ratio,"
        "active_pairs,sampled_edges,sketch_bytes\n";
    char buf[512];
    for (const TrialRow& row : rows) {
      std::snprintf(buf, sizeof(buf),
                    "%d,trial,%" PRIu64 ",%" PRIu64 ",%s,%s,%" PRIu64 ",%" PRIu64 ",%" PRIu64
                    ",%s,%" PRIu64 ",%" PRIu64 ",%" PRIu64 "\n",
                    kSchemaVersion, row.trial, cfg.n, fmt_double(cfg.epsilon).c_str(),
                    cfg.opt_hat.c_str(), row.planted_opt, row.exact_opt, row.extracted,
                    fmt_double(row.ratio).c_str(), row.active_pairs, row.sampled_edges,
                    row.sketch_bytes);
      csv += buf;
    }
    std::snprintf(buf, sizeof(buf), "%d,median,,%" PRIu64 ",%s,%s,,,%s,%s,,,%s\n", kSchemaVersion,
                  cfg.n, fmt_double(cfg.epsilon).c_str(), cfg.opt_hat.c_str(),
                  fmt_double(median_extracted).c_str(), fmt_double(median_ratio).c_str(),
                  fmt_double(median_bytes).c_str());
    csv += buf;
    std::snprintf(buf, sizeof(buf), "%d,p10,,%" PRIu64 ",%s,%s,,,%s,%s,,,%s\n", kSchemaVersion,
                  cfg.n, fmt_double(cfg.epsilon).c_str(), cfg.opt_hat.c_str(),
                  fmt_double(p10_extracted).c_str(), fmt_double(p10_ratio).c_str(),
                  fmt_double(p10_bytes).c_str());
    csv += buf;
    content = csv;
  } else {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "run";
    doc["config"] = {{"n", cfg.n},       {"epsilon", cfg.epsilon}, {"trials", cfg.trials},
                     {"seed", cfg.seed}, {"opt_hat", cfg.opt_hat}};
    doc["trials"] = json::array();
    for (const TrialRow& row : rows) {
      doc["trials"].push_back({{"trial", row.trial},
                               {"planted_opt", row.planted_opt},
                               {"exact_opt", row.exact_opt},
                               {"extracted", row.extracted},
                               {"ratio", row.ratio},
                               {"active_pairs", row.active_pairs},
                               {"sampled_edges", row.sampled_edges},
                               {"sketch_bytes", row.sketch_bytes}});
    }
    doc["aggregates"] = {
        {"median",
         {{"extracted", median_extracted}, {"ratio", median_ratio}, {"sketch_bytes", median_bytes}}},
        {"p10", {{"extracted", p10_extracted}, {"ratio", p10_ratio}, {"sketch_bytes", p10_bytes}}}};
    doc["pass"] = pass;
    content = doc.dump(2) + "\n";
  }
  if (!cfg.out_path.empty()) {
    write_output(cfg.out_path, content);
  } else {
    std::cout << content;
  }

  auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  std::cout << "run: trials=" << cfg.trials << " passing=" << passing
            << " median_extracted=" << fmt_double(median_extracted)
            << " median_ratio=" << fmt_double(median_ratio)
            << " median_bytes=" << fmt_double(median_bytes) << " wall_ms=" << elapsed.count()
            << " => " << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

struct DiagnoseConfig {
  std::string which = "balls_bins";
  std::uint64_t n = 1024;
  double epsilon = 0.5;
  std::uint64_t trials = 0;  // 0 -> per-diagnostic default
  std::uint64_t seed = 1;
  std::uint64_t domain = 1ULL << 16;
  std::uint64_t support = 64;
  double delta = 1.0 / 1024.0;
  std::string out_path;
  std::string format = "csv";
};

int cmd_diagnose(const DiagnoseConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  bool pass = false;
  std::string csv;
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "diagnose";
  doc["which"] = cfg.which;

  if (cfg.which == "balls_bins") {
    std::uint64_t trials = cfg.trials == 0 ? 10000 : cfg.trials;
    auto cells = msk::balls_bins_grid(trials, cfg.seed);
    pass = true;
    csv = "schema_version,balls,bins,frequency,required,pass\n";
    doc["cells"] = json::array();
    for (const auto& cell : cells) {
      pass = pass && cell.pass;
      csv += std::to_string(kSchemaVersion) + "," + std::to_string(cell.balls) + "," +
             std::to_string(cell.bins) + "," + fmt_double(cell.frequency) + "," +
             fmt_double(cell.required) + "," + (cell.pass ? "1" : "0") + "\n";
      doc["cells"].push_back({{"balls", cell.balls},
                              {"bins", cell.bins},
                              {"frequency", cell.frequency},
                              {"required", cell.required},
                              {"pass", cell.pass}});
    }
  } else if (cfg.which == "spanning") {
    std::uint64_t trials = cfg.trials == 0 ? 200 : cfg.trials;
    auto report = msk::spanning_diagnostic(cfg.n, cfg.epsilon, trials, cfg.seed);
    pass = report.pass;
    csv = "schema_version,n,epsilon,trials,frequency,required,pass\n" +
          std::to_string(kSchemaVersion) + "," + std::to_string(cfg.n) + "," +
          fmt_double(cfg.epsilon) + "," + std::to_string(report.trials) + "," +
          fmt_double(report.frequency) + "," + fmt_double(report.required) + "," +
          (report.pass ? "1" : "0") + "\n";
    doc["report"] = {{"n", cfg.n},
                     {"epsilon", cfg.epsilon},
                     {"trials", report.trials},
                     {"frequency", report.frequency},
                     {"required", report.required},
                     {"pass", report.pass}};
  } else if (cfg.which == "sampler_uniformity") {
    std::uint64_t trials = cfg.trials == 0 ? 20000 : cfg.trials;
    auto report =
        msk::sampler_uniformity_diagnostic(cfg.domain, cfg.support, cfg.delta, trials, cfg.seed);
    pass = report.pass;
    csv = "schema_version,domain,support,delta,trials,tv_distance,tv_tolerance,fail_rate,"
          "fail_tolerance,pass\n" +
          std::to_string(kSchemaVersion) + "," + std::to_string(cfg.domain) + "," +
          std::to_string(cfg.support) + "," + fmt_double(cfg.delta) + "," +
          std::to_string(report.trials) + "," + fmt_double(report.tv_distance) + "," +
          fmt_double(report.tv_tolerance) + "," + fmt_double(report.fail_rate) + "," +
          fmt_double(report.fail_tolerance) + "," + (report.pass ? "1" : "0") + "\n";
    doc["report"] = {{"domain", cfg.domain},
                     {"support", cfg.support},
                     {"delta", cfg.delta},
                     {"trials", report.trials},
                     {"tv_distance", report.tv_distance},
                     {"tv_tolerance", report.tv_tolerance},
                     {"fail_rate", report.fail_rate},
                     {"fail_tolerance", report.fail_tolerance},
                     {"pass", report.pass}};
  } else {
    std::cerr << "unknown diagnostic '" << cfg.which << "'\n";
    return 2;
  }

  doc["pass"] = pass;
  std::string content = cfg.format == "csv" ? csv : doc.dump(2) + "\n";
  if (!cfg.out_path.empty()) {
    write_output(cfg.out_path, content);
  } else {
    std::cout << content;
  }
  auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  std::cout << "diagnose " << cfg.which << ": wall_ms=" << elapsed.count() << " => "
            << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

struct HardConfig {
  std::uint64_t rs_vertices = 6;
  std::uint64_t r = 2;
  std::uint64_t t = 3;
  std::uint64_t players = 2;
  std::uint64_t seed = 1;
  std::string out_prefix = "hard";
  std::string rs_file;
};

std::vector<msk::Edge> cycle_edges(std::uint64_t n) {
  std::vector<msk::Edge> edges;
  for (std::uint64_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
  return edges;
}

int cmd_hard(const HardConfig& cfg) {
  msk::RSGraph rs;
  if (!cfg.rs_file.empty()) {
    rs = msk::read_rs_graph(cfg.rs_file);
  } else {
    auto found = msk::find_rs_decomposition(cfg.rs_vertices, cycle_edges(cfg.rs_vertices), cfg.r,
                                            cfg.t);
    if (!found) {
      std::cerr << "no (" << cfg.r << "," << cfg.t << ")-RS decomposition of the " << cfg.rs_vertices
                << "-cycle; supply --rs-file\n";
      return 2;
    }
    rs = *found;
  }
  msk::RSCertificate cert = msk::verify_rs(rs);
  if (!cert.ok) {
    std::cerr << "invalid RS graph: " << cert.reason << " (matching " << cert.matching_index
              << ", edge " << cert.offending_edge.first << "-" << cert.offending_edge.second
              << ")\n";
    return 2;
  }

  msk::HardInstance inst = msk::gen_hard(rs, cfg.players, cfg.seed);
  write_output(cfg.out_prefix + ".instance", msk::format_hard_instance(inst));
  for (std::uint64_t p = 0; p < cfg.players; ++p) {
    msk::write_stream(msk::player_stream(inst, p),
                      cfg.out_prefix + ".player" + std::to_string(p) + ".stream");
  }

  msk::TrivialRatioReport report = msk::check_trivial_ratio(inst);
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "hard";
  doc["players"] = cfg.players;
  doc["label_universe"] = inst.label_universe;
  doc["max_matching"] = report.max_matching_size;
  doc["max_trivial"] = report.max_trivial_size;
  doc["good_labels"] = report.good_label_count;
  doc["alpha"] = report.alpha;
  doc["ratio"] = report.ratio;
  doc["bound"] = report.bound;
  doc["bound_holds"] = report.bound_holds;
  write_output(cfg.out_prefix + ".report.json", doc.dump(2) + "\n");

  std::cout << "hard: players=" << cfg.players << " labels=" << inst.label_universe
            << " max_matching=" << report.max_matching_size
            << " max_trivial=" << report.max_trivial_size << " ratio=" << fmt_double(report.ratio)
            << " bound=" << fmt_double(report.bound) << " => "
            << (report.bound_holds ? "PASS" : "FAIL") << "\n";
  return report.bound_holds ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matching sketches for dynamic graph streams"};
  app.require_subcommand(1);

  RunConfig run_cfg;
  CLI::App* run = app.add_subcommand("run", "seeded trials against the exact oracle");
  run->add_option("--n", run_cfg.n, "vertices per side");
  run->add_option("--epsilon", run_cfg.epsilon, "approximation exponent in (0, 1/2]");
  run->add_option("--trials", run_cfg.trials, "trial count")->check(CLI::PositiveNumber);
  run->add_option("--seed", run_cfg.seed, "master seed");
  run->add_option("--opt-hat", run_cfg.opt_hat, "known|guess")
      ->check(CLI::IsMember({"known", "guess"}));
  run->add_option("--opt", run_cfg.planted_opt, "planted matching size (default n/4)");
  auto* noise_opt = run->add_option("--noise", run_cfg.noise, "noise edges (default n/4)");
  auto* churn_opt = run->add_option("--churn", run_cfg.churn, "insert+delete pairs (default n/8)");
  run->add_option("--threads", run_cfg.threads, "worker threads (default auto)");
  run->add_option("--out", run_cfg.out_path, "output file (default stdout)");
  run->add_option("--format", run_cfg.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  DiagnoseConfig diag_cfg;
  CLI::App* diag = app.add_subcommand("diagnose", "Monte Carlo diagnostics");
  diag->add_option("--diagnose", diag_cfg.which, "balls_bins|spanning|sampler_uniformity")
      ->required();
  diag->add_option("--n", diag_cfg.n, "vertices per side (spanning)");
  diag->add_option("--epsilon", diag_cfg.epsilon, "exponent (spanning)");
  diag->add_option("--trials", diag_cfg.trials, "trial count (0 = default)");
  diag->add_option("--seed", diag_cfg.seed, "master seed");
  diag->add_option("--domain", diag_cfg.domain, "sampler domain (uniformity)");
  diag->add_option("--support", diag_cfg.support, "support size (uniformity)");
  diag->add_option("--delta", diag_cfg.delta, "sampler failure parameter (uniformity)");
  diag->add_option("--out", diag_cfg.out_path, "output file (default stdout)");
  diag->add_option("--format", diag_cfg.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  HardConfig hard_cfg;
  CLI::App* hard = app.add_subcommand("hard", "k-player hard instances from an RS graph");
  hard->add_option("--N", hard_cfg.rs_vertices, "RS graph vertices (cycle if no --rs-file)");
  hard->add_option("--r", hard_cfg.r, "induced matching size");
  hard->add_option("--t", hard_cfg.t, "induced matching count");
  hard->add_option("--players", hard_cfg.players, "player count")->check(CLI::PositiveNumber);
  hard->add_option("--seed", hard_cfg.seed, "master seed");
  hard->add_option("--out", hard_cfg.out_prefix, "output file prefix");
  hard->add_option("--rs-file", hard_cfg.rs_file, "RS graph file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      run_cfg.noise_set = noise_opt->count() > 0;
      run_cfg.churn_set = churn_opt->count() > 0;
      return cmd_run(run_cfg);
    }
    if (diag->parsed()) return cmd_diagnose(diag_cfg);
    if (hard->parsed()) return cmd_hard(hard_cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
