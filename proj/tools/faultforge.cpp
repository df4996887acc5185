//
// Copyright 2026 The FaultForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// faultforge: offline fault-injection pipeline (scenarios -> degradation ->
// fidelity gate -> evaluation -> lookup table) and the online-phase
// emulation (query, bench).
//
// Exit codes: 0 success, 1 I/O or data error, 2 usage error,
//             3 partial failure, 4 condition not covered by the table.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "faultforge/faultforge.hpp"

namespace fs = std::filesystem;
using namespace faultforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;
constexpr int kExitPartial = 3;
constexpr int kExitNotCovered = 4;

std::string category_list() {
  std::string out;
  for (const auto cat : scenario::all_categories()) {
    if (!out.empty()) out += ", ";
    out += cat.name();
  }
  return out;
}

scenario::FaultCategory require_category(const std::string& name) {
  const auto cat = scenario::FaultCategory::from_name(name);
  if (!cat) {
    throw CLI::ValidationError("--category", "unknown category '" + name +
                                                 "'; valid categories: " +
                                                 category_list());
  }
  return *cat;
}

/// jsonl when the first significant line opens an object, pipe text
/// otherwise.
scenario::ScenarioFormat sniff_format(std::span<const std::uint8_t> bytes) {
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()),
                              bytes.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = detail::trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    return line.front() == '{' ? scenario::ScenarioFormat::jsonl
                               : scenario::ScenarioFormat::pipe_text;
  }
  return scenario::ScenarioFormat::jsonl;
}

std::vector<scenario::FaultScenario> load_scenarios(const fs::path& path,
                                                    const std::string& format) {
  const auto bytes = io::read_file(path);
  scenario::ScenarioFormat fmt;
  if (format == "jsonl") {
    fmt = scenario::ScenarioFormat::jsonl;
  } else if (format == "pipe") {
    fmt = scenario::ScenarioFormat::pipe_text;
  } else {
    fmt = sniff_format(std::span(bytes.data(), bytes.size()));
  }
  return scenario::parse_scenario_file(std::span(bytes.data(), bytes.size()),
                                       fmt);
}

std::vector<fs::path> list_pngs(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error("not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

void write_text(const fs::path& path, const std::string& text) {
  io::write_file(path, std::span(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// --- scenarios --------------------------------------------------------------

struct ScenariosArgs {
  std::string category;
  std::size_t count = 100;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_scenarios(const ScenariosArgs& args) {
  const auto cat = require_category(args.category);
  const auto scns = scenario::generate_scenarios(cat, args.count, args.seed);
  const auto bytes = scenario::write_scenario_file(scns);
  io::write_file(args.out, std::span(bytes.data(), bytes.size()));
  std::printf("wrote %zu scenarios to %s\n", scns.size(), args.out.c_str());
  return kExitOk;
}

// --- inject -----------------------------------------------------------------

struct InjectArgs {
  std::string images;
  std::string scenarios;
  std::string out;
  std::string backend = "stub";
  std::string format = "auto";
  double gate_threshold = genai::kDefaultGateThreshold;
  unsigned jobs = 1;
  std::string ldm_url;
  std::string clip_url;
  std::string token;
  unsigned timeout_ms = 30000;
  int max_retries = 2;
};

struct ManifestRecord {
  std::string category;
  std::string image_id;
  std::string output;
  std::string scenario_id;
  double score = 0.0;
  std::uint64_t seed = 0;
  std::string status;
  double strength = 0.0;
  std::string error;
};

int cmd_inject(const InjectArgs& args) {
  const auto scns = load_scenarios(args.scenarios, args.format);
  if (scns.empty()) throw Error("scenario file is empty");
  const auto images = list_pngs(args.images);
  if (images.empty()) throw Error("no .png inputs in " + args.images);

  const bool remote = args.backend == "remote";
  std::unique_ptr<genai::SynthesisClient> synth;
  std::unique_ptr<genai::FidelityScorer> remote_scorer;
  if (remote) {
    genai::BackendEndpoint ldm;
    ldm.base_url = args.ldm_url;
    ldm.timeout = std::chrono::milliseconds(args.timeout_ms);
    ldm.max_retries = args.max_retries;
    if (!args.token.empty()) ldm.auth_token = args.token;
    genai::BackendEndpoint clip = ldm;
    clip.base_url = args.clip_url;
    if (ldm.base_url.empty() || clip.base_url.empty()) {
      throw Error("remote backend needs --ldm-url and --clip-url (or " +
                  std::string(genai::kEnvLdmUrl) + "/" +
                  std::string(genai::kEnvClipUrl) + ")");
    }
    synth = std::make_unique<genai::RemoteSynthesisClient>(ldm);
    remote_scorer = std::make_unique<genai::RemoteFidelityScorer>(clip);
  } else {
    synth = std::make_unique<genai::StubSynthesisClient>();
  }

  const fs::path out_root(args.out);
  fs::create_directories(out_root);
  std::vector<std::string> folders(scns.size());
  for (std::size_t j = 0; j < scns.size(); ++j) {
    folders[j] =
        std::string(scns[j].category.name()) + "_" + scns[j].scenario_id;
    fs::create_directories(out_root / folders[j]);
  }

  std::vector<ManifestRecord> records(images.size() * scns.size());
  std::atomic<std::size_t> next_image{0};
  std::atomic<bool> any_failed{false};

  const auto worker = [&] {
    for (std::size_t i = next_image.fetch_add(1); i < images.size();
         i = next_image.fetch_add(1)) {
      const std::string image_id = images[i].stem().string();
      ImageBuffer base;
      std::string load_error;
      try {
        base = io::read_png(images[i]);
      } catch (const std::exception& e) {
        load_error = e.what();
      }

      for (std::size_t j = 0; j < scns.size(); ++j) {
        const auto& scn = scns[j];
        ManifestRecord& rec = records[i * scns.size() + j];
        rec.category = scn.category.name();
        rec.image_id = image_id;
        rec.scenario_id = scn.scenario_id;
        rec.seed = scn.seed;
        rec.strength = scn.strength;
        if (!load_error.empty()) {
          rec.status = "failed";
          rec.error = load_error;
          any_failed = true;
          continue;
        }
        try {
          const ImageBuffer degraded = synth->synth_image(base, scn);
          double score;
          if (remote) {
            score = remote_scorer->score(degraded, scn.description);
          } else {
            genai::StubFidelityScorer scorer;
            scorer.register_base(image_id, base, scn.strength);
            score = scorer.score(degraded, scn.description, image_id);
          }
          rec.score = score;
          if (score >= args.gate_threshold) {
            const std::string rel = folders[j] + "/" + image_id + ".png";
            io::write_png(out_root / rel, degraded);
            rec.output = rel;
            rec.status = "ok";
          } else {
            rec.status = "rejected";
          }
        } catch (const std::exception& e) {
          rec.status = "failed";
          rec.error = e.what();
          any_failed = true;
        }
      }
    }
  };

  const unsigned jobs = std::max(1u, args.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::string manifest;
  std::size_t ok = 0, rejected = 0, failed = 0;
  for (const auto& rec : records) {
    nlohmann::json obj;
    obj["category"] = rec.category;
    if (!rec.error.empty()) obj["error"] = rec.error;
    obj["image_id"] = rec.image_id;
    obj["output"] = rec.output;
    obj["scenario_id"] = rec.scenario_id;
    obj["score"] = rec.score;
    obj["seed"] = rec.seed;
    obj["status"] = rec.status;
    obj["strength"] = rec.strength;
    manifest += obj.dump();
    manifest += '\n';
    if (rec.status == "ok") ++ok;
    if (rec.status == "rejected") ++rejected;
    if (rec.status == "failed") ++failed;
  }
  write_text(out_root / "manifest.jsonl", manifest);
  std::printf("injected %zu ok, %zu rejected by gate, %zu failed (%zu images x %zu scenarios)\n",
              ok, rejected, failed, images.size(), scns.size());
  return any_failed ? kExitPartial : kExitOk;
}

// --- fixtures ---------------------------------------------------------------

struct FixturesArgs {
  std::size_t count = 100;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_fixtures(const FixturesArgs& args) {
  const fs::path root(args.out);
  fs::create_directories(root / "NORMAL");

  // One frame resident at a time; only the truth records accumulate.
  std::vector<perception::PredictionRecord> truths;
  truths.reserve(args.count);
  for (std::size_t i = 0; i < args.count; ++i) {
    auto [frame, truth] = perception::synthetic_track_frame(i, args.seed);
    char name[32];
    std::snprintf(name, sizeof(name), "track_%05zu", i);
    io::write_png(root / "NORMAL" / (std::string(name) + ".png"), frame);
    truths.push_back(
        perception::PredictionRecord{name, "NORMAL", truth, truth});
  }
  const auto bytes = perception::write_predictions(truths);
  io::write_file(root / "truths.jsonl", std::span(bytes.data(), bytes.size()));
  std::printf("wrote %zu fixtures under %s\n", truths.size(),
              (root / "NORMAL").string().c_str());
  return kExitOk;
}

// --- predict ----------------------------------------------------------------

struct PredictArgs {
  std::vector<std::string> images;
  std::string truths;
  std::string out;
};

int cmd_predict(const PredictArgs& args) {
  const auto truth_bytes = io::read_file(args.truths);
  const auto truth_records = perception::read_predictions(
      std::span(truth_bytes.data(), truth_bytes.size()));
  std::map<std::string, perception::LanePoint> truth_by_id;
  for (const auto& r : truth_records) truth_by_id[r.image_id] = r.truth;

  std::vector<perception::PredictionRecord> out;
  for (const auto& root_str : args.images) {
    const fs::path root(root_str);
    if (!fs::is_directory(root)) throw Error("not a directory: " + root_str);
    std::vector<fs::path> group_dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
      if (entry.is_directory()) group_dirs.push_back(entry.path());
    }
    std::sort(group_dirs.begin(), group_dirs.end());
    for (const auto& dir : group_dirs) {
      const std::string group = dir.filename().string();
      for (const auto& png : list_pngs(dir)) {
        const std::string image_id = png.stem().string();
        const auto truth = truth_by_id.find(image_id);
        if (truth == truth_by_id.end()) {
          throw Error("no ground truth for image '" + image_id + "' in " +
                      args.truths);
        }
        const auto prediction =
            perception::estimate_lane_center(io::read_png(png));
        out.push_back(perception::PredictionRecord{image_id, group,
                                                   truth->second, prediction});
      }
    }
  }
  if (out.empty()) throw Error("no images found under the given roots");
  const auto bytes = perception::write_predictions(out);
  io::write_file(args.out, std::span(bytes.data(), bytes.size()));
  std::printf("wrote %zu predictions to %s\n", out.size(), args.out.c_str());
  return kExitOk;
}

// --- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::string predictions;
  std::string out;
  std::string baseline_group;
};

int cmd_evaluate(const EvaluateArgs& args) {
  const auto bytes = io::read_file(args.predictions);
  const auto records =
      perception::read_predictions(std::span(bytes.data(), bytes.size()));
  const auto summaries = metrics::summarize(records);

  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);
  write_text(out_dir / "metrics.csv", metrics::to_csv(summaries));
  std::printf("wrote %s (%zu groups)\n",
              (out_dir / "metrics.csv").string().c_str(), summaries.size());

  if (!args.baseline_group.empty()) {
    const auto baseline = std::find_if(
        summaries.begin(), summaries.end(),
        [&](const auto& s) { return s.group == args.baseline_group; });
    if (baseline == summaries.end()) {
      throw Error("baseline group '" + args.baseline_group +
                  "' not present in the predictions");
    }
    std::vector<metrics::MetricsSummary> faults;
    for (const auto& s : summaries) {
      if (s.group != args.baseline_group) faults.push_back(s);
    }
    const auto table = metrics::comparison_table(*baseline, faults);
    write_text(out_dir / "comparison.txt", table);
    std::fputs(table.c_str(), stdout);
  }
  return kExitOk;
}

// --- build-lut --------------------------------------------------------------

struct BuildLutArgs {
  std::string metrics_csv;
  std::string scenarios;
  std::string format = "auto";
  std::string out;
  std::string audit_csv;
  unsigned buckets = lut::kDefaultBucketCount;
  lut::RiskThresholds thresholds;
};

int cmd_build_lut(const BuildLutArgs& args) {
  const auto csv_bytes = io::read_file(args.metrics_csv);
  const auto summaries = metrics::from_csv(std::string_view(
      reinterpret_cast<const char*>(csv_bytes.data()), csv_bytes.size()));
  const auto scns = load_scenarios(args.scenarios, args.format);

  std::map<std::string, const scenario::FaultScenario*> by_folder;
  for (const auto& s : scns) {
    by_folder[std::string(s.category.name()) + "_" + s.scenario_id] = &s;
  }

  std::vector<lut::BuildInput> inputs;
  for (const auto& summary : summaries) {
    const auto it = by_folder.find(summary.group);
    if (it == by_folder.end()) {
      std::fprintf(stderr, "note: group '%s' has no matching scenario; skipped\n",
                   summary.group.c_str());
      continue;
    }
    inputs.push_back(lut::BuildInput{it->second->category,
                                     it->second->strength, summary});
  }
  if (inputs.empty()) {
    throw Error("no metrics group matched a scenario; nothing to build");
  }

  const auto table = lut::build(inputs, static_cast<std::uint8_t>(args.buckets),
                                args.thresholds);
  const auto bytes = lut::serialize(table);
  io::write_file(args.out, std::span(bytes.data(), bytes.size()));
  std::printf("built %zu entries (%zu bytes) from %zu matched groups -> %s\n",
              table.entries.size(), bytes.size(), inputs.size(),
              args.out.c_str());
  if (!args.audit_csv.empty()) {
    write_text(args.audit_csv, lut::entries_csv(table));
  }
  return kExitOk;
}

// --- query / bench ----------------------------------------------------------

lut::FaultLookupTable load_table(const std::string& path) {
  const auto bytes = io::read_file(path);
  return lut::deserialize(std::span(bytes.data(), bytes.size()));
}

struct QueryArgs {
  std::string lut_path;
  std::string category;
  double strength = 0.0;
};

int cmd_query(const QueryArgs& args) {
  const auto cat = require_category(args.category);
  const auto table = load_table(args.lut_path);
  const auto* entry = lut::query(table, cat, args.strength);
  const auto bucket = lut::bucket_of(args.strength, table.bucket_count);
  if (entry == nullptr) {
    std::printf("not covered: %s strength %.3f (bucket %u)\n",
                std::string(cat.name()).c_str(), args.strength, bucket);
    return kExitNotCovered;
  }
  std::printf("%s strength %.3f -> bucket %u%s\n",
              std::string(cat.name()).c_str(), args.strength,
              entry->key.bucket,
              entry->key.bucket == bucket ? "" : " (nearest)");
  std::printf("risk=%s n=%u r2=%.4f rmse=%.4f mae=%.4f within_0.10=%.3f within_0.20=%.3f\n",
              std::string(lut::risk_name(entry->risk)).c_str(), entry->n,
              static_cast<double>(entry->r2), static_cast<double>(entry->rmse),
              static_cast<double>(entry->mae),
              static_cast<double>(entry->within_010),
              static_cast<double>(entry->within_020));
  return kExitOk;
}

struct BenchArgs {
  std::string lut_path;
  std::size_t iters = 1000000;
};

int cmd_bench(const BenchArgs& args) {
  const auto table = load_table(args.lut_path);
  const auto report = lut::bench_query(table, args.iters);
  std::printf("iterations=%zu hits=%zu table_bytes=%zu entries=%zu\n",
              report.iterations, report.hits, report.table_bytes,
              table.entries.size());
  std::printf("latency p50=%lluns p99=%lluns max=%lluns\n",
              static_cast<unsigned long long>(report.p50_ns),
              static_cast<unsigned long long>(report.p99_ns),
              static_cast<unsigned long long>(report.max_ns));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"faultforge: offline fault synthesis and online fault-table queries"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file; flags take precedence");

  ScenariosArgs scenarios_args;
  auto* scenarios_cmd = app.add_subcommand(
      "scenarios", "Generate a deterministic scenario batch (JSONL)");
  scenarios_cmd->add_option("--category", scenarios_args.category,
                            "Fault category name")->required();
  scenarios_cmd->add_option("--count", scenarios_args.count, "Scenario count")
      ->check(CLI::Range(std::size_t{1}, std::size_t{10000000}));
  scenarios_cmd->add_option("--seed", scenarios_args.seed, "Master seed");
  scenarios_cmd->add_option("--out", scenarios_args.out, "Output JSONL path")
      ->required();

  InjectArgs inject_args;
  auto* inject_cmd = app.add_subcommand(
      "inject", "Degrade an image set per scenario and gate by fidelity");
  inject_cmd->add_option("--images", inject_args.images,
                         "Directory of input .png frames")->required();
  inject_cmd->add_option("--scenarios", inject_args.scenarios,
                         "Scenario file (JSONL or pipe text)")->required();
  inject_cmd->add_option("--out", inject_args.out, "Output tree")->required();
  inject_cmd->add_option("--backend", inject_args.backend,
                         "stub (local procedural) or remote")
      ->check(CLI::IsMember({"stub", "remote"}));
  inject_cmd->add_option("--scenario-format", inject_args.format,
                         "auto, jsonl or pipe")
      ->check(CLI::IsMember({"auto", "jsonl", "pipe"}));
  inject_cmd->add_option("--gate-threshold", inject_args.gate_threshold,
                         "Fidelity gate threshold in [-1,1]")
      ->check(CLI::Range(-1.0, 1.0));
  inject_cmd->add_option("--jobs", inject_args.jobs, "Worker threads")
      ->check(CLI::Range(1u, 64u));
  inject_cmd->add_option("--ldm-url", inject_args.ldm_url,
                         "Image-synthesis backend URL")
      ->envname(genai::kEnvLdmUrl);
  inject_cmd->add_option("--clip-url", inject_args.clip_url,
                         "Fidelity scorer backend URL")
      ->envname(genai::kEnvClipUrl);
  inject_cmd->add_option("--token", inject_args.token, "Bearer token")
      ->envname(genai::kEnvToken);
  inject_cmd->add_option("--timeout-ms", inject_args.timeout_ms,
                         "Per-request timeout");
  inject_cmd->add_option("--max-retries", inject_args.max_retries,
                         "Retry budget per request")
      ->check(CLI::Range(0, 5));

  FixturesArgs fixtures_args;
  auto* fixtures_cmd = app.add_subcommand(
      "fixtures", "Generate synthetic track frames with exact ground truth");
  fixtures_cmd->add_option("--count", fixtures_args.count, "Frame count")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
  fixtures_cmd->add_option("--seed", fixtures_args.seed, "Master seed");
  fixtures_cmd->add_option("--out", fixtures_args.out, "Output tree")
      ->required();

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand(
      "predict", "Run the classical estimator over grouped image trees");
  predict_cmd->add_option("--images", predict_args.images,
                          "Root(s) containing per-group folders")
      ->required()->expected(-1);
  predict_cmd->add_option("--truths", predict_args.truths,
                          "Ground-truth JSONL (from fixtures)")->required();
  predict_cmd->add_option("--out", predict_args.out,
                          "Output predictions JSONL")->required();

  EvaluateArgs evaluate_args;
  auto* evaluate_cmd = app.add_subcommand(
      "evaluate", "Summarize prediction metrics per group");
  evaluate_cmd->add_option("--predictions", evaluate_args.predictions,
                           "Predictions JSONL")->required();
  evaluate_cmd->add_option("--out", evaluate_args.out, "Report directory")
      ->required();
  evaluate_cmd->add_option("--baseline-group", evaluate_args.baseline_group,
                           "Group name for the comparison baseline");

  BuildLutArgs build_args;
  auto* build_cmd = app.add_subcommand(
      "build-lut", "Distill metrics into the binary lookup table");
  build_cmd->add_option("--metrics", build_args.metrics_csv,
                        "metrics.csv from evaluate")->required();
  build_cmd->add_option("--scenarios", build_args.scenarios,
                        "Scenario file used for injection (strength source)")
      ->required();
  build_cmd->add_option("--scenario-format", build_args.format,
                        "auto, jsonl or pipe")
      ->check(CLI::IsMember({"auto", "jsonl", "pipe"}));
  build_cmd->add_option("--out", build_args.out, "Output .flut path")
      ->required();
  build_cmd->add_option("--buckets", build_args.buckets, "Severity buckets")
      ->check(CLI::Range(2u, 64u));
  build_cmd->add_option("--audit-csv", build_args.audit_csv,
                        "Optional CSV export of the built entries");
  build_cmd->add_option("--critical-within", build_args.thresholds.critical_within_010,
                        "Critical when within-0.10 falls below this");
  build_cmd->add_option("--critical-r2", build_args.thresholds.critical_r2,
                        "Critical when R^2 falls below this");
  build_cmd->add_option("--degraded-within", build_args.thresholds.degraded_within_010,
                        "Degraded when within-0.10 falls below this");
  build_cmd->add_option("--degraded-rmse", build_args.thresholds.degraded_rmse,
                        "Degraded when RMSE exceeds this");

  QueryArgs query_args;
  auto* query_cmd = app.add_subcommand(
      "query", "Look up the assessment for (category, strength)");
  query_cmd->add_option("--lut", query_args.lut_path, "Table file")->required();
  query_cmd->add_option("--category", query_args.category, "Fault category")
      ->required();
  query_cmd->add_option("--strength", query_args.strength,
                        "Strength in [0,1]")
      ->required()->check(CLI::Range(0.0, 1.0));

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand(
      "bench", "Measure query latency on the resident table");
  bench_cmd->add_option("--lut", bench_args.lut_path, "Table file")->required();
  bench_cmd->add_option("--iters", bench_args.iters, "Query count")
      ->check(CLI::Range(std::size_t{1000}, std::size_t{10000000}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (scenarios_cmd->parsed()) return cmd_scenarios(scenarios_args);
    if (inject_cmd->parsed()) return cmd_inject(inject_args);
    if (fixtures_cmd->parsed()) return cmd_fixtures(fixtures_args);
    if (predict_cmd->parsed()) return cmd_predict(predict_args);
    if (evaluate_cmd->parsed()) return cmd_evaluate(evaluate_args);
    if (build_cmd->parsed()) return cmd_build_lut(build_args);
    if (query_cmd->parsed()) return cmd_query(query_args);
    if (bench_cmd->parsed()) return cmd_bench(bench_args);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
