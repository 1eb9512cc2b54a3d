#include "dore/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "dore/cot.hpp"
#include "dore/error.hpp"
#include "json.hpp"

namespace dore {

namespace {

using nlohmann::json;

PromptTemplate load_template(const ExtractOptions& options) {
  if (options.template_path.empty()) return PromptTemplate::built_in(options.mode);
  return PromptTemplate::from_file(options.template_path, options.mode);
}

/// Per-prompt decode results of one dialogue; empty unless status is ok.
struct DialogueDecodes {
  DialogueStatus status = DialogueStatus::ok;
  std::string note;
  std::vector<DecodeResult> results;
};

DialogueDecodes decode_dialogue(const DialogueRecord& record, const ExtractOptions& options,
                                const PromptTemplate& tmpl, const Backend& backend) {
  DialogueDecodes out;
  if (record.terms.empty()) {
    out.status = DialogueStatus::skipped;
    out.note = "no terms; nothing to extract";
    return out;
  }
  try {
    std::vector<std::string> prompts =
        render_prompts(tmpl, render_dialogue_text(record), record.terms);
    for (const std::string& prompt : prompts) {
      DecodeResult result =
          decode_cot(backend.tokenize(prompt), record.terms, options.decoder, backend, 1);
      if (result.partial) fail(ErrorCode::backend_error, result.branch_errors.front());
      out.results.push_back(std::move(result));
    }
  } catch (const std::exception& e) {
    out.status = DialogueStatus::failed;
    out.note = e.what();
    out.results.clear();
  }
  return out;
}

std::vector<RelationTriplet> selected_union(const DialogueDecodes& decodes, MatchMode match) {
  std::vector<RelationTriplet> all;
  for (const DecodeResult& result : decodes.results)
    all.insert(all.end(), result.selected.begin(), result.selected.end());
  return dedupe(all, match);
}

/// The selection a fresh decode at this threshold would make, read off the
/// cached cross-branch scores.
std::vector<RelationTriplet> threshold_union(const DialogueDecodes& decodes, double threshold,
                                             MatchMode match) {
  std::vector<RelationTriplet> all;
  for (const DecodeResult& result : decodes.results) {
    std::vector<RelationTriplet> picked = select_by_threshold(result.cross_scores, threshold);
    all.insert(all.end(), picked.begin(), picked.end());
  }
  return dedupe(all, match);
}

/// Index-parallel loop; fn must not throw.
void for_each_index(size_t n, int workers, const std::function<void(size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> cursor{0};
  auto drain = [&] {
    for (size_t i = cursor.fetch_add(1); i < n; i = cursor.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  size_t count = std::min(static_cast<size_t>(workers), n);
  pool.reserve(count);
  for (size_t t = 0; t < count; ++t) pool.emplace_back(drain);
  for (std::thread& t : pool) t.join();
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return "fnv1a:" + hex64(fnv1a(buffer.str()));
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io_error, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) fail(ErrorCode::io_error, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string sanitize_id(const std::string& id) {
  std::string out;
  for (char c : id)
    out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
  return out.empty() ? "dialogue" : out;
}

json relations_json(std::span<const RelationTriplet> relations) {
  json arr = json::array();
  for (const RelationTriplet& t : relations)
    arr.push_back(json::array({t.head, std::string(verbaliser(t.relation)), t.tail}));
  return arr;
}

json decoder_json(const DecoderConfig& config) {
  return json{{"k", config.k},
              {"max_new_tokens", config.max_new_tokens},
              {"constrained", config.constrained},
              {"disparity_source", disparity_source_name(config.disparity_source)},
              {"aggregation", aggregation_name(config.aggregation)},
              {"selection", selection_name(config.selection)},
              {"threshold", config.threshold},
              {"match", match_mode_name(config.match)},
              {"top_m", config.top_m}};
}

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int union_size(const std::vector<DialoguePredictions>& predictions, MatchMode match) {
  std::vector<RelationTriplet> all;
  for (const auto& [id, relations] : predictions)
    all.insert(all.end(), relations.begin(), relations.end());
  return static_cast<int>(dedupe(all, match).size());
}

std::string format_sweep(const SweepOutcome& outcome) {
  std::ostringstream out;
  out << std::left << std::setw(11) << outcome.axis << std::right << std::setw(10) << "predicted"
      << std::setw(11) << "precision" << std::setw(9) << "recall" << std::setw(9) << "f1"
      << "\n";
  out << std::fixed;
  for (const SweepRow& row : outcome.rows) {
    std::ostringstream setting;
    if (outcome.axis == "k")
      setting << static_cast<int>(row.setting);
    else
      setting << std::fixed << std::setprecision(2) << row.setting;
    out << std::left << std::setw(11) << setting.str() << std::right << std::setw(10)
        << row.predicted << std::setw(11) << std::setprecision(4) << row.global.precision
        << std::setw(9) << row.global.recall << std::setw(9) << row.global.f1 << "\n";
  }
  return out.str();
}

}  // namespace

void ExtractOptions::validate() const {
  decoder.validate();
  if (workers < 1) fail(ErrorCode::invalid_argument, "workers must be >= 1");
}

const char* dialogue_status_name(DialogueStatus status) {
  switch (status) {
    case DialogueStatus::ok: return "ok";
    case DialogueStatus::skipped: return "skipped";
    case DialogueStatus::failed: return "failed";
  }
  return "ok";
}

std::vector<DialoguePredictions> ExtractRun::predictions() const {
  std::vector<DialoguePredictions> out;
  for (const DialogueExtraction& d : dialogues)
    if (d.status == DialogueStatus::ok) out.emplace_back(d.dialogue_id, d.relations);
  return out;
}

ExtractRun extract_relations(std::span<const DialogueRecord> records,
                             const ExtractOptions& options, const Backend& backend) {
  options.validate();
  PromptTemplate tmpl = load_template(options);
  int workers = backend.info().serialized ? 1 : options.workers;

  ExtractRun run;
  run.dialogues.resize(records.size());
  for_each_index(records.size(), workers, [&](size_t i) {
    DialogueDecodes decodes = decode_dialogue(records[i], options, tmpl, backend);
    DialogueExtraction& entry = run.dialogues[i];
    entry.dialogue_id = records[i].dialogue_id;
    entry.status = decodes.status;
    entry.note = decodes.note;
    if (decodes.status == DialogueStatus::ok)
      entry.relations = selected_union(decodes, options.decoder.match);
  });
  for (const DialogueExtraction& d : run.dialogues)
    if (d.status == DialogueStatus::failed) run.partial = true;
  run.ontology = accumulate(run.predictions(), options.decoder.match);
  return run;
}

RunPaths write_extract_outputs(const std::filesystem::path& out_dir, const ExtractRun& run,
                               const ExtractOptions& options, const std::string& backend,
                               const std::string& dataset_path) {
  std::filesystem::create_directories(out_dir / "dialogues");

  RunPaths paths;
  paths.manifest = out_dir / "manifest.json";
  paths.predictions = out_dir / "predictions.jsonl";
  paths.ontology = out_dir / "ontology.txt";

  std::string lines;
  for (const DialogueExtraction& d : run.dialogues) {
    if (d.status != DialogueStatus::ok) continue;
    json line{{"dialogue_id", d.dialogue_id}, {"relations", relations_json(d.relations)}};
    lines += line.dump();
    lines += '\n';
  }
  atomic_write(paths.predictions, lines);
  atomic_write(paths.ontology, format_ontology(run.ontology));

  json dialogue_paths = json::object();
  json skipped = json::array();
  json failed = json::array();
  for (size_t i = 0; i < run.dialogues.size(); ++i) {
    const DialogueExtraction& d = run.dialogues[i];
    char index[8];
    std::snprintf(index, sizeof index, "%04zu", i);
    std::string name = std::string(index) + "-" + sanitize_id(d.dialogue_id) + ".json";
    std::filesystem::path file = out_dir / "dialogues" / name;
    json body{{"dialogue_id", d.dialogue_id},
              {"status", dialogue_status_name(d.status)},
              {"note", d.note},
              {"relations", relations_json(d.relations)}};
    atomic_write(file, body.dump(2) + "\n");
    paths.dialogues.push_back(file);
    dialogue_paths[d.dialogue_id] = "dialogues/" + name;
    if (d.status == DialogueStatus::skipped) skipped.push_back(d.dialogue_id);
    if (d.status == DialogueStatus::failed) failed.push_back(d.dialogue_id);
  }

  PromptTemplate tmpl = load_template(options);
  json manifest{
      {"command", "extract"},
      {"created_utc", timestamp_utc()},
      {"backend", backend},
      {"dataset",
       {{"path", dataset_path},
        {"digest", file_digest(dataset_path)},
        {"records", run.dialogues.size()}}},
      {"decoder", decoder_json(options.decoder)},
      {"mode", prompt_mode_name(options.mode)},
      {"template",
       {{"path", options.template_path.empty() ? "built-in" : options.template_path},
        {"digest", "fnv1a:" + hex64(fnv1a(tmpl.text))}}},
      {"seed", options.seed},
      {"workers", options.workers},
      {"partial", run.partial},
      {"skipped", skipped},
      {"failed", failed},
      {"outputs",
       {{"predictions", "predictions.jsonl"},
        {"ontology", "ontology.txt"},
        {"dialogues", dialogue_paths}}}};
  atomic_write(paths.manifest, manifest.dump(2) + "\n");
  return paths;
}

ExtractOutcome run_extract(const std::string& dataset_path, const std::string& backend_descriptor,
                           const std::filesystem::path& out_dir, const ExtractOptions& options) {
  options.validate();
  std::vector<DialogueRecord> records = load_dialogues(dataset_path);
  std::unique_ptr<Backend> backend = open_backend(backend_descriptor);

  ExtractOutcome outcome;
  outcome.stats = compute_stats(records);
  outcome.run = extract_relations(records, options, *backend);
  outcome.paths =
      write_extract_outputs(out_dir, outcome.run, options, backend_descriptor, dataset_path);
  return outcome;
}

std::vector<DialoguePredictions> load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open predictions file: " + path);

  auto fail_at = [&](int line, const std::string& message) {
    fail(ErrorCode::parse_error, path + ":" + std::to_string(line) + ": " + message);
  };

  std::vector<DialoguePredictions> out;
  std::unordered_set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      fail_at(line_no, e.what());
    }
    if (!j.is_object() || !j.contains("dialogue_id") || !j["dialogue_id"].is_string())
      fail_at(line_no, "each line needs a dialogue_id string");
    std::string id = j["dialogue_id"].get<std::string>();
    if (!seen.insert(id).second) fail_at(line_no, "duplicate dialogue_id \"" + id + "\"");
    if (!j.contains("relations") || !j["relations"].is_array())
      fail_at(line_no, "record \"" + id + "\" needs a relations array");
    std::vector<RelationTriplet> relations;
    for (const auto& r : j["relations"]) {
      if (!r.is_array() || r.size() != 3 || !r[0].is_string() || !r[1].is_string() ||
          !r[2].is_string())
        fail_at(line_no, "record \"" + id + "\": relations must be [head, verbaliser, tail]");
      std::optional<RelationType> type = relation_from_verbaliser(r[1].get<std::string>());
      if (!type)
        fail_at(line_no,
                "record \"" + id + "\": unknown verbaliser \"" + r[1].get<std::string>() + "\"");
      RelationTriplet t;
      t.head = r[0].get<std::string>();
      t.tail = r[2].get<std::string>();
      t.relation = *type;
      if (t.head.empty() || t.tail.empty())
        fail_at(line_no, "record \"" + id + "\": empty head or tail");
      relations.push_back(std::move(t));
    }
    out.emplace_back(std::move(id), std::move(relations));
  }
  return out;
}

EvalOutcome run_eval(const std::string& predictions_path, const std::string& dataset_path,
                     const EvalOptions& options, const std::optional<std::string>& compare_path,
                     const std::filesystem::path& out_dir) {
  std::vector<DialogueRecord> records = load_dialogues(dataset_path);
  std::vector<DialoguePredictions> predictions = load_predictions(predictions_path);

  EvalOutcome outcome;
  outcome.report = evaluate(predictions, records, options.closure, options.match);
  if (compare_path) {
    std::vector<DialoguePredictions> other = load_predictions(*compare_path);
    EvalReport baseline = evaluate(other, records, options.closure, options.match);
    outcome.report.significance = compare_runs(outcome.report, baseline);
    outcome.baseline = std::move(baseline);
  }
  outcome.text = format_report(outcome.report);
  if (outcome.baseline) outcome.text += "\ncompared run:\n" + format_report(*outcome.baseline);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    atomic_write(out_dir / "report.txt", outcome.text);
  }
  return outcome;
}

SweepOutcome run_sweep(const std::string& dataset_path, const std::string& backend_descriptor,
                       const ExtractOptions& options, const EvalOptions& eval_options,
                       const SweepGrid& grid, const std::filesystem::path& out_dir) {
  options.validate();
  bool over_threshold = !grid.thresholds.empty();
  bool over_k = !grid.ks.empty();
  if (over_threshold == over_k)
    fail(ErrorCode::invalid_argument, "exactly one sweep grid (threshold or k) must be given");
  for (double t : grid.thresholds)
    if (t < 0.0 || t > 1.0) fail(ErrorCode::invalid_argument, "threshold grid values lie in [0,1]");
  for (int k : grid.ks)
    if (k < 1) fail(ErrorCode::invalid_argument, "k grid values must be >= 1");

  std::vector<DialogueRecord> records = load_dialogues(dataset_path);
  std::unique_ptr<Backend> backend = open_backend(backend_descriptor);

  SweepOutcome outcome;
  auto add_row = [&](double setting, std::vector<DialoguePredictions> predictions) {
    SweepRow row;
    row.setting = setting;
    row.global = evaluate(predictions, records, eval_options.closure, eval_options.match).global;
    row.predicted = union_size(predictions, options.decoder.match);
    outcome.rows.push_back(row);
    outcome.row_predictions.push_back(std::move(predictions));
  };

  if (over_threshold) {
    outcome.axis = "threshold";
    PromptTemplate tmpl = load_template(options);
    int workers = backend->info().serialized ? 1 : options.workers;
    std::vector<DialogueDecodes> decodes(records.size());
    for_each_index(records.size(), workers, [&](size_t i) {
      decodes[i] = decode_dialogue(records[i], options, tmpl, *backend);
    });
    for (double threshold : grid.thresholds) {
      std::vector<DialoguePredictions> predictions;
      for (size_t i = 0; i < records.size(); ++i)
        if (decodes[i].status == DialogueStatus::ok)
          predictions.emplace_back(records[i].dialogue_id,
                                   threshold_union(decodes[i], threshold, options.decoder.match));
      add_row(threshold, std::move(predictions));
    }
  } else {
    outcome.axis = "k";
    for (int k : grid.ks) {
      ExtractOptions point = options;
      point.decoder.k = k;
      ExtractRun run = extract_relations(records, point, *backend);
      add_row(k, run.predictions());
    }
  }

  outcome.table = format_sweep(outcome);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    atomic_write(out_dir / "sweep.txt", outcome.table);
  }
  return outcome;
}

}  // namespace dore
