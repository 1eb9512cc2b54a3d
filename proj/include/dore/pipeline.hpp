#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dore/backend.hpp"
#include "dore/dataset.hpp"
#include "dore/decoder.hpp"
#include "dore/evaluator.hpp"
#include "dore/ontology.hpp"
#include "dore/prompt.hpp"

namespace dore {

struct ExtractOptions {
  DecoderConfig decoder;
  PromptMode mode = PromptMode::per_type;
  std::string template_path;  // empty = built-in template
  std::uint64_t seed = 0;     // recorded in the manifest
  int workers = 1;            // dialogues decoded concurrently

  void validate() const;
};

enum class DialogueStatus { ok, skipped, failed };

const char* dialogue_status_name(DialogueStatus status);

struct DialogueExtraction {
  std::string dialogue_id;
  DialogueStatus status = DialogueStatus::ok;
  std::vector<RelationTriplet> relations;  // deduped union over the dialogue's prompts
  std::string note;                        // skip or failure message
};

struct ExtractRun {
  std::vector<DialogueExtraction> dialogues;  // dataset order
  Ontology ontology;
  bool partial = false;  // at least one dialogue failed

  /// Predictions of the dialogues that decoded, in dataset order.
  std::vector<DialoguePredictions> predictions() const;
};

/// Decodes every record and accumulates the ontology. Records without terms
/// are skipped with a note; a dialogue whose decode throws is marked failed
/// and the run partial. `workers` parallelizes across dialogues unless the
/// backend requires serial access; results are identical either way.
ExtractRun extract_relations(std::span<const DialogueRecord> records,
                             const ExtractOptions& options, const Backend& backend);

struct RunPaths {
  std::filesystem::path manifest;
  std::filesystem::path predictions;
  std::filesystem::path ontology;
  std::vector<std::filesystem::path> dialogues;  // one per record, dataset order
};

/// Writes predictions.jsonl, ontology.txt, one file per dialogue and
/// manifest.json under out_dir; every file lands via temp-file + rename. The
/// manifest snapshots the configuration, the backend descriptor, the seed and
/// a digest of the dataset bytes.
RunPaths write_extract_outputs(const std::filesystem::path& out_dir, const ExtractRun& run,
                               const ExtractOptions& options, const std::string& backend,
                               const std::string& dataset_path);

struct ExtractOutcome {
  ExtractRun run;
  DatasetStats stats;
  RunPaths paths;
};

/// load -> extract -> write, end to end.
ExtractOutcome run_extract(const std::string& dataset_path, const std::string& backend_descriptor,
                           const std::filesystem::path& out_dir, const ExtractOptions& options);

/// Reads a predictions file: one {"dialogue_id", "relations": [[head,
/// verbaliser, tail], ...]} object per line.
std::vector<DialoguePredictions> load_predictions(const std::string& path);

struct EvalOptions {
  ClosureMode closure = ClosureMode::transitive;
  MatchMode match = MatchMode::normalized;
};

struct EvalOutcome {
  EvalReport report;
  std::optional<EvalReport> baseline;  // the compared run, when requested
  std::string text;                    // rendered report (and comparison)
};

/// Scores a predictions file against the dataset's gold annotations.
/// compare_path adds a paired significance test against a second run. When
/// out_dir is non-empty, writes report.txt there.
EvalOutcome run_eval(const std::string& predictions_path, const std::string& dataset_path,
                     const EvalOptions& options,
                     const std::optional<std::string>& compare_path = std::nullopt,
                     const std::filesystem::path& out_dir = {});

struct SweepRow {
  double setting = 0.0;  // the grid value; k rows store the integer as double
  PRF global;
  int predicted = 0;  // deduped union size across dialogues
};

struct SweepGrid {
  std::vector<double> thresholds;
  std::vector<int> ks;  // exactly one of the two grids may be non-empty
};

struct SweepOutcome {
  std::string axis;  // "threshold" or "k"
  std::vector<SweepRow> rows;
  std::vector<std::vector<DialoguePredictions>> row_predictions;  // parallel to rows
  std::string table;
};

/// One extract+eval per grid point. Threshold sweeps decode once and re-select
/// from the cached cross-branch scores, which is exactly the selection a fresh
/// decode would make; k sweeps decode per grid point. When out_dir is
/// non-empty, writes sweep.txt there.
SweepOutcome run_sweep(const std::string& dataset_path, const std::string& backend_descriptor,
                       const ExtractOptions& options, const EvalOptions& eval_options,
                       const SweepGrid& grid, const std::filesystem::path& out_dir = {});

}  // namespace dore
