// Acceptance checks. Each criterion prints exactly one [PASS]/[FAIL] line;
// the exit status is the number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dore/cot.hpp"
#include "dore/mock_backend.hpp"
#include "dore/pipeline.hpp"
#include "dore/stats.hpp"
#include "json.hpp"
#include "support/compare.hpp"
#include "support/decode_oracle.hpp"
#include "support/eval_oracle.hpp"
#include "support/script_gen.hpp"
#include "support/stats_oracle.hpp"

using namespace dore;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

#ifndef DORE_DATA_DIR
#define DORE_DATA_DIR "data"
#endif

const std::string kToyDialogues = std::string(DORE_DATA_DIR) + "/toy/dialogues.jsonl";
const std::string kToyScript = std::string(DORE_DATA_DIR) + "/toy/script.json";
const std::string kFig1Script = std::string(DORE_DATA_DIR) + "/fig1/script.json";

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (!ok) {
      ++failed_;
      if (first_.empty()) first_ = what;
    }
  }
  bool ok() const { return failed_ == 0; }
  long long total() const { return total_; }
  std::string failure() const {
    std::ostringstream out;
    out << failed_ << " of " << total_ << " checks failed; first: " << first_;
    return out.str();
  }

 private:
  long long total_ = 0;
  long long failed_ = 0;
  std::string first_;
};

std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1fs", s);
  return buf;
}

RelationTriplet make(const std::string& head, RelationType type, const std::string& tail) {
  RelationTriplet t;
  t.head = head;
  t.tail = tail;
  t.relation = type;
  return t;
}

// ---- criterion 1: decode equals the brute-force reference -----------------

void criterion_decode_oracle(Check& check) {
  std::mt19937 rng(9001);
  for (int round = 0; round < 200; ++round) {
    testgen::Case c = testgen::small_unconstrained_case(rng);
    MockBackend backend(c.script);
    DecodeResult impl = decode_cot(backend.tokenize(c.prompt), c.terms, c.config, backend);
    oracle::Result ref = oracle::decode(c.script, c.prompt, c.terms, c.config);
    std::string diff = testgen::compare_with_oracle(impl, ref, c.config);
    check.expect(diff.empty(), "round " + std::to_string(round) + ": " + diff);
  }
}

// ---- criterion 2: constrained decoding is sound ----------------------------

void criterion_constraint_soundness(Check& check) {
  std::mt19937 rng(9002);
  for (int round = 0; round < 500; ++round) {
    testgen::Case c = testgen::constrained_case(rng);
    MockBackend backend(c.script);
    std::set<std::string> canonical;
    for (const std::string& term : c.terms) canonical.insert(canonicalize(term));

    DecodeResult result = decode_cot(backend.tokenize(c.prompt), c.terms, c.config, backend);
    check.expect(!result.partial, "round " + std::to_string(round) + ": partial decode");
    for (const Branch& branch : result.branches) {
      ParseOutcome parsed = extract_triplets(branch.text);
      check.expect(parsed.malformed_segments == 0,
                   "round " + std::to_string(round) + " branch " +
                       std::to_string(branch.index) + ": malformed segment in \"" + branch.text +
                       "\"");
      for (const ParsedTriplet& p : parsed.triplets) {
        check.expect(canonical.count(canonicalize(p.triplet.head)) == 1,
                     "round " + std::to_string(round) + ": head \"" + p.triplet.head +
                         "\" outside the term set");
        check.expect(canonical.count(canonicalize(p.triplet.tail)) == 1,
                     "round " + std::to_string(round) + ": tail \"" + p.triplet.tail +
                         "\" outside the term set");
      }
    }
  }
}

// ---- criterion 3: constraints never touch bracket-free generation ----------

void criterion_non_interference(Check& check) {
  std::mt19937 rng(9003);
  for (int round = 0; round < 100; ++round) {
    testgen::Case c = testgen::bracket_free_case(rng);
    MockBackend backend(c.script);
    DecoderConfig off = c.config;
    off.constrained = false;
    DecoderConfig on = c.config;
    on.constrained = true;

    DecodeResult plain = decode_cot(backend.tokenize(c.prompt), {}, off, backend);
    DecodeResult constrained = decode_cot(backend.tokenize(c.prompt), c.terms, on, backend);
    check.expect(plain.branches.size() == constrained.branches.size(),
                 "round " + std::to_string(round) + ": branch count differs");
    for (size_t i = 0; i < plain.branches.size(); ++i) {
      check.expect(plain.branches[i].text.find('[') == std::string::npos,
                   "round " + std::to_string(round) + ": generator emitted a bracket");
      const TokenSequence& a = plain.branches[i].tokens;
      const TokenSequence& b = constrained.branches[i].tokens;
      bool same = a.size() == b.size();
      for (size_t j = 0; same && j < a.size(); ++j) same = a[j].id == b[j].id;
      check.expect(same, "round " + std::to_string(round) + " branch " + std::to_string(i) +
                             ": token sequences differ");
    }
  }
}

// ---- criterion 4: the two-branch showcase ----------------------------------

void criterion_showcase(Check& check) {
  MockBackend backend(MockScript::from_file(kFig1Script));
  std::vector<std::string> terms{"hotel", "price range", "cheap"};
  std::vector<Token> prompt = backend.tokenize("relations:");

  DecoderConfig config;  // k=5 default
  DecodeResult wide = decode_cot(prompt, terms, config, backend);
  check.expect(wide.selected_branch == 1,
               "expected branch 1, selected " + std::to_string(wide.selected_branch));
  check.expect(wide.selected.size() == 1, "expected exactly one selected relation");
  if (wide.selected.size() == 1) {
    check.expect(wide.selected[0].head == "price range" &&
                     wide.selected[0].relation == RelationType::slot_value &&
                     wide.selected[0].tail == "cheap",
                 "selected " + bracket_form(wide.selected[0]));
  }

  DecoderConfig narrow = config;
  narrow.k = 1;
  DecodeResult greedy = decode_cot(prompt, terms, narrow, backend);
  check.expect(greedy.selected_branch == 0, "greedy run must select branch 0");
  check.expect(greedy.selected.size() == 1, "expected exactly one greedy relation");
  if (greedy.selected.size() == 1) {
    check.expect(greedy.selected[0].head == "hotel" &&
                     greedy.selected[0].relation == RelationType::slot_value &&
                     greedy.selected[0].tail == "cheap",
                 "greedy selected " + bracket_form(greedy.selected[0]));
  }
}

// ---- criterion 5: threshold sweep shrinks monotonically ---------------------

std::set<std::string> keys_of(const std::vector<RelationTriplet>& relations) {
  std::set<std::string> keys;
  for (const RelationTriplet& r : relations) keys.insert(r.key(MatchMode::normalized));
  return keys;
}

void criterion_threshold_sweep(Check& check) {
  ExtractOptions options;
  options.decoder.disparity_source = DisparitySource::raw;
  SweepGrid grid;
  for (int i = 0; i <= 10; ++i) grid.thresholds.push_back(i / 10.0);

  SweepOutcome sweep =
      run_sweep(kToyDialogues, "mock:" + kToyScript, options, EvalOptions{}, grid);
  check.expect(sweep.rows.size() == 11, "expected 11 rows");
  for (size_t i = 0; i + 1 < sweep.rows.size(); ++i) {
    check.expect(sweep.rows[i + 1].global.recall <= sweep.rows[i].global.recall + 1e-12,
                 "recall rose between thresholds " + std::to_string(sweep.rows[i].setting) +
                     " and " + std::to_string(sweep.rows[i + 1].setting));
    for (size_t d = 0; d < sweep.row_predictions[i].size(); ++d) {
      std::set<std::string> wide = keys_of(sweep.row_predictions[i][d].second);
      std::set<std::string> narrow = keys_of(sweep.row_predictions[i + 1][d].second);
      check.expect(
          std::includes(wide.begin(), wide.end(), narrow.begin(), narrow.end()),
          "selection at the higher threshold is not a subset for " +
              sweep.row_predictions[i][d].first);
    }
  }
  check.expect(sweep.rows.back().predicted == 0, "threshold 1.0 still selects relations");
  for (const auto& [id, relations] : sweep.row_predictions.back())
    check.expect(relations.empty(), "threshold 1.0 kept a relation for " + id);
}

// ---- criterion 6: wider k only adds branches and score ----------------------

void criterion_k_sweep(Check& check) {
  std::vector<DialogueRecord> records = load_dialogues(kToyDialogues);
  MockBackend backend(MockScript::from_file(kToyScript));
  PromptTemplate tmpl = PromptTemplate::built_in(PromptMode::per_type);
  const std::vector<int> ks = {1, 2, 3, 5};

  for (const DialogueRecord& record : records) {
    if (record.terms.empty()) continue;
    std::vector<std::string> prompts =
        render_prompts(tmpl, render_dialogue_text(record), record.terms);
    for (const std::string& prompt : prompts) {
      std::vector<Token> tokens = backend.tokenize(prompt);
      std::vector<int> previous_seeds;
      double previous_score = -2.0;
      for (int k : ks) {
        DecoderConfig config;
        config.k = k;
        DecodeResult result = decode_cot(tokens, record.terms, config, backend);
        std::vector<int> seeds;
        for (const Branch& b : result.branches) seeds.push_back(b.first_token().id);
        bool prefix = seeds.size() >= previous_seeds.size() &&
                      std::equal(previous_seeds.begin(), previous_seeds.end(), seeds.begin());
        check.expect(prefix, record.dialogue_id + ": first tokens at smaller k are not a prefix");
        double score = result.branch_scores[static_cast<size_t>(result.selected_branch)].score;
        check.expect(score >= previous_score - 1e-12,
                     record.dialogue_id + ": selected branch score dropped when k grew");
        previous_seeds = std::move(seeds);
        previous_score = score;
      }
    }
  }

  SweepGrid grid;
  grid.ks = ks;
  SweepOutcome sweep =
      run_sweep(kToyDialogues, "mock:" + kToyScript, ExtractOptions{}, EvalOptions{}, grid);
  for (size_t i = 0; i + 1 < sweep.rows.size(); ++i)
    check.expect(sweep.rows[i].global.f1 <= sweep.rows[i + 1].global.f1 + 1e-12,
                 "f1 dropped between k rows");
}

// ---- criterion 7: evaluation matches the enumeration reference --------------

void criterion_eval_oracle(Check& check) {
  std::mt19937 rng(9007);
  std::vector<std::string> pool = {"a", "A", "b", "b ", "c", "d", "e", "f", "g h", "i"};
  auto term = [&] { return pool[rng() % pool.size()]; };

  for (int round = 0; round < 100; ++round) {
    std::vector<RelationTriplet> gold, pred;
    int gold_n = static_cast<int>(rng() % 21);
    int pred_n = static_cast<int>(rng() % 21);
    for (int i = 0; i < gold_n; ++i)
      gold.push_back(make(term(), kAllRelationTypes[rng() % 4], term()));
    for (int i = 0; i < pred_n; ++i)
      pred.push_back(make(term(), kAllRelationTypes[rng() % 4], term()));
    MatchMode match = rng() % 2 ? MatchMode::normalized : MatchMode::byte_exact;
    ClosureMode mode = rng() % 2 ? ClosureMode::transitive : ClosureMode::pairwise;

    EquivalenceClosure closure = EquivalenceClosure::build(gold, mode, match);
    PRF impl = micro_prf(pred, gold, closure);
    PRF ref = evalref::brute_prf(pred, gold, gold, mode, match);
    bool same = impl.matched_pred == ref.matched_pred && impl.matched_gold == ref.matched_gold &&
                std::fabs(impl.precision - ref.precision) < 1e-12 &&
                std::fabs(impl.recall - ref.recall) < 1e-12 &&
                std::fabs(impl.f1 - ref.f1) < 1e-12;
    check.expect(same, "round " + std::to_string(round) + ": reference disagrees");
  }

  // Worked arithmetic: 3 of 5 predictions cover 3 of 4 gold items.
  std::vector<RelationTriplet> gold, pred;
  const char* names[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
  for (int i = 0; i < 4; ++i)
    gold.push_back(make(names[2 * i], RelationType::domain_slot, names[2 * i + 1]));
  for (int i = 0; i < 3; ++i) pred.push_back(gold[i]);
  pred.push_back(make("b", RelationType::domain_slot, "a"));
  pred.push_back(make("d", RelationType::domain_slot, "c"));
  PRF prf = micro_prf(pred, gold, EquivalenceClosure());
  check.expect(std::fabs(prf.precision - 0.600) < 1e-12, "worked example precision");
  check.expect(std::fabs(prf.recall - 0.750) < 1e-12, "worked example recall");
  check.expect(std::fabs(prf.f1 - 2.0 / 3.0) < 1e-12, "worked example f1");
}

// ---- criterion 8: the significance test matches quadrature ------------------

void criterion_stats_oracle(Check& check) {
  std::mt19937 rng(9008);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int round = 0; round < 50; ++round) {
    size_t n = 3 + rng() % 28;
    std::vector<double> a(n), b(n);
    for (size_t i = 0; i < n; ++i) {
      a[i] = unit(rng);
      // Occasionally force identical vectors to exercise the degenerate path.
      b[i] = (round % 10 == 9) ? a[i] : unit(rng);
    }
    TTestResult impl = paired_ttest(a, b);
    statref::Test ref = statref::paired(a, b);
    check.expect(impl.degenerate == ref.degenerate,
                 "round " + std::to_string(round) + ": degenerate flag differs");
    check.expect(std::fabs(impl.t - ref.t) < 1e-6,
                 "round " + std::to_string(round) + ": t differs");
    check.expect(std::fabs(impl.df - ref.df) < 1e-6,
                 "round " + std::to_string(round) + ": df differs");
    check.expect(std::fabs(impl.p_value - ref.p) < 1e-6,
                 "round " + std::to_string(round) + ": p differs");
    bool ref_significant = !ref.degenerate && ref.p < 0.05;
    check.expect(impl.significant == ref_significant,
                 "round " + std::to_string(round) + ": 5% decision differs");
  }
}

// ---- criterion 9: repeated extraction is bit-for-bit stable -----------------

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void criterion_reproducible(Check& check) {
  fs::path out1 = fs::temp_directory_path() / "dore_acceptance_run1";
  fs::path out2 = fs::temp_directory_path() / "dore_acceptance_run2";
  fs::remove_all(out1);
  fs::remove_all(out2);

  std::string backend = "mock:" + kToyScript;
  ExtractOutcome first = run_extract(kToyDialogues, backend, out1, ExtractOptions{});
  ExtractOutcome second = run_extract(kToyDialogues, backend, out2, ExtractOptions{});
  check.expect(!first.run.partial, "first run is partial");
  check.expect(slurp(first.paths.predictions) == slurp(second.paths.predictions),
               "predictions files differ between runs");
  check.expect(slurp(first.paths.ontology) == slurp(second.paths.ontology),
               "ontology files differ between runs");

  std::vector<DialogueRecord> records = load_dialogues(kToyDialogues);
  EvalReport ra = evaluate(load_predictions(first.paths.predictions.string()), records,
                           ClosureMode::transitive, MatchMode::normalized);
  EvalReport rb = evaluate(load_predictions(second.paths.predictions.string()), records,
                           ClosureMode::transitive, MatchMode::normalized);
  check.expect(ra.global.precision == rb.global.precision &&
                   ra.global.recall == rb.global.recall && ra.global.f1 == rb.global.f1,
               "global scores differ between runs");
  for (size_t i = 0; i < 4; ++i)
    check.expect(ra.per_type[i].f1 == rb.per_type[i].f1, "per-type scores differ between runs");
  check.expect(ra.dialogue_f1 == rb.dialogue_f1, "per-dialogue vectors differ between runs");

  fs::remove_all(out1);
  fs::remove_all(out2);
}

// ---- criterion 10: the bundled dataset reads back as documented -------------

void criterion_dataset_stats(Check& check) {
  std::vector<DialogueRecord> records = load_dialogues(kToyDialogues);
  DatasetStats stats = compute_stats(records);
  check.expect(stats.dialogues == 10, "dialogue count");
  check.expect(stats.with_gold == 9, "gold-annotated count");
  check.expect(stats.gold_instances == 24, "gold instance count");
  check.expect(stats.unique_per_type[0] == 6, "domain-slot count");
  check.expect(stats.unique_per_type[1] == 8, "slot-value count");
  check.expect(stats.unique_per_type[2] == 4, "value-domain count");
  check.expect(stats.unique_per_type[3] == 2, "equivalence count");
  check.expect(stats.unique_relations == 20, "unique relation count");
  check.expect(stats.unique_terms == 16, "unique term count");
}

struct Criterion {
  std::string label;
  std::function<void(Check&)> run;
  double time_limit = 0.0;  // seconds; 0 = no limit
};

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"decoding matches the brute-force reference on 200 random scripts (1e-12)",
       criterion_decode_oracle, 60.0},
      {"500 random constrained decodes emit only well-formed triplets over the term set",
       criterion_constraint_soundness, 60.0},
      {"constraints leave 100 bracket-free generations token-identical",
       criterion_non_interference, 0.0},
      {"showcase prompt: branch search corrects the greedy relation", criterion_showcase, 0.0},
      {"threshold sweep on the bundled dataset shrinks monotonically to empty",
       criterion_threshold_sweep, 0.0},
      {"k sweep grows seeds by prefix and never lowers the selected score or f1",
       criterion_k_sweep, 0.0},
      {"evaluation matches the enumeration reference on 100 instances plus the worked example",
       criterion_eval_oracle, 0.0},
      {"paired t-test matches numeric quadrature on 50 vectors (1e-6, 5% decisions)",
       criterion_stats_oracle, 0.0},
      {"two extraction runs are byte-identical and score identically", criterion_reproducible,
       0.0},
      {"the bundled dataset loads with its documented statistics", criterion_dataset_stats, 0.0},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    std::string error;
    auto started = std::chrono::steady_clock::now();
    try {
      criteria[i].run(check);
    } catch (const std::exception& e) {
      error = std::string("unexpected exception: ") + e.what();
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                         .count();
    if (criteria[i].time_limit > 0.0 && elapsed > criteria[i].time_limit) {
      check.expect(false, "exceeded " + format_seconds(criteria[i].time_limit) + " budget");
    }

    bool passed = error.empty() && check.ok();
    std::printf("[%s] criterion %zu: %s (%lld checks, %s)\n", passed ? "PASS" : "FAIL", i + 1,
                criteria[i].label.c_str(), check.total(), format_seconds(elapsed).c_str());
    if (!passed) {
      std::printf("       %s\n", error.empty() ? check.failure().c_str() : error.c_str());
      ++failures;
    }
  }
  return failures;
}
