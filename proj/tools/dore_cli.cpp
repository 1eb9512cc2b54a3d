// Command-line front end. Links the C surface only.
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "dore/dore.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitError = 2;

volatile std::sig_atomic_t g_stop = 0;

void handle_signal(int) { g_stop = 1; }

int fail(const std::string& context) {
  std::cerr << "error: " << context;
  const char* detail = dore_last_error();
  if (detail && *detail) std::cerr << ": " << detail;
  std::cerr << "\n";
  return kExitError;
}

// Owns a dore_options handle and the CLI flags that feed it.
class OptionSet {
 public:
  OptionSet() : handle_(dore_options_new()) {}
  ~OptionSet() { dore_options_free(handle_); }
  OptionSet(const OptionSet&) = delete;
  OptionSet& operator=(const OptionSet&) = delete;

  void add(CLI::App* cmd, const std::string& flag, const std::string& key,
           const std::string& help) {
    entries_.push_back(new Entry{key, "", nullptr});
    Entry* entry = entries_.back();
    entry->option = cmd->add_option(flag, entry->value, help);
  }

  // Applies every flag the user supplied; returns false on a bad value.
  bool apply() {
    for (Entry* entry : entries_) {
      if (entry->option->count() == 0) continue;
      if (dore_options_set(handle_, entry->key.c_str(), entry->value.c_str()) != DORE_OK) {
        fail("bad option value");
        return false;
      }
    }
    return true;
  }

  const dore_options* get() const { return handle_; }

 private:
  struct Entry {
    std::string key;
    std::string value;
    CLI::Option* option;
  };
  dore_options* handle_;
  std::vector<Entry*> entries_;  // leaked at exit; the process is short-lived
};

void add_decode_flags(CLI::App* cmd, OptionSet& options) {
  options.add(cmd, "--k", "k", "branches to explore from the top-k first tokens");
  options.add(cmd, "--max-new-tokens", "max-new-tokens", "per-branch generation cap");
  options.add(cmd, "--constrained", "constrained", "bracket grammar enforcement (on|off)");
  options.add(cmd, "--disparity-source", "disparity-source",
              "probabilities scored under constraints (masked|raw)");
  options.add(cmd, "--aggregation", "aggregation",
              "component-to-triplet fold (mean|median|max|min)");
  options.add(cmd, "--selection", "selection", "branch-argmax|threshold");
  options.add(cmd, "--threshold", "threshold", "cross-branch score cutoff in [0,1]");
  options.add(cmd, "--top-m", "top-m", "distribution entries requested (0 = backend maximum)");
  options.add(cmd, "--match", "match", "term comparison (normalized|byte-exact)");
  options.add(cmd, "--mode", "mode", "prompt layout (per-type|joint)");
  options.add(cmd, "--template", "template", "prompt template file");
  options.add(cmd, "--seed", "seed", "seed recorded in the manifest");
  options.add(cmd, "--workers", "workers", "dialogue-level concurrency");
}

bool resolve_backend(std::string& backend) {
  if (!backend.empty()) return true;
  const char* env = std::getenv("DORE_BACKEND_URL");
  if (env && *env) {
    backend = env;
    return true;
  }
  std::cerr << "error: no backend given (use --backend or set DORE_BACKEND_URL)\n";
  return false;
}

int run_serve(const std::string& script, const std::string& host, int port) {
  dore_mock_server* server = dore_mock_server_start(script.c_str(), host.c_str(), port);
  if (!server) return fail("cannot start server");
  std::cout << "serving " << dore_mock_server_url(server) << " (ctrl-c to stop)" << std::endl;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  dore_mock_server_stop(server);
  std::cout << "stopped\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dialogue ontology relation extraction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("dore ") + dore_version());

  // extract
  CLI::App* extract = app.add_subcommand("extract", "decode a dataset and write an ontology");
  std::string extract_dataset, extract_backend, extract_out;
  extract->add_option("dataset", extract_dataset, "dialogue JSONL file")->required();
  extract->add_option("--backend", extract_backend, "mock:PATH or http:URL");
  extract->add_option("--out", extract_out, "output directory")->required();
  OptionSet extract_options;
  add_decode_flags(extract, extract_options);

  // eval
  CLI::App* eval = app.add_subcommand("eval", "score predictions against gold annotations");
  std::string eval_predictions, eval_dataset, eval_compare, eval_out;
  eval->add_option("predictions", eval_predictions, "predictions JSONL file")->required();
  eval->add_option("dataset", eval_dataset, "dialogue JSONL file with gold relations")->required();
  eval->add_option("--compare", eval_compare, "second predictions file for a paired t-test");
  eval->add_option("--out", eval_out, "directory for report.txt");
  OptionSet eval_options;
  eval_options.add(eval, "--closure", "closure",
                   "equivalence handling in scoring (transitive|pairwise)");
  eval_options.add(eval, "--match", "match", "term comparison (normalized|byte-exact)");

  // sweep
  CLI::App* sweep = app.add_subcommand("sweep", "re-score a dataset across a parameter grid");
  std::string sweep_dataset, sweep_backend, sweep_out;
  std::vector<double> sweep_thresholds;
  std::vector<int> sweep_ks;
  sweep->add_option("dataset", sweep_dataset, "dialogue JSONL file")->required();
  sweep->add_option("--backend", sweep_backend, "mock:PATH or http:URL");
  sweep->add_option("--out", sweep_out, "directory for sweep.txt");
  sweep->add_option("--thresholds", sweep_thresholds, "threshold grid, e.g. 0,0.25,0.5")
      ->delimiter(',');
  sweep->add_option("--ks", sweep_ks, "k grid, e.g. 1,2,3,5")->delimiter(',');
  OptionSet sweep_options;
  add_decode_flags(sweep, sweep_options);
  sweep_options.add(sweep, "--closure", "closure",
                    "equivalence handling in scoring (transitive|pairwise)");

  // serve-mock
  CLI::App* serve = app.add_subcommand("serve-mock", "serve a scripted backend over HTTP");
  std::string serve_script, serve_host = "127.0.0.1";
  int serve_port = 0;
  serve->add_option("script", serve_script, "backend script JSON file")->required();
  serve->add_option("--host", serve_host, "bind address");
  serve->add_option("--port", serve_port, "bind port (0 picks a free port)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  if (extract->parsed()) {
    if (!resolve_backend(extract_backend)) return kExitError;
    if (!extract_options.apply()) return kExitError;
    char* summary = nullptr;
    int partial = 0;
    if (dore_extract(extract_dataset.c_str(), extract_backend.c_str(), extract_out.c_str(),
                     extract_options.get(), &summary, &partial) != DORE_OK)
      return fail("extract failed");
    std::cout << summary;
    dore_string_free(summary);
    return partial ? kExitPartial : kExitOk;
  }

  if (eval->parsed()) {
    if (!eval_options.apply()) return kExitError;
    char* report = nullptr;
    if (dore_eval(eval_predictions.c_str(), eval_dataset.c_str(), eval_compare.c_str(),
                  eval_out.c_str(), eval_options.get(), &report) != DORE_OK)
      return fail("eval failed");
    std::cout << report;
    dore_string_free(report);
    return kExitOk;
  }

  if (sweep->parsed()) {
    if (!resolve_backend(sweep_backend)) return kExitError;
    if (!sweep_options.apply()) return kExitError;
    char* table = nullptr;
    if (dore_sweep(sweep_dataset.c_str(), sweep_backend.c_str(), sweep_out.c_str(),
                   sweep_options.get(), sweep_thresholds.data(), sweep_thresholds.size(),
                   sweep_ks.data(), sweep_ks.size(), &table) != DORE_OK)
      return fail("sweep failed");
    std::cout << table;
    dore_string_free(table);
    return kExitOk;
  }

  return run_serve(serve_script, serve_host, serve_port);
}
