#include "dore/dore.h"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "dore/error.hpp"
#include "dore/mock_server.hpp"
#include "dore/pipeline.hpp"

struct dore_options {
  dore::ExtractOptions extract;
  dore::EvalOptions eval;
};

struct dore_mock_server {
  dore::MockServer server;
  std::string url;
};

namespace {

thread_local std::string g_error;

dore_status status_of(dore::ErrorCode code) {
  switch (code) {
    case dore::ErrorCode::invalid_argument: return DORE_INVALID_ARGUMENT;
    case dore::ErrorCode::parse_error: return DORE_PARSE_ERROR;
    case dore::ErrorCode::io_error: return DORE_IO_ERROR;
    case dore::ErrorCode::backend_error: return DORE_BACKEND_ERROR;
    case dore::ErrorCode::unsupported: return DORE_UNSUPPORTED;
    case dore::ErrorCode::internal: return DORE_INTERNAL;
  }
  return DORE_INTERNAL;
}

template <typename Fn>
dore_status guarded(Fn&& fn) {
  try {
    fn();
    g_error.clear();
    return DORE_OK;
  } catch (const dore::Error& e) {
    g_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_error = e.what();
    return DORE_INTERNAL;
  } catch (...) {
    g_error = "unknown error";
    return DORE_INTERNAL;
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) dore::fail(dore::ErrorCode::invalid_argument, what);
}

long long parse_integer(const std::string& key, const std::string& value) {
  long long parsed = 0;
  const char* first = value.c_str();
  const char* last = first + value.size();
  auto [end, ec] = std::from_chars(first, last, parsed);
  require(ec == std::errc() && end == last && !value.empty(),
          "option " + key + ": expected an integer, got \"" + value + "\"");
  return parsed;
}

double parse_real(const std::string& key, const std::string& value) {
  size_t used = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == value.size() && !value.empty(),
          "option " + key + ": expected a number, got \"" + value + "\"");
  return parsed;
}

bool parse_switch(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  dore::fail(dore::ErrorCode::invalid_argument,
             "option " + key + ": expected on or off, got \"" + value + "\"");
}

void set_option(dore_options& options, const std::string& key, const std::string& value) {
  dore::DecoderConfig& decoder = options.extract.decoder;
  if (key == "k") {
    decoder.k = static_cast<int>(parse_integer(key, value));
  } else if (key == "max-new-tokens") {
    decoder.max_new_tokens = static_cast<int>(parse_integer(key, value));
  } else if (key == "constrained") {
    decoder.constrained = parse_switch(key, value);
  } else if (key == "disparity-source") {
    auto mode = dore::disparity_source_from_name(value);
    require(mode.has_value(), "option " + key + ": expected masked or raw, got \"" + value + "\"");
    decoder.disparity_source = *mode;
  } else if (key == "aggregation") {
    auto mode = dore::aggregation_from_name(value);
    require(mode.has_value(),
            "option " + key + ": expected mean, median, max, or min, got \"" + value + "\"");
    decoder.aggregation = *mode;
  } else if (key == "selection") {
    auto mode = dore::selection_from_name(value);
    require(mode.has_value(),
            "option " + key + ": expected branch-argmax or threshold, got \"" + value + "\"");
    decoder.selection = *mode;
  } else if (key == "threshold") {
    decoder.threshold = parse_real(key, value);
  } else if (key == "top-m") {
    decoder.top_m = static_cast<int>(parse_integer(key, value));
  } else if (key == "match") {
    auto mode = dore::match_mode_from_name(value);
    require(mode.has_value(),
            "option " + key + ": expected normalized or byte-exact, got \"" + value + "\"");
    decoder.match = *mode;
    options.eval.match = *mode;
  } else if (key == "mode") {
    auto mode = dore::prompt_mode_from_name(value);
    require(mode.has_value(), "option " + key + ": expected per-type or joint, got \"" + value + "\"");
    options.extract.mode = *mode;
  } else if (key == "template") {
    options.extract.template_path = value;
  } else if (key == "closure") {
    auto mode = dore::closure_mode_from_name(value);
    require(mode.has_value(),
            "option " + key + ": expected transitive or pairwise, got \"" + value + "\"");
    options.eval.closure = *mode;
  } else if (key == "seed") {
    unsigned long long parsed = 0;
    const char* first = value.c_str();
    const char* last = first + value.size();
    auto [end, ec] = std::from_chars(first, last, parsed);
    require(ec == std::errc() && end == last && !value.empty(),
            "option " + key + ": expected an unsigned integer, got \"" + value + "\"");
    options.extract.seed = parsed;
  } else if (key == "workers") {
    options.extract.workers = static_cast<int>(parse_integer(key, value));
  } else {
    dore::fail(dore::ErrorCode::invalid_argument, "unknown option \"" + key + "\"");
  }
}

std::string summarize(const dore::ExtractOutcome& outcome) {
  int ok = 0, skipped = 0, failed = 0;
  for (const dore::DialogueExtraction& d : outcome.run.dialogues) {
    switch (d.status) {
      case dore::DialogueStatus::ok: ++ok; break;
      case dore::DialogueStatus::skipped: ++skipped; break;
      case dore::DialogueStatus::failed: ++failed; break;
    }
  }
  std::ostringstream out;
  out << dore::format_stats(outcome.stats);
  out << "decoded:          " << ok << " ok, " << skipped << " skipped, " << failed << " failed\n";
  out << "ontology:         " << outcome.run.ontology.relations.size() << " relations, "
      << outcome.run.ontology.term_types.size() << " terms, "
      << outcome.run.ontology.equivalence_classes.size() << " equivalence classes\n";
  out << "manifest:         " << outcome.paths.manifest.string() << "\n";
  if (outcome.run.partial) out << "warning: some dialogues failed; run is partial\n";
  return out.str();
}

const dore_options kDefaultOptions{};

const dore_options& options_or_default(const dore_options* options) {
  return options ? *options : kDefaultOptions;
}

}  // namespace

extern "C" {

const char* dore_version(void) { return "0.1.0"; }

const char* dore_last_error(void) { return g_error.c_str(); }

void dore_string_free(char* s) { std::free(s); }

dore_options* dore_options_new(void) { return new (std::nothrow) dore_options(); }

void dore_options_free(dore_options* options) { delete options; }

dore_status dore_options_set(dore_options* options, const char* key, const char* value) {
  return guarded([&] {
    require(options != nullptr, "options must not be null");
    require(key != nullptr, "key must not be null");
    require(value != nullptr, "value must not be null");
    set_option(*options, key, value);
  });
}

dore_status dore_extract(const char* dataset, const char* backend, const char* out_dir,
                         const dore_options* options, char** summary, int* partial) {
  return guarded([&] {
    require(dataset != nullptr, "dataset must not be null");
    require(backend != nullptr, "backend must not be null");
    require(out_dir != nullptr, "out_dir must not be null");
    dore::ExtractOutcome outcome =
        dore::run_extract(dataset, backend, out_dir, options_or_default(options).extract);
    if (partial) *partial = outcome.run.partial ? 1 : 0;
    if (summary) *summary = copy_string(summarize(outcome));
  });
}

dore_status dore_eval(const char* predictions, const char* dataset, const char* compare,
                      const char* out_dir, const dore_options* options, char** report) {
  return guarded([&] {
    require(predictions != nullptr, "predictions must not be null");
    require(dataset != nullptr, "dataset must not be null");
    std::optional<std::string> against;
    if (compare && *compare) against = compare;
    std::filesystem::path out_path;
    if (out_dir && *out_dir) out_path = out_dir;
    dore::EvalOutcome outcome = dore::run_eval(predictions, dataset,
                                               options_or_default(options).eval, against, out_path);
    if (report) *report = copy_string(outcome.text);
  });
}

dore_status dore_sweep(const char* dataset, const char* backend, const char* out_dir,
                       const dore_options* options, const double* thresholds,
                       size_t n_thresholds, const int* ks, size_t n_ks, char** table) {
  return guarded([&] {
    require(dataset != nullptr, "dataset must not be null");
    require(backend != nullptr, "backend must not be null");
    require(n_thresholds == 0 || thresholds != nullptr, "thresholds must not be null");
    require(n_ks == 0 || ks != nullptr, "ks must not be null");
    dore::SweepGrid grid;
    grid.thresholds.assign(thresholds, thresholds + n_thresholds);
    grid.ks.assign(ks, ks + n_ks);
    std::filesystem::path out_path;
    if (out_dir && *out_dir) out_path = out_dir;
    const dore_options& all = options_or_default(options);
    dore::SweepOutcome outcome =
        dore::run_sweep(dataset, backend, all.extract, all.eval, grid, out_path);
    if (table) *table = copy_string(outcome.table);
  });
}

dore_mock_server* dore_mock_server_start(const char* script, const char* host, int port) {
  dore_mock_server* handle = nullptr;
  dore_status status = guarded([&] {
    require(script != nullptr, "script must not be null");
    handle = new dore_mock_server{
        dore::MockServer(dore::MockScript::from_file(script), host ? host : "127.0.0.1", port),
        ""};
    try {
      handle->server.start();
      handle->url = handle->server.url();
    } catch (...) {
      delete handle;
      handle = nullptr;
      throw;
    }
  });
  return status == DORE_OK ? handle : nullptr;
}

int dore_mock_server_port(const dore_mock_server* server) {
  if (!server) return -1;
  try {
    return server->server.port();
  } catch (...) {
    return -1;
  }
}

const char* dore_mock_server_url(const dore_mock_server* server) {
  return server ? server->url.c_str() : "";
}

void dore_mock_server_stop(dore_mock_server* server) {
  if (!server) return;
  server->server.stop();
  delete server;
}

}  // extern "C"
