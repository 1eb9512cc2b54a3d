// Exercises the shared-library C surface only; no C++ headers from the core.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "dore/dore.h"

namespace fs = std::filesystem;

namespace {

#ifndef DORE_DATA_DIR
#define DORE_DATA_DIR "data"
#endif

const std::string kToyDialogues = std::string(DORE_DATA_DIR) + "/toy/dialogues.jsonl";
const std::string kToyScript = std::string(DORE_DATA_DIR) + "/toy/script.json";
const std::string kMockBackend = "mock:" + kToyScript;

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("dore_capi_" + tag);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Takes ownership of a C string out-parameter.
std::string take(char* s) {
  std::string out = s ? s : "";
  dore_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and error state") {
  CHECK(std::string(dore_version()) == "0.1.0");
  CHECK(std::string(dore_last_error()).empty());
}

TEST_CASE("option keys are validated") {
  dore_options* options = dore_options_new();
  REQUIRE(options != nullptr);

  CHECK(dore_options_set(options, "k", "3") == DORE_OK);
  CHECK(dore_options_set(options, "max-new-tokens", "64") == DORE_OK);
  CHECK(dore_options_set(options, "constrained", "off") == DORE_OK);
  CHECK(dore_options_set(options, "constrained", "on") == DORE_OK);
  CHECK(dore_options_set(options, "disparity-source", "raw") == DORE_OK);
  CHECK(dore_options_set(options, "aggregation", "median") == DORE_OK);
  CHECK(dore_options_set(options, "selection", "threshold") == DORE_OK);
  CHECK(dore_options_set(options, "threshold", "0.25") == DORE_OK);
  CHECK(dore_options_set(options, "top-m", "8") == DORE_OK);
  CHECK(dore_options_set(options, "match", "byte-exact") == DORE_OK);
  CHECK(dore_options_set(options, "mode", "joint") == DORE_OK);
  CHECK(dore_options_set(options, "closure", "pairwise") == DORE_OK);
  CHECK(dore_options_set(options, "seed", "42") == DORE_OK);
  CHECK(dore_options_set(options, "workers", "2") == DORE_OK);

  CHECK(dore_options_set(options, "k", "three") == DORE_INVALID_ARGUMENT);
  CHECK(std::string(dore_last_error()).find("option k") != std::string::npos);
  CHECK(dore_options_set(options, "k", "5x") == DORE_INVALID_ARGUMENT);
  CHECK(dore_options_set(options, "constrained", "maybe") == DORE_INVALID_ARGUMENT);
  CHECK(dore_options_set(options, "disparity-source", "psychic") == DORE_INVALID_ARGUMENT);
  CHECK(dore_options_set(options, "threshold", "0.5.1") == DORE_INVALID_ARGUMENT);
  CHECK(dore_options_set(options, "banana", "1") == DORE_INVALID_ARGUMENT);
  CHECK(std::string(dore_last_error()).find("banana") != std::string::npos);
  CHECK(dore_options_set(nullptr, "k", "1") == DORE_INVALID_ARGUMENT);
  CHECK(dore_options_set(options, nullptr, "1") == DORE_INVALID_ARGUMENT);
  CHECK(dore_options_set(options, "k", nullptr) == DORE_INVALID_ARGUMENT);

  // A successful call clears the error message.
  CHECK(dore_options_set(options, "k", "5") == DORE_OK);
  CHECK(std::string(dore_last_error()).empty());

  dore_options_free(options);
  dore_options_free(nullptr);
}

TEST_CASE("extract, eval, and sweep round-trip through the C surface") {
  fs::path out = fresh_dir("run");
  char* summary = nullptr;
  int partial = -1;
  REQUIRE(dore_extract(kToyDialogues.c_str(), kMockBackend.c_str(), out.string().c_str(), nullptr,
                       &summary, &partial) == DORE_OK);
  CHECK(partial == 0);
  std::string summary_text = take(summary);
  CHECK(summary_text.find("dialogues:        10") != std::string::npos);
  CHECK(summary_text.find("decoded:          9 ok, 1 skipped, 0 failed") != std::string::npos);
  CHECK(summary_text.find("20 relations") != std::string::npos);
  REQUIRE(fs::exists(out / "manifest.json"));
  REQUIRE(fs::exists(out / "predictions.jsonl"));
  REQUIRE(fs::exists(out / "ontology.txt"));

  std::string predictions = (out / "predictions.jsonl").string();
  char* report = nullptr;
  REQUIRE(dore_eval(predictions.c_str(), kToyDialogues.c_str(), nullptr, nullptr, nullptr,
                    &report) == DORE_OK);
  std::string report_text = take(report);
  CHECK(report_text.find("1.0000") != std::string::npos);

  // Comparing a run against itself writes a report and keeps the score.
  fs::path eval_out = fresh_dir("eval");
  report = nullptr;
  REQUIRE(dore_eval(predictions.c_str(), kToyDialogues.c_str(), predictions.c_str(),
                    eval_out.string().c_str(), nullptr, &report) == DORE_OK);
  std::string compared_text = take(report);
  CHECK(compared_text.find("compared run:") != std::string::npos);
  CHECK(fs::exists(eval_out / "report.txt"));

  char* table = nullptr;
  int ks[] = {1, 2};
  REQUIRE(dore_sweep(kToyDialogues.c_str(), kMockBackend.c_str(), nullptr, nullptr, nullptr, 0, ks,
                     2, &table) == DORE_OK);
  std::string table_text = take(table);
  CHECK(table_text.find("k") == 0);
  CHECK(table_text.find("0.9744") != std::string::npos);
  CHECK(table_text.find("1.0000") != std::string::npos);

  double thresholds[] = {0.5};
  CHECK(dore_sweep(kToyDialogues.c_str(), kMockBackend.c_str(), nullptr, nullptr, thresholds, 1,
                   ks, 2, nullptr) == DORE_INVALID_ARGUMENT);

  fs::remove_all(out);
  fs::remove_all(eval_out);
}

TEST_CASE("failures map onto status codes and messages") {
  CHECK(dore_extract(nullptr, kMockBackend.c_str(), "x", nullptr, nullptr, nullptr) ==
        DORE_INVALID_ARGUMENT);
  CHECK(dore_extract("/nonexistent/data.jsonl", kMockBackend.c_str(), "/tmp/dore_capi_none",
                     nullptr, nullptr, nullptr) == DORE_IO_ERROR);
  CHECK(!std::string(dore_last_error()).empty());
  CHECK(dore_extract(kToyDialogues.c_str(), "grpc:somewhere", "/tmp/dore_capi_none", nullptr,
                     nullptr, nullptr) == DORE_UNSUPPORTED);
  CHECK(std::string(dore_last_error()).find("grpc:somewhere") != std::string::npos);

  dore_options* options = dore_options_new();
  REQUIRE(dore_options_set(options, "k", "0") == DORE_OK);  // rejected at run time
  CHECK(dore_extract(kToyDialogues.c_str(), kMockBackend.c_str(), "/tmp/dore_capi_none", options,
                     nullptr, nullptr) == DORE_INVALID_ARGUMENT);
  dore_options_free(options);
}

TEST_CASE("the scripted server serves a backend usable through descriptors") {
  dore_mock_server* server = dore_mock_server_start(kToyScript.c_str(), nullptr, 0);
  REQUIRE(server != nullptr);
  CHECK(dore_mock_server_port(server) > 0);
  std::string url = dore_mock_server_url(server);
  CHECK(url.rfind("http://127.0.0.1:", 0) == 0);

  fs::path direct_out = fresh_dir("direct");
  fs::path wire_out = fresh_dir("wire");
  REQUIRE(dore_extract(kToyDialogues.c_str(), kMockBackend.c_str(), direct_out.string().c_str(),
                       nullptr, nullptr, nullptr) == DORE_OK);
  REQUIRE(dore_extract(kToyDialogues.c_str(), url.c_str(), wire_out.string().c_str(), nullptr,
                       nullptr, nullptr) == DORE_OK);
  CHECK(slurp(direct_out / "predictions.jsonl") == slurp(wire_out / "predictions.jsonl"));
  CHECK(slurp(direct_out / "ontology.txt") == slurp(wire_out / "ontology.txt"));

  dore_mock_server_stop(server);
  CHECK(dore_mock_server_start("/nonexistent/script.json", nullptr, 0) == nullptr);
  CHECK(!std::string(dore_last_error()).empty());

  fs::remove_all(direct_out);
  fs::remove_all(wire_out);
}
