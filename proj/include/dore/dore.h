#pragma once

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

/* C surface of the extraction library. Calls are thread-compatible; the
   error message is per-thread. Strings returned through out-parameters are
   heap-allocated and must be released with dore_string_free. */

typedef enum dore_status {
  DORE_OK = 0,
  DORE_INVALID_ARGUMENT = 1,
  DORE_PARSE_ERROR = 2,
  DORE_IO_ERROR = 3,
  DORE_BACKEND_ERROR = 4,
  DORE_UNSUPPORTED = 5,
  DORE_INTERNAL = 6,
} dore_status;

const char* dore_version(void);

/* Message from the most recent failing call on this thread; "" after a
   success. The pointer stays valid until the thread's next API call. */
const char* dore_last_error(void);

void dore_string_free(char* s);

/* Shared run configuration for extract/eval/sweep. Unset keys keep their
   defaults. */
typedef struct dore_options dore_options;

dore_options* dore_options_new(void);
void dore_options_free(dore_options* options);

/* Accepted keys:
     k                  branches to explore (int >= 1)
     max-new-tokens     per-branch generation cap (int >= 1)
     constrained        bracket grammar enforcement (on|off)
     disparity-source   probabilities scored under constraints (masked|raw)
     aggregation        component-to-triplet fold (mean|median|max|min)
     selection          branch-argmax|threshold
     threshold          cross-branch score cutoff (real in [0,1])
     top-m              distribution entries requested; 0 = backend maximum
     mode               prompt layout (per-type|joint)
     template           path to a prompt template file
     match              term comparison (normalized|byte-exact)
     closure            equivalence handling in scoring (transitive|pairwise)
     seed               recorded in the manifest (uint64)
     workers            dialogue-level concurrency (int >= 1)
*/
dore_status dore_options_set(dore_options* options, const char* key, const char* value);

/* Decode every dialogue of a JSONL dataset against a backend descriptor
   (mock:PATH or http:URL) and write predictions.jsonl, ontology.txt,
   per-dialogue records, and manifest.json under out_dir. *summary (optional)
   receives a printable run summary. *partial (optional) is set to 1 when some
   dialogues failed, else 0; skipped dialogues do not count as failures. */
dore_status dore_extract(const char* dataset, const char* backend, const char* out_dir,
                         const dore_options* options, char** summary, int* partial);

/* Score a predictions file against the dataset's gold annotations. compare
   (optional) names a second predictions file to test the first against with a
   paired t-test. out_dir (optional) receives report.txt. *report receives the
   printable report. */
dore_status dore_eval(const char* predictions, const char* dataset, const char* compare,
                      const char* out_dir, const dore_options* options, char** report);

/* Re-score a dataset across a one-dimensional grid: exactly one of
   thresholds[n_thresholds] and ks[n_ks] must be non-empty. out_dir (optional)
   receives sweep.txt. *table receives the printable sweep table. */
dore_status dore_sweep(const char* dataset, const char* backend, const char* out_dir,
                       const dore_options* options, const double* thresholds,
                       size_t n_thresholds, const int* ks, size_t n_ks, char** table);

/* Scripted HTTP backend for tests and demos. start returns NULL on failure
   (see dore_last_error); port 0 binds a free port. stop shuts the server down
   and frees the handle. The url pointer is owned by the handle. */
typedef struct dore_mock_server dore_mock_server;

dore_mock_server* dore_mock_server_start(const char* script, const char* host, int port);
int dore_mock_server_port(const dore_mock_server* server);
const char* dore_mock_server_url(const dore_mock_server* server);
void dore_mock_server_stop(dore_mock_server* server);

#ifdef __cplusplus
} /* extern "C" */
#endif
