#ifndef WEFT_WEFT_H
#define WEFT_WEFT_H

#include <stddef.h>

#if defined(_WIN32)
#  ifdef WEFT_BUILDING_LIBRARY
#    define WEFT_API __declspec(dllexport)
#  else
#    define WEFT_API __declspec(dllimport)
#  endif
#else
#  define WEFT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum weft_status {
  WEFT_OK = 0,
  WEFT_ERR_INVALID_ARGUMENT = 1,
  WEFT_ERR_MALFORMED = 2,
  WEFT_ERR_SCHEMA = 3,
  WEFT_ERR_IO = 4,
  WEFT_ERR_CONFIG = 5,
  WEFT_ERR_DUPLICATE_SERVICE = 6,
  WEFT_ERR_TERM_NOT_FOUND = 7,
  WEFT_ERR_INTERNAL = 8
} weft_status;

/* Library version, e.g. "0.3.0". Static storage. */
WEFT_API const char* weft_version(void);

/* Message of the last failed call on this thread; "" when none. Valid until
   the next failing call on the same thread. */
WEFT_API const char* weft_last_error(void);

/* Releases strings returned through char** out parameters. */
WEFT_API void weft_string_free(char* s);

/* ---- LAAST trees ---- */

typedef struct weft_laast weft_laast;

WEFT_API weft_status weft_laast_load(const char* json, size_t length, weft_laast** out);
WEFT_API weft_status weft_laast_save(const weft_laast* tree, char** out);
WEFT_API size_t weft_laast_node_count(const weft_laast* tree);
WEFT_API void weft_laast_free(weft_laast* tree);

/* Extracts one source tree. convention: "SpringLike", "JaxRsLike" or
   "LaastPassthrough"; NULL selects SpringLike. jobs 0 means 1. */
WEFT_API weft_status weft_extract(const char* service_name, const char* root_dir, const char* convention,
                                  unsigned jobs, weft_laast** out);

/* ---- per-service IR ---- */

typedef struct weft_service_ir weft_service_ir;

typedef enum weft_ir_item {
  WEFT_IR_COMPONENTS = 0,
  WEFT_IR_ENDPOINTS = 1,
  WEFT_IR_REMOTE_CALLS = 2,
  WEFT_IR_EVENT_OPS = 3,
  WEFT_IR_INTERNAL_CALLS = 4,
  WEFT_IR_WARNINGS = 5
} weft_ir_item;

/* Runs the default matchers of `convention` over a tree. */
WEFT_API weft_status weft_service_ir_build(const weft_laast* tree, const char* service_name, const char* convention,
                                           weft_service_ir** out);
WEFT_API weft_status weft_service_ir_load(const char* json, size_t length, weft_service_ir** out);
WEFT_API weft_status weft_service_ir_save(const weft_service_ir* ir, char** out);
WEFT_API size_t weft_service_ir_count(const weft_service_ir* ir, weft_ir_item item);
WEFT_API void weft_service_ir_free(weft_service_ir* ir);

/* ---- similarity ---- */

typedef struct weft_taxonomy weft_taxonomy;

WEFT_API weft_status weft_taxonomy_parse(const char* text, size_t length, weft_taxonomy** out);
WEFT_API void weft_taxonomy_free(weft_taxonomy* taxonomy);
WEFT_API weft_status weft_wu_palmer(const weft_taxonomy* taxonomy, const char* a, const char* b, double* out);

/* taxonomy may be NULL. *strategy receives "exact", "token" or "taxonomy"
   (static storage) when strategy is not NULL. */
WEFT_API weft_status weft_entity_similarity(const char* a, const char* b, const weft_taxonomy* taxonomy, double* score,
                                            const char** strategy);

/* ---- full runs ---- */

typedef void (*weft_log_fn)(const char* message, void* user);

typedef struct weft_run_options {
  const char* config_path; /* required */
  const char* out_dir;     /* NULL: output_dir from the config */
  unsigned jobs;           /* 0: available parallelism */
  const char* services;    /* comma separated subset, NULL for all */
  const char* formats;     /* comma separated from dot,json,text; NULL for all */
  weft_log_fn log;         /* progress lines, may be NULL */
  void* user;
} weft_run_options;

typedef struct weft_run weft_run;

WEFT_API weft_status weft_run_execute(const weft_run_options* options, weft_run** out);
/* 0 no findings, 1 warnings only, 2 errors present. */
WEFT_API int weft_run_exit_status(const weft_run* run);
/* severity: "error", "warning", "info" or NULL for all. */
WEFT_API size_t weft_run_finding_count(const weft_run* run, const char* severity);
/* format: "json" or "text". */
WEFT_API weft_status weft_run_report(const weft_run* run, const char* format, char** out);
/* view: "services", "context" or "full". */
WEFT_API weft_status weft_run_dot(const weft_run* run, const char* view, char** out);
WEFT_API void weft_run_free(weft_run* run);

/* One-shot run returning the process exit status: 0, 1, 2, or 3 on any failure. */
WEFT_API int weft_analyze(const weft_run_options* options);

#ifdef __cplusplus
}
#endif

#endif
