#ifndef FPPLAB_H
#define FPPLAB_H

/*
 * C interface to the fpplab engine. All state lives behind opaque handles;
 * every entry point is safe to call from C or via FFI. Functions returning
 * int use 0 for success. Status codes mirror the CLI exit codes.
 */

#ifdef __cplusplus
extern "C" {
#endif

#define FPP_OK 0
#define FPP_ERR_INTERNAL 1
#define FPP_ERR_USAGE 2
#define FPP_ERR_VALIDITY 3

typedef struct fpp_config fpp_config;
typedef struct fpp_result fpp_result;

/* Empty configuration. Never fails short of out-of-memory. */
fpp_config* fpp_config_new(void);

/* Parse INI text / load an INI file. NULL on error; see fpp_last_error(). */
fpp_config* fpp_config_parse(const char* text);
fpp_config* fpp_config_load(const char* path);

/* Apply a "section.key=value" override. 0 on success, FPP_ERR_USAGE on a
 * malformed assignment (message via fpp_last_error()). */
int fpp_config_set(fpp_config* cfg, const char* assignment);

/* Canonical INI text of the configuration. Valid until the next call on
 * this handle; copy if you need to keep it. */
const char* fpp_config_serialize(fpp_config* cfg);

void fpp_config_free(fpp_config* cfg);

/* Subcommand registry. fpp_subcommand_name returns NULL out of range. */
int fpp_subcommand_count(void);
const char* fpp_subcommand_name(int i);

/* Execute one subcommand against a configuration. Always returns a result
 * handle (NULL only on allocation failure); inspect its status. */
fpp_result* fpp_run(const char* subcommand, const fpp_config* cfg);

int fpp_result_status(const fpp_result* res);
/* Summary JSON written for the run; empty when the run failed before
 * producing results. Owned by the handle. */
const char* fpp_result_summary(const fpp_result* res);
/* Single-line error message; empty on success. Owned by the handle. */
const char* fpp_result_error(const fpp_result* res);
void fpp_result_free(fpp_result* res);

/* Message from the most recent failing fpp_config_* call on this thread. */
const char* fpp_last_error(void);

#ifdef __cplusplus
}
#endif

#endif /* FPPLAB_H */
