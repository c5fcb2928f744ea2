/* SPDX-License-Identifier: Apache-2.0
 *
 * emchan - continuous-space electromagnetic channel simulator
 *
 * C interface to the simulator core. Scenarios are opaque handles created
 * from YAML configuration; every entry point returns a status code and the
 * thread-local emchan_last_error() carries the diagnostic of the most recent
 * failure on the calling thread.
 */

#ifndef EMCHAN_H
#define EMCHAN_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct emchan_scenario emchan_scenario;

typedef enum emchan_status {
  EMCHAN_OK = 0,
  EMCHAN_E_CONFIG = 1,      /* bad configuration, schema violation, precondition */
  EMCHAN_E_DOMAIN = 2,      /* argument outside the mathematical domain */
  EMCHAN_E_NUMERIC = 3,     /* singularity, accuracy or conditioning failure */
  EMCHAN_E_CONVERGENCE = 4, /* iteration budget exhausted */
  EMCHAN_E_IO = 5,          /* file system problem */
  EMCHAN_E_INTERNAL = 6
} emchan_status;

/* Library version string, e.g. "0.1.0". */
const char* emchan_version(void);

/* Diagnostic for the most recent failure on this thread; never NULL. */
const char* emchan_last_error(void);

/* Create a scenario from a YAML file or from YAML text. On success *out
 * receives an owned handle; release it with emchan_scenario_free. */
emchan_status emchan_scenario_load(const char* path, emchan_scenario** out);
emchan_status emchan_scenario_parse(const char* yaml_text, emchan_scenario** out);

void emchan_scenario_free(emchan_scenario* sc);

/* Override one configuration entry by dotted key below the scenario block,
 * e.g. ("solver.P", "40") or ("power_sweep_dbm", "[30, 40]"). The value is
 * parsed as YAML. Validation happens at run/validate time. */
emchan_status emchan_scenario_set(emchan_scenario* sc, const char* dotted_key,
                                  const char* value);

/* Validate without running. On success *report receives a malloc'd string;
 * release it with emchan_string_free. Schema violations return
 * EMCHAN_E_CONFIG with the diagnostic in emchan_last_error(). */
emchan_status emchan_scenario_validate(const emchan_scenario* sc, char** report);

/* Execute one subcommand: acf, ccf, capacity-su, capacity-mu, dof, pattern,
 * sweep-svd or scene-dump. output_dir overrides the configured directory
 * when non-NULL. On success *outputs (when non-NULL) receives a malloc'd
 * newline-separated list of the files written. */
emchan_status emchan_run(const emchan_scenario* sc, const char* subcommand,
                         const char* output_dir, char** outputs);

void emchan_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* EMCHAN_H */
