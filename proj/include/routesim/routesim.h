/* routesim: day-to-day route choice with learning human and AV agents.
 *
 * Plain C interface over the C++ core. Every fallible call returns a
 * routesim_status; on failure routesim_last_error() holds a message for the
 * calling thread. Handles are opaque and owned by the caller. */
#ifndef ROUTESIM_ROUTESIM_H
#define ROUTESIM_ROUTESIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ROUTESIM_BUILDING)
#    define ROUTESIM_API __declspec(dllexport)
#  else
#    define ROUTESIM_API __declspec(dllimport)
#  endif
#else
#  define ROUTESIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum routesim_status {
  ROUTESIM_OK = 0,
  ROUTESIM_ERR_PARSE = 1,
  ROUTESIM_ERR_VALIDATION = 2,
  ROUTESIM_ERR_DUPLICATE_ID = 3,
  ROUTESIM_ERR_UNREACHABLE = 4,
  ROUTESIM_ERR_NOT_FOUND = 5,
  ROUTESIM_ERR_INVALID_ARGUMENT = 6,
  ROUTESIM_ERR_INVALID_STATE = 7,
  ROUTESIM_ERR_IO = 8,
  ROUTESIM_ERR_CONFIG = 9,
  ROUTESIM_ERR_INTERNAL = 10
} routesim_status;

typedef enum routesim_phase {
  ROUTESIM_PHASE_HUMAN_ONLY = 0,
  ROUTESIM_PHASE_TRAINING = 1,
  ROUTESIM_PHASE_TESTING = 2
} routesim_phase;

ROUTESIM_API const char* routesim_version(void);
/* Message of the last failure on this thread; "" after a success. */
ROUTESIM_API const char* routesim_last_error(void);
ROUTESIM_API const char* routesim_status_name(routesim_status status);
/* Reads ROUTESIM_LOG (error | info | debug). */
ROUTESIM_API void routesim_configure_logging(void);

/* ---- networks ---- */

typedef struct routesim_network routesim_network;

ROUTESIM_API routesim_status routesim_network_load(const char* path, routesim_network** out);
ROUTESIM_API void routesim_network_free(routesim_network* net);
ROUTESIM_API size_t routesim_network_node_count(const routesim_network* net);
ROUTESIM_API size_t routesim_network_edge_count(const routesim_network* net);

/* ---- generators; out_path "-" writes to stdout ---- */

typedef struct routesim_od {
  const char* origin;
  const char* dest;
  double weight;
} routesim_od;

/* With n_od == 0 every reachable ordered node pair gets equal weight. */
ROUTESIM_API routesim_status routesim_generate_demand_csv(const routesim_network* net, size_t n_agents,
                                                          const routesim_od* ods, size_t n_od,
                                                          int64_t window_start, int64_t window_end,
                                                          uint64_t seed, const char* out_path);

/* OD pairs come from demand_csv when non-NULL, otherwise from ods. */
ROUTESIM_API routesim_status routesim_generate_paths_csv(const routesim_network* net, const routesim_od* ods,
                                                         size_t n_od, const char* demand_csv, size_t k,
                                                         double penalty, double max_detour,
                                                         const char* out_path);

/* ---- experiments ---- */

/* Runs a JSON experiment config. out_dir may be NULL to use the config's
 * "output" key. With replications > 1 or explicit seeds, each replication
 * runs concurrently into out_dir/seed_<seed>. n_seeds must be 0 or equal to
 * replications. */
ROUTESIM_API routesim_status routesim_run_experiment(const char* config_path, const char* out_dir,
                                                     size_t replications, const uint64_t* seeds,
                                                     size_t n_seeds);

/* Renders the three SVG charts from an episodes.csv. */
ROUTESIM_API routesim_status routesim_plot(const char* episodes_csv, const char* out_dir);

/* ---- stepping an environment directly ---- */

typedef struct routesim_env routesim_env;

typedef struct routesim_turn {
  int64_t agent;
  int is_av;
  size_t n_actions;
  int64_t departure_bucket;
} routesim_turn;

ROUTESIM_API routesim_status routesim_env_create(const char* config_path, routesim_env** out);
ROUTESIM_API void routesim_env_free(routesim_env* env);

ROUTESIM_API routesim_status routesim_env_reset(routesim_env* env, routesim_turn* turn);
/* action < 0 lets a human agent choose with its own model. *done becomes 1
 * when the step ended the episode; *turn is then left untouched. */
ROUTESIM_API routesim_status routesim_env_step(routesim_env* env, int64_t action, routesim_turn* turn,
                                               int* done);
/* Per-route counts seen by the current agent. *len receives the route count. */
ROUTESIM_API routesim_status routesim_env_observation(const routesim_env* env, uint32_t* counts,
                                                      size_t capacity, size_t* len);
/* Converts humans to AVs per the config's mutation section. */
ROUTESIM_API routesim_status routesim_env_mutate(routesim_env* env, int64_t* ids, size_t capacity,
                                                 size_t* n_mutated);
ROUTESIM_API routesim_status routesim_env_start_testing(routesim_env* env);

ROUTESIM_API routesim_phase routesim_env_phase(const routesim_env* env);
ROUTESIM_API uint64_t routesim_env_day(const routesim_env* env);
ROUTESIM_API size_t routesim_env_agent_count(const routesim_env* env);

/* Results of the last finished episode. */
ROUTESIM_API routesim_status routesim_env_travel_time(const routesim_env* env, int64_t agent,
                                                      double* travel_time);
ROUTESIM_API routesim_status routesim_env_reward(const routesim_env* env, int64_t agent, double* reward);

#ifdef __cplusplus
}
#endif

#endif
