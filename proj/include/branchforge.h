/* branchforge C API: exact computation in groups of rooted-tree
 * automorphisms behind opaque handles and integer status codes.
 *
 * Conventions:
 *   - every function returns a bf_status; BF_OK means success;
 *   - on failure, bf_last_error() returns a thread-local message;
 *   - strings returned through char** are owned by the caller and must be
 *     released with bf_string_free();
 *   - vertices are "e" (root) or dot-separated 1-based letters ("1.2.1");
 *     undotted digit strings like "121" are accepted for single-digit
 *     arities;
 *   - element words use generator names, ' or ^-1 for inverses, ^k for
 *     powers, parentheses, plant(v; w) and perm[i1,...] atoms.
 */

#ifndef BRANCHFORGE_H
#define BRANCHFORGE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bf_status {
  BF_OK = 0,
  BF_ERR_INVALID = 1,      /* malformed input or usage error */
  BF_ERR_PARSE = 2,        /* text format error */
  BF_ERR_CAP = 3,          /* closure/ball/order cap exceeded */
  BF_ERR_SEARCH = 4,       /* witness search exhausted its radius */
  BF_ERR_VERIFY = 5,       /* a certificate check failed */
  BF_ERR_UNSUPPORTED = 6,  /* outside the supported regime */
  BF_ERR_UNDECIDED = 7     /* word problem undecided within caps */
} bf_status;

typedef struct bf_group bf_group;

const char* bf_version(void);
const char* bf_last_error(void);
void bf_string_free(char* s);

/* ---- groups ------------------------------------------------------------ */

/* designator: "grigorchuk", "ggs:3:1,2", "multi-ggs:3:1,2;1,0",
 * "example25:2,3,5", or group-spec text ("spec:..." or raw "tree ..."). */
bf_status bf_group_open(const char* designator, bf_group** out);
bf_status bf_group_from_spec(const char* text, bf_group** out);
void bf_group_free(bf_group* g);

bf_status bf_group_serialize(const bf_group* g, char** out);
bf_status bf_group_info(const bf_group* g, char** json_out);
/* caps: "closure=100000,wordlen=1000,ball=1000000" (any subset) */
bf_status bf_group_set_caps(bf_group* g, const char* caps);

bf_status bf_ggs_is_torsion(int64_t p, const int64_t* entries, size_t n,
                            int* out);

/* ---- words ------------------------------------------------------------- */

bf_status bf_word_is_trivial(bf_group* g, const char* word, int* out);
bf_status bf_word_equal(bf_group* g, const char* w1, const char* w2, int* out);
bf_status bf_word_order(bf_group* g, const char* word, uint64_t cap,
                        uint64_t* out);
bf_status bf_word_act(bf_group* g, const char* word, const char* vertex,
                      char** out);
bf_status bf_word_section(bf_group* g, const char* word, const char* vertex,
                          char** out);
bf_status bf_word_orbit(bf_group* g, const char* word, const char* vertex,
                        char** json_out);
bf_status bf_word_portrait_dot(bf_group* g, const char* word, int depth,
                               char** out);

/* ---- quotients and stabilizers ----------------------------------------- */

bf_status bf_level_size(bf_group* g, int level, uint64_t* out);
bf_status bf_quotient_order(bf_group* g, int level, uint64_t* out);
bf_status bf_in_level_stab(bf_group* g, const char* word, int level, int* out);
bf_status bf_in_rist(bf_group* g, const char* word, const char* vertex,
                     int* out);

/* predicate: "nontrivial", "order=2", "order%3=0".
 * seeded != 0 extends the ball alphabet with the synthesized planted section
 * words (needed where plain generator balls cannot reach the witnesses). */
bf_status bf_rist_search(bf_group* g, const char* vertex, int radius,
                         const char* predicate, int seeded, char** json_out);

/* ---- constructions (JSON certificate reports) -------------------------- */

bf_status bf_lemma23(bf_group* g, const char* vertex, uint64_t target,
                     int torsion_mode, int radius, char** json_out);
bf_status bf_build_hv(bf_group* g, int64_t p, const char* a_word,
                      const char* mask, int radius, int depth, char** json_out);
bf_status bf_hv_distinct(bf_group* g, int64_t p, const char* a_word,
                         const char* mask1, const char* mask2, int radius,
                         int depth, char** json_out);
/* group_designator may be NULL; when given, the kernel summands are realized
 * as tree elements inside that group. */
bf_status bf_kv_report(int64_t p, const int* exponents, size_t n,
                       const char* mask, int m_max, int torsion_free,
                       const char* group_designator, int radius,
                       char** json_out);
/* rule: "cases" or "full" */
bf_status bf_erf_classify(const char* descriptor_json, const char* rule,
                          char** json_out);

/* Replays the report's construction; *verified is 1 on a byte-exact match. */
bf_status bf_verify_report(const char* report_json, int* verified,
                           char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* BRANCHFORGE_H */
