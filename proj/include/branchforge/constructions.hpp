#ifndef BRANCHFORGE_CONSTRUCTIONS_HPP
#define BRANCHFORGE_CONSTRUCTIONS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "branchforge/stabilizers.hpp"
#include "branchforge/words.hpp"

namespace bf {

// ---------------------------------------------------------------------------
// ERF classification for direct sums of cyclic groups.

struct PrimeComponent {
  enum class Kind { explicit_list, bounded, unbounded };
  std::int64_t p = 0;
  Kind kind = Kind::explicit_list;
  std::vector<int> exponents;  // explicit_list: nonempty multiset
  int bound = 0;               // bounded: exponents <= bound
};

struct AbelianDescriptor {
  bool z_rank_infinite = false;   // |I| infinite
  std::uint64_t z_rank = 0;       // |I| when finite
  std::vector<PrimeComponent> components;
  // When true, the listed components are a sample and infinitely many primes
  // occur; `tail` then describes the per-prime exponent boundedness of the
  // unlisted components.
  bool primes_infinite = false;
  enum class Tail { bounded, unbounded, unknown } tail = Tail::unknown;

  void validate() const;
};

enum class ErfVerdict { erf, not_erf, undetermined };
std::string to_string(ErfVerdict v);

// Case analysis: (i) infinite free part -> not ERF; (ii) finite free part
// and uniformly bounded orders -> ERF; (iii) finitely many primes with
// unbounded orders -> not ERF; otherwise undetermined.
ErfVerdict erf_classify_cases(const AbelianDescriptor& d);

// Full criterion: ERF iff the free part has finite rank and every p-component
// has finite exponent. Refuses descriptors with unknown tail information.
ErfVerdict erf_classify_full(const AbelianDescriptor& d);

// ---------------------------------------------------------------------------
// Large-order elements in rigid stabilizers: iterated products of witnesses
// at nested vertices, with the orbit growth verified step by step.

struct LargeOrderStep {
  Vertex u;
  RistWitness witness;
  Vertex moved;
  std::uint64_t orbit_factor = 0;  // verified growth of the product's orbit
};

struct LargeOrderCertificate {
  Vertex base;
  std::uint64_t target = 0;
  bool torsion_mode = false;
  int radius = 0;
  std::vector<LargeOrderStep> steps;
  Element product;
  Vertex witness_point;
  std::uint64_t orbit_length = 0;
  std::optional<std::uint64_t> product_order;  // torsion mode
  std::vector<std::pair<std::string, bool>> checks;
  bool verified = false;
};

LargeOrderCertificate build_large_order(RistProvider& provider, const Vertex& u,
                                        std::uint64_t target, bool torsion_mode,
                                        int radius,
                                        std::optional<std::uint64_t> forced_prime = {});

// ---------------------------------------------------------------------------
// Kernel-of-Prufer-projection arithmetic on (masked) sums of cyclic p-groups.
// Torsion mode: H = sum of Z/p^{n_i}; torsion-free mode: H = sum of Z with
// coordinate i reduced mod 2^i (p is fixed to 2 and n_i = i).

struct PruferKernelSpec {
  std::int64_t p = 2;
  std::vector<int> exponents;      // strictly increasing
  std::vector<std::uint8_t> mask;  // same length, at least two active
  bool torsion_free = false;

  static PruferKernelSpec torsion(std::int64_t p, std::vector<int> exponents,
                                  std::vector<std::uint8_t> mask);
  static PruferKernelSpec torsion_free_mode(int length, std::vector<std::uint8_t> mask);

  std::vector<int> active() const;  // 0-based active indices
  std::int64_t modulus(int i) const;  // p^{n_i}
  void check_tuple(const std::vector<std::int64_t>& x) const;
};

using KvTuple = std::vector<std::int64_t>;

KvTuple kv_reduce(const PruferKernelSpec& spec, KvTuple x);
KvTuple kv_add(const PruferKernelSpec& spec, const KvTuple& x, const KvTuple& y);
KvTuple kv_neg(const PruferKernelSpec& spec, const KvTuple& x);
KvTuple kv_scale(const PruferKernelSpec& spec, std::int64_t c, const KvTuple& x);

// k_i = e_i - p^{n_{i+1}-n_i} e_{i+1} over consecutive active indices.
std::vector<std::pair<int, KvTuple>> kv_generators(const PruferKernelSpec& spec);

bool kv_member(const PruferKernelSpec& spec, const KvTuple& x);

// additive order in the torsion ambient group
std::uint64_t kv_order(const PruferKernelSpec& spec, const KvTuple& x);

struct KvWitness {
  KvTuple y;
  KvTuple k;
};
// t = p^m y + k with k in the kernel: certifies t in K * (p^m H) for this m.
KvWitness kv_divisibility_witness(const PruferKernelSpec& spec, const KvTuple& t,
                                  int m);

struct KvIsoInvariant {
  bool torsion_free = false;
  std::vector<std::uint64_t> orders;  // sorted multiset {p^{n_i} : mask_i = 1}

  bool operator==(const KvIsoInvariant& o) const {
    return torsion_free == o.torsion_free &&
           (torsion_free || orders == o.orders);
  }
};
KvIsoInvariant kv_iso_invariant(const PruferKernelSpec& spec);

// Tree realization: a cyclic subgroup of order p^{n_i} inside rist(w_i) for
// each active index, at pairwise incomparable comb vertices.
struct KvRealization {
  std::vector<Vertex> vertices;
  std::vector<LargeOrderCertificate> summands;
  bool verified = false;
};
KvRealization kv_realize(RistProvider& provider, const PruferKernelSpec& spec,
                         int radius);

// ---------------------------------------------------------------------------
// The H_V families: generators a*h_v at a comb of pairwise incomparable
// vertices below an orbit-p point, masked by a binary prefix.

struct HvFamilySpec {
  PresentationPtr pres;
  std::int64_t p = 0;
  Element a;
  Vertex x;
  int n0 = 0;
  int radius = 0;
  std::vector<std::uint8_t> mask;
  std::vector<Vertex> comb;     // u_i below x, i = 1..M (subtree coordinates)
  std::vector<int> active;      // 0-based indices with mask = 1
  std::vector<Vertex> vertices; // v_i = x u_i for every i
  std::vector<RistWitness> witnesses;  // parallel to active
  std::vector<Element> gens;           // s_v = a h_v, parallel to active
  std::vector<std::pair<std::string, bool>> checks;
  bool verified = false;
};

HvFamilySpec build_hv(RistProvider& provider, std::int64_t p, const Element& a,
                      const std::vector<std::uint8_t>& mask, int radius);

// Words over the family generators: (active slot, +1/-1).
using HvWord = std::vector<std::pair<int, int>>;

struct HvNormalForm {
  int r = 0;                                  // mod p
  std::map<std::pair<int, int>, int> exponents;  // (slot, twist) -> mod p
};

HvNormalForm hv_normal_form(const HvFamilySpec& fam, const HvWord& word);
Element hv_word_element(const HvFamilySpec& fam, const HvWord& word);
Element hv_realize(const HvFamilySpec& fam, const HvNormalForm& nf);

// The membership refutation for the root element: any word equal to a would
// need r = 1 mod p with a vanishing exponent map, but every generator moves
// r and the exponent sum together, forcing 1 = 0 mod p. Cross-checked by an
// exhaustive sweep over short words.
struct HvRefutation {
  std::int64_t p = 0;
  std::string constraint_r;
  std::string constraint_sum;
  std::string invariant;
  int sweep_len = 0;
  std::uint64_t sweep_words = 0;
  bool sweep_clean = false;
  bool invariant_checked = false;
  bool verified = false;
};
HvRefutation hv_member_a(const HvFamilySpec& fam, int sweep_len = 4);

struct ClosureGapLevel {
  int n = 0;
  int witness_slot = -1;  // index into fam.active
  bool stab_ok = false;
  bool eq_ok = false;
  bool chain_ok = false;
  bool ok() const { return witness_slot >= 0 && stab_ok && eq_ok && chain_ok; }
};
struct ClosureGapReport {
  int requested_depth = 0;
  int max_certified = 0;
  std::vector<ClosureGapLevel> levels;
  bool verified = false;
};
// For each n <= depth: a family vertex whose witness lies in st(n), the
// identity a = s_v h_v^-1, and the stabilizer-chain membership of a's image
// in the generator images at level n.
ClosureGapReport closure_gap_certificate(const HvFamilySpec& fam, int depth);

struct EmbeddingCheck {
  int samples = 0;
  std::uint64_t checked_words = 0;
  bool verified = false;
  std::vector<std::pair<std::string, bool>> checks;
};
EmbeddingCheck hv_abelian_embedding_check(const HvFamilySpec& fam,
                                          int samples = 100, unsigned seed = 20240501);

struct DistinctReport {
  enum class Verdict { distinct, not_separated } verdict =
      Verdict::not_separated;
  int depth = 0;
  std::string detail;
};
DistinctReport family_distinct(const HvFamilySpec& a, const HvFamilySpec& b,
                               int depth);

}  // namespace bf

#endif
