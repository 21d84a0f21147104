#ifndef BRANCHFORGE_STABILIZERS_HPP
#define BRANCHFORGE_STABILIZERS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "branchforge/words.hpp"

namespace bf {

// g fixes every level-n vertex pointwise.
bool in_level_stab(const Element& g, int n);

// g acts trivially outside the subtree below v: g fixes level |v| and has
// trivial sections at every level-|v| vertex other than v.
bool in_rist(const Element& g, const Vertex& v);

// (v, v^g, v^{g^2}, ...) until first return.
std::vector<Vertex> orbit_of_vertex(const Element& g, const Vertex& v,
                                    std::uint64_t cap = 1u << 20);

// Shortlex-least vertex x at the least level whose <a>-orbit has size
// exactly p; requires order(a) == p.
struct OrbitPoint {
  Vertex x;
  int level = 0;
};
OrbitPoint find_orbit_p_point(const Element& a, std::uint64_t p);

// Least vertex moved by g, scanning levels 1..max_level shortlex.
std::optional<Vertex> first_moved_vertex(const Element& g, int max_level);

// Least level moved by g (first level where g acts nontrivially), or nullopt
// if g fixes everything up to max_level.
std::optional<int> first_moved_level(const Element& g, int max_level);

struct OrderPredicate {
  enum class Kind { nontrivial, exact, divisible } kind = Kind::nontrivial;
  std::uint64_t p = 0;
  std::uint64_t cap = 1u << 20;

  static OrderPredicate nontrivial() { return {}; }
  static OrderPredicate exact(std::uint64_t p) { return {Kind::exact, p, 1u << 20}; }
  static OrderPredicate divisible(std::uint64_t p) {
    return {Kind::divisible, p, 1u << 20};
  }
  std::string describe() const;
};

struct RistWitness {
  Vertex v;
  Element g;
  std::optional<std::uint64_t> order;
  int radius = 0;
  std::string kind;      // "ball" | "conjugate" | "planted"
  std::string evidence;  // group-word evidence or derivation note
};

struct SearchOptions {
  std::size_t max_hits = 16;
  std::vector<Element> extra_letters;  // extends the ball alphabet
};

// Shortlex ball enumeration over the generator alphabet; keeps words that
// pass in_rist(-, v) and the order predicate, deduplicated by equal().
std::vector<RistWitness> rist_search(const PresentationPtr& pres, const Vertex& v,
                                     int radius, const OrderPredicate& pred,
                                     const SearchOptions& opts = {});

// A word t with act(t, u) = v, from the Schreier tree of the level quotient.
std::optional<Element> transporter(const PresentationPtr& pres, const Vertex& u,
                                   const Vertex& v);

// Deterministic rigid-stabilizer witness provider. Strategy, in order:
//   1. shortlex ball search at a small internal radius;
//   2. conjugating a cached same-level witness by a quotient transporter;
//   3. planting a section word below v. Section words are synthesized once
//      per presentation: level-1 witnesses found by ball search contribute
//      their sections, and for self-similar presentations a kill loop over
//      first-level supports isolates single-coordinate elements whose
//      sections are plantable. Planted witnesses are certified at the
//      automorphism level (in_rist + order); their level-1 instances carry
//      group-word evidence.
class RistProvider {
public:
  struct Plantable {
    Word section;        // anchored one level down (regular shapes)
    std::uint64_t order = 0;
    int visdepth = 0;    // least subtree level the section moves
    std::string evidence;
  };

  explicit RistProvider(PresentationPtr pres);

  const PresentationPtr& presentation() const { return pres_; }

  // Witness of order exactly p (powers of found elements allowed).
  std::optional<RistWitness> exact_order(const Vertex& v, std::uint64_t p,
                                         int radius);
  // Witness of some exact prime order (the provider picks the prime).
  std::optional<RistWitness> prime_order(const Vertex& v, int radius);
  // Any nontrivial witness.
  std::optional<RistWitness> nontrivial(const Vertex& v, int radius);

  const std::vector<Plantable>& plantables();

  int ball_radius = 5;       // internal phase-1 radius
  int ball_depth_limit = 6;  // deepest vertex level worth a ball search
  int synthesis_radius = 6;  // st(1) ball radius for the kill loop

private:
  std::optional<RistWitness> find(const Vertex& v, const OrderPredicate& pred,
                                  int radius);
  void derive();

  PresentationPtr pres_;
  bool derived_ = false;
  std::vector<Plantable> plantables_;
  std::vector<RistWitness> cache_;
};

}  // namespace bf

#endif
