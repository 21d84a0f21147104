#ifndef BRANCHFORGE_QUOTIENTS_HPP
#define BRANCHFORGE_QUOTIENTS_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "branchforge/perm.hpp"
#include "branchforge/words.hpp"

namespace bf {

// The coset g st(n) acting on the level-n vertices, indexed shortlex.
struct LevelPerm {
  int level = 0;
  Perm perm;

  bool operator==(const LevelPerm& o) const {
    return level == o.level && perm == o.perm;
  }
  bool operator<(const LevelPerm& o) const {
    if (level != o.level) return level < o.level;
    return perm < o.perm;
  }
};

// g st(n) -> action on level-n vertices; a homomorphism.
LevelPerm image(const Element& g, int n);

// Deterministic Schreier-Sims stabilizer chain with base points in
// increasing (shortlex vertex) order.
class StabChain {
public:
  StabChain(int level, int degree, std::vector<Perm> generators);

  int degree() const { return degree_; }
  int chain_level() const { return level_; }

  bool contains(const Perm& p) const;
  bool contains(const LevelPerm& p) const;

  // Group order; nullopt when it does not fit in 64 bits.
  std::optional<std::uint64_t> order() const;

  std::vector<int> base() const;

private:
  struct Layer {
    int point = 0;
    std::vector<int> orbit;         // in discovery order
    std::vector<int> where;         // point -> orbit position or -1
    std::vector<Perm> transversal;  // u with point^u = orbit member
  };

  // strong generators with the number of initial base points they fix;
  // layer i is generated by those with level >= i
  struct StrongGen {
    Perm perm;
    int level = 0;
  };

  void rebuild_layer(std::size_t i);
  // strips transversals from layer `from` on; returns the residue and the
  // layer where sifting stopped (layers_.size() when it ran through)
  std::pair<Perm, std::size_t> sift_from(std::size_t from, const Perm& p) const;
  void add_layer_for(const Perm& residue);
  void complete();

  int level_;
  int degree_;
  std::vector<StrongGen> gens_;
  std::vector<Layer> layers_;
};

StabChain stab_chain(const std::vector<LevelPerm>& perms);
bool contains(const StabChain& chain, const LevelPerm& p);

// Order of <generator images at level n> via the chain.
std::uint64_t quotient_order(const PresentationPtr& pres, int n);

// Independent oracle: full BFS closure of <perms> under right products.
std::optional<std::set<Perm>> bfs_enumerate(const std::vector<LevelPerm>& perms,
                                            std::size_t cap);

std::vector<LevelPerm> generator_images(const PresentationPtr& pres, int n);

}  // namespace bf

#endif
