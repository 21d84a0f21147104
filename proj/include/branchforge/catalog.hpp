#ifndef BRANCHFORGE_CATALOG_HPP
#define BRANCHFORGE_CATALOG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "branchforge/words.hpp"

namespace bf {

struct GgsVector {
  std::int64_t p = 0;
  std::vector<std::int64_t> entries;  // length p-1, reduced mod p

  bool non_constant() const;
};

// Built-in presentations.
PresentationPtr grigorchuk();
PresentationPtr ggs(std::int64_t p, std::vector<std::int64_t> entries);
PresentationPtr multi_ggs(std::int64_t p, std::vector<std::vector<std::int64_t>> vectors);
bool ggs_is_torsion(std::int64_t p, const std::vector<std::int64_t>& entries);
PresentationPtr example25(const std::vector<std::int64_t>& primes);

// Group-spec text format (see the CLI docs): line-based directives
//   tree [prefix m ...] block m ...   |   tree regular m
//   gen  <name> perm <images|id> sections <w1> ... <wm>
//   plant <name> at <vertex> cycle <len>
PresentationPtr load_spec(const std::string& text);
std::string serialize(const Presentation& pres);

// Resolve a group designator: a catalog constructor string
// ("grigorchuk", "ggs:3:1,2", "multi-ggs:3:1,2;1,0", "example25:2,3,5")
// or inline spec text ("spec:...").
PresentationPtr resolve_group(const std::string& designator);

bool presentations_equal(const Presentation& a, const Presentation& b);

bool is_prime(std::int64_t n);

}  // namespace bf

#endif
