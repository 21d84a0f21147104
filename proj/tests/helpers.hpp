#ifndef BRANCHFORGE_TEST_HELPERS_HPP
#define BRANCHFORGE_TEST_HELPERS_HPP

#include <random>
#include <vector>

#include "branchforge/words.hpp"

namespace bf::testing {

// uniform random reduced-ish generator word
inline Element random_word(const PresentationPtr& pres, std::mt19937& rng,
                           int max_len) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> gen(0, pres->gen_count() - 1);
  std::uniform_int_distribution<int> sign(0, 1);
  std::vector<Atom> atoms;
  const int n = len(rng);
  for (int i = 0; i < n; ++i)
    atoms.push_back(GenAtom{gen(rng), sign(rng) == 1});
  return Element(pres, Word(std::move(atoms)));
}

inline Vertex random_vertex(const TreeShape& shape, std::mt19937& rng,
                            int max_level) {
  std::uniform_int_distribution<int> len(0, max_level);
  Vertex v;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    std::uniform_int_distribution<int> letter(1, shape.arity(i + 1));
    v.push_back(letter(rng));
  }
  return v;
}

}  // namespace bf::testing

#endif
