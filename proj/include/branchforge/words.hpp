#ifndef BRANCHFORGE_WORDS_HPP
#define BRANCHFORGE_WORDS_HPP

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "branchforge/perm.hpp"
#include "branchforge/tree.hpp"

namespace bf {

// Action convention, fixed once for the whole artifact: right actions,
// vertices written v^g; products compose left to right, (v^g)^h = v^(gh);
// sections obey (gh)|_i = g|_i * h|_(i^g) and (g^-1)|_i = (g|_(i^(g^-1)))^-1;
// conjugation is x^y = y^-1 x y.

struct Caps {
  std::size_t closure_states = 100000;  // coinductive closure state cap
  std::size_t word_len = 1000;          // atom-count cap inside closures
  std::size_t ball_words = 1000000;     // ball enumeration cap
  int recursion_depth = 512;            // order/act recursion guard
  std::uint64_t level_points = 1u << 22;  // vertex enumeration guard
};

class Word;

// A generator of the presentation, possibly inverted.
struct GenAtom {
  int gen = 0;
  bool inv = false;
};

// An anonymous rooted automorphism: a permutation of the first-level
// letters with trivial sections.
struct PermAtom {
  Perm perm;
};

// iota_v(w): acts as w on the subtree below `at` and trivially elsewhere.
// Inverses push into the inner word, so planted atoms carry no sign.
struct PlantedAtom {
  Vertex at;  // nonempty in normalized words
  std::shared_ptr<const Word> inner;
};

using Atom = std::variant<GenAtom, PermAtom, PlantedAtom>;

class Word {
public:
  Word() = default;
  explicit Word(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}

  const std::vector<Atom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }

  // Total atom count including the inside of planted atoms.
  std::size_t weight() const;

  std::string key() const;  // canonical serialization for memo tables

private:
  std::vector<Atom> atoms_;
};

Word invert(const Word& w);
Word concat_words(const Word& a, const Word& b);

// Free reduction: adjacent generator/inverse pairs cancel, adjacent
// permutation atoms compose, planted atoms at the same vertex merge, planted
// atoms at incomparable vertices are bubble-sorted into shortlex vertex
// order (they commute).
Word normalize(const Word& w);

enum class Tri { trivial, nontrivial, undecided };

struct GeneratorDef {
  enum class Kind { recursive, planted };
  std::string name;
  Kind kind = Kind::recursive;
  int anchor = 0;  // level the recursion is written at (recursive kind)
  Perm root_perm;
  std::vector<Word> sections;
  Vertex planted_at;  // planted kind
  int cycle_len = 0;
};

// A self-similar presentation: the tree shape plus a named generator table.
// Immutable after construction; memo caches are internal and thread-safe.
class Presentation : public std::enable_shared_from_this<Presentation> {
public:
  Presentation(TreeShape shape, std::vector<GeneratorDef> gens,
               std::string name, std::string ctor);

  const TreeShape& shape() const { return shape_; }
  int gen_count() const { return static_cast<int>(gens_.size()); }
  const GeneratorDef& gen(int i) const { return gens_.at(i); }
  int gen_index(std::string_view name) const;  // -1 when absent
  const std::string& name() const { return name_; }
  const std::string& ctor() const { return ctor_; }

  Caps caps() const;
  void set_caps(const Caps& caps) const;

  // memo tables (keyed by shift-class + canonical word)
  std::optional<bool> cached_trivial(const std::string& key) const;
  void store_trivial(const std::string& key, bool value) const;
  std::optional<std::uint64_t> cached_order(const std::string& key) const;
  void store_order(const std::string& key, std::uint64_t value) const;

  std::string cache_key(int level, const Word& w) const;

private:
  TreeShape shape_;
  std::vector<GeneratorDef> gens_;
  std::unordered_map<std::string, int> index_;
  std::string name_;
  std::string ctor_;

  mutable std::mutex mu_;
  mutable Caps caps_;
  mutable std::unordered_map<std::string, bool> trivial_;
  mutable std::unordered_map<std::string, std::uint64_t> order_;
};

using PresentationPtr = std::shared_ptr<const Presentation>;

struct OrderResult {
  enum class Status { ok, cap_exceeded, undecided } status;
  std::uint64_t value = 0;  // meaningful when ok

  bool ok() const { return status == Status::ok; }
};

// An automorphism of (a subtree of) the presentation's tree, given as a word
// of atoms anchored at `level`. Immutable and freely shareable.
class Element {
public:
  Element() = default;
  Element(PresentationPtr pres, Word w, int level = 0);

  static Element identity(PresentationPtr pres, int level = 0);
  static Element generator(PresentationPtr pres, int gen_index);
  static Element of_perm(PresentationPtr pres, Perm p, int level = 0);
  // iota_v(inner): inner must be anchored at level + |v|.
  static Element planted(const Vertex& v, const Element& inner);

  bool valid() const { return pres_ != nullptr; }
  const PresentationPtr& presentation() const { return pres_; }
  const Word& word() const { return word_; }
  int level() const { return level_; }

  Element operator*(const Element& o) const;
  Element inverse() const;
  Element pow(long long k) const;
  Element conj(const Element& t) const;  // t^-1 * this * t

  Perm root_perm() const;
  Element section(int letter) const;  // 1-based first-level letter
  Element section(const Vertex& v) const;
  Vertex act(const Vertex& v) const;

  Tri triviality() const;
  bool is_trivial() const;  // throws Error(cap_exceeded) when undecided
  bool equals(const Element& o) const;
  OrderResult order(std::uint64_t cap) const;

  std::string to_string() const;
  std::string key() const;

private:
  PresentationPtr pres_;
  int level_ = 0;
  Word word_;
};

// Spec-style free functions over elements.
Element multiply(const Element& g, const Element& h);
Element invert(const Element& g);
Element power(const Element& g, long long k);
Perm root_perm(const Element& g);
Element section(const Element& g, const Vertex& v);
Vertex act(const Element& g, const Vertex& v);
Tri is_trivial_tri(const Element& g);
bool equal(const Element& g, const Element& h);
OrderResult order(const Element& g, std::uint64_t cap);

struct Portrait {
  int depth = 0;
  // labels for every vertex of level < depth, in shortlex order
  std::vector<std::pair<Vertex, Perm>> labels;
};

Portrait portrait(const Element& g, int depth);
std::string portrait_dot(const Portrait& p);

// Element word syntax: generator names juxtaposed, ' or ^-1 for inverses,
// ^k for powers, parentheses for grouping, plant(v; w) for planted atoms,
// perm[i1,i2,...] for anonymous rooted permutations, e for the identity.
Element parse_word(PresentationPtr pres, const std::string& text, int level = 0);
std::string format_word(const Presentation& pres, const Word& w);

// shortlex: atom count first, then canonical key
bool shortlex_less(const Word& a, const Word& b);

}  // namespace bf

#endif
