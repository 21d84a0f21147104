#include "branchforge/words.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <sstream>

#include "branchforge/error.hpp"

namespace bf {

namespace {

constexpr std::size_t kHardWordCap = 1u << 22;

void append_key(const Word& w, std::string& out);

void append_key(const Atom& a, std::string& out) {
  if (const auto* g = std::get_if<GenAtom>(&a)) {
    out += g->inv ? 'G' : 'g';
    out += std::to_string(g->gen);
  } else if (const auto* p = std::get_if<PermAtom>(&a)) {
    out += 'p';
    for (int i : p->perm.images()) {
      out += std::to_string(i);
      out += ',';
    }
  } else {
    const auto& pl = std::get<PlantedAtom>(a);
    out += '(';
    out += format_vertex(pl.at);
    out += '|';
    append_key(*pl.inner, out);
    out += ')';
  }
}

void append_key(const Word& w, std::string& out) {
  for (const auto& a : w.atoms()) {
    append_key(a, out);
    out += ';';
  }
}

Atom invert_atom(const Atom& a) {
  if (const auto* g = std::get_if<GenAtom>(&a)) return GenAtom{g->gen, !g->inv};
  if (const auto* p = std::get_if<PermAtom>(&a)) return PermAtom{p->perm.inverse()};
  const auto& pl = std::get<PlantedAtom>(a);
  return PlantedAtom{pl.at, std::make_shared<Word>(invert(*pl.inner))};
}

bool vertex_shortlex_less(const Vertex& u, const Vertex& v) {
  if (u.size() != v.size()) return u.size() < v.size();
  return u < v;
}

// Tries to combine two adjacent atoms; returns true when `top` absorbed `next`
// (absorbed == empty word drops `top` as well, signalled by `drop`).
bool combine(Atom& top, const Atom& next, bool& drop) {
  drop = false;
  if (const auto* g1 = std::get_if<GenAtom>(&top)) {
    const auto* g2 = std::get_if<GenAtom>(&next);
    if (g2 && g1->gen == g2->gen && g1->inv != g2->inv) {
      drop = true;
      return true;
    }
    return false;
  }
  if (const auto* p1 = std::get_if<PermAtom>(&top)) {
    const auto* p2 = std::get_if<PermAtom>(&next);
    if (p2 && p1->perm.degree() == p2->perm.degree()) {
      Perm prod = p1->perm.then(p2->perm);
      if (prod.is_identity()) {
        drop = true;
      } else {
        top = PermAtom{std::move(prod)};
      }
      return true;
    }
    return false;
  }
  const auto& pl1 = std::get<PlantedAtom>(top);
  const auto* pl2 = std::get_if<PlantedAtom>(&next);
  if (pl2 && pl1.at == pl2->at) {
    Word merged = normalize(concat_words(*pl1.inner, *pl2->inner));
    if (merged.empty()) {
      drop = true;
    } else {
      top = PlantedAtom{pl1.at, std::make_shared<Word>(std::move(merged))};
    }
    return true;
  }
  return false;
}

void push_atom(std::vector<Atom>& out, const Atom& a) {
  if (const auto* p = std::get_if<PermAtom>(&a)) {
    if (p->perm.is_identity()) return;
  }
  if (const auto* pl = std::get_if<PlantedAtom>(&a)) {
    if (pl->inner->empty()) return;
    if (pl->at.empty()) {  // iota_root(w) == w
      for (const auto& inner : pl->inner->atoms()) push_atom(out, inner);
      return;
    }
  }
  if (!out.empty()) {
    bool drop = false;
    if (combine(out.back(), a, drop)) {
      if (drop) out.pop_back();
      return;
    }
  }
  out.push_back(a);
}

}  // namespace

std::size_t Word::weight() const {
  std::size_t n = 0;
  for (const auto& a : atoms_) {
    n += 1;
    if (const auto* pl = std::get_if<PlantedAtom>(&a)) n += pl->inner->weight();
  }
  return n;
}

std::string Word::key() const {
  std::string out;
  out.reserve(atoms_.size() * 4);
  append_key(*this, out);
  return out;
}

Word invert(const Word& w) {
  std::vector<Atom> atoms;
  atoms.reserve(w.atoms().size());
  for (auto it = w.atoms().rbegin(); it != w.atoms().rend(); ++it)
    atoms.push_back(invert_atom(*it));
  return Word(std::move(atoms));
}

Word concat_words(const Word& a, const Word& b) {
  std::vector<Atom> atoms = a.atoms();
  atoms.insert(atoms.end(), b.atoms().begin(), b.atoms().end());
  return Word(std::move(atoms));
}

Word normalize(const Word& w) {
  std::vector<Atom> out;
  out.reserve(w.atoms().size());
  for (const auto& a : w.atoms()) push_atom(out, a);

  // planted atoms at incomparable vertices commute: sort adjacent ones into
  // shortlex vertex order so canonical keys coincide
  bool changed = true;
  std::size_t passes = 0;
  while (changed && passes++ <= out.size() + 2) {
    changed = false;
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
      const auto* p1 = std::get_if<PlantedAtom>(&out[i]);
      const auto* p2 = std::get_if<PlantedAtom>(&out[i + 1]);
      if (!p1 || !p2) continue;
      if (!incomparable(p1->at, p2->at)) continue;
      if (vertex_shortlex_less(p2->at, p1->at)) {
        std::swap(out[i], out[i + 1]);
        changed = true;
      }
    }
  }
  return Word(std::move(out));
}

bool shortlex_less(const Word& a, const Word& b) {
  if (a.atoms().size() != b.atoms().size())
    return a.atoms().size() < b.atoms().size();
  return a.key() < b.key();
}

// ---------------------------------------------------------------------------
// Presentation

namespace {

bool valid_name(const std::string& s) {
  if (s.empty() || s == "e" || s == "plant" || s == "perm") return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

}  // namespace

static void validate_word(const Presentation& pres, const Word& w, int lvl);

static void validate_atom(const Presentation& pres, const Atom& a, int lvl) {
  const TreeShape& shape = pres.shape();
  if (const auto* g = std::get_if<GenAtom>(&a)) {
    if (g->gen < 0 || g->gen >= pres.gen_count())
      fail(ErrorKind::invalid_argument, "generator index out of range");
    const auto& def = pres.gen(g->gen);
    if (def.kind == GeneratorDef::Kind::recursive) {
      if (!shape.same_from(def.anchor, lvl))
        fail(ErrorKind::invalid_argument,
             "generator " + def.name + " is anchored at an incompatible level");
    } else {
      if (!valid_vertex(shape.shifted(lvl), def.planted_at))
        fail(ErrorKind::invalid_argument,
             "planted generator " + def.name + " does not fit at this level");
      const int bottom = lvl + level(def.planted_at) + 1;
      if (def.cycle_len > shape.arity(bottom))
        fail(ErrorKind::invalid_argument,
             "planted generator " + def.name + " cycle exceeds arity");
    }
  } else if (const auto* p = std::get_if<PermAtom>(&a)) {
    if (p->perm.degree() != shape.arity(lvl + 1))
      fail(ErrorKind::invalid_argument, "permutation degree does not match arity");
  } else {
    const auto& pl = std::get<PlantedAtom>(a);
    if (!valid_vertex(shape.shifted(lvl), pl.at))
      fail(ErrorKind::invalid_argument,
           "planted vertex " + format_vertex(pl.at) + " outside the tree");
    validate_word(pres, *pl.inner, lvl + level(pl.at));
  }
}

static void validate_word(const Presentation& pres, const Word& w, int lvl) {
  for (const auto& a : w.atoms()) validate_atom(pres, a, lvl);
}

Presentation::Presentation(TreeShape shape, std::vector<GeneratorDef> gens,
                           std::string name, std::string ctor)
    : shape_(std::move(shape)),
      gens_(std::move(gens)),
      name_(std::move(name)),
      ctor_(std::move(ctor)) {
  for (int i = 0; i < gen_count(); ++i) {
    const auto& def = gens_[i];
    if (!valid_name(def.name))
      fail(ErrorKind::invalid_argument, "bad generator name: '" + def.name + "'");
    if (!index_.emplace(def.name, i).second)
      fail(ErrorKind::invalid_argument, "duplicate generator name: " + def.name);
  }
  for (const auto& def : gens_) {
    if (def.kind == GeneratorDef::Kind::recursive) {
      const int m = shape_.arity(def.anchor + 1);
      if (def.root_perm.degree() != m)
        fail(ErrorKind::invalid_argument,
             "generator " + def.name + ": permutation degree != arity");
      if (static_cast<int>(def.sections.size()) != m)
        fail(ErrorKind::invalid_argument,
             "generator " + def.name + ": expected " + std::to_string(m) + " sections");
      for (const auto& s : def.sections) validate_word(*this, s, def.anchor + 1);
    } else {
      if (!valid_vertex(shape_, def.planted_at))
        fail(ErrorKind::invalid_argument,
             "generator " + def.name + ": planted vertex outside the tree");
      const int m = shape_.arity(level(def.planted_at) + 1);
      if (def.cycle_len < 2 || def.cycle_len > m)
        fail(ErrorKind::invalid_argument,
             "generator " + def.name + ": cycle length out of range");
    }
  }
}

int Presentation::gen_index(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? -1 : it->second;
}

Caps Presentation::caps() const {
  std::lock_guard<std::mutex> lock(mu_);
  return caps_;
}

void Presentation::set_caps(const Caps& caps) const {
  std::lock_guard<std::mutex> lock(mu_);
  caps_ = caps;
}

std::optional<bool> Presentation::cached_trivial(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = trivial_.find(key);
  if (it == trivial_.end()) return std::nullopt;
  return it->second;
}

void Presentation::store_trivial(const std::string& key, bool value) const {
  std::lock_guard<std::mutex> lock(mu_);
  trivial_[key] = value;
}

std::optional<std::uint64_t> Presentation::cached_order(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = order_.find(key);
  if (it == order_.end()) return std::nullopt;
  return it->second;
}

void Presentation::store_order(const std::string& key, std::uint64_t value) const {
  std::lock_guard<std::mutex> lock(mu_);
  order_[key] = value;
}

std::string Presentation::cache_key(int lvl, const Word& w) const {
  return std::to_string(shape_.shift_class(lvl)) + ":" + w.key();
}

// ---------------------------------------------------------------------------
// Wreath recursion primitives

namespace {

Perm atom_root_perm(const Presentation& pres, const Atom& a, int lvl) {
  const int m = pres.shape().arity(lvl + 1);
  if (const auto* g = std::get_if<GenAtom>(&a)) {
    const auto& def = pres.gen(g->gen);
    if (def.kind == GeneratorDef::Kind::recursive)
      return g->inv ? def.root_perm.inverse() : def.root_perm;
    if (!def.planted_at.empty()) return Perm(m);
    Perm c = Perm::cycle(m, def.cycle_len);
    return g->inv ? c.inverse() : c;
  }
  if (const auto* p = std::get_if<PermAtom>(&a)) return p->perm;
  return Perm(m);
}

// letter0 is 0-based; the result word lives at lvl + 1
Word atom_section(const Presentation& pres, const Atom& a, int lvl, int letter0) {
  if (const auto* g = std::get_if<GenAtom>(&a)) {
    const auto& def = pres.gen(g->gen);
    if (def.kind == GeneratorDef::Kind::recursive) {
      if (!g->inv) return def.sections[letter0];
      const int src = def.root_perm.inverse().apply(letter0);
      return invert(def.sections[src]);
    }
    if (def.planted_at.empty()) return Word();
    if (def.planted_at[0] != letter0 + 1) return Word();
    Vertex rest(def.planted_at.begin() + 1, def.planted_at.end());
    const int bottom = lvl + level(def.planted_at) + 1;
    Perm c = Perm::cycle(pres.shape().arity(bottom), def.cycle_len);
    if (g->inv) c = c.inverse();
    Word cyc(std::vector<Atom>{PermAtom{std::move(c)}});
    if (rest.empty()) return cyc;
    return Word(std::vector<Atom>{
        PlantedAtom{std::move(rest), std::make_shared<Word>(std::move(cyc))}});
  }
  if (std::get_if<PermAtom>(&a)) return Word();
  const auto& pl = std::get<PlantedAtom>(a);
  if (pl.at[0] != letter0 + 1) return Word();
  Vertex rest(pl.at.begin() + 1, pl.at.end());
  if (rest.empty()) return *pl.inner;
  return Word(std::vector<Atom>{PlantedAtom{std::move(rest), pl.inner}});
}

Perm word_root_perm(const Presentation& pres, const Word& w, int lvl) {
  Perm p(pres.shape().arity(lvl + 1));
  for (const auto& a : w.atoms()) p = p.then(atom_root_perm(pres, a, lvl));
  return p;
}

Word word_section_letter(const Presentation& pres, const Word& w, int lvl, int letter0) {
  std::vector<Atom> out;
  int cur = letter0;
  for (const auto& a : w.atoms()) {
    const Word sec = atom_section(pres, a, lvl, cur);
    for (const auto& atom : sec.atoms()) push_atom(out, atom);
    cur = atom_root_perm(pres, a, lvl).apply(cur);
    if (out.size() > kHardWordCap)
      fail(ErrorKind::cap_exceeded, "section word exceeds the hard cap");
  }
  return normalize(Word(std::move(out)));
}

}  // namespace

// ---------------------------------------------------------------------------
// Triviality: coinductive state closure. An automorphism is trivial exactly
// when every word reachable from it by taking first-level sections has a
// trivial root permutation; the closure is finite for bounded-activity words.

namespace {

struct ClosureState {
  Word w;
  int lvl;
  std::string key;
  int parent;
};

}  // namespace

static Tri word_triviality(const Presentation& pres, const Word& start, int lvl) {
  Word w0 = normalize(start);
  if (w0.empty()) return Tri::trivial;
  const Caps caps = pres.caps();

  std::vector<ClosureState> states;
  std::unordered_map<std::string, int> seen;
  std::vector<int> queue;

  auto mark_nontrivial_chain = [&](int idx) {
    for (int i = idx; i >= 0; i = states[i].parent)
      pres.store_trivial(states[i].key, false);
  };

  {
    std::string key = pres.cache_key(lvl, w0);
    if (auto hit = pres.cached_trivial(key)) return *hit ? Tri::trivial : Tri::nontrivial;
    seen.emplace(key, 0);
    states.push_back({std::move(w0), lvl, std::move(key), -1});
    queue.push_back(0);
  }

  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int si = queue[qi];
    if (auto hit = pres.cached_trivial(states[si].key)) {
      if (*hit) continue;  // known-trivial subtree contributes nothing new
      mark_nontrivial_chain(si);
      return Tri::nontrivial;
    }
    const Perm pi = word_root_perm(pres, states[si].w, states[si].lvl);
    if (!pi.is_identity()) {
      mark_nontrivial_chain(si);
      return Tri::nontrivial;
    }
    for (int letter = 0; letter < pi.degree(); ++letter) {
      Word sec = word_section_letter(pres, states[si].w, states[si].lvl, letter);
      if (sec.empty()) continue;
      if (sec.weight() > caps.word_len) return Tri::undecided;
      std::string key = pres.cache_key(states[si].lvl + 1, sec);
      if (seen.count(key)) continue;
      if (states.size() >= caps.closure_states) return Tri::undecided;
      seen.emplace(key, static_cast<int>(states.size()));
      states.push_back({std::move(sec), states[si].lvl + 1, std::move(key), si});
      queue.push_back(static_cast<int>(states.size()) - 1);
    }
  }

  for (const auto& s : states) pres.store_trivial(s.key, true);
  return Tri::trivial;
}

// ---------------------------------------------------------------------------
// Order: lcm over root cycles of |C| * order(section product along C),
// memoized on canonical words. A re-entered in-progress word means a
// self-similar loop: with a strictly larger level multiplier the element has
// infinite order; with an equal multiplier the branch adds no constraint and
// is dropped (least fixed point, e.g. b = (a, c) style directed generators).
// Results computed under a dropped ancestor are only correct relative to that
// ancestor, so they are memoized only once the loop head completes.

namespace {

struct OrderEngine {
  const Presentation& pres;
  std::uint64_t cap;
  Caps caps;
  struct InProg {
    unsigned __int128 mult;
    int depth;
  };
  std::unordered_map<std::string, InProg> in_progress;
  int depth = 0;

  struct Res {
    OrderResult::Status st = OrderResult::Status::ok;
    std::uint64_t val = 1;
    int taint = std::numeric_limits<int>::max();
  };

  Res rec(const Word& w_in, int lvl, unsigned __int128 mult) {
    Res res;
    Word w = normalize(w_in);
    if (w.empty()) return res;
    const std::string key = pres.cache_key(lvl, w);
    if (auto hit = pres.cached_order(key)) {
      res.val = *hit;
      if (res.val > cap) res.st = OrderResult::Status::cap_exceeded;
      return res;
    }
    if (auto it = in_progress.find(key); it != in_progress.end()) {
      if (mult > it->second.mult) {
        res.st = OrderResult::Status::cap_exceeded;  // infinite order
        return res;
      }
      res.taint = it->second.depth;
      return res;  // dropped self-referential branch
    }
    if (depth > caps.recursion_depth) {
      res.st = OrderResult::Status::cap_exceeded;
      return res;
    }
    switch (word_triviality(pres, w, lvl)) {
      case Tri::trivial:
        pres.store_order(key, 1);
        return res;
      case Tri::undecided:
        res.st = OrderResult::Status::undecided;
        return res;
      case Tri::nontrivial:
        break;
    }

    const Perm pi = word_root_perm(pres, w, lvl);
    const int my_depth = depth;
    in_progress.emplace(key, InProg{mult, my_depth});
    ++depth;

    std::uint64_t acc = 1;
    int taint = std::numeric_limits<int>::max();
    for (const auto& cyc : pi.cycles(true)) {
      const std::uint64_t clen = cyc.size();
      std::vector<Atom> prod;
      int cur = cyc[0];
      for (std::size_t step = 0; step < cyc.size(); ++step) {
        const Word sec = word_section_letter(pres, w, lvl, cur);
        for (const auto& atom : sec.atoms()) push_atom(prod, atom);
        cur = pi.apply(cur);
      }
      Word s = normalize(Word(std::move(prod)));
      if (s.empty() && clen == 1) continue;
      Res sub = rec(s, lvl + 1, mult * clen);
      if (sub.st != OrderResult::Status::ok) {
        --depth;
        in_progress.erase(key);
        return sub;
      }
      taint = std::min(taint, sub.taint);
      const unsigned __int128 contrib =
          static_cast<unsigned __int128>(clen) * sub.val;
      if (contrib > cap) {
        --depth;
        in_progress.erase(key);
        res.st = OrderResult::Status::cap_exceeded;
        return res;
      }
      const std::uint64_t c64 = static_cast<std::uint64_t>(contrib);
      const std::uint64_t g = std::gcd(acc, c64);
      const unsigned __int128 l = static_cast<unsigned __int128>(acc / g) * c64;
      if (l > cap) {
        --depth;
        in_progress.erase(key);
        res.st = OrderResult::Status::cap_exceeded;
        return res;
      }
      acc = static_cast<std::uint64_t>(l);
    }

    --depth;
    in_progress.erase(key);
    res.val = acc;
    if (taint >= my_depth) {
      pres.store_order(key, acc);
    } else {
      res.taint = taint;
    }
    return res;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Element

Element::Element(PresentationPtr pres, Word w, int lvl)
    : pres_(std::move(pres)), level_(lvl), word_(normalize(w)) {
  if (!pres_) fail(ErrorKind::invalid_argument, "element without a presentation");
  validate_word(*pres_, word_, level_);
}

Element Element::identity(PresentationPtr pres, int lvl) {
  return Element(std::move(pres), Word(), lvl);
}

Element Element::generator(PresentationPtr pres, int gen_index) {
  if (gen_index < 0 || gen_index >= pres->gen_count())
    fail(ErrorKind::invalid_argument, "generator index out of range");
  return Element(pres, Word(std::vector<Atom>{GenAtom{gen_index, false}}), 0);
}

Element Element::of_perm(PresentationPtr pres, Perm p, int lvl) {
  return Element(std::move(pres), Word(std::vector<Atom>{PermAtom{std::move(p)}}), lvl);
}

Element Element::planted(const Vertex& v, const Element& inner) {
  if (inner.level_ < bf::level(v))
    fail(ErrorKind::invalid_argument, "planted inner element anchored too high");
  const int base = inner.level_ - bf::level(v);
  if (v.empty()) return inner;
  Word w(std::vector<Atom>{PlantedAtom{v, std::make_shared<Word>(inner.word_)}});
  return Element(inner.pres_, std::move(w), base);
}

// Elements anchored at different levels combine when the subtree shapes
// agree from those levels (always on regular trees); the right operand is
// rebased onto the left's level.
static void check_compatible(const Element& a, const Element& b) {
  if (a.presentation().get() != b.presentation().get())
    fail(ErrorKind::invalid_argument, "elements of different presentations");
  if (a.level() != b.level() &&
      !a.presentation()->shape().same_from(a.level(), b.level()))
    fail(ErrorKind::invalid_argument,
         "elements anchored at incompatible levels");
}

Element Element::operator*(const Element& o) const {
  check_compatible(*this, o);
  return Element(pres_, concat_words(word_, o.word_), level_);
}

Element Element::inverse() const { return Element(pres_, invert(word_), level_); }

Element Element::pow(long long k) const {
  Element base = k < 0 ? inverse() : *this;
  unsigned long long n = k < 0 ? -static_cast<unsigned long long>(k) : k;
  Element acc = Element::identity(pres_, level_);
  while (n) {
    if (n & 1) acc = acc * base;
    base = base * base;
    n >>= 1;
  }
  return acc;
}

Element Element::conj(const Element& t) const { return t.inverse() * *this * t; }

Perm Element::root_perm() const { return word_root_perm(*pres_, word_, level_); }

Element Element::section(int letter) const {
  const int m = pres_->shape().arity(level_ + 1);
  if (letter < 1 || letter > m)
    fail(ErrorKind::invalid_argument, "section letter out of range");
  return Element(pres_, word_section_letter(*pres_, word_, level_, letter - 1),
                 level_ + 1);
}

Element Element::section(const Vertex& v) const {
  Element cur = *this;
  for (int letter : v) cur = cur.section(letter);
  return cur;
}

Vertex Element::act(const Vertex& v) const {
  if (!valid_vertex(pres_->shape().shifted(level_), v))
    fail(ErrorKind::invalid_argument, "vertex outside the tree: " + format_vertex(v));
  Vertex out;
  out.reserve(v.size());
  Word cur = word_;
  int lvl = level_;
  for (int letter : v) {
    const Perm pi = word_root_perm(*pres_, cur, lvl);
    out.push_back(pi.apply_letter(letter));
    cur = word_section_letter(*pres_, cur, lvl, letter - 1);
    ++lvl;
  }
  return out;
}

Tri Element::triviality() const { return word_triviality(*pres_, word_, level_); }

bool Element::is_trivial() const {
  switch (triviality()) {
    case Tri::trivial:
      return true;
    case Tri::nontrivial:
      return false;
    default:
      fail(ErrorKind::cap_exceeded, "undecided: closure cap exceeded");
  }
}

bool Element::equals(const Element& o) const {
  check_compatible(*this, o);
  return (*this * o.inverse()).is_trivial();
}

OrderResult Element::order(std::uint64_t cap) const {
  if (cap < 1) fail(ErrorKind::invalid_argument, "order cap must be >= 1");
  OrderEngine eng{*pres_, cap, pres_->caps(), {}, 0};
  auto res = eng.rec(word_, level_, 1);
  switch (res.st) {
    case OrderResult::Status::ok:
      return {OrderResult::Status::ok, res.val};
    case OrderResult::Status::cap_exceeded:
      return {OrderResult::Status::cap_exceeded, 0};
    default:
      return {OrderResult::Status::undecided, 0};
  }
}

std::string Element::to_string() const { return format_word(*pres_, word_); }

std::string Element::key() const { return pres_->cache_key(level_, word_); }

Element multiply(const Element& g, const Element& h) { return g * h; }
Element invert(const Element& g) { return g.inverse(); }
Element power(const Element& g, long long k) { return g.pow(k); }
Perm root_perm(const Element& g) { return g.root_perm(); }
Element section(const Element& g, const Vertex& v) { return g.section(v); }
Vertex act(const Element& g, const Vertex& v) { return g.act(v); }
Tri is_trivial_tri(const Element& g) { return g.triviality(); }
bool equal(const Element& g, const Element& h) { return g.equals(h); }
OrderResult order(const Element& g, std::uint64_t cap) { return g.order(cap); }

// ---------------------------------------------------------------------------
// Portraits

Portrait portrait(const Element& g, int depth) {
  if (depth < 1) fail(ErrorKind::invalid_argument, "portrait depth must be >= 1");
  Portrait out;
  out.depth = depth;
  struct Item {
    Vertex v;
    Element e;
  };
  std::vector<Item> queue{{Vertex{}, g}};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const Item item = queue[qi];
    out.labels.emplace_back(item.v, item.e.root_perm());
    if (level(item.v) + 1 < depth) {
      const int m = item.e.presentation()->shape().arity(g.level() + level(item.v) + 1);
      for (int letter = 1; letter <= m; ++letter) {
        Vertex c = item.v;
        c.push_back(letter);
        queue.push_back({std::move(c), item.e.section(letter)});
      }
    }
  }
  std::stable_sort(out.labels.begin(), out.labels.end(),
                   [](const auto& a, const auto& b) {
                     return vertex_shortlex_less(a.first, b.first);
                   });
  return out;
}

std::string portrait_dot(const Portrait& p) {
  std::ostringstream out;
  out << "digraph portrait {\n";
  out << "  node [shape=box];\n";
  for (const auto& [v, perm] : p.labels) {
    out << "  \"" << format_vertex(v) << "\" [label=\"" << format_vertex(v)
        << ": " << perm.cycle_string() << "\"];\n";
  }
  for (const auto& [v, perm] : p.labels) {
    if (v.empty()) continue;
    Vertex parent(v.begin(), v.end() - 1);
    out << "  \"" << format_vertex(parent) << "\" -> \"" << format_vertex(v)
        << "\";\n";
  }
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Word syntax

namespace {

struct WordParser {
  const Presentation& pres;
  const std::string& text;
  std::size_t pos = 0;

  [[noreturn]] void err(const std::string& msg) const {
    fail(ErrorKind::parse, msg + " at position " + std::to_string(pos) + " in '" +
                               text + "'");
  }

  void skip_ws() {
    while (pos < text.size() &&
           (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == '*'))
      ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() { return pos < text.size() ? text[pos] : '\0'; }

  bool try_consume(char c) {
    skip_ws();
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }

  long long parse_int() {
    skip_ws();
    std::size_t start = pos;
    if (peek() == '-' || peek() == '+') ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
      ++pos;
    if (pos == start || (pos == start + 1 && !std::isdigit(static_cast<unsigned char>(text[start]))))
      err("expected an integer");
    return std::stoll(text.substr(start, pos - start));
  }

  // Splits an identifier chunk into declared generator names ("e" allowed for
  // the identity), longest prefix first with backtracking.
  bool split_names(const std::string& chunk, std::size_t from,
                   std::vector<std::string>& out) {
    if (from == chunk.size()) return true;
    for (std::size_t len = chunk.size() - from; len >= 1; --len) {
      const std::string cand = chunk.substr(from, len);
      if (cand != "e" && pres.gen_index(cand) < 0) continue;
      out.push_back(cand);
      if (split_names(chunk, from + len, out)) return true;
      out.pop_back();
    }
    return false;
  }

  Word parse_factor_postfix(Word factor) {
    for (;;) {
      skip_ws();
      if (peek() == '\'') {
        ++pos;
        factor = invert(factor);
      } else if (peek() == '^') {
        ++pos;
        long long k = parse_int();
        Word base = factor;
        if (k < 0) {
          base = invert(base);
          k = -k;
        }
        Word acc;
        for (long long i = 0; i < k; ++i) acc = concat_words(acc, base);
        factor = std::move(acc);
      } else {
        return factor;
      }
    }
  }

  Word parse_word_at(int lvl, bool inside_parens) {
    std::vector<Atom> out;
    for (;;) {
      skip_ws();
      if (pos >= text.size()) break;
      const char c = peek();
      if (c == ')' || c == ';') {
        if (!inside_parens) err("unexpected ')'");
        break;
      }
      Word factor;
      if (c == '(') {
        ++pos;
        factor = parse_word_at(lvl, true);
        if (!try_consume(')')) err("expected ')'");
      } else if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
          ++pos;
        std::string chunk = text.substr(start, pos - start);
        if (chunk == "plant" && try_consume('(')) {
          std::size_t vstart = pos;
          while (pos < text.size() && text[pos] != ';') ++pos;
          if (pos >= text.size()) err("expected ';' in plant(v; w)");
          std::string vtext = text.substr(vstart, pos - vstart);
          while (!vtext.empty() && std::isspace(static_cast<unsigned char>(vtext.back())))
            vtext.pop_back();
          std::size_t lead = 0;
          while (lead < vtext.size() && std::isspace(static_cast<unsigned char>(vtext[lead])))
            ++lead;
          Vertex v = parse_vertex(vtext.substr(lead));
          ++pos;  // ';'
          Word inner = parse_word_at(lvl + level(v), true);
          if (!try_consume(')')) err("expected ')' closing plant");
          if (v.empty()) {
            factor = inner;
          } else {
            factor = Word(std::vector<Atom>{
                PlantedAtom{std::move(v), std::make_shared<Word>(std::move(inner))}});
          }
        } else if (chunk == "perm" && try_consume('[')) {
          std::vector<int> images;
          for (;;) {
            images.push_back(static_cast<int>(parse_int()));
            if (!try_consume(',')) break;
          }
          if (!try_consume(']')) err("expected ']' closing perm");
          factor = Word(std::vector<Atom>{PermAtom{Perm::from_one_based(images)}});
        } else {
          std::vector<std::string> names;
          if (!split_names(chunk, 0, names))
            err("unknown generator in '" + chunk + "'");
          for (std::size_t i = 0; i + 1 < names.size(); ++i) {
            if (names[i] == "e") continue;
            out.push_back(GenAtom{pres.gen_index(names[i]), false});
          }
          const std::string& last = names.back();
          if (last != "e")
            factor = Word(std::vector<Atom>{GenAtom{pres.gen_index(last), false}});
        }
      } else {
        err(std::string("unexpected character '") + c + "'");
      }
      factor = parse_factor_postfix(std::move(factor));
      for (const auto& a : factor.atoms()) out.push_back(a);
    }
    return Word(std::move(out));
  }
};

void format_atom(const Presentation& pres, const Atom& a, std::ostringstream& out) {
  if (const auto* g = std::get_if<GenAtom>(&a)) {
    out << pres.gen(g->gen).name;
    if (g->inv) out << '\'';
  } else if (const auto* p = std::get_if<PermAtom>(&a)) {
    out << "perm[";
    const auto& img = p->perm.images();
    for (std::size_t i = 0; i < img.size(); ++i) {
      if (i) out << ',';
      out << img[i] + 1;
    }
    out << ']';
  } else {
    const auto& pl = std::get<PlantedAtom>(a);
    out << "plant(" << format_vertex(pl.at) << "; "
        << format_word(pres, *pl.inner) << ')';
  }
}

}  // namespace

Element parse_word(PresentationPtr pres, const std::string& text, int lvl) {
  WordParser parser{*pres, text};
  Word w = parser.parse_word_at(lvl, false);
  parser.skip_ws();
  if (parser.pos != text.size()) parser.err("trailing input");
  return Element(std::move(pres), std::move(w), lvl);
}

std::string format_word(const Presentation& pres, const Word& w) {
  if (w.empty()) return "e";
  std::ostringstream out;
  for (const auto& a : w.atoms()) format_atom(pres, a, out);
  return out.str();
}

}  // namespace bf
