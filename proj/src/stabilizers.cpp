#include "branchforge/stabilizers.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "branchforge/error.hpp"

namespace bf {

namespace {

// Iterate vertices of one level in shortlex order. fn returns false to stop.
template <typename Fn>
void for_level(const TreeShape& shape, int lvl, std::uint64_t cap, Fn&& fn) {
  const std::uint64_t n = shape.level_size(lvl);
  if (n > cap) fail(ErrorKind::cap_exceeded, "level enumeration exceeds cap");
  for (std::uint64_t i = 0; i < n; ++i)
    if (!fn(vertex_at(shape, lvl, i))) return;
}

}  // namespace

bool in_level_stab(const Element& g, int n) {
  if (n < 0) fail(ErrorKind::invalid_argument, "level must be >= 0");
  const auto shape = g.presentation()->shape().shifted(g.level());
  bool fixed = true;
  for_level(shape, n, g.presentation()->caps().level_points, [&](const Vertex& v) {
    if (g.act(v) != v) {
      fixed = false;
      return false;
    }
    return true;
  });
  return fixed;
}

bool in_rist(const Element& g, const Vertex& v) {
  const auto shape = g.presentation()->shape().shifted(g.level());
  if (!valid_vertex(shape, v))
    fail(ErrorKind::invalid_argument, "vertex outside the tree");
  // a word of planted atoms supported inside the subtree below v is rigid by
  // construction; this avoids enumerating huge levels for deep witnesses
  {
    bool structural = true;
    for (const auto& atom : g.word().atoms()) {
      const auto* pl = std::get_if<PlantedAtom>(&atom);
      if (!pl) {
        structural = false;
        break;
      }
      const auto rel = relation(v, pl->at);
      if (rel != Relation::equal && rel != Relation::ancestor) {
        structural = false;
        break;
      }
    }
    if (structural) return true;
  }
  if (!in_level_stab(g, level(v))) return false;
  bool outside_trivial = true;
  for_level(shape, level(v), g.presentation()->caps().level_points,
            [&](const Vertex& u) {
              if (u == v) return true;
              if (!g.section(u).is_trivial()) {
                outside_trivial = false;
                return false;
              }
              return true;
            });
  return outside_trivial;
}

std::vector<Vertex> orbit_of_vertex(const Element& g, const Vertex& v,
                                    std::uint64_t cap) {
  std::vector<Vertex> orbit{v};
  Vertex cur = g.act(v);
  while (cur != v) {
    orbit.push_back(cur);
    if (orbit.size() > cap)
      fail(ErrorKind::cap_exceeded, "vertex orbit exceeds cap");
    cur = g.act(cur);
  }
  return orbit;
}

OrbitPoint find_orbit_p_point(const Element& a, std::uint64_t p) {
  const auto ord = a.order(p);
  if (!ord.ok() || ord.value != p)
    fail(ErrorKind::invalid_argument, "element does not have order p");
  const auto shape = a.presentation()->shape().shifted(a.level());
  const auto caps = a.presentation()->caps();
  for (int lvl = 1;; ++lvl) {
    if (shape.level_size(lvl) > caps.level_points)
      fail(ErrorKind::cap_exceeded, "no orbit of size p within the level cap");
    OrbitPoint found;
    bool ok = false;
    for_level(shape, lvl, caps.level_points, [&](const Vertex& x) {
      if (a.act(x) != x) {
        // orbit length divides the prime order, so any moved vertex works
        found = OrbitPoint{x, lvl};
        ok = true;
        return false;
      }
      return true;
    });
    if (ok) {
      if (orbit_of_vertex(a, found.x).size() != p)
        fail(ErrorKind::verify_failed, "orbit of moved vertex is not p");
      return found;
    }
  }
}

std::optional<Vertex> first_moved_vertex(const Element& g, int max_level) {
  const auto shape = g.presentation()->shape().shifted(g.level());
  const auto caps = g.presentation()->caps();
  for (int lvl = 1; lvl <= max_level; ++lvl) {
    std::optional<Vertex> hit;
    for_level(shape, lvl, caps.level_points, [&](const Vertex& v) {
      if (g.act(v) != v) {
        hit = v;
        return false;
      }
      return true;
    });
    if (hit) return hit;
  }
  return std::nullopt;
}

std::optional<int> first_moved_level(const Element& g, int max_level) {
  if (auto v = first_moved_vertex(g, max_level)) return level(*v);
  return std::nullopt;
}

std::string OrderPredicate::describe() const {
  switch (kind) {
    case Kind::exact:
      return "order=" + std::to_string(p);
    case Kind::divisible:
      return "order%" + std::to_string(p) + "=0";
    default:
      return "nontrivial";
  }
}

namespace {

bool predicate_matches(const OrderPredicate& pred, const Element& g,
                       std::optional<std::uint64_t>* order_out) {
  switch (pred.kind) {
    case OrderPredicate::Kind::nontrivial:
      return !g.is_trivial();
    case OrderPredicate::Kind::exact:
    case OrderPredicate::Kind::divisible: {
      const auto ord = g.order(pred.cap);
      if (!ord.ok()) return false;
      if (order_out) *order_out = ord.value;
      if (pred.kind == OrderPredicate::Kind::exact) return ord.value == pred.p;
      return ord.value != 1 && ord.value % pred.p == 0;
    }
  }
  return false;
}

// Shortlex ball over the generator alphabet (inverses skipped for verified
// involutions) plus any extra letters. fn returns false to stop.
template <typename Fn>
void enumerate_ball(const PresentationPtr& pres, int radius,
                    const std::vector<Element>& extra, Fn&& fn) {
  std::vector<Element> letters;
  for (int i = 0; i < pres->gen_count(); ++i) {
    Element g = Element::generator(pres, i);
    letters.push_back(g);
    if (!(g * g).is_trivial()) letters.push_back(g.inverse());
  }
  for (const auto& x : extra) {
    letters.push_back(x);
    letters.push_back(x.inverse());
  }

  const std::size_t cap = pres->caps().ball_words;
  std::unordered_set<std::string> seen;
  std::deque<std::pair<Element, int>> queue;
  Element id = Element::identity(pres);
  seen.insert(id.key());
  queue.emplace_back(std::move(id), 0);
  while (!queue.empty()) {
    auto [cur, len] = queue.front();
    queue.pop_front();
    if (len > 0 && !fn(cur, len)) return;
    if (len == radius) continue;
    for (const auto& letter : letters) {
      Element next = cur * letter;
      auto key = next.key();
      if (seen.count(key)) continue;
      if (seen.size() >= cap)
        fail(ErrorKind::cap_exceeded, "ball enumeration exceeds cap");
      seen.insert(std::move(key));
      queue.emplace_back(std::move(next), len + 1);
    }
  }
}

}  // namespace

std::vector<RistWitness> rist_search(const PresentationPtr& pres, const Vertex& v,
                                     int radius, const OrderPredicate& pred,
                                     const SearchOptions& opts) {
  if (radius < 0) fail(ErrorKind::invalid_argument, "radius must be >= 0");
  std::vector<RistWitness> hits;
  if (radius == 0) return hits;
  enumerate_ball(pres, radius, opts.extra_letters, [&](const Element& g, int len) {
    // trivial words lie in every rigid stabilizer but fail every predicate;
    // dropping them (and undecided ones) first avoids full-level scans
    if (g.triviality() != Tri::nontrivial) return true;
    if (!in_rist(g, v)) return true;
    std::optional<std::uint64_t> ord;
    if (!predicate_matches(pred, g, &ord)) return true;
    for (const auto& h : hits)
      if (h.g.equals(g)) return true;
    hits.push_back(RistWitness{v, g, ord, len, "ball", g.to_string()});
    return hits.size() < opts.max_hits;
  });
  return hits;
}

std::optional<Element> transporter(const PresentationPtr& pres, const Vertex& u,
                                   const Vertex& v) {
  if (level(u) != level(v))
    fail(ErrorKind::invalid_argument, "transporter endpoints must share a level");
  if (u == v) return Element::identity(pres);
  std::vector<Element> letters;
  for (int i = 0; i < pres->gen_count(); ++i) {
    letters.push_back(Element::generator(pres, i));
    letters.push_back(letters.back().inverse());
  }
  std::map<Vertex, Element> how{{u, Element::identity(pres)}};
  std::deque<Vertex> queue{u};
  const std::uint64_t cap = pres->caps().level_points;
  while (!queue.empty()) {
    const Vertex cur = queue.front();
    queue.pop_front();
    for (const auto& g : letters) {
      Vertex next = g.act(cur);
      if (how.count(next)) continue;
      if (how.size() > cap) fail(ErrorKind::cap_exceeded, "orbit exceeds cap");
      Element word = how.at(cur) * g;
      if (next == v) return word;
      queue.push_back(next);
      how.emplace(std::move(next), std::move(word));
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// RistProvider

RistProvider::RistProvider(PresentationPtr pres) : pres_(std::move(pres)) {}

const std::vector<RistProvider::Plantable>& RistProvider::plantables() {
  if (!derived_) derive();
  return plantables_;
}

namespace {

struct StOneEntry {
  Element e;
  std::vector<char> support;  // per letter: section nontrivial
  int support_size = 0;
};

std::optional<std::vector<char>> section_support(const Element& g, int m) {
  std::vector<char> sup(m, 0);
  for (int i = 1; i <= m; ++i) {
    switch (g.section(i).triviality()) {
      case Tri::trivial:
        break;
      case Tri::nontrivial:
        sup[i - 1] = 1;
        break;
      case Tri::undecided:
        return std::nullopt;
    }
  }
  return sup;
}

}  // namespace

void RistProvider::derive() {
  derived_ = true;
  const auto& shape = pres_->shape();
  const int m = shape.arity(1);

  auto add_plantable = [&](const Element& section, const std::string& evidence) {
    const auto ord = section.order(1u << 20);
    if (!ord.ok() || ord.value < 2) return;
    const auto vis = first_moved_level(section, 12);
    if (!vis) return;
    Plantable p{section.word(), ord.value, *vis, evidence};
    for (const auto& q : plantables_)
      if (q.section.key() == p.section.key()) return;
    plantables_.push_back(std::move(p));
  };

  // level-1 ball witnesses contribute their sections
  for (int letter = 1; letter <= m; ++letter) {
    const Vertex v{letter};
    for (const auto& w :
         rist_search(pres_, v, ball_radius, OrderPredicate::nontrivial(),
                     SearchOptions{2, {}})) {
      add_plantable(w.g.section(v),
                    "section of " + w.g.to_string() + " at " + format_vertex(v));
    }
  }

  // Kill loop (self-similar shapes only): start from a first-level-trivial
  // word and clear one support coordinate at a time with helpers whose
  // section at that coordinate is trivial; W <- W * (W^h)^-1 keeps every
  // already-trivial coordinate trivial.
  if (!shape.same_from(0, 1)) return;

  std::vector<StOneEntry> st1;
  try {
    enumerate_ball(pres_, synthesis_radius, {}, [&](const Element& g, int) {
      if (!g.root_perm().is_identity()) return true;
      auto sup = section_support(g, m);
      if (!sup) return true;
      int size = 0;
      for (char c : *sup) size += c;
      if (size == 0) return true;
      st1.push_back(StOneEntry{g, std::move(*sup), size});
      return st1.size() < 4000;
    });
  } catch (const Error&) {
    return;  // ball cap; keep whatever plantables exist
  }

  std::vector<std::vector<const StOneEntry*>> helpers(m);
  for (const auto& e : st1)
    for (int j = 0; j < m; ++j)
      if (!e.support[j] && helpers[j].size() < 12) helpers[j].push_back(&e);

  std::vector<const StOneEntry*> seeds;
  for (const auto& e : st1) seeds.push_back(&e);
  std::stable_sort(seeds.begin(), seeds.end(),
                   [](const StOneEntry* a, const StOneEntry* b) {
                     return a->support_size < b->support_size;
                   });

  const std::size_t want = plantables_.empty() ? 2 : 1;
  std::size_t produced = 0;
  for (const auto* seed : seeds) {
    if (produced >= want) break;
    for (int target = 0; target < m && produced < want; ++target) {
      if (!seed->support[target]) continue;
      Element w = seed->e;
      std::vector<char> sup = seed->support;
      bool ok = true;
      for (int j = 0; j < m && ok; ++j) {
        if (j == target || !sup[j]) continue;
        bool killed = false;
        for (const auto* h : helpers[j]) {
          Element cand = w * w.conj(h->e).inverse();
          auto csup = section_support(cand, m);
          if (!csup) continue;
          bool clean = !(*csup)[j] && (*csup)[target];
          for (int k = 0; k < m && clean; ++k)
            if (!sup[k] && (*csup)[k]) clean = false;
          if (!clean) continue;
          w = std::move(cand);
          sup = std::move(*csup);
          killed = true;
          break;
        }
        ok = killed;
      }
      if (!ok) continue;
      int size = 0;
      for (char c : sup) size += c;
      if (size != 1 || !sup[target]) continue;
      add_plantable(w.section(target + 1),
                    "section of " + w.to_string() + " at " +
                        std::to_string(target + 1));
      ++produced;
    }
  }
}

std::optional<RistWitness> RistProvider::find(const Vertex& v,
                                              const OrderPredicate& pred,
                                              int radius) {
  auto adjust = [&](Element g, const std::string& kind, const std::string& ev,
                    int rad) -> std::optional<RistWitness> {
    if (pred.kind == OrderPredicate::Kind::nontrivial) {
      if (g.is_trivial()) return std::nullopt;
      const auto ord = g.order(pred.cap);
      std::optional<std::uint64_t> value;
      if (ord.ok()) value = ord.value;
      return RistWitness{v, g, value, rad, kind, ev};
    }
    // Power the element down when the predicate wants an exact order.
    const auto ord = g.order(pred.cap);
    if (!ord.ok()) return std::nullopt;
    std::uint64_t value = ord.value;
    if (pred.kind == OrderPredicate::Kind::exact && value != pred.p) {
      if (pred.p == 0 || value % pred.p != 0) return std::nullopt;
      g = g.pow(static_cast<long long>(value / pred.p));
      value = pred.p;
    }
    if (pred.kind == OrderPredicate::Kind::divisible &&
        (value == 1 || value % pred.p != 0))
      return std::nullopt;
    if (value == 1) return std::nullopt;
    return RistWitness{v, g, value, rad, kind, ev};
  };

  // 1. direct ball search; pointless far down, where level scans get big
  if (level(v) <= ball_depth_limit) {
    const int r = std::min(radius, ball_radius);
    auto pre_pred = pred.kind == OrderPredicate::Kind::exact
                        ? OrderPredicate::divisible(pred.p)
                        : pred;
    pre_pred.cap = pred.cap;
    for (auto& hit : rist_search(pres_, v, r, pre_pred, SearchOptions{1, {}})) {
      if (auto w = adjust(hit.g, "ball", hit.g.to_string(), hit.radius)) {
        cache_.push_back(*w);
        return w;
      }
    }
  }

  // 2. conjugate a cached same-level witness
  for (const auto& cached : cache_) {
    if (level(cached.v) != level(v)) continue;
    auto t = transporter(pres_, cached.v, v);
    if (!t) continue;
    Element moved = cached.g.conj(*t);
    if (!in_rist(moved, v)) continue;
    if (auto w = adjust(moved, "conjugate",
                        "conjugate of witness at " + format_vertex(cached.v) +
                            " by " + t->to_string(),
                        cached.radius)) {
      cache_.push_back(*w);
      return w;
    }
  }

  // 3. plant a synthesized section word below v
  if (v.empty()) return std::nullopt;
  for (const auto& p : plantables()) {
    if (!pres_->shape().same_from(1, level(v))) break;
    Element sec(pres_, p.section, level(v));
    Element planted = Element::planted(v, sec);
    if (auto w = adjust(planted, "planted",
                        "planted section (" + p.evidence + ")", 0)) {
      if (!in_rist(w->g, v)) continue;
      cache_.push_back(*w);
      return w;
    }
  }
  return std::nullopt;
}

std::optional<RistWitness> RistProvider::exact_order(const Vertex& v,
                                                     std::uint64_t p, int radius) {
  return find(v, OrderPredicate::exact(p), radius);
}

std::optional<RistWitness> RistProvider::prime_order(const Vertex& v, int radius) {
  // try the primes that can occur: arities seen in the shape, then the orders
  // of the plantables
  std::vector<std::uint64_t> primes;
  auto add = [&](std::uint64_t n) {
    for (std::uint64_t q = 2; q * q <= n; ++q)
      while (n % q == 0) {
        if (std::find(primes.begin(), primes.end(), q) == primes.end())
          primes.push_back(q);
        n /= q;
      }
    if (n > 1 && std::find(primes.begin(), primes.end(), n) == primes.end())
      primes.push_back(n);
  };
  for (int i = 1; i <= static_cast<int>(pres_->shape().prefix().size()) + 2; ++i)
    add(pres_->shape().arity(i));
  for (const auto& p : plantables()) add(p.order);
  std::sort(primes.begin(), primes.end());
  for (std::uint64_t q : primes)
    if (auto w = exact_order(v, q, radius)) return w;
  return std::nullopt;
}

std::optional<RistWitness> RistProvider::nontrivial(const Vertex& v, int radius) {
  return find(v, OrderPredicate::nontrivial(), radius);
}

}  // namespace bf
