#include "branchforge/constructions.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "branchforge/catalog.hpp"
#include "branchforge/error.hpp"
#include "branchforge/quotients.hpp"

namespace bf {

// ---------------------------------------------------------------------------
// ERF classification

void AbelianDescriptor::validate() const {
  std::set<std::int64_t> seen;
  for (const auto& c : components) {
    if (!is_prime(c.p))
      fail(ErrorKind::invalid_argument, "component base " + std::to_string(c.p) +
                                            " is not prime");
    if (!seen.insert(c.p).second)
      fail(ErrorKind::invalid_argument, "duplicate prime component");
    switch (c.kind) {
      case PrimeComponent::Kind::explicit_list:
        if (c.exponents.empty())
          fail(ErrorKind::invalid_argument, "explicit exponent multiset is empty");
        for (int e : c.exponents)
          if (e < 1) fail(ErrorKind::invalid_argument, "exponents must be >= 1");
        break;
      case PrimeComponent::Kind::bounded:
        if (c.bound < 1) fail(ErrorKind::invalid_argument, "bound must be >= 1");
        break;
      case PrimeComponent::Kind::unbounded:
        break;
    }
  }
}

std::string to_string(ErfVerdict v) {
  switch (v) {
    case ErfVerdict::erf:
      return "ERF";
    case ErfVerdict::not_erf:
      return "NotERF";
    default:
      return "Undetermined";
  }
}

namespace {

bool any_unbounded(const AbelianDescriptor& d) {
  for (const auto& c : d.components)
    if (c.kind == PrimeComponent::Kind::unbounded) return true;
  return false;
}

}  // namespace

ErfVerdict erf_classify_cases(const AbelianDescriptor& d) {
  d.validate();
  if (d.z_rank_infinite) return ErfVerdict::not_erf;
  // infinitely many primes force unbounded orders even with bounded exponents
  const bool orders_unbounded = d.primes_infinite || any_unbounded(d);
  if (!orders_unbounded) return ErfVerdict::erf;
  if (!d.primes_infinite) return ErfVerdict::not_erf;
  return ErfVerdict::undetermined;
}

ErfVerdict erf_classify_full(const AbelianDescriptor& d) {
  d.validate();
  if (d.primes_infinite && d.tail == AbelianDescriptor::Tail::unknown)
    fail(ErrorKind::unsupported,
         "descriptor leaves the prime tail unknown; use the case classifier");
  const bool free_ok = !d.z_rank_infinite;
  const bool tails_ok =
      !d.primes_infinite || d.tail == AbelianDescriptor::Tail::bounded;
  const bool bounded = !any_unbounded(d) && tails_ok;
  return free_ok && bounded ? ErfVerdict::erf : ErfVerdict::not_erf;
}

// ---------------------------------------------------------------------------
// Lemma: large orders inside rigid stabilizers

LargeOrderCertificate build_large_order(RistProvider& provider, const Vertex& base,
                                        std::uint64_t target, bool torsion_mode,
                                        int radius,
                                        std::optional<std::uint64_t> forced_prime) {
  if (target < 2) fail(ErrorKind::invalid_argument, "target must be >= 2");
  const PresentationPtr pres = provider.presentation();
  if (!valid_vertex(pres->shape(), base))
    fail(ErrorKind::invalid_argument, "base vertex outside the tree");

  LargeOrderCertificate cert;
  cert.base = base;
  cert.target = target;
  cert.torsion_mode = torsion_mode;
  cert.radius = radius;
  cert.product = Element::identity(pres);

  auto check = [&](const std::string& name, bool ok) {
    cert.checks.emplace_back(name, ok);
  };

  Vertex u = base;
  std::uint64_t total = 1;
  unsigned __int128 expected_order = 1;
  for (int step = 1; total < target; ++step) {
    if (step > 64) fail(ErrorKind::cap_exceeded, "too many steps");
    std::optional<RistWitness> w;
    if (!torsion_mode) {
      w = provider.nontrivial(u, radius);
    } else if (forced_prime) {
      w = provider.exact_order(u, *forced_prime, radius);
    } else {
      w = provider.prime_order(u, radius);
    }
    if (!w)
      fail(ErrorKind::search_failed,
           "no rigid-stabilizer witness at " + format_vertex(u) +
               " within radius " + std::to_string(radius));

    const std::string tag = "step " + std::to_string(step);
    check(tag + ": in_rist(g, " + format_vertex(u) + ")", in_rist(w->g, u));

    // moved vertices of a rist(u) element sit below u
    const Element sec = w->g.section(u);
    const auto mv = first_moved_vertex(sec, 24);
    if (!mv)
      fail(ErrorKind::verify_failed,
           "witness at " + format_vertex(u) + " moves nothing visible");
    const Vertex x = concat(u, *mv);

    cert.product = cert.product * w->g;
    const auto orbit = orbit_of_vertex(cert.product, x);
    if (orbit.size() % total != 0)
      fail(ErrorKind::verify_failed, "orbit did not grow by an integer factor");
    const std::uint64_t factor = orbit.size() / total;
    check(tag + ": orbit factor >= 2", factor >= 2);
    {
      std::set<Vertex> distinct(orbit.begin(), orbit.end());
      bool mates = distinct.size() == orbit.size();
      for (const auto& o : orbit) mates = mates && level(o) == level(x);
      check(tag + ": orbit vertices are pairwise distinct level mates", mates);
    }
    if (torsion_mode) {
      check(tag + ": orbit factor equals the witness's prime order",
            w->order && factor == *w->order);
      expected_order *= *w->order;
      if (expected_order > (static_cast<unsigned __int128>(1) << 62))
        fail(ErrorKind::cap_exceeded, "torsion order exceeds the cap");
    }

    cert.steps.push_back(LargeOrderStep{u, *w, x, factor});
    total = orbit.size();
    cert.witness_point = x;
    u = x;
  }

  cert.orbit_length = total;
  check("final orbit length >= target", total >= target);
  check("base subtree contains every step vertex", [&] {
    bool ok = true;
    const Vertex* prev = &cert.base;
    for (const auto& s : cert.steps) {
      const auto rel = relation(*prev, s.u);
      ok = ok && (rel == Relation::equal || rel == Relation::ancestor);
      prev = &s.moved;
    }
    return ok;
  }());

  if (torsion_mode) {
    const std::uint64_t expect = static_cast<std::uint64_t>(expected_order);
    const auto ord = cert.product.order(expect);
    const bool ok = ord.ok() && ord.value == expect;
    check("product order equals the product of the step primes", ok);
    if (ok) cert.product_order = ord.value;
  }

  cert.verified = std::all_of(cert.checks.begin(), cert.checks.end(),
                              [](const auto& c) { return c.second; });
  if (!cert.verified)
    fail(ErrorKind::verify_failed, "large-order certificate failed verification");
  return cert;
}

// ---------------------------------------------------------------------------
// Prufer-kernel arithmetic

namespace {

std::int64_t ipow_checked(std::int64_t base, int exp) {
  std::int64_t out = 1;
  for (int i = 0; i < exp; ++i) {
    if (out > (std::int64_t{1} << 62) / base)
      fail(ErrorKind::cap_exceeded, "prime power exceeds 2^62");
    out *= base;
  }
  return out;
}

std::int64_t mod_pos(__int128 v, std::int64_t m) {
  __int128 r = v % m;
  if (r < 0) r += m;
  return static_cast<std::int64_t>(r);
}

}  // namespace

PruferKernelSpec PruferKernelSpec::torsion(std::int64_t p, std::vector<int> exponents,
                                           std::vector<std::uint8_t> mask) {
  PruferKernelSpec spec;
  spec.p = p;
  spec.exponents = std::move(exponents);
  if (mask.empty()) mask.assign(spec.exponents.size(), 1);
  spec.mask = std::move(mask);
  spec.torsion_free = false;
  if (!is_prime(p)) fail(ErrorKind::invalid_argument, "p must be prime");
  if (spec.exponents.size() < 2)
    fail(ErrorKind::invalid_argument, "need at least two exponents");
  for (std::size_t i = 0; i < spec.exponents.size(); ++i) {
    if (spec.exponents[i] < 1)
      fail(ErrorKind::invalid_argument, "exponents must be >= 1");
    if (i && spec.exponents[i] <= spec.exponents[i - 1])
      fail(ErrorKind::invalid_argument, "exponents must be strictly increasing");
  }
  if (spec.mask.size() != spec.exponents.size())
    fail(ErrorKind::invalid_argument, "mask length must match the exponent prefix");
  ipow_checked(p, spec.exponents.back());
  return spec;
}

PruferKernelSpec PruferKernelSpec::torsion_free_mode(int length,
                                                     std::vector<std::uint8_t> mask) {
  std::vector<int> exps(length);
  std::iota(exps.begin(), exps.end(), 1);
  PruferKernelSpec spec = torsion(2, std::move(exps), std::move(mask));
  spec.torsion_free = true;
  return spec;
}

std::vector<int> PruferKernelSpec::active() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(static_cast<int>(i));
  return out;
}

std::int64_t PruferKernelSpec::modulus(int i) const {
  return ipow_checked(p, exponents.at(i));
}

void PruferKernelSpec::check_tuple(const KvTuple& x) const {
  if (x.size() != exponents.size())
    fail(ErrorKind::invalid_argument,
         "tuple length " + std::to_string(x.size()) + " != prefix length " +
             std::to_string(exponents.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!mask[i] && x[i] != 0)
      fail(ErrorKind::invalid_argument,
           "tuple supported outside the mask at index " + std::to_string(i + 1));
}

KvTuple kv_reduce(const PruferKernelSpec& spec, KvTuple x) {
  spec.check_tuple(x);
  if (spec.torsion_free) return x;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (spec.mask[i]) x[i] = mod_pos(x[i], spec.modulus(static_cast<int>(i)));
  return x;
}

KvTuple kv_add(const PruferKernelSpec& spec, const KvTuple& x, const KvTuple& y) {
  spec.check_tuple(x);
  spec.check_tuple(y);
  KvTuple out(x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return kv_reduce(spec, std::move(out));
}

KvTuple kv_neg(const PruferKernelSpec& spec, const KvTuple& x) {
  KvTuple out(x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = -x[i];
  return kv_reduce(spec, std::move(out));
}

KvTuple kv_scale(const PruferKernelSpec& spec, std::int64_t c, const KvTuple& x) {
  spec.check_tuple(x);
  KvTuple out(x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!spec.mask[i]) continue;
    if (spec.torsion_free)
      out[i] = c * x[i];
    else
      out[i] = mod_pos(static_cast<__int128>(c) * x[i], spec.modulus(static_cast<int>(i)));
  }
  return out;
}

std::vector<std::pair<int, KvTuple>> kv_generators(const PruferKernelSpec& spec) {
  std::vector<std::pair<int, KvTuple>> out;
  const auto act = spec.active();
  for (std::size_t a = 0; a + 1 < act.size(); ++a) {
    const int i = act[a];
    const int j = act[a + 1];
    KvTuple k(spec.exponents.size(), 0);
    k[i] = 1;
    const std::int64_t step = ipow_checked(spec.p, spec.exponents[j] - spec.exponents[i]);
    k[j] = spec.torsion_free ? -step : spec.modulus(j) - step;
    out.emplace_back(i + 1, kv_reduce(spec, std::move(k)));
  }
  return out;
}

bool kv_member(const PruferKernelSpec& spec, const KvTuple& x) {
  spec.check_tuple(x);
  const auto act = spec.active();
  if (act.empty()) fail(ErrorKind::invalid_argument, "empty mask");
  const int top = act.back();
  const std::int64_t P = spec.modulus(top);
  __int128 sum = 0;
  for (int i : act) {
    const std::int64_t scale = ipow_checked(spec.p, spec.exponents[top] - spec.exponents[i]);
    sum += static_cast<__int128>(mod_pos(x[i], P)) * scale;
  }
  return mod_pos(sum, P) == 0;
}

std::uint64_t kv_order(const PruferKernelSpec& spec, const KvTuple& x) {
  if (spec.torsion_free)
    fail(ErrorKind::unsupported, "additive order is defined in torsion mode only");
  const KvTuple r = kv_reduce(spec, x);
  std::uint64_t ord = 1;
  for (int i : spec.active()) {
    const std::int64_t m = spec.modulus(i);
    const std::int64_t g = std::gcd(r[i], m);
    ord = std::lcm(ord, static_cast<std::uint64_t>(m / g));
  }
  return ord;
}

KvWitness kv_divisibility_witness(const PruferKernelSpec& spec, const KvTuple& t,
                                  int m) {
  if (m < 0) fail(ErrorKind::invalid_argument, "m must be >= 0");
  spec.check_tuple(t);
  const auto act = spec.active();
  if (act.empty()) fail(ErrorKind::invalid_argument, "empty mask");
  const int top = act.back();
  const std::int64_t P = spec.modulus(top);

  __int128 sum = 0;
  for (int i : act)
    sum += static_cast<__int128>(mod_pos(t[i], P)) *
           ipow_checked(spec.p, spec.exponents[top] - spec.exponents[i]);
  const std::int64_t c = mod_pos(sum, P);

  KvTuple y(spec.exponents.size(), 0);
  if (c != 0) {
    int h = 0;
    std::int64_t u = c;
    while (u % spec.p == 0) {
      u /= spec.p;
      ++h;
    }
    const int d = spec.exponents[top] - h;  // Prufer height of t's image
    int j = -1;
    for (int i : act)
      if (spec.exponents[i] >= d + m) {
        j = i;
        break;
      }
    if (j < 0)
      fail(ErrorKind::cap_exceeded,
           "exponent prefix too short: need an active exponent >= " +
               std::to_string(d + m));
    const std::int64_t val =
        static_cast<std::int64_t>(u) * ipow_checked(spec.p, spec.exponents[j] - d - m);
    y[j] = spec.torsion_free ? val : mod_pos(val, spec.modulus(j));
  }

  const KvTuple pm_y = kv_scale(spec, ipow_checked(spec.p, m), y);
  const KvTuple k = kv_add(spec, kv_reduce(spec, t), kv_neg(spec, pm_y));
  if (!kv_member(spec, k))
    fail(ErrorKind::verify_failed, "divisibility witness failed the kernel test");
  const KvTuple recomposed = kv_add(spec, pm_y, k);
  if (recomposed != kv_reduce(spec, t))
    fail(ErrorKind::verify_failed, "divisibility witness does not recompose");
  return KvWitness{std::move(y), std::move(k)};
}

KvIsoInvariant kv_iso_invariant(const PruferKernelSpec& spec) {
  KvIsoInvariant inv;
  inv.torsion_free = spec.torsion_free;
  if (spec.torsion_free) return inv;  // all masked variants are isomorphic
  for (int i : spec.active())
    inv.orders.push_back(static_cast<std::uint64_t>(spec.modulus(i)));
  std::sort(inv.orders.begin(), inv.orders.end());
  return inv;
}

KvRealization kv_realize(RistProvider& provider, const PruferKernelSpec& spec,
                         int radius) {
  if (spec.torsion_free)
    fail(ErrorKind::unsupported,
         "tree realization is available in torsion mode only");
  KvRealization out;
  bool ok = true;
  for (int i : spec.active()) {
    Vertex w(static_cast<std::size_t>(i), 1);
    w.push_back(2);  // descending comb: pairwise incomparable
    const std::uint64_t target =
        static_cast<std::uint64_t>(ipow_checked(spec.p, spec.exponents[i]));
    auto cert = build_large_order(provider, w, target, true, radius,
                                  static_cast<std::uint64_t>(spec.p));
    ok = ok && cert.product_order && *cert.product_order == target &&
         in_rist(cert.product, w);
    out.vertices.push_back(std::move(w));
    out.summands.push_back(std::move(cert));
  }
  out.verified = ok;
  if (!ok) fail(ErrorKind::verify_failed, "kernel realization failed verification");
  return out;
}

// ---------------------------------------------------------------------------
// H_V families

HvFamilySpec build_hv(RistProvider& provider, std::int64_t p, const Element& a,
                      const std::vector<std::uint8_t>& mask, int radius) {
  if (!is_prime(p)) fail(ErrorKind::invalid_argument, "p must be prime");
  if (mask.empty()) fail(ErrorKind::invalid_argument, "mask must be nonempty");

  HvFamilySpec fam;
  fam.pres = provider.presentation();
  fam.p = p;
  fam.a = a;
  fam.mask = mask;
  fam.radius = radius;
  auto check = [&](const std::string& name, bool ok) {
    fam.checks.emplace_back(name, ok);
  };

  {
    const auto ord = a.order(static_cast<std::uint64_t>(p));
    if (!ord.ok() || ord.value != static_cast<std::uint64_t>(p))
      fail(ErrorKind::invalid_argument, "root element must have order exactly p");
    check("order(a) = p", true);
  }

  const auto pt = find_orbit_p_point(a, static_cast<std::uint64_t>(p));
  fam.x = pt.x;
  fam.n0 = pt.level;
  check("a-orbit of x has size p",
        orbit_of_vertex(a, fam.x).size() == static_cast<std::uint64_t>(p));

  const int M = static_cast<int>(mask.size());
  for (int i = 1; i <= M; ++i) {
    Vertex u(static_cast<std::size_t>(i - 1), 1);  // descending comb below x
    u.push_back(2);
    fam.comb.push_back(u);
    fam.vertices.push_back(concat(fam.x, u));
    if (mask[i - 1]) fam.active.push_back(i - 1);
  }
  {
    bool ok = true;
    for (std::size_t i = 0; i < fam.comb.size(); ++i)
      for (std::size_t j = i + 1; j < fam.comb.size(); ++j)
        ok = ok && incomparable(fam.comb[i], fam.comb[j]);
    check("comb vertices pairwise incomparable", ok);
  }

  for (int slot : fam.active) {
    const Vertex& v = fam.vertices[slot];
    auto w = provider.exact_order(v, static_cast<std::uint64_t>(p), radius);
    if (!w)
      fail(ErrorKind::search_failed,
           "no order-" + std::to_string(p) + " witness in rist(" +
               format_vertex(v) + ") within radius " + std::to_string(radius));
    check("in_rist(h, " + format_vertex(v) + ")", in_rist(w->g, v));
    const auto ord = w->g.order(static_cast<std::uint64_t>(p));
    check("order(h_" + format_vertex(v) + ") = p",
          ord.ok() && ord.value == static_cast<std::uint64_t>(p));
    fam.witnesses.push_back(std::move(*w));
  }

  {
    // V = V_x and its a-translates: pairwise incomparable vertices
    std::vector<Vertex> vs;
    for (int slot : fam.active) {
      Element twist = Element::identity(fam.pres);
      for (int j = 0; j < p; ++j) {
        vs.push_back(twist.act(fam.vertices[slot]));
        twist = twist * a;
      }
    }
    bool ok = true;
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j)
        ok = ok && incomparable(vs[i], vs[j]);
    check("V and its a-translates are pairwise incomparable", ok);
  }

  for (std::size_t k = 0; k < fam.active.size(); ++k) {
    const int slot = fam.active[k];
    Element s = a * fam.witnesses[k].g;
    const std::uint64_t p2 = static_cast<std::uint64_t>(p) * p;
    const auto ord = s.order(p2);
    check("order(s_" + format_vertex(fam.vertices[slot]) + ") = p^2",
          ord.ok() && ord.value == p2);
    check("s^p fixes level " + std::to_string(level(fam.vertices[slot])),
          in_level_stab(s.pow(p), level(fam.vertices[slot])));
    fam.gens.push_back(std::move(s));
  }

  fam.verified = std::all_of(fam.checks.begin(), fam.checks.end(),
                             [](const auto& c) { return c.second; });
  if (!fam.verified)
    fail(ErrorKind::verify_failed, "family construction failed verification");
  return fam;
}

namespace {

int slot_position(const HvFamilySpec& fam, int slot) {
  for (std::size_t k = 0; k < fam.active.size(); ++k)
    if (fam.active[k] == slot) return static_cast<int>(k);
  fail(ErrorKind::invalid_argument,
       "word uses a generator outside the family mask");
}

int mod_p(int v, std::int64_t p) {
  const int m = static_cast<int>(p);
  return ((v % m) + m) % m;
}

}  // namespace

Element hv_word_element(const HvFamilySpec& fam, const HvWord& word) {
  Element out = Element::identity(fam.pres);
  for (auto [slot, sign] : word) {
    const Element& s = fam.gens[slot_position(fam, slot)];
    out = out * (sign > 0 ? s : s.inverse());
  }
  return out;
}

HvNormalForm hv_normal_form(const HvFamilySpec& fam, const HvWord& word) {
  // In a product of (a h_v)^{+-1} factors, push all a's to the left: the
  // factor ending at trailing a-power t contributes its witness at twist t.
  HvNormalForm nf;
  int t = 0;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    auto [slot, sign] = *it;
    slot_position(fam, slot);  // membership check
    if (sign > 0) {
      nf.exponents[{slot, mod_p(t, fam.p)}] += 1;
      t += 1;
    } else {
      t -= 1;
      nf.exponents[{slot, mod_p(t, fam.p)}] -= 1;
    }
  }
  nf.r = mod_p(t, fam.p);
  for (auto it = nf.exponents.begin(); it != nf.exponents.end();) {
    it->second = mod_p(it->second, fam.p);
    it = it->second == 0 ? nf.exponents.erase(it) : std::next(it);
  }
  return nf;
}

Element hv_realize(const HvFamilySpec& fam, const HvNormalForm& nf) {
  Element out = fam.a.pow(nf.r);
  for (const auto& [key, e] : nf.exponents) {
    const auto [slot, twist] = key;
    const Element& h = fam.witnesses[slot_position(fam, slot)].g;
    out = out * h.conj(fam.a.pow(twist)).pow(e);
  }
  return out;
}

HvRefutation hv_member_a(const HvFamilySpec& fam, int sweep_len) {
  if (fam.active.empty())
    fail(ErrorKind::invalid_argument, "family has an empty generating set");
  HvRefutation ref;
  ref.p = fam.p;
  ref.constraint_r =
      "a word equal to a must have a-exponent r = 1 (mod p): the witnesses fix "
      "level n0 = " + std::to_string(fam.n0) + " and <a> acts faithfully there";
  ref.constraint_sum =
      "a word equal to a must have all twisted witness exponents vanish "
      "(mod p): the twisted witnesses generate a direct sum of order-p groups";
  ref.invariant =
      "each generator adds 1 to both r and the exponent sum, so sum = r (mod "
      "p); r = 1 with vanishing exponents gives 1 = 0 (mod p), impossible";

  ref.sweep_len = sweep_len;
  ref.sweep_clean = true;
  ref.invariant_checked = true;

  std::vector<HvWord> frontier{HvWord{}};
  std::uint64_t counter = 0;
  for (int len = 1; len <= sweep_len; ++len) {
    std::vector<HvWord> next;
    for (const auto& w : frontier) {
      for (int slot : fam.active) {
        for (int sign : {+1, -1}) {
          HvWord ext = w;
          ext.emplace_back(slot, sign);
          ++ref.sweep_words;

          const auto nf = hv_normal_form(fam, ext);
          int signed_count = 0;
          for (auto [s, sg] : ext) signed_count += sg;
          int exp_sum = 0;
          for (const auto& [k, e] : nf.exponents) exp_sum += e;
          if (mod_p(exp_sum, fam.p) != mod_p(signed_count, fam.p) ||
              nf.r != mod_p(signed_count, fam.p))
            ref.invariant_checked = false;

          const Element el = hv_word_element(fam, ext);
          if (el.equals(fam.a)) ref.sweep_clean = false;
          if (counter++ % 37 == 0 && !el.equals(hv_realize(fam, nf)))
            ref.invariant_checked = false;

          next.push_back(std::move(ext));
        }
      }
    }
    frontier = std::move(next);
  }

  ref.verified = ref.sweep_clean && ref.invariant_checked;
  if (!ref.verified)
    fail(ErrorKind::verify_failed, "membership refutation failed verification");
  return ref;
}

ClosureGapReport closure_gap_certificate(const HvFamilySpec& fam, int depth) {
  if (depth < 0) fail(ErrorKind::invalid_argument, "depth must be >= 0");
  if (fam.active.empty())
    fail(ErrorKind::invalid_argument, "family has an empty generating set");
  ClosureGapReport rep;
  rep.requested_depth = depth;

  std::vector<LevelPerm> gen_images;
  for (int n = 1; n <= depth; ++n) {
    ClosureGapLevel lv;
    lv.n = n;
    for (std::size_t k = 0; k < fam.active.size(); ++k) {
      if (in_level_stab(fam.witnesses[k].g, n)) {
        lv.witness_slot = fam.active[k];
        lv.stab_ok = true;
        const Element& s = fam.gens[k];
        lv.eq_ok = fam.a.equals(s * fam.witnesses[k].g.inverse());
        break;
      }
    }
    if (lv.witness_slot >= 0) {
      gen_images.clear();
      for (const auto& s : fam.gens) gen_images.push_back(image(s, n));
      const StabChain chain = stab_chain(gen_images);
      lv.chain_ok = chain.contains(image(fam.a, n));
    }
    const bool ok = lv.ok();
    rep.levels.push_back(lv);
    if (!ok) break;
    rep.max_certified = n;
  }
  rep.verified = rep.max_certified >= depth;
  return rep;
}

EmbeddingCheck hv_abelian_embedding_check(const HvFamilySpec& fam, int samples,
                                          unsigned seed) {
  if (fam.active.empty())
    fail(ErrorKind::invalid_argument, "family has an empty generating set");
  EmbeddingCheck out;
  out.samples = samples;
  auto check = [&](const std::string& name, bool ok) {
    out.checks.emplace_back(name, ok);
  };

  // twisted witnesses commute and have order p
  for (std::size_t i = 0; i < fam.active.size(); ++i) {
    const Element& hi = fam.witnesses[i].g;
    check("h^p trivial at " + format_vertex(fam.vertices[fam.active[i]]),
          hi.pow(fam.p).is_trivial());
    for (std::size_t j = i + 1; j < fam.active.size(); ++j) {
      const Element& hj = fam.witnesses[j].g;
      const Element comm =
          hi.conj(fam.a).inverse() * hj.inverse() * hi.conj(fam.a) * hj;
      check("[h_i^a, h_j] trivial (slots " + std::to_string(fam.active[i] + 1) +
                "," + std::to_string(fam.active[j] + 1) + ")",
            comm.is_trivial());
    }
  }

  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> len_dist(1, 8);
  std::uniform_int_distribution<std::size_t> slot_dist(0, fam.active.size() - 1);
  std::uniform_int_distribution<int> sign_dist(0, 1);
  bool samples_ok = true;
  for (int s = 0; s < samples; ++s) {
    HvWord w;
    const int len = len_dist(rng);
    for (int i = 0; i < len; ++i)
      w.emplace_back(fam.active[slot_dist(rng)], sign_dist(rng) ? 1 : -1);
    // pad to r = 0 mod p so the word lies in the level stabilizer part
    auto nf = hv_normal_form(fam, w);
    for (int i = 0; i < (static_cast<int>(fam.p) - nf.r) % fam.p; ++i)
      w.emplace_back(fam.active[0], 1);
    nf = hv_normal_form(fam, w);
    out.checked_words += 1;
    const Element el = hv_word_element(fam, w);
    samples_ok = samples_ok && nf.r == 0;
    samples_ok = samples_ok && el.equals(hv_realize(fam, nf));
    samples_ok = samples_ok && el.pow(fam.p).is_trivial();
    if (!samples_ok) break;
  }
  check("random r=0 words realize their normal forms and have order dividing p",
        samples_ok);

  out.verified = std::all_of(out.checks.begin(), out.checks.end(),
                             [](const auto& c) { return c.second; });
  if (!out.verified)
    fail(ErrorKind::verify_failed, "abelian embedding check failed");
  return out;
}

DistinctReport family_distinct(const HvFamilySpec& a, const HvFamilySpec& b,
                               int depth) {
  if (a.pres.get() != b.pres.get() || a.p != b.p || !(a.a.word().key() == b.a.word().key()))
    fail(ErrorKind::invalid_argument, "families must share group, p and root element");
  if (depth < 1) fail(ErrorKind::invalid_argument, "depth must be >= 1");
  DistinctReport rep;
  rep.depth = depth;
  if (a.mask == b.mask) {
    rep.detail = "identical masks";
    return rep;
  }

  auto images_of = [&](const HvFamilySpec& fam) {
    std::vector<LevelPerm> out;
    for (const auto& s : fam.gens) out.push_back(image(s, depth));
    return out;
  };
  const auto imgs_a = images_of(a);
  const auto imgs_b = images_of(b);
  const int degree =
      static_cast<int>(a.pres->shape().level_size(depth));
  const StabChain chain_a(depth, degree, [&] {
    std::vector<Perm> gens;
    for (const auto& lp : imgs_a) gens.push_back(lp.perm);
    return gens;
  }());
  const StabChain chain_b(depth, degree, [&] {
    std::vector<Perm> gens;
    for (const auto& lp : imgs_b) gens.push_back(lp.perm);
    return gens;
  }());

  for (std::size_t k = 0; k < imgs_a.size(); ++k) {
    if (!chain_b.contains(imgs_a[k])) {
      rep.verdict = DistinctReport::Verdict::distinct;
      rep.detail = "generator at " + format_vertex(a.vertices[a.active[k]]) +
                   " is not in the other family's level-" +
                   std::to_string(depth) + " image";
      return rep;
    }
  }
  for (std::size_t k = 0; k < imgs_b.size(); ++k) {
    if (!chain_a.contains(imgs_b[k])) {
      rep.verdict = DistinctReport::Verdict::distinct;
      rep.detail = "generator at " + format_vertex(b.vertices[b.active[k]]) +
                   " is not in the other family's level-" +
                   std::to_string(depth) + " image";
      return rep;
    }
  }
  rep.detail = "images agree at depth " + std::to_string(depth);
  return rep;
}

}  // namespace bf
