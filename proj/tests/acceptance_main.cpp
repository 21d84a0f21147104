// Acceptance suite: runs every criterion exactly as pinned, printing one
// pass/fail line per criterion. Exit status 0 iff all pass.

#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "branchforge/catalog.hpp"
#include "branchforge/constructions.hpp"
#include "branchforge/error.hpp"
#include "branchforge/quotients.hpp"
#include "branchforge/reports.hpp"
#include "branchforge/stabilizers.hpp"

using namespace bf;

namespace {

struct Criterion {
  std::vector<std::string> failures;

  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  bool passed() const { return failures.empty(); }
};

Element w(const PresentationPtr& pres, const std::string& text) {
  return parse_word(pres, text);
}

// ---------------------------------------------------------------------------

void criterion1(Criterion& c) {
  auto g = grigorchuk();
  for (const std::string rel :
       {"a^2", "b^2", "c^2", "d^2", "bcd", "(ad)^4", "(ab)^16"})
    c.check(w(g, rel).is_trivial(), rel + " should be trivial");
  c.check(!w(g, "(ab)^8").is_trivial(), "(ab)^8 should be nontrivial");

  auto dual_order = [&](const std::string& text, std::uint64_t expect) {
    const Element el = w(g, text);
    const auto ord = el.order(1 << 10);
    c.check(ord.ok() && ord.value == expect,
            "order(" + text + ") = " + std::to_string(expect));
    std::uint64_t last = 0;
    for (int n = 1; n <= 8; ++n) {
      last = image(el, n).perm.order();
      c.check(ord.value % last == 0,
              "level-" + std::to_string(n) + " image order divides order(" + text + ")");
    }
    c.check(last == expect, "image orders of " + text + " stabilize at " +
                                std::to_string(expect) + " by level 8");
  };
  dual_order("ab", 16);
  dual_order("ad", 4);
}

void criterion2(Criterion& c) {
  auto g = grigorchuk();
  const std::vector<std::uint64_t> expected{2, 8, 128};
  for (int n = 1; n <= 3; ++n) {
    const auto gens = generator_images(g, n);
    const auto closure = bfs_enumerate(gens, 10000);
    c.check(closure.has_value(), "BFS closure fits at level " + std::to_string(n));
    const StabChain chain = stab_chain(gens);
    const auto ord = chain.order();
    c.check(ord.has_value() && *ord == expected[n - 1],
            "chain order at level " + std::to_string(n) + " equals " +
                std::to_string(expected[n - 1]));
    c.check(closure && *ord == closure->size(),
            "chain order equals the BFS count at level " + std::to_string(n));
  }
}

void criterion3(Criterion& c) {
  struct Case {
    std::int64_t p;
    std::vector<std::int64_t> e;
  };
  const std::vector<Case> cases = {
      {3, {1, 2}},       {3, {1, 1}},          {3, {2, 1}},
      {3, {2, 2}},       {5, {1, 1, 1, 2}},    {5, {1, 1, 1, 1}},
      {5, {4, 3, 2, 1}}, {7, {1, 2, 3, 4, 5, 6}}, {7, {1, 1, 1, 1, 1, 1}},
      {5, {0, 0, 0, 0}},
  };
  for (const auto& [p, e] : cases) {
    std::int64_t sum = 0;
    for (auto x : e) sum += x;
    std::ostringstream label;
    label << "ggs_is_torsion(" << p << ", ...)";
    c.check(ggs_is_torsion(p, e) == (sum % p == 0), label.str());
  }
  c.check(ggs_is_torsion(3, {1, 2}), "(3, (1,2)) is torsion");
  c.check(!ggs_is_torsion(3, {1, 1}), "(3, (1,1)) is not torsion");
}

void criterion4(Criterion& c) {
  auto g = grigorchuk();
  RistProvider provider(g);
  const auto cert = build_large_order(provider, {1}, 32, true, 8);
  c.check(cert.verified, "certificate verified");
  c.check(cert.orbit_length >= 32, "orbit length >= 32");
  c.check(orbit_of_vertex(cert.product, cert.witness_point).size() ==
              cert.orbit_length,
          "orbit length re-verifies");
  std::uint64_t expect = 1;
  for (const auto& s : cert.steps) {
    c.check(s.witness.order && *s.witness.order == 2, "step primes are 2");
    expect *= 2;
    c.check(in_rist(s.witness.g, s.u),
            "in_rist at " + format_vertex(s.u));
  }
  c.check(cert.product_order && *cert.product_order == expect,
          "order is exactly the product of the step primes");
  const auto ord = cert.product.order(1 << 10);
  c.check(ord.ok() && ord.value == expect, "order re-verifies");
}

void criterion5(Criterion& c) {
  struct Setup {
    PresentationPtr pres;
    std::int64_t p;
    int depth;
  };
  for (const auto& [pres, p, depth] :
       {Setup{grigorchuk(), 2, 6}, Setup{ggs(3, {1, 2}), 3, 4}}) {
    const std::string tag = pres->name() + ": ";
    RistProvider provider(pres);
    const auto fam = build_hv(provider, p, w(pres, "a"), {1, 1, 1, 1}, 8);
    c.check(fam.verified, tag + "family verified");
    c.check(fam.gens.size() == 4, tag + "four generators");
    for (const auto& s : fam.gens) {
      const auto ord = s.order(static_cast<std::uint64_t>(p) * p);
      c.check(ord.ok() && ord.value == static_cast<std::uint64_t>(p) * p,
              tag + "generator order is exactly p^2");
    }
    const auto gap = closure_gap_certificate(fam, depth);
    c.check(gap.verified && gap.max_certified == depth,
            tag + "closure gap certified to depth " + std::to_string(depth));
    for (const auto& lv : gap.levels) {
      c.check(lv.stab_ok && lv.eq_ok,
              tag + "algebraic witness at level " + std::to_string(lv.n));
      c.check(lv.chain_ok,
              tag + "chain membership at level " + std::to_string(lv.n));
    }
    const auto ref = hv_member_a(fam, 4);
    c.check(ref.verified, tag + "membership refutation verified");
    c.check(ref.sweep_clean, tag + "length-4 sweep finds no word equal to a");
    c.check(ref.invariant_checked, tag + "normal-form invariant holds");
  }
}

void criterion6(Criterion& c) {
  for (const auto& [pres, p] :
       {std::pair<PresentationPtr, std::int64_t>{grigorchuk(), 2},
        std::pair<PresentationPtr, std::int64_t>{ggs(3, {1, 2}), 3}}) {
    RistProvider provider(pres);
    const auto fam = build_hv(provider, p, w(pres, "a"), {1, 1, 1, 1}, 8);
    const auto emb = hv_abelian_embedding_check(fam, 100);
    c.check(emb.verified, pres->name() + ": embedding check verified");
    c.check(emb.checked_words == 100,
            pres->name() + ": 100 samples checked");
  }
}

void criterion7(Criterion& c) {
  auto g = grigorchuk();
  RistProvider provider(g);
  auto fam = [&](const std::string& mask) {
    std::vector<std::uint8_t> m;
    for (char ch : mask) m.push_back(ch == '1');
    return build_hv(provider, 2, w(g, "a"), m, 8);
  };
  // masks differ within the truncation; separation depth 7 covers the
  // deepest family vertex (level 5) plus the witness visibility margin
  const int depth = 7;
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"1111", "0111"}, {"1111", "1011"}, {"1111", "1101"}, {"1111", "1110"},
      {"1100", "1010"}, {"1010", "0110"}, {"1110", "1101"}, {"0011", "0101"},
      {"1001", "0101"}, {"1011", "0111"},
  };
  for (const auto& [m1, m2] : pairs) {
    const auto rep = family_distinct(fam(m1), fam(m2), depth);
    c.check(rep.verdict == DistinctReport::Verdict::distinct,
            m1 + " vs " + m2 + " separated at depth 7");
  }
  for (const std::string m : {"1111", "1010", "0110"}) {
    for (int d = 1; d <= depth; ++d) {
      const auto rep = family_distinct(fam(m), fam(m), d);
      c.check(rep.verdict == DistinctReport::Verdict::not_separated,
              m + " vs itself never separated (depth " + std::to_string(d) + ")");
    }
  }
}

void criterion8(Criterion& c) {
  std::vector<int> exps(12);
  for (int i = 0; i < 12; ++i) exps[i] = i + 1;
  const auto spec = PruferKernelSpec::torsion(2, exps, {});

  const auto gens = kv_generators(spec);
  c.check(gens.size() == 11, "11 generators for the 12-term prefix");
  for (const auto& [idx, k] : gens) {
    c.check(kv_member(spec, k), "k_" + std::to_string(idx) + " is a member");
    c.check(kv_order(spec, k) == (std::uint64_t{1} << exps[idx - 1]),
            "order(k_" + std::to_string(idx) + ") = p^n_i");
  }

  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> coeff(-7, 7);
  auto random_member = [&] {
    KvTuple x(12, 0);
    for (const auto& [idx, k] : gens)
      x = kv_add(spec, x, kv_scale(spec, coeff(rng), k));
    return x;
  };
  bool closure_ok = true;
  for (int i = 0; i < 500; ++i) {
    const KvTuple x = random_member();
    const KvTuple y = random_member();
    closure_ok = closure_ok && kv_member(spec, x) &&
                 kv_member(spec, kv_add(spec, x, y)) &&
                 kv_member(spec, kv_neg(spec, x));
  }
  c.check(closure_ok, "membership closed under addition and negation (500 pairs)");

  KvTuple e1(12, 0);
  e1[0] = 1;
  c.check(!kv_member(spec, e1), "e_1 is outside the kernel");
  for (int m = 0; m <= 10; ++m) {
    try {
      const auto wit = kv_divisibility_witness(spec, e1, m);
      const auto back =
          kv_add(spec, kv_scale(spec, std::int64_t{1} << m, wit.y), wit.k);
      c.check(kv_member(spec, wit.k) && back == kv_reduce(spec, e1),
              "divisibility witness verifies for m = " + std::to_string(m));
    } catch (const Error& e) {
      c.check(false, std::string("witness at m failed: ") + e.what());
    }
  }

  auto inv = [&](std::vector<std::uint8_t> mask) {
    return kv_iso_invariant(PruferKernelSpec::torsion(2, exps, std::move(mask)));
  };
  const std::vector<std::vector<std::uint8_t>> masks = {
      std::vector<std::uint8_t>(12, 1),
      [] { std::vector<std::uint8_t> m(12, 1); m[3] = 0; return m; }(),
      [] { std::vector<std::uint8_t> m(12, 1); m[7] = 0; return m; }(),
      [] { std::vector<std::uint8_t> m(12, 0); m[0] = m[1] = 1; return m; }(),
  };
  for (std::size_t i = 0; i < masks.size(); ++i)
    for (std::size_t j = 0; j < masks.size(); ++j)
      c.check((inv(masks[i]) == inv(masks[j])) == (masks[i] == masks[j]),
              "iso invariants distinguish exactly the distinct masks");
}

void criterion9(Criterion& c) {
  auto classify = [](const std::string& json) {
    return erf_classify_cases(descriptor_from_json(json));
  };
  c.check(classify(R"({"z_rank": "infinite", "components": []})") ==
              ErfVerdict::not_erf,
          "infinite free rank is not ERF");
  c.check(classify(
              R"({"z_rank": 0, "components": [{"p": 2, "exponents": [1, 1, 1]}]})") ==
              ErfVerdict::erf,
          "bounded single-prime sums are ERF");
  c.check(classify(
              R"({"z_rank": 0, "components": [{"p": 2, "exponents": "unbounded"}]})") ==
              ErfVerdict::not_erf,
          "unbounded single-prime sums are not ERF");
  c.check(classify(
              R"({"z_rank": 0, "components": [{"p": 2, "exponents": [1]}, {"p": 3, "exponents": [1]}], "primes_infinite": true})") ==
              ErfVerdict::undetermined,
          "infinitely many primes with exponent 1 are undetermined");

  // increasing-prime tower with bounded per-prime exponents
  const auto tower = descriptor_from_json(
      R"({"z_rank": 0, "components": [{"p": 2, "exponents": {"bounded_by": 1}}, {"p": 3, "exponents": {"bounded_by": 2}}], "primes_infinite": true, "tail_exponents": "bounded"})");
  c.check(erf_classify_full(tower) == ErfVerdict::erf,
          "bounded prime tower is ERF under the full criterion");
  const auto unbounded = descriptor_from_json(
      R"({"z_rank": 0, "components": [{"p": 3, "exponents": "unbounded"}]})");
  c.check(erf_classify_full(unbounded) == ErfVerdict::not_erf,
          "strictly increasing exponents over one prime are not ERF");
}

void criterion10(Criterion& c) {
  auto g = grigorchuk();
  std::mt19937 rng(987654321);
  std::uniform_int_distribution<int> len(0, 12);
  std::uniform_int_distribution<int> gen(0, 3);
  std::uniform_int_distribution<int> letter(1, 2);
  auto random_word = [&] {
    std::vector<Atom> atoms;
    for (int i = len(rng); i-- > 0;) atoms.push_back(GenAtom{gen(rng), false});
    return Element(g, Word(std::move(atoms)));
  };
  auto random_vertex = [&](int max_level) {
    std::uniform_int_distribution<int> vl(0, max_level);
    Vertex v;
    for (int i = vl(rng); i-- > 0;) v.push_back(letter(rng));
    return v;
  };

  bool hom_ok = true;
  for (int i = 0; i < 1000; ++i) {
    const Element x = random_word(), y = random_word();
    const Vertex v = random_vertex(6);
    hom_ok = hom_ok && (x * y).act(v) == y.act(x.act(v));
  }
  c.check(hom_ok, "action homomorphism (1000 cases)");

  bool sec_ok = true;
  for (int i = 0; i < 1000; ++i) {
    const Element x = random_word(), y = random_word();
    const int l = 1 + (i % 2);
    const int moved = x.root_perm().apply_letter(l);
    sec_ok = sec_ok &&
             (x * y).section(l).equals(x.section(l) * y.section(moved));
  }
  c.check(sec_ok, "section identity (1000 cases)");

  bool triv_ok = true;
  for (int i = 0; i < 1000; ++i) {
    const Element x = random_word();
    bool images_trivial = true;
    for (int n = 1; n <= 8 && images_trivial; ++n)
      images_trivial = image(x, n).perm.is_identity();
    triv_ok = triv_ok && (x.is_trivial() == images_trivial);
  }
  c.check(triv_ok, "triviality matches level images up to 8 (1000 cases)");

  RistProvider provider(g);
  std::uniform_int_distribution<int> vl(1, 4);
  bool comm_ok = true;
  int done = 0;
  while (done < 1000) {
    Vertex u = random_vertex(4), v = random_vertex(4);
    if (!incomparable(u, v)) continue;
    const auto wu = provider.exact_order(u, 2, 8);
    const auto wv = provider.exact_order(v, 2, 8);
    if (!wu || !wv) {
      comm_ok = false;
      break;
    }
    const Element comm =
        wu->g.inverse() * wv->g.inverse() * wu->g * wv->g;
    comm_ok = comm_ok && comm.is_trivial();
    ++done;
  }
  c.check(comm_ok, "rigid stabilizers at incomparable vertices commute (1000 cases)");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>>
      criteria = {
          {"grigorchuk relation and order suite", criterion1},
          {"level-quotient orders against the BFS oracle", criterion2},
          {"ggs torsion criterion on 10 vectors", criterion3},
          {"large-order rigid-stabilizer element, torsion mode, N = 32",
           criterion4},
          {"family generators of order p^2 with closure-gap certificates",
           criterion5},
          {"abelian embedding checks, 100 samples per family", criterion6},
          {"mask families separated by stabilizer chains", criterion7},
          {"kernel arithmetic: generators, closure, witnesses, invariants",
           criterion8},
          {"ERF classification truth table", criterion9},
          {"cross-module property suites, 1000 cases each", criterion10},
      };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Criterion c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.check(false, std::string("exception: ") + e.what());
    }
    std::printf("[%s] criterion %zu: %s\n", c.passed() ? "PASS" : "FAIL",
                i + 1, criteria[i].first.c_str());
    if (!c.passed()) {
      ++failures;
      for (const auto& f : c.failures)
        std::printf("         - %s\n", f.c_str());
    }
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
