#include <doctest.h>

#include <random>

#include "branchforge/catalog.hpp"
#include "branchforge/constructions.hpp"
#include "branchforge/error.hpp"
#include "branchforge/quotients.hpp"

using namespace bf;

namespace {

AbelianDescriptor descriptor(bool z_inf, std::uint64_t z,
                             std::vector<PrimeComponent> comps,
                             bool primes_inf = false,
                             AbelianDescriptor::Tail tail =
                                 AbelianDescriptor::Tail::unknown) {
  AbelianDescriptor d;
  d.z_rank_infinite = z_inf;
  d.z_rank = z;
  d.components = std::move(comps);
  d.primes_infinite = primes_inf;
  d.tail = tail;
  return d;
}

PrimeComponent explicit_comp(std::int64_t p, std::vector<int> exps) {
  PrimeComponent c;
  c.p = p;
  c.exponents = std::move(exps);
  return c;
}

PrimeComponent bounded_comp(std::int64_t p, int bound) {
  PrimeComponent c;
  c.p = p;
  c.kind = PrimeComponent::Kind::bounded;
  c.bound = bound;
  return c;
}

PrimeComponent unbounded_comp(std::int64_t p) {
  PrimeComponent c;
  c.p = p;
  c.kind = PrimeComponent::Kind::unbounded;
  return c;
}

}  // namespace

TEST_CASE("erf classifier: case analysis") {
  // (i) infinite free part
  CHECK(erf_classify_cases(descriptor(true, 0, {})) == ErfVerdict::not_erf);
  // (ii) one prime, exponents all 1
  CHECK(erf_classify_cases(descriptor(false, 0, {explicit_comp(2, {1, 1, 1})})) ==
        ErfVerdict::erf);
  // (iii) one prime, unbounded exponents
  CHECK(erf_classify_cases(descriptor(false, 0, {unbounded_comp(2)})) ==
        ErfVerdict::not_erf);
  // infinitely many primes, exponent 1 each: orders unbounded, undetermined
  CHECK(erf_classify_cases(descriptor(false, 0,
                                      {explicit_comp(2, {1}), explicit_comp(3, {1})},
                                      true)) == ErfVerdict::undetermined);
}

TEST_CASE("erf classifier: the full criterion") {
  // increasing-prime towers with bounded per-prime exponents are ERF
  const auto tower =
      descriptor(false, 0, {explicit_comp(2, {1}), explicit_comp(3, {1})}, true,
                 AbelianDescriptor::Tail::bounded);
  CHECK(erf_classify_full(tower) == ErfVerdict::erf);

  CHECK(erf_classify_full(descriptor(false, 0, {unbounded_comp(3)})) ==
        ErfVerdict::not_erf);
  CHECK(erf_classify_full(descriptor(false, 2, {explicit_comp(2, {1, 2, 3})})) ==
        ErfVerdict::erf);
  CHECK(erf_classify_full(descriptor(true, 0, {})) == ErfVerdict::not_erf);

  // unknown tails are refused
  CHECK_THROWS_AS(
      erf_classify_full(descriptor(false, 0, {explicit_comp(2, {1})}, true)),
      Error);
}

TEST_CASE("erf classifiers are consistent") {
  const std::vector<AbelianDescriptor> cases = {
      descriptor(true, 0, {}),
      descriptor(false, 0, {explicit_comp(2, {1, 1, 1})}),
      descriptor(false, 3, {explicit_comp(5, {2, 2})}),
      descriptor(false, 0, {unbounded_comp(2)}),
      descriptor(false, 1, {bounded_comp(3, 7), explicit_comp(2, {1})}),
  };
  for (const auto& d : cases) {
    const auto quick = erf_classify_cases(d);
    if (quick == ErfVerdict::undetermined) continue;
    CHECK(erf_classify_full(d) == quick);
  }
}

TEST_CASE("erf descriptor validation") {
  CHECK_THROWS_AS(erf_classify_cases(descriptor(false, 0, {explicit_comp(4, {1})})),
                  Error);
  CHECK_THROWS_AS(erf_classify_cases(descriptor(
                      false, 0, {explicit_comp(2, {1}), explicit_comp(2, {2})})),
                  Error);
  CHECK_THROWS_AS(erf_classify_cases(descriptor(false, 0, {explicit_comp(2, {})})),
                  Error);
}

TEST_CASE("large-order elements: single step") {
  auto g = grigorchuk();
  RistProvider provider(g);
  const auto cert = build_large_order(provider, {1}, 2, false, 8);
  CHECK(cert.verified);
  CHECK(cert.steps.size() == 1);
  CHECK(cert.orbit_length >= 2);
  CHECK(in_rist(cert.product, {1}));
}

TEST_CASE("large-order elements: torsion mode in the 2-group") {
  auto g = grigorchuk();
  RistProvider provider(g);
  const auto cert = build_large_order(provider, {1}, 32, true, 8);
  CHECK(cert.verified);
  CHECK(cert.orbit_length >= 32);
  REQUIRE(cert.product_order.has_value());
  // order is exactly the product of the step primes = 2^n
  std::uint64_t expect = 1;
  for (const auto& s : cert.steps) expect *= *s.witness.order;
  CHECK(*cert.product_order == expect);
  CHECK(expect >= 32);
  CHECK(orbit_of_vertex(cert.product, cert.witness_point).size() ==
        cert.orbit_length);
  for (const auto& s : cert.steps) CHECK(in_rist(s.witness.g, s.u));
}

TEST_CASE("large-order elements: torsion mode in the 3-group") {
  auto gs = ggs(3, {1, 2});
  RistProvider provider(gs);
  const auto cert = build_large_order(provider, {1}, 9, true, 8);
  CHECK(cert.verified);
  REQUIRE(cert.product_order.has_value());
  CHECK(*cert.product_order % 9 == 0);
  CHECK(cert.orbit_length >= 9);
}

TEST_CASE("constructions report search failure honestly") {
  auto flat = load_spec("tree regular 2\ngen s perm 2 1 sections e e\n");
  RistProvider provider(flat);
  CHECK_THROWS_AS(build_large_order(provider, {1}, 4, true, 6), Error);
  CHECK_THROWS_AS(
      build_hv(provider, 2, parse_word(flat, "s"), {1, 1, 1, 1}, 6), Error);
}

TEST_CASE("prufer kernel: generators and membership") {
  const auto spec = PruferKernelSpec::torsion(2, {1, 2}, {});
  const auto gens = kv_generators(spec);
  REQUIRE(gens.size() == 1);
  CHECK(gens[0].second == KvTuple{1, 2});  // (1, -2) mod (2, 4)
  CHECK(kv_member(spec, gens[0].second));
  CHECK(kv_order(spec, gens[0].second) == 2);
  CHECK(kv_member(spec, KvTuple{0, 0}));
  CHECK_FALSE(kv_member(spec, KvTuple{1, 0}));  // 2 != 0 mod 4

  const auto spec3 = PruferKernelSpec::torsion(3, {1, 2, 3}, {});
  const auto gens3 = kv_generators(spec3);
  REQUIRE(gens3.size() == 2);
  CHECK(gens3[1].second == KvTuple{0, 1, 27 - 3});  // (0, 1, -3)
  for (const auto& [idx, k] : gens3) {
    CHECK(kv_member(spec3, k));
    CHECK(kv_order(spec3, k) ==
          static_cast<std::uint64_t>(spec3.modulus(idx - 1)));
  }
}

TEST_CASE("prufer kernel: membership is a subgroup predicate") {
  const auto spec = PruferKernelSpec::torsion(2, {1, 2, 3, 5, 8}, {});
  const auto gens = kv_generators(spec);
  std::mt19937 rng(1234);
  std::uniform_int_distribution<int> coeff(-5, 5);
  auto random_member = [&] {
    KvTuple x(spec.exponents.size(), 0);
    for (const auto& [idx, k] : gens) {
      const auto scaled = kv_scale(spec, coeff(rng), k);
      x = kv_add(spec, x, scaled);
    }
    return x;
  };
  for (int i = 0; i < 500; ++i) {
    const KvTuple x = random_member();
    const KvTuple y = random_member();
    CHECK(kv_member(spec, x));
    CHECK(kv_member(spec, kv_add(spec, x, y)));
    CHECK(kv_member(spec, kv_neg(spec, x)));
  }
}

TEST_CASE("prufer kernel: divisibility witnesses") {
  std::vector<int> exps(12);
  for (int i = 0; i < 12; ++i) exps[i] = i + 1;
  const auto spec = PruferKernelSpec::torsion(2, exps, {});

  // t = 0: the zero witness
  const auto zero = kv_divisibility_witness(spec, KvTuple(12, 0), 5);
  CHECK(zero.y == KvTuple(12, 0));
  CHECK(zero.k == KvTuple(12, 0));

  KvTuple e1(12, 0);
  e1[0] = 1;
  for (int m = 0; m <= 10; ++m) {
    const auto w = kv_divisibility_witness(spec, e1, m);
    CHECK(kv_member(spec, w.k));
    const auto recomposed =
        kv_add(spec, kv_scale(spec, std::int64_t{1} << m, w.y), w.k);
    CHECK(recomposed == kv_reduce(spec, e1));
  }
  // prefix too short
  CHECK_THROWS_AS(kv_divisibility_witness(spec, e1, 20), Error);

  // torsion-free mode
  const auto tf = PruferKernelSpec::torsion_free_mode(10, {});
  KvTuple t(10, 0);
  t[0] = 1;
  const auto w = kv_divisibility_witness(tf, t, 3);
  CHECK(kv_member(tf, w.k));
  KvTuple recomposed(10, 0);
  for (int i = 0; i < 10; ++i) recomposed[i] = 8 * w.y[i] + w.k[i];
  CHECK(recomposed == t);
}

TEST_CASE("prufer kernel: iso invariants distinguish masks") {
  std::vector<int> exps{1, 2, 3, 4};
  const auto inv = [&](std::vector<std::uint8_t> mask) {
    return kv_iso_invariant(PruferKernelSpec::torsion(2, exps, std::move(mask)));
  };
  CHECK(inv({1, 1, 1, 1}) == inv({1, 1, 1, 1}));
  CHECK_FALSE(inv({1, 1, 1, 1}) == inv({1, 1, 1, 0}));
  CHECK_FALSE(inv({1, 1, 0, 1}) == inv({1, 0, 1, 1}));
  // torsion-free: all masked variants isomorphic
  const auto tf_a =
      kv_iso_invariant(PruferKernelSpec::torsion_free_mode(4, {1, 1, 1, 1}));
  const auto tf_b =
      kv_iso_invariant(PruferKernelSpec::torsion_free_mode(4, {1, 1, 0, 1}));
  CHECK(tf_a == tf_b);
}

TEST_CASE("prufer kernel: spec validation") {
  CHECK_THROWS_AS(PruferKernelSpec::torsion(4, {1, 2}, {}), Error);
  CHECK_THROWS_AS(PruferKernelSpec::torsion(2, {2, 1}, {}), Error);
  CHECK_THROWS_AS(PruferKernelSpec::torsion(2, {1}, {}), Error);
  const auto spec = PruferKernelSpec::torsion(2, {1, 2}, {1, 0});
  CHECK_THROWS_AS(kv_member(spec, KvTuple{0, 1}), Error);  // outside the mask
  CHECK_THROWS_AS(kv_member(spec, KvTuple{0}), Error);     // wrong length
}

TEST_CASE("kernel realization inside the tree group") {
  auto g = grigorchuk();
  RistProvider provider(g);
  const auto spec = PruferKernelSpec::torsion(2, {1, 2}, {});
  const auto real = kv_realize(provider, spec, 8);
  CHECK(real.verified);
  REQUIRE(real.summands.size() == 2);
  CHECK(*real.summands[0].product_order == 2);
  CHECK(*real.summands[1].product_order == 4);
  CHECK(incomparable(real.vertices[0], real.vertices[1]));
  for (std::size_t i = 0; i < real.vertices.size(); ++i)
    CHECK(in_rist(real.summands[i].product, real.vertices[i]));
}

// ---------------------------------------------------------------------------
// H_V families

namespace {

HvFamilySpec grig_family(RistProvider& provider,
                         std::vector<std::uint8_t> mask = {1, 1, 1, 1}) {
  return build_hv(provider, 2, parse_word(provider.presentation(), "a"),
                  mask, 8);
}

}  // namespace

TEST_CASE("family construction and generator orders") {
  auto g = grigorchuk();
  RistProvider provider(g);
  const auto fam = grig_family(provider);
  CHECK(fam.verified);
  CHECK(fam.x == Vertex{1});
  CHECK(fam.n0 == 1);
  REQUIRE(fam.gens.size() == 4);
  for (const auto& s : fam.gens) CHECK(s.order(4).value == 4);
  for (std::size_t k = 0; k < fam.active.size(); ++k) {
    CHECK(in_rist(fam.witnesses[k].g, fam.vertices[fam.active[k]]));
    CHECK(fam.witnesses[k].g.order(2).value == 2);
  }

  auto gs = ggs(3, {1, 2});
  RistProvider provider3(gs);
  const auto fam3 =
      build_hv(provider3, 3, parse_word(gs, "a"), {1, 1, 1, 1}, 8);
  CHECK(fam3.verified);
  for (const auto& s : fam3.gens) CHECK(s.order(9).value == 9);
}

TEST_CASE("masked families") {
  auto g = grigorchuk();
  RistProvider provider(g);
  const auto fam = grig_family(provider, {1, 0, 1, 0});
  CHECK(fam.gens.size() == 2);
  CHECK(fam.active == std::vector<int>{0, 2});
  // all-zero mask: an empty generating set is allowed at build time
  const auto empty = grig_family(provider, {0, 0, 0, 0});
  CHECK(empty.gens.empty());
  CHECK_THROWS_AS(hv_member_a(empty), Error);
}

TEST_CASE("normal forms") {
  auto g = grigorchuk();
  RistProvider provider(g);
  const auto fam = grig_family(provider);

  const auto empty_nf = hv_normal_form(fam, {});
  CHECK(empty_nf.r == 0);
  CHECK(empty_nf.exponents.empty());

  const auto one = hv_normal_form(fam, {{0, 1}});
  CHECK(one.r == 1);
  REQUIRE(one.exponents.size() == 1);
  CHECK(one.exponents.count({0, 0}) == 1);

  const auto twice = hv_normal_form(fam, {{0, 1}, {0, 1}});
  CHECK(twice.r == 0);  // 2 mod 2
  CHECK(twice.exponents.count({0, 0}) == 1);
  CHECK(twice.exponents.count({0, 1}) == 1);

  CHECK_THROWS_AS(hv_normal_form(fam, {{1, 1}, {7, 1}}), Error);

  // soundness on random words
  std::mt19937 rng(606);
  std::uniform_int_distribution<int> len(0, 8);
  std::uniform_int_distribution<int> slot(0, 3);
  std::uniform_int_distribution<int> sign(0, 1);
  for (int i = 0; i < 500; ++i) {
    HvWord word;
    for (int k = len(rng); k-- > 0;)
      word.emplace_back(slot(rng), sign(rng) ? 1 : -1);
    const auto nf = hv_normal_form(fam, word);
    CHECK(hv_word_element(fam, word).equals(hv_realize(fam, nf)));
  }
}

TEST_CASE("the root element avoids the family") {
  auto g = grigorchuk();
  RistProvider provider(g);
  const auto fam = grig_family(provider);
  const auto ref = hv_member_a(fam, 4);
  CHECK(ref.verified);
  CHECK(ref.sweep_clean);
  CHECK(ref.invariant_checked);
  CHECK(ref.sweep_words == 8 + 64 + 512 + 4096);

  // single-generator family: same sweep
  const auto small = grig_family(provider, {1, 0, 0, 0});
  const auto ref_small = hv_member_a(small, 4);
  CHECK(ref_small.verified);
  CHECK(ref_small.sweep_words == 2 + 4 + 8 + 16);

  auto gs = ggs(3, {1, 2});
  RistProvider provider3(gs);
  const auto fam3 = build_hv(provider3, 3, parse_word(gs, "a"), {1, 1, 1, 1}, 8);
  const auto ref3 = hv_member_a(fam3, 3);
  CHECK(ref3.verified);
  CHECK(ref3.p == 3);
}

TEST_CASE("closure gap certificates") {
  auto g = grigorchuk();
  RistProvider provider(g);
  const auto fam = grig_family(provider);
  const auto gap = closure_gap_certificate(fam, 6);
  CHECK(gap.verified);
  CHECK(gap.max_certified == 6);
  for (const auto& lv : gap.levels) CHECK(lv.ok());
  const auto empty = closure_gap_certificate(fam, 0);
  CHECK(empty.verified);
  CHECK(empty.levels.empty());

  // the family tops out eventually: requesting far beyond reports the max
  const auto deep = closure_gap_certificate(fam, 12);
  CHECK_FALSE(deep.verified);
  CHECK(deep.max_certified >= 6);
  CHECK(deep.max_certified < 12);

  auto gs = ggs(3, {1, 2});
  RistProvider provider3(gs);
  const auto fam3 = build_hv(provider3, 3, parse_word(gs, "a"), {1, 1, 1, 1}, 8);
  const auto gap3 = closure_gap_certificate(fam3, 4);
  CHECK(gap3.verified);
}

TEST_CASE("abelian embedding of the level stabilizer part") {
  auto g = grigorchuk();
  RistProvider provider(g);
  const auto fam = grig_family(provider);
  const auto emb = hv_abelian_embedding_check(fam, 100);
  CHECK(emb.verified);
  CHECK(emb.checked_words == 100);
}

TEST_CASE("family distinctness") {
  auto g = grigorchuk();
  RistProvider provider(g);
  const auto f1100 = grig_family(provider, {1, 1, 0, 0});
  const auto f1010 = grig_family(provider, {1, 0, 1, 0});
  const auto rep = family_distinct(f1100, f1010, 7);
  CHECK(rep.verdict == DistinctReport::Verdict::distinct);

  const auto same = family_distinct(f1100, grig_family(provider, {1, 1, 0, 0}), 7);
  CHECK(same.verdict == DistinctReport::Verdict::not_separated);
  CHECK(same.detail == "identical masks");

  // masks differing only beyond the reachable depth: not separated at depth 2
  const auto g1 = grig_family(provider, {1, 1, 1, 0});
  const auto g2 = grig_family(provider, {1, 1, 0, 1});
  const auto shallow = family_distinct(g1, g2, 2);
  CHECK(shallow.verdict == DistinctReport::Verdict::not_separated);
  const auto deep = family_distinct(g1, g2, 8);
  CHECK(deep.verdict == DistinctReport::Verdict::distinct);
}

TEST_CASE("families over a five-adic tree") {
  auto g5 = ggs(5, {1, 1, 1, 2});
  REQUIRE(ggs_is_torsion(5, {1, 1, 1, 2}));
  RistProvider provider(g5);
  const auto fam = build_hv(provider, 5, parse_word(g5, "a"), {1, 1}, 8);
  CHECK(fam.verified);
  for (const auto& s : fam.gens) CHECK(s.order(25).value == 25);
  CHECK(closure_gap_certificate(fam, 3).verified);
  CHECK(hv_member_a(fam, 3).verified);
}
