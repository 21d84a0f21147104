#include <doctest.h>

#include "branchforge/catalog.hpp"
#include "branchforge/error.hpp"
#include "branchforge/reports.hpp"

using namespace bf;

TEST_CASE("reports are deterministic") {
  auto g = grigorchuk();
  auto make = [&] {
    RistProvider provider(g);
    const auto fam = build_hv(provider, 2, parse_word(g, "a"), {1, 1, 1, 1}, 8);
    return hv_report(fam, hv_member_a(fam), closure_gap_certificate(fam, 6),
                     hv_abelian_embedding_check(fam));
  };
  const std::string first = make();
  const std::string second = make();
  CHECK(first == second);
  CHECK(first.back() == '\n');
}

TEST_CASE("verify replays hv reports") {
  auto g = grigorchuk();
  RistProvider provider(g);
  const auto fam = build_hv(provider, 2, parse_word(g, "a"), {1, 1, 1, 1}, 8);
  const std::string report =
      hv_report(fam, hv_member_a(fam), closure_gap_certificate(fam, 6),
                hv_abelian_embedding_check(fam));
  const auto outcome = verify_report(report);
  CHECK(outcome.verified);

  // tampering is caught
  std::string tampered = report;
  const auto pos = tampered.find("\"n0\": 1");
  REQUIRE(pos != std::string::npos);
  tampered.replace(pos, 7, "\"n0\": 2");
  CHECK_FALSE(verify_report(tampered).verified);
}

TEST_CASE("verify replays lemma23 and kv reports") {
  auto g = grigorchuk();
  RistProvider provider(g);
  const auto cert = build_large_order(provider, {1}, 8, true, 8);
  CHECK(verify_report(lemma23_report(cert, *g)).verified);

  const auto spec = PruferKernelSpec::torsion(2, {1, 2, 3, 4}, {});
  CHECK(verify_report(kv_report(spec, 2, nullptr, "")).verified);
}

TEST_CASE("verify replays erf, distinctness and search reports") {
  const auto d = descriptor_from_json(
      R"({"z_rank": 0, "components": [{"p": 2, "exponents": [1, 1]}]})");
  CHECK(erf_classify_cases(d) == ErfVerdict::erf);
  CHECK(verify_report(erf_report(d, "cases", ErfVerdict::erf)).verified);
  // a wrong recorded classification fails replay
  CHECK_FALSE(verify_report(erf_report(d, "cases", ErfVerdict::not_erf)).verified);

  auto g = grigorchuk();
  RistProvider provider(g);
  const auto f1 = build_hv(provider, 2, parse_word(g, "a"), {1, 1, 0, 0}, 8);
  const auto f2 = build_hv(provider, 2, parse_word(g, "a"), {1, 0, 1, 0}, 8);
  const auto rep = family_distinct(f1, f2, 7);
  CHECK(verify_report(distinct_report(f1, f2, rep)).verified);

  const auto pred = OrderPredicate::exact(2);
  const auto hits = rist_search(g, {1}, 4, pred);
  CHECK(verify_report(rist_search_report(g, {1}, 4, pred, false, hits)).verified);
}

TEST_CASE("descriptor json round trips") {
  for (const std::string text : {
           R"({"z_rank": "infinite", "components": []})",
           R"({"z_rank": 2, "components": [{"p": 3, "exponents": "unbounded"}]})",
           R"({"z_rank": 0, "components": [{"p": 2, "exponents": {"bounded_by": 5}}], "primes_infinite": true, "tail_exponents": "bounded"})",
       }) {
    const auto d = descriptor_from_json(text);
    const auto d2 = descriptor_from_json(descriptor_to_json(d));
    CHECK(descriptor_to_json(d) == descriptor_to_json(d2));
  }
  CHECK_THROWS_AS(descriptor_from_json("not json"), Error);
  CHECK_THROWS_AS(descriptor_from_json(R"({"z_rank": "lots"})"), Error);
}

TEST_CASE("spec-backed groups embed their definition in reports") {
  auto user = load_spec("tree regular 2\ngen s perm 2 1 sections e e\n");
  const std::string designator = group_designator(*user);
  CHECK(designator.rfind("spec:", 0) == 0);
  CHECK(presentations_equal(*resolve_group(designator), *user));
}
