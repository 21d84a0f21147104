#include <doctest.h>

#include <random>

#include "branchforge/catalog.hpp"
#include "branchforge/error.hpp"
#include "helpers.hpp"

using namespace bf;

TEST_CASE("grigorchuk presentation") {
  auto g = grigorchuk();
  CHECK(g->gen_count() == 4);
  for (const std::string gen : {"a", "b", "c", "d"})
    CHECK(parse_word(g, gen + "^2").is_trivial());
  CHECK(parse_word(g, "bcd").is_trivial());
  CHECK(parse_word(g, "(ad)^4").is_trivial());
  CHECK_FALSE(parse_word(g, "(ad)^2").is_trivial());
}

TEST_CASE("ggs groups") {
  auto g = ggs(3, {1, 2});
  CHECK(g->gen_count() == 2);
  CHECK(parse_word(g, "b").section(3).equals(parse_word(g, "b")));
  CHECK(parse_word(g, "b").section(1).equals(parse_word(g, "a")));
  CHECK(parse_word(g, "b").section(2).equals(parse_word(g, "a^2")));
  CHECK(parse_word(g, "a").order(10).value == 3);
  CHECK(parse_word(g, "b").order(10).value == 3);

  auto h = ggs(3, {1, 1});
  CHECK(parse_word(h, "b").order(10).value == 3);

  CHECK_THROWS_AS(ggs(4, {1, 2, 3}), Error);   // p not prime
  CHECK_THROWS_AS(ggs(2, {1}), Error);         // odd primes only
  CHECK_THROWS_AS(ggs(3, {1}), Error);         // wrong vector length
  CHECK_THROWS_AS(ggs(5, {1, 2, 3}), Error);
}

TEST_CASE("multi-ggs groups") {
  auto g = multi_ggs(3, {{1, 2}, {1, 0}});
  CHECK(g->gen_count() == 3);
  CHECK(parse_word(g, "b2").section(2).is_trivial());  // e_{2,2} = 0
  CHECK(parse_word(g, "b2").section(1).equals(parse_word(g, "a")));
  CHECK(parse_word(g, "b2").section(3).equals(parse_word(g, "b2")));

  // r = 1 reduces to the plain GGS presentation
  auto single = multi_ggs(3, {{1, 2}});
  CHECK(presentations_equal(*single, *ggs(3, {1, 2})));
  CHECK_THROWS_AS(multi_ggs(3, {}), Error);
}

TEST_CASE("ggs torsion criterion") {
  CHECK(ggs_is_torsion(3, {1, 2}));
  CHECK_FALSE(ggs_is_torsion(3, {1, 1}));
  CHECK(ggs_is_torsion(5, {1, 1, 1, 2}));
  // the sum rule on a spread of vectors
  const std::vector<std::pair<std::vector<std::int64_t>, bool>> cases5 = {
      {{1, 2, 3, 4}, true},  {{1, 0, 0, 0}, false}, {{2, 3, 0, 0}, true},
      {{4, 4, 4, 4}, false}, {{0, 0, 0, 0}, true},  {{1, 1, 2, 2}, false},
      {{3, 3, 2, 2}, true}};
  for (const auto& [e, expect] : cases5) {
    std::int64_t sum = 0;
    for (auto x : e) sum += x;
    CHECK(ggs_is_torsion(5, e) == (sum % 5 == 0));
    CHECK(ggs_is_torsion(5, e) == expect);
  }
}

TEST_CASE("torsion ggs groups kill random words quickly") {
  // sampled agreement between the torsion criterion and the order op
  auto g = ggs(3, {1, 2});
  std::mt19937 rng(31337);
  for (int i = 0; i < 20; ++i) {
    const Element x = bf::testing::random_word(g, rng, 6);
    const auto ord = x.order(1u << 16);
    CHECK(ord.ok());  // torsion: every short word has a (3-power) order
  }
}

TEST_CASE("example25 groups") {
  auto g = example25({2, 3, 5});
  CHECK(g->gen_count() == 3);
  CHECK(parse_word(g, "a1").order(10).value == 2);
  CHECK(parse_word(g, "a2").order(10).value == 3);
  CHECK(parse_word(g, "a3").order(10).value == 5);
  // a1 cycles the children of the root
  CHECK(parse_word(g, "a1").act({1}) == Vertex{2});
  CHECK(parse_word(g, "a2").act({1, 1}) == Vertex{1, 2});

  // planted elements at incomparable vertices commute
  const Element left = parse_word(g, "a2");              // at vertex 1
  const Element right = left.conj(parse_word(g, "a1"));  // moved to vertex 2
  const Element comm = left.inverse() * right.inverse() * left * right;
  CHECK(comm.is_trivial());

  CHECK_THROWS_AS(example25({}), Error);
  CHECK_THROWS_AS(example25({4}), Error);
}

TEST_CASE("group spec files round trip") {
  for (const auto& pres :
       {grigorchuk(), ggs(3, {1, 2}), multi_ggs(3, {{1, 2}, {1, 0}}),
        example25({2, 3, 5})}) {
    const std::string text = serialize(*pres);
    auto back = load_spec(text);
    CHECK(presentations_equal(*pres, *back));
    CHECK(serialize(*back) == text);
  }
}

TEST_CASE("spec file errors") {
  CHECK_THROWS_WITH_AS(load_spec("tree regular 2\ngen b perm id sections a q\n"),
                       doctest::Contains("unknown generator"), Error);
  CHECK_THROWS_AS(load_spec("tree regular 2\ngen b perm 1 1 sections e e\n"),
                  Error);
  CHECK_THROWS_AS(load_spec("gen b perm id sections e e\n"), Error);  // no tree
  CHECK_THROWS_AS(load_spec("tree regular 2\ngen b perm id sections e\n"),
                  Error);  // missing section
  CHECK_THROWS_AS(load_spec("tree regular 2\nplant p at 3 cycle 2\n"), Error);
}

TEST_CASE("group designators resolve") {
  CHECK(resolve_group("grigorchuk")->name() == "grigorchuk");
  CHECK(resolve_group("ggs:3:1,2")->ctor() == "ggs:3:1,2");
  CHECK(resolve_group("multi-ggs:3:1,2;1,0")->gen_count() == 3);
  CHECK(resolve_group("example25:2,3")->gen_count() == 2);
  CHECK(resolve_group("tree regular 2\ngen s perm 2 1 sections e e\n")->gen_count() == 1);
  CHECK_THROWS_AS(resolve_group("nonsense"), Error);
}
