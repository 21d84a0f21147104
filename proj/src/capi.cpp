#include "branchforge.h"

#include <cstring>
#include <sstream>
#include <string>

#include <json.hpp>

#include "branchforge/catalog.hpp"
#include "branchforge/constructions.hpp"
#include "branchforge/error.hpp"
#include "branchforge/quotients.hpp"
#include "branchforge/reports.hpp"
#include "branchforge/stabilizers.hpp"

using namespace bf;

struct bf_group {
  PresentationPtr pres;
  // the witness provider carries the synthesized planted sections; keep it
  // with the handle so repeated constructions reuse the derivation
  RistProvider provider;

  explicit bf_group(PresentationPtr p) : pres(p), provider(p) {}
};

namespace {

thread_local std::string g_last_error;

bf_status status_of(const Error& e) {
  g_last_error = e.what();
  switch (e.kind()) {
    case ErrorKind::invalid_argument:
      return BF_ERR_INVALID;
    case ErrorKind::parse:
      return BF_ERR_PARSE;
    case ErrorKind::cap_exceeded:
      return BF_ERR_CAP;
    case ErrorKind::search_failed:
      return BF_ERR_SEARCH;
    case ErrorKind::verify_failed:
      return BF_ERR_VERIFY;
    case ErrorKind::unsupported:
      return BF_ERR_UNSUPPORTED;
  }
  return BF_ERR_INVALID;
}

template <typename Fn>
bf_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BF_ERR_INVALID;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bf_status need(const void* p, const char* what) {
  g_last_error = std::string("null ") + what;
  (void)p;
  return BF_ERR_INVALID;
}

Element parse(bf_group* g, const char* word) {
  return parse_word(g->pres, word ? word : "");
}

std::vector<std::uint8_t> mask_of(const char* mask) {
  std::vector<std::uint8_t> out;
  for (const char* c = mask; c && *c; ++c) {
    if (*c != '0' && *c != '1')
      fail(ErrorKind::parse, "mask must be a string over {0,1}");
    out.push_back(*c == '1');
  }
  if (out.empty()) fail(ErrorKind::parse, "mask must be nonempty");
  return out;
}

}  // namespace

extern "C" {

const char* bf_version(void) { return "branchforge 1.0.0"; }

const char* bf_last_error(void) { return g_last_error.c_str(); }

void bf_string_free(char* s) { delete[] s; }

bf_status bf_group_open(const char* designator, bf_group** out) {
  if (!designator || !out) return need(out, "argument");
  return guarded([&] {
    *out = new bf_group(resolve_group(designator));
    return BF_OK;
  });
}

bf_status bf_group_from_spec(const char* text, bf_group** out) {
  if (!text || !out) return need(out, "argument");
  return guarded([&] {
    *out = new bf_group(load_spec(text));
    return BF_OK;
  });
}

void bf_group_free(bf_group* g) { delete g; }

bf_status bf_group_serialize(const bf_group* g, char** out) {
  if (!g || !out) return need(g, "argument");
  return guarded([&] {
    *out = dup_string(serialize(*g->pres));
    return BF_OK;
  });
}

bf_status bf_group_info(const bf_group* g, char** out) {
  if (!g || !out) return need(g, "argument");
  return guarded([&] {
    nlohmann::json j;
    j["name"] = g->pres->name();
    j["designator"] = group_designator(*g->pres);
    j["tree"] = g->pres->shape().to_string();
    nlohmann::json gens = nlohmann::json::array();
    for (int i = 0; i < g->pres->gen_count(); ++i)
      gens.push_back(g->pres->gen(i).name);
    j["generators"] = gens;
    *out = dup_string(j.dump(2) + "\n");
    return BF_OK;
  });
}

bf_status bf_group_set_caps(bf_group* g, const char* caps) {
  if (!g || !caps) return need(g, "argument");
  return guarded([&] {
    Caps c = g->pres->caps();
    std::istringstream in(caps);
    std::string item;
    while (std::getline(in, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        fail(ErrorKind::parse, "caps entries look like name=value");
      const std::string key = item.substr(0, eq);
      const std::uint64_t value = std::stoull(item.substr(eq + 1));
      if (key == "closure")
        c.closure_states = value;
      else if (key == "wordlen")
        c.word_len = value;
      else if (key == "ball")
        c.ball_words = value;
      else if (key == "points")
        c.level_points = value;
      else
        fail(ErrorKind::parse, "unknown cap '" + key + "'");
    }
    g->pres->set_caps(c);
    return BF_OK;
  });
}

bf_status bf_ggs_is_torsion(int64_t p, const int64_t* entries, size_t n,
                            int* out) {
  if (!entries || !out) return need(out, "argument");
  return guarded([&] {
    *out = ggs_is_torsion(p, std::vector<std::int64_t>(entries, entries + n)) ? 1 : 0;
    return BF_OK;
  });
}

bf_status bf_word_is_trivial(bf_group* g, const char* word, int* out) {
  if (!g || !word || !out) return need(g, "argument");
  return guarded([&] {
    switch (parse(g, word).triviality()) {
      case Tri::trivial:
        *out = 1;
        return BF_OK;
      case Tri::nontrivial:
        *out = 0;
        return BF_OK;
      default:
        g_last_error = "undecided: closure cap exceeded";
        return BF_ERR_UNDECIDED;
    }
  });
}

bf_status bf_word_equal(bf_group* g, const char* w1, const char* w2, int* out) {
  if (!g || !w1 || !w2 || !out) return need(g, "argument");
  return guarded([&] {
    *out = parse(g, w1).equals(parse(g, w2)) ? 1 : 0;
    return BF_OK;
  });
}

bf_status bf_word_order(bf_group* g, const char* word, uint64_t cap,
                        uint64_t* out) {
  if (!g || !word || !out) return need(g, "argument");
  return guarded([&] {
    const auto res = parse(g, word).order(cap);
    switch (res.status) {
      case OrderResult::Status::ok:
        *out = res.value;
        return BF_OK;
      case OrderResult::Status::cap_exceeded:
        g_last_error = "order exceeds cap " + std::to_string(cap);
        return BF_ERR_CAP;
      default:
        g_last_error = "undecided: closure cap exceeded";
        return BF_ERR_UNDECIDED;
    }
  });
}

bf_status bf_word_act(bf_group* g, const char* word, const char* vertex,
                      char** out) {
  if (!g || !word || !vertex || !out) return need(g, "argument");
  return guarded([&] {
    *out = dup_string(format_vertex(parse(g, word).act(parse_vertex(vertex))));
    return BF_OK;
  });
}

bf_status bf_word_section(bf_group* g, const char* word, const char* vertex,
                          char** out) {
  if (!g || !word || !vertex || !out) return need(g, "argument");
  return guarded([&] {
    const Element s = parse(g, word).section(parse_vertex(vertex));
    *out = dup_string(s.to_string());
    return BF_OK;
  });
}

bf_status bf_word_orbit(bf_group* g, const char* word, const char* vertex,
                        char** out) {
  if (!g || !word || !vertex || !out) return need(g, "argument");
  return guarded([&] {
    const auto orbit = orbit_of_vertex(parse(g, word), parse_vertex(vertex));
    nlohmann::json j;
    j["vertex"] = vertex;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : orbit) arr.push_back(format_vertex(v));
    j["orbit"] = arr;
    j["length"] = orbit.size();
    *out = dup_string(j.dump(2) + "\n");
    return BF_OK;
  });
}

bf_status bf_word_portrait_dot(bf_group* g, const char* word, int depth,
                               char** out) {
  if (!g || !word || !out) return need(g, "argument");
  return guarded([&] {
    *out = dup_string(portrait_dot(portrait(parse(g, word), depth)));
    return BF_OK;
  });
}

bf_status bf_level_size(bf_group* g, int level, uint64_t* out) {
  if (!g || !out) return need(g, "argument");
  return guarded([&] {
    *out = g->pres->shape().level_size(level);
    return BF_OK;
  });
}

bf_status bf_quotient_order(bf_group* g, int level, uint64_t* out) {
  if (!g || !out) return need(g, "argument");
  return guarded([&] {
    *out = quotient_order(g->pres, level);
    return BF_OK;
  });
}

bf_status bf_in_level_stab(bf_group* g, const char* word, int level, int* out) {
  if (!g || !word || !out) return need(g, "argument");
  return guarded([&] {
    *out = in_level_stab(parse(g, word), level) ? 1 : 0;
    return BF_OK;
  });
}

bf_status bf_in_rist(bf_group* g, const char* word, const char* vertex,
                     int* out) {
  if (!g || !word || !vertex || !out) return need(g, "argument");
  return guarded([&] {
    *out = in_rist(parse(g, word), parse_vertex(vertex)) ? 1 : 0;
    return BF_OK;
  });
}

bf_status bf_rist_search(bf_group* g, const char* vertex, int radius,
                         const char* predicate, int seeded, char** out) {
  if (!g || !vertex || !predicate || !out) return need(g, "argument");
  return guarded([&] {
    OrderPredicate pred = OrderPredicate::nontrivial();
    const std::string p(predicate);
    if (p.rfind("order=", 0) == 0)
      pred = OrderPredicate::exact(std::stoull(p.substr(6)));
    else if (p.rfind("order%", 0) == 0)
      pred = OrderPredicate::divisible(
          std::stoull(p.substr(6, p.find('=') - 6)));
    else if (p != "nontrivial")
      fail(ErrorKind::parse, "predicate is nontrivial, order=P or order%P=0");
    const Vertex v = parse_vertex(vertex);
    SearchOptions opts;
    if (seeded) {
      for (const auto& s : g->provider.plantables()) {
        Element sec(g->pres, s.section, level(v));
        opts.extra_letters.push_back(Element::planted(v, sec));
      }
    }
    const auto hits = rist_search(g->pres, v, radius, pred, opts);
    *out = dup_string(
        rist_search_report(g->pres, v, radius, pred, seeded != 0, hits));
    return BF_OK;
  });
}

bf_status bf_lemma23(bf_group* g, const char* vertex, uint64_t target,
                     int torsion_mode, int radius, char** out) {
  if (!g || !vertex || !out) return need(g, "argument");
  return guarded([&] {
    const auto cert = build_large_order(g->provider, parse_vertex(vertex),
                                        target, torsion_mode != 0, radius);
    *out = dup_string(lemma23_report(cert, *g->pres));
    return BF_OK;
  });
}

bf_status bf_build_hv(bf_group* g, int64_t p, const char* a_word,
                      const char* mask, int radius, int depth, char** out) {
  if (!g || !a_word || !mask || !out) return need(g, "argument");
  return guarded([&] {
    const Element a = parse(g, a_word);
    const auto fam = build_hv(g->provider, p, a, mask_of(mask), radius);
    const auto ref = hv_member_a(fam);
    const auto gap = closure_gap_certificate(fam, depth);
    const auto emb = hv_abelian_embedding_check(fam);
    *out = dup_string(hv_report(fam, ref, gap, emb));
    if (!gap.verified) {
      g_last_error = "closure gap certified only to depth " +
                     std::to_string(gap.max_certified);
      return BF_ERR_VERIFY;
    }
    return BF_OK;
  });
}

bf_status bf_hv_distinct(bf_group* g, int64_t p, const char* a_word,
                         const char* mask1, const char* mask2, int radius,
                         int depth, char** out) {
  if (!g || !a_word || !mask1 || !mask2 || !out) return need(g, "argument");
  return guarded([&] {
    const Element a = parse(g, a_word);
    const auto fam1 = build_hv(g->provider, p, a, mask_of(mask1), radius);
    const auto fam2 = build_hv(g->provider, p, a, mask_of(mask2), radius);
    const auto rep = family_distinct(fam1, fam2, depth);
    *out = dup_string(distinct_report(fam1, fam2, rep));
    return BF_OK;
  });
}

bf_status bf_kv_report(int64_t p, const int* exponents, size_t n,
                       const char* mask, int m_max, int torsion_free,
                       const char* group, int radius, char** out) {
  if (!exponents || !out) return need(out, "argument");
  return guarded([&] {
    std::vector<int> exps(exponents, exponents + n);
    std::vector<std::uint8_t> m =
        mask && *mask ? mask_of(mask) : std::vector<std::uint8_t>(n, 1);
    const auto spec =
        torsion_free
            ? PruferKernelSpec::torsion_free_mode(static_cast<int>(n), m)
            : PruferKernelSpec::torsion(p, exps, m);
    std::optional<KvRealization> realization;
    std::string designator;
    if (group && *group) {
      designator = group;
      RistProvider provider(resolve_group(designator));
      realization = kv_realize(provider, spec, radius);
    }
    *out = dup_string(kv_report(spec, m_max,
                                realization ? &*realization : nullptr,
                                designator));
    return BF_OK;
  });
}

bf_status bf_erf_classify(const char* descriptor_json, const char* rule,
                          char** out) {
  if (!descriptor_json || !rule || !out) return need(out, "argument");
  return guarded([&] {
    const auto d = descriptor_from_json(descriptor_json);
    const std::string r(rule);
    if (r != "cases" && r != "full")
      fail(ErrorKind::invalid_argument, "rule is cases or full");
    const auto verdict =
        r == "full" ? erf_classify_full(d) : erf_classify_cases(d);
    *out = dup_string(erf_report(d, r, verdict));
    return BF_OK;
  });
}

bf_status bf_verify_report(const char* report_json, int* verified,
                           char** summary_json) {
  if (!report_json || !verified || !summary_json) return need(verified, "argument");
  return guarded([&] {
    const auto outcome = verify_report(report_json);
    *verified = outcome.verified ? 1 : 0;
    *summary_json = dup_string(outcome.summary_json);
    return BF_OK;
  });
}

}  // extern "C"
