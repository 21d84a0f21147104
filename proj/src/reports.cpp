#include "branchforge/reports.hpp"

#include <json.hpp>

#include "branchforge/catalog.hpp"
#include "branchforge/error.hpp"

namespace bf {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "branchforge-report-v1";

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json envelope(const std::string& kind) {
  json j;
  j["format"] = kFormat;
  j["kind"] = kind;
  j["convention"] = "right-action";
  return j;
}

json checks_json(const std::vector<std::pair<std::string, bool>>& checks) {
  json arr = json::array();
  for (const auto& [name, ok] : checks) arr.push_back({{"name", name}, {"ok", ok}});
  return arr;
}

std::string mask_string(const std::vector<std::uint8_t>& mask) {
  std::string out;
  for (auto b : mask) out += b ? '1' : '0';
  return out;
}

std::vector<std::uint8_t> parse_mask(const std::string& s) {
  std::vector<std::uint8_t> out;
  for (char c : s) {
    if (c != '0' && c != '1') fail(ErrorKind::parse, "mask must be over {0,1}");
    out.push_back(c == '1');
  }
  return out;
}

json witness_json(const RistWitness& w) {
  json j;
  j["vertex"] = format_vertex(w.v);
  j["element"] = w.g.to_string();
  j["kind"] = w.kind;
  j["evidence"] = w.evidence;
  j["radius"] = w.radius;
  if (w.order) j["order"] = *w.order;
  return j;
}

json tuple_json(const KvTuple& t) {
  json arr = json::array();
  for (auto v : t) arr.push_back(v);
  return arr;
}

KvTuple tuple_from(const json& j) {
  KvTuple out;
  for (const auto& v : j) out.push_back(v.get<std::int64_t>());
  return out;
}

}  // namespace

std::string group_designator(const Presentation& pres) {
  const std::string& c = pres.ctor();
  if (c.rfind("spec:", 0) == 0 || c == "user") return "spec:" + serialize(pres);
  return c;
}

// ---------------------------------------------------------------------------
// lemma23

std::string lemma23_report(const LargeOrderCertificate& cert,
                           const Presentation& pres) {
  json j = envelope("lemma23");
  j["inputs"] = {{"group", group_designator(pres)},
                 {"vertex", format_vertex(cert.base)},
                 {"target", cert.target},
                 {"torsion", cert.torsion_mode},
                 {"radius", cert.radius}};
  json steps = json::array();
  for (const auto& s : cert.steps) {
    json sj;
    sj["u"] = format_vertex(s.u);
    sj["witness"] = witness_json(s.witness);
    sj["moved"] = format_vertex(s.moved);
    sj["orbit_factor"] = s.orbit_factor;
    steps.push_back(sj);
  }
  j["steps"] = steps;
  j["result"] = {{"element", cert.product.to_string()},
                 {"witness_point", format_vertex(cert.witness_point)},
                 {"orbit_length", cert.orbit_length}};
  if (cert.product_order) j["result"]["order"] = *cert.product_order;
  j["checks"] = checks_json(cert.checks);
  j["verdict"] = cert.verified ? "pass" : "fail";
  return dump(j);
}

// ---------------------------------------------------------------------------
// hv

std::string hv_report(const HvFamilySpec& fam, const HvRefutation& ref,
                      const ClosureGapReport& gap, const EmbeddingCheck& emb) {
  json j = envelope("hv-closure-gap");
  j["inputs"] = {{"group", group_designator(*fam.pres)},
                 {"p", fam.p},
                 {"a", fam.a.to_string()},
                 {"mask", mask_string(fam.mask)},
                 {"M", fam.mask.size()},
                 {"radius", fam.radius},
                 {"depth", gap.requested_depth}};
  json family;
  family["x"] = format_vertex(fam.x);
  family["n0"] = fam.n0;
  json verts = json::array();
  for (const auto& v : fam.vertices) verts.push_back(format_vertex(v));
  family["vertices"] = verts;
  json wits = json::array();
  for (const auto& w : fam.witnesses) wits.push_back(witness_json(w));
  family["witnesses"] = wits;
  json gens = json::array();
  for (const auto& s : fam.gens) gens.push_back(s.to_string());
  family["generators"] = gens;
  family["checks"] = checks_json(fam.checks);
  j["family"] = family;

  j["member_a"] = {{"p", ref.p},
                   {"constraint_r", ref.constraint_r},
                   {"constraint_sum", ref.constraint_sum},
                   {"invariant", ref.invariant},
                   {"sweep_len", ref.sweep_len},
                   {"sweep_words", ref.sweep_words},
                   {"sweep_clean", ref.sweep_clean},
                   {"invariant_checked", ref.invariant_checked},
                   {"conclusion", "a is not a member of the family subgroup"}};

  json levels = json::array();
  for (const auto& lv : gap.levels) {
    json lj;
    lj["n"] = lv.n;
    lj["witness_vertex"] =
        lv.witness_slot >= 0 ? format_vertex(fam.vertices[lv.witness_slot]) : "";
    lj["stabilizer_ok"] = lv.stab_ok;
    lj["identity_ok"] = lv.eq_ok;
    lj["chain_ok"] = lv.chain_ok;
    levels.push_back(lj);
  }
  j["closure_gap"] = {{"requested_depth", gap.requested_depth},
                      {"max_certified", gap.max_certified},
                      {"levels", levels},
                      {"verified", gap.verified}};

  j["embedding"] = {{"samples", emb.samples},
                    {"checked_words", emb.checked_words},
                    {"checks", checks_json(emb.checks)},
                    {"verified", emb.verified}};

  const bool all = fam.verified && ref.verified && gap.verified && emb.verified;
  j["verdict"] = all ? "pass" : "fail";
  return dump(j);
}

// ---------------------------------------------------------------------------
// kv

std::string kv_report(const PruferKernelSpec& spec, int m_max,
                      const KvRealization* realization,
                      const std::string& group) {
  json j = envelope("kv");
  json exps = json::array();
  for (int e : spec.exponents) exps.push_back(e);
  j["inputs"] = {{"p", spec.p},
                 {"exponents", exps},
                 {"mask", mask_string(spec.mask)},
                 {"torsion_free", spec.torsion_free},
                 {"m_max", m_max}};
  if (!group.empty()) j["inputs"]["group"] = group;

  bool all_ok = true;
  json gens = json::array();
  for (const auto& [idx, k] : kv_generators(spec)) {
    json g;
    g["index"] = idx;
    g["tuple"] = tuple_json(k);
    const bool member = kv_member(spec, k);
    g["member"] = member;
    all_ok = all_ok && member;
    if (!spec.torsion_free) {
      g["order"] = kv_order(spec, k);
      const auto expected = static_cast<std::uint64_t>(spec.modulus(idx - 1));
      g["order_expected"] = expected;
      all_ok = all_ok && kv_order(spec, k) == expected;
    }
    gens.push_back(g);
  }
  j["generators"] = gens;

  json witnesses = json::array();
  const auto act = spec.active();
  for (int m = 0; m <= m_max; ++m) {
    KvTuple t(spec.exponents.size(), 0);
    t[act.front()] = 1;  // e_1-style target outside the kernel
    const auto w = kv_divisibility_witness(spec, t, m);
    json wj;
    wj["m"] = m;
    wj["t"] = tuple_json(t);
    wj["y"] = tuple_json(w.y);
    wj["k"] = tuple_json(w.k);
    wj["k_member"] = kv_member(spec, w.k);
    all_ok = all_ok && kv_member(spec, w.k);
    witnesses.push_back(wj);
  }
  j["divisibility_witnesses"] = witnesses;

  const auto inv = kv_iso_invariant(spec);
  json orders = json::array();
  for (auto o : inv.orders) orders.push_back(o);
  j["iso_invariant"] = {{"torsion_free", inv.torsion_free}, {"orders", orders}};

  if (realization) {
    json r = json::array();
    for (std::size_t i = 0; i < realization->vertices.size(); ++i) {
      json rj;
      rj["vertex"] = format_vertex(realization->vertices[i]);
      rj["element"] = realization->summands[i].product.to_string();
      if (realization->summands[i].product_order)
        rj["order"] = *realization->summands[i].product_order;
      r.push_back(rj);
    }
    j["realization"] = {{"summands", r}, {"verified", realization->verified}};
    all_ok = all_ok && realization->verified;
  }

  j["verdict"] = all_ok ? "pass" : "fail";
  return dump(j);
}

// ---------------------------------------------------------------------------
// erf

std::string descriptor_to_json(const AbelianDescriptor& d) {
  json j;
  if (d.z_rank_infinite)
    j["z_rank"] = "infinite";
  else
    j["z_rank"] = d.z_rank;
  json comps = json::array();
  for (const auto& c : d.components) {
    json cj;
    cj["p"] = c.p;
    switch (c.kind) {
      case PrimeComponent::Kind::explicit_list: {
        json exps = json::array();
        for (int e : c.exponents) exps.push_back(e);
        cj["exponents"] = exps;
        break;
      }
      case PrimeComponent::Kind::bounded:
        cj["exponents"] = {{"bounded_by", c.bound}};
        break;
      case PrimeComponent::Kind::unbounded:
        cj["exponents"] = "unbounded";
        break;
    }
    comps.push_back(cj);
  }
  j["components"] = comps;
  j["primes_infinite"] = d.primes_infinite;
  if (d.primes_infinite) {
    switch (d.tail) {
      case AbelianDescriptor::Tail::bounded:
        j["tail_exponents"] = "bounded";
        break;
      case AbelianDescriptor::Tail::unbounded:
        j["tail_exponents"] = "unbounded";
        break;
      default:
        j["tail_exponents"] = "unknown";
    }
  }
  return j.dump();
}

AbelianDescriptor descriptor_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::parse, std::string("descriptor JSON: ") + e.what());
  }
  AbelianDescriptor d;
  if (j.contains("z_rank")) {
    if (j["z_rank"].is_string()) {
      if (j["z_rank"] != "infinite")
        fail(ErrorKind::parse, "z_rank must be an integer or \"infinite\"");
      d.z_rank_infinite = true;
    } else {
      d.z_rank = j["z_rank"].get<std::uint64_t>();
    }
  }
  for (const auto& cj : j.value("components", json::array())) {
    PrimeComponent c;
    c.p = cj.at("p").get<std::int64_t>();
    const auto& e = cj.at("exponents");
    if (e.is_array()) {
      c.kind = PrimeComponent::Kind::explicit_list;
      for (const auto& x : e) c.exponents.push_back(x.get<int>());
    } else if (e.is_object()) {
      c.kind = PrimeComponent::Kind::bounded;
      c.bound = e.at("bounded_by").get<int>();
    } else if (e == "unbounded") {
      c.kind = PrimeComponent::Kind::unbounded;
    } else {
      fail(ErrorKind::parse, "bad exponents entry");
    }
    d.components.push_back(std::move(c));
  }
  d.primes_infinite = j.value("primes_infinite", false);
  const std::string tail = j.value("tail_exponents", "unknown");
  d.tail = tail == "bounded"     ? AbelianDescriptor::Tail::bounded
           : tail == "unbounded" ? AbelianDescriptor::Tail::unbounded
                                 : AbelianDescriptor::Tail::unknown;
  d.validate();
  return d;
}

std::string erf_report(const AbelianDescriptor& d, const std::string& rule,
                       ErfVerdict verdict) {
  json j = envelope("erf");
  j["inputs"] = {{"descriptor", json::parse(descriptor_to_json(d))},
                 {"rule", rule}};
  j["classification"] = to_string(verdict);
  j["verdict"] = "pass";
  return dump(j);
}

// ---------------------------------------------------------------------------
// distinctness

std::string distinct_report(const HvFamilySpec& a, const HvFamilySpec& b,
                            const DistinctReport& rep) {
  json j = envelope("distinctness");
  j["inputs"] = {{"group", group_designator(*a.pres)},
                 {"p", a.p},
                 {"a", a.a.to_string()},
                 {"mask", mask_string(a.mask)},
                 {"mask2", mask_string(b.mask)},
                 {"M", a.mask.size()},
                 {"radius", a.radius},
                 {"depth", rep.depth}};
  j["result"] = rep.verdict == DistinctReport::Verdict::distinct
                    ? "distinct"
                    : "not-separated";
  j["detail"] = rep.detail;
  j["verdict"] = "pass";
  return dump(j);
}

// ---------------------------------------------------------------------------
// rist-search

std::string rist_search_report(const PresentationPtr& pres, const Vertex& v,
                               int radius, const OrderPredicate& pred,
                               bool seeded,
                               const std::vector<RistWitness>& hits) {
  json j = envelope("rist-search");
  j["inputs"] = {{"group", group_designator(*pres)},
                 {"vertex", format_vertex(v)},
                 {"radius", radius},
                 {"predicate", pred.describe()},
                 {"seeded", seeded}};
  json arr = json::array();
  for (const auto& w : hits) arr.push_back(witness_json(w));
  j["witnesses"] = arr;
  j["verdict"] = "pass";
  return dump(j);
}

// ---------------------------------------------------------------------------
// verify: replay the construction from the recorded inputs and compare

namespace {

OrderPredicate predicate_from(const std::string& s) {
  if (s == "nontrivial") return OrderPredicate::nontrivial();
  if (s.rfind("order=", 0) == 0)
    return OrderPredicate::exact(std::stoull(s.substr(6)));
  if (s.rfind("order%", 0) == 0) {
    const auto rest = s.substr(6);
    return OrderPredicate::divisible(std::stoull(rest.substr(0, rest.find('='))));
  }
  fail(ErrorKind::parse, "bad predicate '" + s + "'");
}

std::string replay(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const json inputs = j.at("inputs");
  if (kind == "lemma23") {
    auto pres = resolve_group(inputs.at("group").get<std::string>());
    RistProvider provider(pres);
    auto cert = build_large_order(
        provider, parse_vertex(inputs.at("vertex").get<std::string>()),
        inputs.at("target").get<std::uint64_t>(), inputs.at("torsion").get<bool>(),
        inputs.at("radius").get<int>());
    return lemma23_report(cert, *pres);
  }
  if (kind == "hv-closure-gap") {
    auto pres = resolve_group(inputs.at("group").get<std::string>());
    RistProvider provider(pres);
    const Element a = parse_word(pres, inputs.at("a").get<std::string>());
    auto fam = build_hv(provider, inputs.at("p").get<std::int64_t>(), a,
                        parse_mask(inputs.at("mask").get<std::string>()),
                        inputs.at("radius").get<int>());
    auto ref = hv_member_a(fam);
    auto gap = closure_gap_certificate(fam, inputs.at("depth").get<int>());
    auto emb = hv_abelian_embedding_check(fam);
    return hv_report(fam, ref, gap, emb);
  }
  if (kind == "kv") {
    std::vector<int> exps;
    for (const auto& e : inputs.at("exponents")) exps.push_back(e.get<int>());
    const auto mask = parse_mask(inputs.at("mask").get<std::string>());
    const auto spec =
        inputs.at("torsion_free").get<bool>()
            ? PruferKernelSpec::torsion_free_mode(static_cast<int>(exps.size()), mask)
            : PruferKernelSpec::torsion(inputs.at("p").get<std::int64_t>(), exps, mask);
    std::optional<KvRealization> realization;
    std::string group;
    if (inputs.contains("group")) {
      group = inputs.at("group").get<std::string>();
      RistProvider provider(resolve_group(group));
      realization = kv_realize(provider, spec, 8);
    }
    return kv_report(spec, inputs.at("m_max").get<int>(),
                     realization ? &*realization : nullptr, group);
  }
  if (kind == "erf") {
    const auto d = descriptor_from_json(inputs.at("descriptor").dump());
    const std::string rule = inputs.at("rule").get<std::string>();
    const auto verdict =
        rule == "full" ? erf_classify_full(d) : erf_classify_cases(d);
    return erf_report(d, rule, verdict);
  }
  if (kind == "distinctness") {
    auto pres = resolve_group(inputs.at("group").get<std::string>());
    RistProvider provider(pres);
    const Element a = parse_word(pres, inputs.at("a").get<std::string>());
    auto fam1 = build_hv(provider, inputs.at("p").get<std::int64_t>(), a,
                         parse_mask(inputs.at("mask").get<std::string>()),
                         inputs.at("radius").get<int>());
    auto fam2 = build_hv(provider, inputs.at("p").get<std::int64_t>(), a,
                         parse_mask(inputs.at("mask2").get<std::string>()),
                         inputs.at("radius").get<int>());
    auto rep = family_distinct(fam1, fam2, inputs.at("depth").get<int>());
    return distinct_report(fam1, fam2, rep);
  }
  if (kind == "rist-search") {
    auto pres = resolve_group(inputs.at("group").get<std::string>());
    const auto pred = predicate_from(inputs.at("predicate").get<std::string>());
    const auto v = parse_vertex(inputs.at("vertex").get<std::string>());
    const bool seeded = inputs.value("seeded", false);
    SearchOptions opts;
    if (seeded) {
      RistProvider provider(pres);
      for (const auto& s : provider.plantables()) {
        Element sec(pres, s.section, level(v));
        opts.extra_letters.push_back(Element::planted(v, sec));
      }
    }
    const auto hits =
        rist_search(pres, v, inputs.at("radius").get<int>(), pred, opts);
    return rist_search_report(pres, v, inputs.at("radius").get<int>(), pred,
                              seeded, hits);
  }
  fail(ErrorKind::unsupported, "unknown report kind '" + kind + "'");
}

}  // namespace

VerifyOutcome verify_report(const std::string& report_json) {
  json j;
  try {
    j = json::parse(report_json);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::parse, std::string("report JSON: ") + e.what());
  }
  if (j.value("format", "") != kFormat)
    fail(ErrorKind::parse, "not a branchforge report");

  VerifyOutcome out;
  json summary;
  summary["format"] = kFormat;
  summary["kind"] = "verify";
  summary["report_kind"] = j.at("kind");
  const std::string replayed = replay(j);
  const json r = json::parse(replayed);
  out.verified = r == j;
  summary["replay_matches"] = out.verified;
  if (!out.verified) {
    const json flat_old = j.flatten();
    const json flat_new = r.flatten();
    json diffs = json::array();
    for (auto it = flat_old.begin(); it != flat_old.end(); ++it) {
      if (!flat_new.contains(it.key()) || flat_new.at(it.key()) != it.value()) {
        diffs.push_back(it.key());
        if (diffs.size() >= 16) break;
      }
    }
    for (auto it = flat_new.begin(); it != flat_new.end(); ++it) {
      if (!flat_old.contains(it.key())) {
        diffs.push_back(it.key());
        if (diffs.size() >= 16) break;
      }
    }
    summary["mismatched_paths"] = diffs;
  }
  summary["verdict"] = out.verified ? "pass" : "fail";
  out.summary_json = dump(summary);
  return out;
}

}  // namespace bf
