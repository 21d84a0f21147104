// branchforge command-line front end. Talks to the core exclusively through
// the C API in branchforge.h.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "branchforge.h"

namespace {

// exit codes: 0 success, 1 usage, 2 computation failure (caps/radius),
// 3 verification failure
int exit_code(bf_status st) {
  switch (st) {
    case BF_OK:
      return 0;
    case BF_ERR_INVALID:
    case BF_ERR_PARSE:
    case BF_ERR_UNSUPPORTED:
      return 1;
    case BF_ERR_CAP:
    case BF_ERR_SEARCH:
    case BF_ERR_UNDECIDED:
      return 2;
    case BF_ERR_VERIFY:
      return 3;
  }
  return 1;
}

int report_error(bf_status st) {
  std::cerr << "error: " << bf_last_error() << "\n";
  return exit_code(st);
}

struct GroupHandle {
  bf_group* g = nullptr;
  ~GroupHandle() { bf_group_free(g); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    std::exit(1);
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string resolve_arg(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') return read_file(arg.substr(1));
  return arg;
}

int open_group(const std::string& designator, const std::string& caps,
               GroupHandle& out) {
  bf_status st = bf_group_open(resolve_arg(designator).c_str(), &out.g);
  if (st != BF_OK) return report_error(st);
  std::string all_caps;
  if (const char* env = std::getenv("BRANCHFORGE_CAPS")) all_caps = env;
  if (!caps.empty()) all_caps = all_caps.empty() ? caps : all_caps + "," + caps;
  if (!all_caps.empty()) {
    st = bf_group_set_caps(out.g, all_caps.c_str());
    if (st != BF_OK) return report_error(st);
  }
  return 0;
}

int emit(const char* text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return 1;
  }
  out << text;
  return 0;
}

struct OwnedString {
  char* s = nullptr;
  ~OwnedString() { bf_string_free(s); }
};

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::istringstream in(csv);
  std::string part;
  while (std::getline(in, part, ',')) out.push_back(std::stoi(part));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact computation in groups of rooted-tree automorphisms"};
  app.set_version_flag("--version", bf_version());
  app.require_subcommand(1);
  app.footer(
      "Caps may also be set globally via BRANCHFORGE_CAPS, e.g.\n"
      "  BRANCHFORGE_CAPS=closure=100000,wordlen=1000,ball=1000000\n"
      "Exit codes: 0 ok, 1 usage, 2 computation gave up (caps/radius),\n"
      "3 verification failure.");

  std::string group, caps, word, vertex = "e", report_path, mask, mask2, a_word = "a";
  std::string predicate = "nontrivial", descriptor, rule = "cases", exponents_csv;
  int depth = 6, radius = 8, level = 1, m_max = 10, threads = 1;
  std::uint64_t target = 2, order_cap = 1u << 20;
  std::int64_t prime = 2;
  bool torsion = false, torsion_free = false, seeded = false;
  std::string realize_group;

  app.add_option("--threads", threads,
                 "worker threads for parallel-capable operations (best effort)");

  auto add_group = [&](CLI::App* cmd) {
    cmd->add_option("--group", group,
                    "catalog designator (grigorchuk, ggs:3:1,2, "
                    "multi-ggs:3:1,2;1,0, example25:2,3,5) or @file/spec text")
        ->required();
    cmd->add_option("--caps", caps,
                    "closure/ball caps, e.g. closure=100000,ball=1000000");
  };

  auto* cmd_group = app.add_subcommand("group", "print a group's spec file and info");
  add_group(cmd_group);
  cmd_group->add_option("-o,--out", report_path, "write the spec to a file");

  auto* cmd_wp = app.add_subcommand("wp", "word problem: is the word trivial?");
  add_group(cmd_wp);
  cmd_wp->add_option("--word", word)->required();

  auto* cmd_order = app.add_subcommand("order", "order of an element");
  add_group(cmd_order);
  cmd_order->add_option("--word", word)->required();
  cmd_order->add_option("--cap", order_cap, "abort beyond this bound");

  auto* cmd_portrait = app.add_subcommand("portrait", "DOT portrait of an element");
  add_group(cmd_portrait);
  cmd_portrait->add_option("--word", word)->required();
  cmd_portrait->add_option("--depth", depth)->required();
  cmd_portrait->add_option("-o,--out", report_path);

  auto* cmd_orbit = app.add_subcommand("orbit", "orbit of a vertex under an element");
  add_group(cmd_orbit);
  cmd_orbit->add_option("--word", word)->required();
  cmd_orbit->add_option("--vertex", vertex)->required();

  auto* cmd_q = app.add_subcommand("quotient-order", "order of the level-n quotient");
  add_group(cmd_q);
  cmd_q->add_option("--level", level)->required();

  auto* cmd_rist = app.add_subcommand("rist-search",
                                      "ball search for rigid-stabilizer witnesses");
  add_group(cmd_rist);
  cmd_rist->add_option("--vertex", vertex)->required();
  cmd_rist->add_option("--radius", radius)->required();
  cmd_rist->add_option("--predicate", predicate,
                       "nontrivial (default), order=P, or order%P=0");
  cmd_rist->add_flag("--seeded", seeded,
                     "extend the ball alphabet with synthesized planted "
                     "section words");
  cmd_rist->add_option("--report", report_path);

  auto* cmd_lemma = app.add_subcommand(
      "lemma23", "large-order element in a rigid stabilizer, with certificate");
  add_group(cmd_lemma);
  cmd_lemma->add_option("--vertex", vertex)->required();
  cmd_lemma->add_option("--target", target, "orbit-length target N")->required();
  cmd_lemma->add_flag("--torsion", torsion, "prime-order steps; exact order p1...pn");
  cmd_lemma->add_option("--radius", radius);
  cmd_lemma->add_option("--report", report_path);

  auto* cmd_hv = app.add_subcommand(
      "hv", "non-closed family: generators, membership refutation, closure gap");
  add_group(cmd_hv);
  cmd_hv->add_option("--p", prime)->required();
  cmd_hv->add_option("--a", a_word, "root element of order p (default: a)");
  cmd_hv->add_option("--mask", mask, "binary prefix, e.g. 1111")->required();
  cmd_hv->add_option("--depth", depth, "closure-gap depth");
  cmd_hv->add_option("--radius", radius);
  cmd_hv->add_option("--report", report_path);

  auto* cmd_kv = app.add_subcommand(
      "kv", "kernel-of-Prufer-projection arithmetic and certificates");
  cmd_kv->add_option("--p", prime);
  cmd_kv->add_option("--exponents", exponents_csv, "e.g. 1,2,3,...,12")->required();
  cmd_kv->add_option("--mask", mask, "binary mask (default all ones)");
  cmd_kv->add_option("--m-max", m_max, "verify divisibility witnesses for m <= m-max");
  cmd_kv->add_flag("--torsion-free", torsion_free);
  cmd_kv->add_option("--realize-in", realize_group,
                     "realize the summands inside this group");
  cmd_kv->add_option("--radius", radius);
  cmd_kv->add_option("--report", report_path);

  auto* cmd_erf = app.add_subcommand("erf-classify",
                                     "ERF classification of a sum of cyclic groups");
  cmd_erf->add_option("--descriptor", descriptor, "JSON descriptor or @file")
      ->required();
  cmd_erf->add_option("--rule", rule, "cases (default) or full");
  cmd_erf->add_option("--report", report_path);

  auto* cmd_dist = app.add_subcommand("distinct",
                                      "separate two mask families by level images");
  add_group(cmd_dist);
  cmd_dist->add_option("--p", prime)->required();
  cmd_dist->add_option("--a", a_word);
  cmd_dist->add_option("--mask", mask)->required();
  cmd_dist->add_option("--mask2", mask2)->required();
  cmd_dist->add_option("--depth", depth)->required();
  cmd_dist->add_option("--radius", radius);
  cmd_dist->add_option("--report", report_path);

  auto* cmd_verify = app.add_subcommand("verify", "replay and check a report");
  cmd_verify->add_option("--report", report_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage errors exit 1
  }

  if (cmd_group->parsed()) {
    GroupHandle h;
    if (int rc = open_group(group, caps, h)) return rc;
    OwnedString spec, info;
    bf_status st = bf_group_serialize(h.g, &spec.s);
    if (st != BF_OK) return report_error(st);
    st = bf_group_info(h.g, &info.s);
    if (st != BF_OK) return report_error(st);
    if (report_path.empty()) {
      std::cout << info.s << spec.s;
      return 0;
    }
    std::cout << info.s;
    return emit(spec.s, report_path);
  }

  if (cmd_wp->parsed()) {
    GroupHandle h;
    if (int rc = open_group(group, caps, h)) return rc;
    int trivial = 0;
    const bf_status st = bf_word_is_trivial(h.g, word.c_str(), &trivial);
    if (st != BF_OK) return report_error(st);
    std::cout << (trivial ? "trivial" : "nontrivial") << "\n";
    return 0;
  }

  if (cmd_order->parsed()) {
    GroupHandle h;
    if (int rc = open_group(group, caps, h)) return rc;
    std::uint64_t value = 0;
    const bf_status st = bf_word_order(h.g, word.c_str(), order_cap, &value);
    if (st == BF_ERR_CAP) {
      std::cout << "exceeds cap " << order_cap << "\n";
      return exit_code(st);
    }
    if (st != BF_OK) return report_error(st);
    std::cout << value << "\n";
    return 0;
  }

  if (cmd_portrait->parsed()) {
    GroupHandle h;
    if (int rc = open_group(group, caps, h)) return rc;
    OwnedString dot;
    const bf_status st = bf_word_portrait_dot(h.g, word.c_str(), depth, &dot.s);
    if (st != BF_OK) return report_error(st);
    return emit(dot.s, report_path);
  }

  if (cmd_orbit->parsed()) {
    GroupHandle h;
    if (int rc = open_group(group, caps, h)) return rc;
    OwnedString json;
    const bf_status st = bf_word_orbit(h.g, word.c_str(), vertex.c_str(), &json.s);
    if (st != BF_OK) return report_error(st);
    std::cout << json.s;
    return 0;
  }

  if (cmd_q->parsed()) {
    GroupHandle h;
    if (int rc = open_group(group, caps, h)) return rc;
    std::uint64_t value = 0;
    const bf_status st = bf_quotient_order(h.g, level, &value);
    if (st != BF_OK) return report_error(st);
    std::cout << value << "\n";
    return 0;
  }

  if (cmd_rist->parsed()) {
    GroupHandle h;
    if (int rc = open_group(group, caps, h)) return rc;
    OwnedString json;
    const bf_status st = bf_rist_search(h.g, vertex.c_str(), radius,
                                        predicate.c_str(), seeded ? 1 : 0,
                                        &json.s);
    if (st != BF_OK) return report_error(st);
    return emit(json.s, report_path);
  }

  if (cmd_lemma->parsed()) {
    GroupHandle h;
    if (int rc = open_group(group, caps, h)) return rc;
    OwnedString json;
    const bf_status st = bf_lemma23(h.g, vertex.c_str(), target, torsion ? 1 : 0,
                                    radius, &json.s);
    if (st != BF_OK) return report_error(st);
    return emit(json.s, report_path);
  }

  if (cmd_hv->parsed()) {
    GroupHandle h;
    if (int rc = open_group(group, caps, h)) return rc;
    OwnedString json;
    const bf_status st = bf_build_hv(h.g, prime, a_word.c_str(), mask.c_str(),
                                     radius, depth, &json.s);
    if (json.s) {
      if (int rc = emit(json.s, report_path)) return rc;
    }
    if (st != BF_OK) return report_error(st);
    return 0;
  }

  if (cmd_kv->parsed()) {
    const auto exps = parse_int_list(exponents_csv);
    OwnedString json;
    const bf_status st = bf_kv_report(
        prime, exps.data(), exps.size(), mask.c_str(), m_max,
        torsion_free ? 1 : 0,
        realize_group.empty() ? nullptr : resolve_arg(realize_group).c_str(),
        radius, &json.s);
    if (st != BF_OK) return report_error(st);
    return emit(json.s, report_path);
  }

  if (cmd_erf->parsed()) {
    OwnedString json;
    const bf_status st = bf_erf_classify(resolve_arg(descriptor).c_str(),
                                         rule.c_str(), &json.s);
    if (st != BF_OK) return report_error(st);
    return emit(json.s, report_path);
  }

  if (cmd_dist->parsed()) {
    GroupHandle h;
    if (int rc = open_group(group, caps, h)) return rc;
    OwnedString json;
    const bf_status st =
        bf_hv_distinct(h.g, prime, a_word.c_str(), mask.c_str(), mask2.c_str(),
                       radius, depth, &json.s);
    if (st != BF_OK) return report_error(st);
    return emit(json.s, report_path);
  }

  if (cmd_verify->parsed()) {
    const std::string text = read_file(report_path);
    int verified = 0;
    OwnedString summary;
    const bf_status st = bf_verify_report(text.c_str(), &verified, &summary.s);
    if (st != BF_OK) return report_error(st);
    std::cout << summary.s;
    return verified ? 0 : 3;
  }

  return 1;
}
