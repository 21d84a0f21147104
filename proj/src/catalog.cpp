#include "branchforge/catalog.hpp"

#include <algorithm>
#include <sstream>

#include "branchforge/error.hpp"

namespace bf {

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

bool GgsVector::non_constant() const {
  for (const auto& e : entries)
    if (e != entries.front()) return true;
  return false;
}

namespace {

Word gen_word(const std::vector<std::pair<int, int>>& powers) {
  // powers: list of (generator index, exponent >= 0)
  std::vector<Atom> atoms;
  for (auto [g, e] : powers)
    for (int i = 0; i < e; ++i) atoms.push_back(GenAtom{g, false});
  return Word(std::move(atoms));
}

}  // namespace

PresentationPtr grigorchuk() {
  // a rooted (1 2); b = (a, c), c = (a, d), d = (1, b)
  std::vector<GeneratorDef> gens(4);
  gens[0].name = "a";
  gens[0].root_perm = Perm::cycle(2, 2);
  gens[0].sections = {Word(), Word()};
  gens[1].name = "b";
  gens[1].root_perm = Perm(2);
  gens[1].sections = {gen_word({{0, 1}}), gen_word({{2, 1}})};
  gens[2].name = "c";
  gens[2].root_perm = Perm(2);
  gens[2].sections = {gen_word({{0, 1}}), gen_word({{3, 1}})};
  gens[3].name = "d";
  gens[3].root_perm = Perm(2);
  gens[3].sections = {Word(), gen_word({{1, 1}})};
  return std::make_shared<Presentation>(TreeShape::regular(2), std::move(gens),
                                        "grigorchuk", "grigorchuk");
}

static void check_ggs_args(std::int64_t p, const std::vector<std::int64_t>& entries) {
  if (!is_prime(p)) fail(ErrorKind::invalid_argument, "p must be prime");
  if (p < 3)
    fail(ErrorKind::invalid_argument, "GGS groups are defined for odd primes");
  if (static_cast<std::int64_t>(entries.size()) != p - 1)
    fail(ErrorKind::invalid_argument,
         "defining vector must have length p-1 = " + std::to_string(p - 1));
}

static std::string join_int(const std::vector<std::int64_t>& v, char sep) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << sep;
    out << v[i];
  }
  return out.str();
}

PresentationPtr multi_ggs(std::int64_t p, std::vector<std::vector<std::int64_t>> vectors) {
  if (vectors.empty()) fail(ErrorKind::invalid_argument, "need at least one vector");
  std::vector<std::string> ctor_rows;
  for (auto& e : vectors) {
    check_ggs_args(p, e);
    for (auto& x : e) x = ((x % p) + p) % p;
    ctor_rows.push_back(join_int(e, ','));
  }
  const int r = static_cast<int>(vectors.size());
  const int m = static_cast<int>(p);

  std::vector<GeneratorDef> gens(1 + r);
  gens[0].name = "a";
  gens[0].root_perm = Perm::cycle(m, m);
  gens[0].sections.assign(m, Word());
  for (int i = 0; i < r; ++i) {
    auto& def = gens[1 + i];
    def.name = r == 1 ? "b" : "b" + std::to_string(i + 1);
    def.root_perm = Perm(m);
    for (std::int64_t e : vectors[i])
      def.sections.push_back(gen_word({{0, static_cast<int>(e)}}));
    def.sections.push_back(gen_word({{1 + i, 1}}));
  }

  std::ostringstream ctor;
  if (r == 1) {
    ctor << "ggs:" << p << ':' << ctor_rows[0];
  } else {
    ctor << "multi-ggs:" << p << ':';
    for (int i = 0; i < r; ++i) {
      if (i) ctor << ';';
      ctor << ctor_rows[i];
    }
  }
  const std::string name = r == 1 ? "ggs" : "multi-ggs";
  return std::make_shared<Presentation>(TreeShape::regular(m), std::move(gens),
                                        name, ctor.str());
}

PresentationPtr ggs(std::int64_t p, std::vector<std::int64_t> entries) {
  return multi_ggs(p, {std::move(entries)});
}

bool ggs_is_torsion(std::int64_t p, const std::vector<std::int64_t>& entries) {
  check_ggs_args(p, entries);
  std::int64_t sum = 0;
  for (std::int64_t e : entries) sum = (sum + e % p + p) % p;
  return sum % p == 0;
}

PresentationPtr example25(const std::vector<std::int64_t>& primes) {
  if (primes.empty()) fail(ErrorKind::invalid_argument, "need at least one prime");
  std::vector<int> arities;
  for (std::int64_t q : primes) {
    if (!is_prime(q)) fail(ErrorKind::invalid_argument, "all entries must be prime");
    arities.push_back(static_cast<int>(q));
  }
  // Shape (p_1, p_2, ...) continued by repeating the last prime. Generator
  // a_i is the full cycle planted at the leftmost vertex with p_i children,
  // which makes order(a_i) = p_i and keeps the action level-transitive.
  std::vector<int> block{arities.back()};
  std::vector<GeneratorDef> gens(primes.size());
  for (std::size_t i = 0; i < primes.size(); ++i) {
    auto& def = gens[i];
    def.name = "a" + std::to_string(i + 1);
    def.kind = GeneratorDef::Kind::planted;
    def.planted_at = Vertex(i, 1);  // path 1...1 of length i
    def.cycle_len = arities[i];
  }
  return std::make_shared<Presentation>(TreeShape(arities, block), std::move(gens),
                                        "example25", "example25:" + join_int(primes, ','));
}

// ---------------------------------------------------------------------------
// Group-spec text format

namespace {

struct SpecParser {
  std::istringstream in;
  int lineno = 0;

  [[noreturn]] void err(const std::string& msg) const {
    fail(ErrorKind::parse, "line " + std::to_string(lineno) + ": " + msg);
  }
};

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') break;
    tokens.push_back(tok);
  }
  return tokens;
}

int to_int(SpecParser& p, const std::string& tok) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) p.err("bad integer '" + tok + "'");
    return v;
  } catch (const std::logic_error&) {
    p.err("bad integer '" + tok + "'");
  }
}

}  // namespace

PresentationPtr load_spec(const std::string& text) {
  SpecParser p{std::istringstream(text), 0};
  bool have_tree = false;
  std::vector<int> prefix, block;
  struct PendingGen {
    std::string name;
    bool planted = false;
    std::vector<int> perm_images;  // empty means identity
    std::vector<std::string> section_texts;
    std::string vertex_text;
    int cycle_len = 0;
    int lineno = 0;
  };
  std::vector<PendingGen> pending;

  std::string line;
  while (std::getline(p.in, line)) {
    ++p.lineno;
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "tree") {
      if (have_tree) p.err("duplicate tree directive");
      have_tree = true;
      if (tokens.size() == 3 && tokens[1] == "regular") {
        block = {to_int(p, tokens[2])};
      } else {
        std::size_t i = 1;
        if (i < tokens.size() && tokens[i] == "prefix") {
          ++i;
          while (i < tokens.size() && tokens[i] != "block")
            prefix.push_back(to_int(p, tokens[i++]));
        }
        if (i >= tokens.size() || tokens[i] != "block") p.err("expected 'block'");
        ++i;
        while (i < tokens.size()) block.push_back(to_int(p, tokens[i++]));
        if (block.empty()) p.err("repeating block must be nonempty");
      }
    } else if (tokens[0] == "gen") {
      PendingGen g;
      g.lineno = p.lineno;
      std::size_t i = 1;
      if (i >= tokens.size()) p.err("gen: missing name");
      g.name = tokens[i++];
      if (i >= tokens.size() || tokens[i] != "perm") p.err("gen: expected 'perm'");
      ++i;
      if (i < tokens.size() && tokens[i] == "id") {
        ++i;
      } else {
        while (i < tokens.size() && tokens[i] != "sections")
          g.perm_images.push_back(to_int(p, tokens[i++]));
        if (g.perm_images.empty()) p.err("gen: empty permutation");
      }
      if (i >= tokens.size() || tokens[i] != "sections") p.err("gen: expected 'sections'");
      ++i;
      while (i < tokens.size()) g.section_texts.push_back(tokens[i++]);
      pending.push_back(std::move(g));
    } else if (tokens[0] == "plant") {
      PendingGen g;
      g.lineno = p.lineno;
      g.planted = true;
      if (tokens.size() != 6 || tokens[2] != "at" || tokens[4] != "cycle")
        p.err("plant: expected 'plant <name> at <vertex> cycle <len>'");
      g.name = tokens[1];
      g.vertex_text = tokens[3];
      g.cycle_len = to_int(p, tokens[5]);
      pending.push_back(std::move(g));
    } else {
      p.err("unknown directive '" + tokens[0] + "'");
    }
  }
  if (!have_tree) fail(ErrorKind::parse, "missing tree directive");

  TreeShape shape(prefix, block);

  // First pass: declare names so section words can reference any generator.
  std::vector<GeneratorDef> gens;
  for (const auto& g : pending) {
    GeneratorDef def;
    def.name = g.name;
    if (g.planted) {
      def.kind = GeneratorDef::Kind::planted;
      def.planted_at = parse_vertex(g.vertex_text);
      def.cycle_len = g.cycle_len;
    } else {
      const int m = shape.arity(1);
      def.root_perm = g.perm_images.empty() ? Perm(m) : Perm::from_one_based(g.perm_images);
      def.sections.assign(m, Word());
    }
    gens.push_back(std::move(def));
  }

  // Names must be resolvable before parsing sections; build a scaffold
  // presentation with empty sections for the parser, then fill in.
  auto scaffold = std::make_shared<Presentation>(shape, gens, "user", "user");
  for (std::size_t gi = 0; gi < pending.size(); ++gi) {
    const auto& g = pending[gi];
    if (g.planted) continue;
    const int m = shape.arity(1);
    if (static_cast<int>(g.section_texts.size()) != m)
      fail(ErrorKind::parse, "line " + std::to_string(g.lineno) + ": generator " +
                                 g.name + " needs " + std::to_string(m) + " sections");
    for (int s = 0; s < m; ++s)
      gens[gi].sections[s] = parse_word(scaffold, g.section_texts[s], 1).word();
  }
  return std::make_shared<Presentation>(shape, std::move(gens), "user",
                                        "spec:" + text);
}

std::string serialize(const Presentation& pres) {
  std::ostringstream out;
  const TreeShape& shape = pres.shape();
  if (shape.prefix().empty() && shape.block().size() == 1) {
    out << "tree regular " << shape.block()[0] << '\n';
  } else {
    out << "tree";
    if (!shape.prefix().empty()) {
      out << " prefix";
      for (int m : shape.prefix()) out << ' ' << m;
    }
    out << " block";
    for (int m : shape.block()) out << ' ' << m;
    out << '\n';
  }
  for (int i = 0; i < pres.gen_count(); ++i) {
    const auto& def = pres.gen(i);
    if (def.kind == GeneratorDef::Kind::planted) {
      out << "plant " << def.name << " at " << format_vertex(def.planted_at)
          << " cycle " << def.cycle_len << '\n';
    } else {
      out << "gen " << def.name << " perm ";
      if (def.root_perm.is_identity())
        out << "id";
      else
        out << def.root_perm.image_string();
      out << " sections";
      for (const auto& s : def.sections) out << ' ' << format_word(pres, s);
      out << '\n';
    }
  }
  return out.str();
}

PresentationPtr resolve_group(const std::string& designator) {
  if (designator == "grigorchuk") return grigorchuk();
  auto parse_csv = [](const std::string& s) {
    std::vector<std::int64_t> out;
    std::istringstream in(s);
    std::string part;
    while (std::getline(in, part, ','))
      out.push_back(std::stoll(part));
    return out;
  };
  if (designator.rfind("ggs:", 0) == 0) {
    const auto rest = designator.substr(4);
    const auto colon = rest.find(':');
    if (colon == std::string::npos)
      fail(ErrorKind::parse, "expected ggs:<p>:<e1,...,e_{p-1}>");
    return ggs(std::stoll(rest.substr(0, colon)), parse_csv(rest.substr(colon + 1)));
  }
  if (designator.rfind("multi-ggs:", 0) == 0) {
    const auto rest = designator.substr(10);
    const auto colon = rest.find(':');
    if (colon == std::string::npos)
      fail(ErrorKind::parse, "expected multi-ggs:<p>:<row>;<row>;...");
    std::vector<std::vector<std::int64_t>> rows;
    std::istringstream in(rest.substr(colon + 1));
    std::string row;
    while (std::getline(in, row, ';')) rows.push_back(parse_csv(row));
    return multi_ggs(std::stoll(rest.substr(0, colon)), std::move(rows));
  }
  if (designator.rfind("example25:", 0) == 0)
    return example25(parse_csv(designator.substr(10)));
  if (designator.rfind("spec:", 0) == 0) return load_spec(designator.substr(5));
  if (designator.find('\n') != std::string::npos ||
      designator.rfind("tree ", 0) == 0)
    return load_spec(designator);
  fail(ErrorKind::parse, "unknown group designator '" + designator + "'");
}

bool presentations_equal(const Presentation& a, const Presentation& b) {
  if (!(a.shape() == b.shape())) return false;
  if (a.gen_count() != b.gen_count()) return false;
  for (int i = 0; i < a.gen_count(); ++i) {
    const auto& ga = a.gen(i);
    const auto& gb = b.gen(i);
    if (ga.name != gb.name || ga.kind != gb.kind || ga.anchor != gb.anchor)
      return false;
    if (ga.kind == GeneratorDef::Kind::planted) {
      if (ga.planted_at != gb.planted_at || ga.cycle_len != gb.cycle_len)
        return false;
    } else {
      if (!(ga.root_perm == gb.root_perm)) return false;
      if (ga.sections.size() != gb.sections.size()) return false;
      for (std::size_t s = 0; s < ga.sections.size(); ++s)
        if (normalize(ga.sections[s]).key() != normalize(gb.sections[s]).key())
          return false;
    }
  }
  return true;
}

}  // namespace bf
