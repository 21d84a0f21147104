#include "branchforge/quotients.hpp"

#include <deque>
#include <limits>

#include "branchforge/error.hpp"

namespace bf {

namespace {

// Blockwise construction: v = i.u maps to pi(i).u^{g|_i}, so the level-n
// image assembles from the root permutation and the level-(n-1) images of
// the first-level sections.
Perm image_rec(const Element& g, int n) {
  if (n == 0) return Perm(1);
  const auto& shape = g.presentation()->shape();
  const Perm pi = g.root_perm();
  const int m = pi.degree();
  const std::uint64_t sub = shape.shifted(g.level() + 1).level_size(n - 1);
  std::vector<int> images(static_cast<std::size_t>(m) * sub);
  for (int i = 0; i < m; ++i) {
    const Perm block = image_rec(g.section(i + 1), n - 1);
    const std::uint64_t target = static_cast<std::uint64_t>(pi.apply(i)) * sub;
    const std::uint64_t source = static_cast<std::uint64_t>(i) * sub;
    for (std::uint64_t u = 0; u < sub; ++u)
      images[source + u] = static_cast<int>(target + block.apply(static_cast<int>(u)));
  }
  return Perm(std::move(images));
}

}  // namespace

LevelPerm image(const Element& g, int n) {
  if (n < 0) fail(ErrorKind::invalid_argument, "level must be >= 0");
  const auto& pres = *g.presentation();
  const std::uint64_t deg = pres.shape().shifted(g.level()).level_size(n);
  if (deg > pres.caps().level_points)
    fail(ErrorKind::cap_exceeded, "level too large for permutation images");
  return LevelPerm{n, image_rec(g, n)};
}

// ---------------------------------------------------------------------------
// StabChain

StabChain::StabChain(int level, int degree, std::vector<Perm> generators)
    : level_(level), degree_(degree) {
  if (degree < 1) fail(ErrorKind::invalid_argument, "degree must be >= 1");
  for (const auto& g : generators) {
    if (g.degree() != degree)
      fail(ErrorKind::invalid_argument, "generator degree mismatch");
    if (!g.is_identity()) gens_.push_back(StrongGen{g, 0});
  }
  if (!gens_.empty()) {
    add_layer_for(gens_.front().perm);
    complete();
  }
}

void StabChain::rebuild_layer(std::size_t i) {
  // layer i is generated by the strong generators fixing b_0..b_{i-1},
  // i.e. those with level >= i
  Layer& layer = layers_[i];
  layer.orbit.assign(1, layer.point);
  layer.where.assign(degree_, -1);
  layer.where[layer.point] = 0;
  layer.transversal.assign(1, Perm(degree_));
  for (std::size_t oi = 0; oi < layer.orbit.size(); ++oi) {
    const int x = layer.orbit[oi];
    for (const auto& g : gens_) {
      if (g.level < static_cast<int>(i)) continue;
      const int y = g.perm.apply(x);
      if (layer.where[y] >= 0) continue;
      layer.where[y] = static_cast<int>(layer.orbit.size());
      layer.orbit.push_back(y);
      layer.transversal.push_back(layer.transversal[oi].then(g.perm));
    }
  }
}

std::pair<Perm, std::size_t> StabChain::sift_from(std::size_t from,
                                                  const Perm& p) const {
  Perm cur = p;
  for (std::size_t i = from; i < layers_.size(); ++i) {
    const Layer& layer = layers_[i];
    const int y = cur.apply(layer.point);
    if (layer.where[y] < 0) return {cur, i};
    cur = cur.then(layer.transversal[layer.where[y]].inverse());
  }
  return {cur, layers_.size()};
}

void StabChain::add_layer_for(const Perm& residue) {
  for (int x = 0; x < degree_; ++x) {
    if (residue.apply(x) != x) {
      layers_.push_back(Layer{x, {}, {}, {}});
      return;
    }
  }
  fail(ErrorKind::invalid_argument, "cannot extend the base with an identity");
}

// Layer i is complete once every Schreier generator of its orbit sifts to
// the identity through the deeper layers. A failing residue fixes
// b_0..b_{at-1} (where `at` is the layer sifting stopped at), joins the
// strong generators with level = at, and verification resumes there; layers
// deeper than `at` are unaffected by the addition.
void StabChain::complete() {
  std::size_t i = 0;
  rebuild_layer(0);
  for (;;) {
    bool dirty = false;
    const Layer layer = layers_[i];  // copy: gens_ and layers_ may grow
    for (std::size_t oi = 0; oi < layer.orbit.size() && !dirty; ++oi) {
      for (const auto& g : gens_) {
        if (g.level < static_cast<int>(i)) continue;
        const Perm schreier =
            layer.transversal[oi].then(g.perm).then(
                layer.transversal[layer.where[g.perm.apply(layer.orbit[oi])]]
                    .inverse());
        if (schreier.is_identity()) continue;
        auto [residue, at] = sift_from(i + 1, schreier);
        if (residue.is_identity()) continue;
        if (at == layers_.size()) add_layer_for(residue);
        gens_.push_back(StrongGen{std::move(residue), static_cast<int>(at)});
        rebuild_layer(at);
        i = at;
        dirty = true;
        break;
      }
    }
    if (dirty) continue;
    if (i == 0) break;
    --i;
    rebuild_layer(i);
  }
}

bool StabChain::contains(const Perm& p) const {
  if (p.degree() != degree_)
    fail(ErrorKind::invalid_argument, "degree mismatch in membership test");
  if (layers_.empty()) return p.is_identity();
  auto [residue, at] = sift_from(0, p);
  (void)at;
  return residue.is_identity();
}

bool StabChain::contains(const LevelPerm& p) const {
  if (p.level != level_)
    fail(ErrorKind::invalid_argument, "level mismatch in membership test");
  return contains(p.perm);
}

std::vector<int> StabChain::base() const {
  std::vector<int> out;
  for (const auto& layer : layers_) out.push_back(layer.point);
  return out;
}

std::optional<std::uint64_t> StabChain::order() const {
  unsigned __int128 acc = 1;
  for (const auto& layer : layers_) {
    acc *= layer.orbit.size();
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(acc);
}

StabChain stab_chain(const std::vector<LevelPerm>& perms) {
  if (perms.empty())
    fail(ErrorKind::invalid_argument,
         "stab_chain needs at least one permutation to fix level and degree; "
         "use StabChain(level, degree, {}) for the trivial group");
  const int level = perms[0].level;
  const int degree = perms[0].perm.degree();
  std::vector<Perm> gens;
  for (const auto& p : perms) {
    if (p.level != level) fail(ErrorKind::invalid_argument, "level mismatch");
    gens.push_back(p.perm);
  }
  return StabChain(level, degree, std::move(gens));
}

bool contains(const StabChain& chain, const LevelPerm& p) {
  return chain.contains(p);
}

std::vector<LevelPerm> generator_images(const PresentationPtr& pres, int n) {
  std::vector<LevelPerm> out;
  for (int i = 0; i < pres->gen_count(); ++i)
    out.push_back(image(Element::generator(pres, i), n));
  return out;
}

std::uint64_t quotient_order(const PresentationPtr& pres, int n) {
  const std::uint64_t degree = pres->shape().level_size(n);
  if (degree > pres->caps().level_points)
    fail(ErrorKind::cap_exceeded, "level too large");
  std::vector<Perm> gens;
  for (const auto& lp : generator_images(pres, n)) gens.push_back(lp.perm);
  StabChain chain(n, static_cast<int>(degree), std::move(gens));
  if (auto ord = chain.order()) return *ord;
  fail(ErrorKind::cap_exceeded, "quotient order exceeds 64 bits");
}

std::optional<std::set<Perm>> bfs_enumerate(const std::vector<LevelPerm>& perms,
                                            std::size_t cap) {
  int degree = 1;
  for (const auto& p : perms) {
    degree = p.perm.degree();
    if (p.level != perms[0].level) fail(ErrorKind::invalid_argument, "level mismatch");
  }
  std::set<Perm> seen;
  std::deque<Perm> queue;
  seen.insert(Perm(degree));
  queue.push_back(Perm(degree));
  while (!queue.empty()) {
    const Perm cur = queue.front();
    queue.pop_front();
    for (const auto& g : perms) {
      Perm next = cur.then(g.perm);
      if (seen.count(next)) continue;
      if (seen.size() >= cap) return std::nullopt;
      queue.push_back(next);
      seen.insert(std::move(next));
    }
  }
  return seen;
}

}  // namespace bf
