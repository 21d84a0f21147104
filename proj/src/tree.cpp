#include "branchforge/tree.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "branchforge/error.hpp"

namespace bf {

TreeShape::TreeShape(std::vector<int> prefix, std::vector<int> block)
    : prefix_(std::move(prefix)), block_(std::move(block)) {
  if (block_.empty())
    fail(ErrorKind::invalid_argument, "tree shape needs a nonempty repeating block");
  for (int m : prefix_)
    if (m < 2) fail(ErrorKind::invalid_argument, "tree arities must be >= 2");
  for (int m : block_)
    if (m < 2) fail(ErrorKind::invalid_argument, "tree arities must be >= 2");
}

TreeShape TreeShape::regular(int m) { return TreeShape({}, {m}); }

int TreeShape::arity(int n) const {
  if (n < 1) fail(ErrorKind::invalid_argument, "level index must be >= 1");
  const int plen = static_cast<int>(prefix_.size());
  if (n <= plen) return prefix_[n - 1];
  return block_[(n - 1 - plen) % block_.size()];
}

std::uint64_t TreeShape::level_size(int n) const {
  if (n < 0) fail(ErrorKind::invalid_argument, "level must be >= 0");
  std::uint64_t size = 1;
  for (int i = 1; i <= n; ++i) {
    const std::uint64_t m = static_cast<std::uint64_t>(arity(i));
    if (size > std::numeric_limits<std::uint64_t>::max() / m)
      fail(ErrorKind::cap_exceeded, "level size overflows 64 bits");
    size *= m;
  }
  return size;
}

TreeShape TreeShape::shifted(int t) const {
  if (t < 0) fail(ErrorKind::invalid_argument, "shift must be >= 0");
  const int plen = static_cast<int>(prefix_.size());
  if (t <= plen) {
    std::vector<int> p(prefix_.begin() + t, prefix_.end());
    return TreeShape(std::move(p), block_);
  }
  const int rot = (t - plen) % static_cast<int>(block_.size());
  std::vector<int> b(block_.begin() + rot, block_.end());
  b.insert(b.end(), block_.begin(), block_.begin() + rot);
  return TreeShape({}, std::move(b));
}

int TreeShape::shift_class(int t) const {
  const int plen = static_cast<int>(prefix_.size());
  if (t <= plen) return t;
  return plen + (t - plen) % static_cast<int>(block_.size());
}

bool TreeShape::operator==(const TreeShape& o) const {
  return prefix_ == o.prefix_ && block_ == o.block_;
}

bool TreeShape::same_from(int s, int t) const {
  return shift_class(s) == shift_class(t);
}

std::string TreeShape::to_string() const {
  std::ostringstream out;
  out << "tree";
  if (!prefix_.empty()) {
    out << " prefix";
    for (int m : prefix_) out << ' ' << m;
  }
  out << " block";
  for (int m : block_) out << ' ' << m;
  return out.str();
}

Relation relation(const Vertex& u, const Vertex& v) {
  const std::size_t n = std::min(u.size(), v.size());
  for (std::size_t i = 0; i < n; ++i)
    if (u[i] != v[i]) return Relation::incomparable;
  if (u.size() == v.size()) return Relation::equal;
  return u.size() < v.size() ? Relation::ancestor : Relation::descendant;
}

bool incomparable(const Vertex& u, const Vertex& v) {
  return relation(u, v) == Relation::incomparable;
}

Vertex concat(const Vertex& u, const Vertex& v) {
  Vertex w = u;
  w.insert(w.end(), v.begin(), v.end());
  return w;
}

bool valid_vertex(const TreeShape& shape, const Vertex& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < 1 || v[i] > shape.arity(static_cast<int>(i) + 1)) return false;
  return true;
}

std::vector<Vertex> children(const TreeShape& shape, const Vertex& v) {
  if (!valid_vertex(shape, v))
    fail(ErrorKind::invalid_argument, "vertex outside the tree: " + format_vertex(v));
  const int m = shape.arity(level(v) + 1);
  std::vector<Vertex> out;
  out.reserve(m);
  for (int i = 1; i <= m; ++i) {
    Vertex c = v;
    c.push_back(i);
    out.push_back(std::move(c));
  }
  return out;
}

std::uint64_t vertex_index(const TreeShape& shape, const Vertex& v) {
  if (!valid_vertex(shape, v))
    fail(ErrorKind::invalid_argument, "vertex outside the tree: " + format_vertex(v));
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    idx = idx * shape.arity(static_cast<int>(i) + 1) + (v[i] - 1);
  return idx;
}

Vertex vertex_at(const TreeShape& shape, int lvl, std::uint64_t index) {
  if (index >= shape.level_size(lvl))
    fail(ErrorKind::invalid_argument, "vertex index out of range");
  Vertex v(lvl);
  for (int i = lvl - 1; i >= 0; --i) {
    const std::uint64_t m = static_cast<std::uint64_t>(shape.arity(i + 1));
    v[i] = static_cast<int>(index % m) + 1;
    index /= m;
  }
  return v;
}

std::string format_vertex(const Vertex& v) {
  if (v.empty()) return "e";
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << '.';
    out << v[i];
  }
  return out.str();
}

Vertex parse_vertex(const std::string& s) {
  if (s.empty() || s == "e") return {};
  Vertex v;
  if (s.find('.') == std::string::npos) {
    for (char c : s) {
      if (c < '1' || c > '9')
        fail(ErrorKind::parse, "bad vertex path: " + s);
      v.push_back(c - '0');
    }
    return v;
  }
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, '.')) {
    if (part.empty()) fail(ErrorKind::parse, "bad vertex path: " + s);
    try {
      const int letter = std::stoi(part);
      if (letter < 1) fail(ErrorKind::parse, "vertex letters are 1-based: " + s);
      v.push_back(letter);
    } catch (const std::logic_error&) {
      fail(ErrorKind::parse, "bad vertex path: " + s);
    }
  }
  return v;
}

}  // namespace bf
