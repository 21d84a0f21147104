#ifndef BRANCHFORGE_TREE_HPP
#define BRANCHFORGE_TREE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace bf {

// Spherically homogeneous rooted tree: every vertex at level n-1 has
// arity(n) children. Stored as a finite prefix of arities followed by a
// repeating block, so both regular trees and eventually periodic shapes
// have exact finite descriptions.
class TreeShape {
public:
  TreeShape(std::vector<int> prefix, std::vector<int> block);
  static TreeShape regular(int m);

  // Arity m_n for level index n >= 1 (children count of level-(n-1) vertices).
  int arity(int n) const;

  // Number of vertices at level n: product m_1 * ... * m_n. Guarded against
  // overflow of the internal 64-bit count.
  std::uint64_t level_size(int n) const;

  // The shape seen from a vertex at level t (arities shifted by t).
  TreeShape shifted(int t) const;

  // Small canonical index identifying the shifted shape at level t; two
  // levels with equal shift_class see identical subtree shapes.
  int shift_class(int t) const;

  const std::vector<int>& prefix() const { return prefix_; }
  const std::vector<int>& block() const { return block_; }

  bool operator==(const TreeShape& o) const;
  bool same_from(int s, int t) const;  // shifted(s) == shifted(t), decided via shift_class

  std::string to_string() const;

private:
  std::vector<int> prefix_;
  std::vector<int> block_;  // nonempty
};

// A vertex is its path from the root, with 1-based child letters.
using Vertex = std::vector<int>;

inline int level(const Vertex& v) { return static_cast<int>(v.size()); }

enum class Relation { equal, ancestor, descendant, incomparable };

Relation relation(const Vertex& u, const Vertex& v);
bool incomparable(const Vertex& u, const Vertex& v);

// uv: the vertex of the subtree below u addressed by v.
Vertex concat(const Vertex& u, const Vertex& v);

bool valid_vertex(const TreeShape& shape, const Vertex& v);
std::vector<Vertex> children(const TreeShape& shape, const Vertex& v);

// Shortlex position of v within its level (mixed-radix value of the path).
std::uint64_t vertex_index(const TreeShape& shape, const Vertex& v);
Vertex vertex_at(const TreeShape& shape, int level, std::uint64_t index);

// "e" for the root, else dot-separated letters ("1.2.1"). parse_vertex also
// accepts undotted digit strings like "121" when every letter is a single
// digit.
std::string format_vertex(const Vertex& v);
Vertex parse_vertex(const std::string& s);

}  // namespace bf

#endif
