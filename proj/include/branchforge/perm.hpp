#ifndef BRANCHFORGE_PERM_HPP
#define BRANCHFORGE_PERM_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace bf {

// Permutation of {0, ..., n-1}. The whole artifact uses right actions, so
// products compose left to right: i^(p*q) = (i^p)^q.
class Perm {
public:
  Perm() = default;
  explicit Perm(int degree);               // identity
  explicit Perm(std::vector<int> images);  // 0-based image list

  // Cycle (1 2 ... len) on degree points, 1-based letters.
  static Perm cycle(int degree, int len);
  // Parse a 1-based image list such as "2 1 3".
  static Perm from_one_based(const std::vector<int>& images);

  int degree() const { return static_cast<int>(images_.size()); }
  int apply(int i) const { return images_[i]; }
  int apply_letter(int letter) const { return images_[letter - 1] + 1; }

  Perm then(const Perm& q) const;  // first *this, then q
  Perm inverse() const;
  bool is_identity() const;
  std::uint64_t order() const;

  // Nontrivial cycles plus fixed points on request; each cycle starts at its
  // least point and cycles are sorted by that point.
  std::vector<std::vector<int>> cycles(bool include_fixed = false) const;

  std::string cycle_string() const;  // 1-based, "()" for the identity
  std::string image_string() const;  // 1-based image list "2 1 3"

  bool operator==(const Perm& o) const { return images_ == o.images_; }
  bool operator<(const Perm& o) const { return images_ < o.images_; }

  const std::vector<int>& images() const { return images_; }

private:
  std::vector<int> images_;
};

}  // namespace bf

#endif
