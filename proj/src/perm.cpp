#include "branchforge/perm.hpp"

#include <numeric>
#include <sstream>

#include "branchforge/error.hpp"

namespace bf {

Perm::Perm(int degree) : images_(degree) {
  std::iota(images_.begin(), images_.end(), 0);
}

Perm::Perm(std::vector<int> images) : images_(std::move(images)) {
  std::vector<char> seen(images_.size(), 0);
  for (int i : images_) {
    if (i < 0 || i >= degree() || seen[i])
      fail(ErrorKind::invalid_argument, "not a permutation");
    seen[i] = 1;
  }
}

Perm Perm::cycle(int degree, int len) {
  if (len < 1 || len > degree)
    fail(ErrorKind::invalid_argument, "cycle length out of range");
  Perm p(degree);
  for (int i = 0; i < len; ++i) p.images_[i] = (i + 1) % len;
  return p;
}

Perm Perm::from_one_based(const std::vector<int>& images) {
  std::vector<int> zero;
  zero.reserve(images.size());
  for (int i : images) zero.push_back(i - 1);
  return Perm(std::move(zero));
}

Perm Perm::then(const Perm& q) const {
  if (degree() != q.degree())
    fail(ErrorKind::invalid_argument, "permutation degree mismatch");
  std::vector<int> out(images_.size());
  for (int i = 0; i < degree(); ++i) out[i] = q.images_[images_[i]];
  Perm p;
  p.images_ = std::move(out);
  return p;
}

Perm Perm::inverse() const {
  std::vector<int> out(images_.size());
  for (int i = 0; i < degree(); ++i) out[images_[i]] = i;
  Perm p;
  p.images_ = std::move(out);
  return p;
}

bool Perm::is_identity() const {
  for (int i = 0; i < degree(); ++i)
    if (images_[i] != i) return false;
  return true;
}

std::uint64_t Perm::order() const {
  std::uint64_t ord = 1;
  for (const auto& c : cycles()) {
    const std::uint64_t len = c.size();
    ord = std::lcm(ord, len);
  }
  return ord;
}

std::vector<std::vector<int>> Perm::cycles(bool include_fixed) const {
  std::vector<std::vector<int>> out;
  std::vector<char> seen(images_.size(), 0);
  for (int i = 0; i < degree(); ++i) {
    if (seen[i]) continue;
    std::vector<int> c;
    int j = i;
    while (!seen[j]) {
      seen[j] = 1;
      c.push_back(j);
      j = images_[j];
    }
    if (c.size() > 1 || include_fixed) out.push_back(std::move(c));
  }
  return out;
}

std::string Perm::cycle_string() const {
  const auto cs = cycles();
  if (cs.empty()) return "()";
  std::ostringstream out;
  for (const auto& c : cs) {
    out << '(';
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) out << ' ';
      out << c[i] + 1;
    }
    out << ')';
  }
  return out.str();
}

std::string Perm::image_string() const {
  std::ostringstream out;
  for (int i = 0; i < degree(); ++i) {
    if (i) out << ' ';
    out << images_[i] + 1;
  }
  return out.str();
}

}  // namespace bf
