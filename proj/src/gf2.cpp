#include "opiqsdc/gf2.hpp"

#include <stdexcept>
#include <utility>

namespace opiqsdc {

Gf2Matrix Gf2Matrix::random(std::size_t rows, std::size_t cols, Rng& rng) {
  Gf2Matrix m(rows, cols);
  const std::size_t tail = cols % 64;
  for (std::size_t r = 0; r < rows; ++r) {
    std::uint64_t* w = m.row(r);
    for (std::size_t k = 0; k < m.words_; ++k) w[k] = rng();
    if (tail) w[m.words_ - 1] &= (std::uint64_t{1} << tail) - 1;
  }
  return m;
}

void Gf2Matrix::xor_row(std::size_t dst, std::size_t src) {
  std::uint64_t* d = row(dst);
  const std::uint64_t* s = row(src);
  for (std::size_t k = 0; k < words_; ++k) d[k] ^= s[k];
}

void Gf2Matrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  std::uint64_t* x = row(a);
  std::uint64_t* y = row(b);
  for (std::size_t k = 0; k < words_; ++k) std::swap(x[k], y[k]);
}

BitVec Gf2Matrix::multiply(const BitVec& x) const {
  if (x.size() != cols_) throw std::invalid_argument("Gf2Matrix::multiply: length mismatch");
  std::vector<std::uint64_t> packed(words_, 0);
  for (std::size_t c = 0; c < cols_; ++c)
    if (x[c] & 1u) packed[c / 64] |= std::uint64_t{1} << (c % 64);
  BitVec y(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::uint64_t acc = 0;
    const std::uint64_t* w = row(r);
    for (std::size_t k = 0; k < words_; ++k) acc ^= w[k] & packed[k];
    y[r] = static_cast<std::uint8_t>(__builtin_parityll(acc));
  }
  return y;
}

BitVec Gf2Matrix::left_multiply(const BitVec& x) const {
  if (x.size() != rows_) throw std::invalid_argument("Gf2Matrix::left_multiply: length mismatch");
  std::vector<std::uint64_t> acc(words_, 0);
  for (std::size_t r = 0; r < rows_; ++r) {
    if (!(x[r] & 1u)) continue;
    const std::uint64_t* w = row(r);
    for (std::size_t k = 0; k < words_; ++k) acc[k] ^= w[k];
  }
  BitVec y(cols_);
  for (std::size_t c = 0; c < cols_; ++c) y[c] = (acc[c / 64] >> (c % 64)) & 1u;
  return y;
}

std::vector<std::size_t> Gf2Matrix::reduce(std::size_t limit_cols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < limit_cols && r < rows_; ++c) {
    std::size_t p = r;
    while (p < rows_ && !get(p, c)) ++p;
    if (p == rows_) continue;
    swap_rows(r, p);
    for (std::size_t i = 0; i < rows_; ++i)
      if (i != r && get(i, c)) xor_row(i, r);
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::optional<BitVec> solve_left(const Gf2Matrix& a, const std::vector<std::size_t>& use, const BitVec& b) {
  if (b.size() != a.cols()) throw std::invalid_argument("solve_left: rhs length mismatch");
  const std::size_t k = a.rows();
  if (use.size() < k) return std::nullopt;
  Gf2Matrix eq(use.size(), k + 1);
  for (std::size_t e = 0; e < use.size(); ++e) {
    const std::size_t j = use[e];
    for (std::size_t i = 0; i < k; ++i)
      if (a.get(i, j)) eq.set(e, i, true);
    if (b[j] & 1u) eq.set(e, k, true);
  }
  const auto pivots = eq.reduce(k);
  if (pivots.size() < k) return std::nullopt;
  for (std::size_t e = k; e < use.size(); ++e)
    if (eq.get(e, k)) return std::nullopt;
  BitVec x(k);
  for (std::size_t i = 0; i < k; ++i) x[pivots[i]] = eq.get(i, k);
  return x;
}

}  // namespace opiqsdc
