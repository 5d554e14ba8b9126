#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "opiqsdc/bits.hpp"
#include "opiqsdc/rng.hpp"

namespace opiqsdc {

/// Dense bit-packed matrix over GF(2).
class Gf2Matrix {
 public:
  Gf2Matrix() = default;
  Gf2Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), words_((cols + 63) / 64), data_(rows * words_, 0) {}

  static Gf2Matrix random(std::size_t rows, std::size_t cols, Rng& rng);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool get(std::size_t r, std::size_t c) const { return (row(r)[c / 64] >> (c % 64)) & 1u; }
  void set(std::size_t r, std::size_t c, bool v) {
    const std::uint64_t bit = std::uint64_t{1} << (c % 64);
    if (v) row(r)[c / 64] |= bit;
    else row(r)[c / 64] &= ~bit;
  }

  std::uint64_t* row(std::size_t r) { return data_.data() + r * words_; }
  const std::uint64_t* row(std::size_t r) const { return data_.data() + r * words_; }
  std::size_t words() const { return words_; }

  void xor_row(std::size_t dst, std::size_t src);
  void swap_rows(std::size_t a, std::size_t b);

  // y = M x  (x has cols() bits, y has rows() bits)
  BitVec multiply(const BitVec& x) const;
  // y = x^T M (x has rows() bits, y has cols() bits)
  BitVec left_multiply(const BitVec& x) const;

  /// In-place reduced row echelon form over the first `limit_cols` columns; returns pivot columns.
  std::vector<std::size_t> reduce(std::size_t limit_cols);

  bool operator==(const Gf2Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> data_;
};

/// Solves x^T A = b for x, where A is rows x cols and b has cols entries, using only the
/// columns listed in `use`. Returns nullopt when the selected columns do not determine x
/// uniquely or the system is inconsistent.
std::optional<BitVec> solve_left(const Gf2Matrix& a, const std::vector<std::size_t>& use, const BitVec& b);

}  // namespace opiqsdc
