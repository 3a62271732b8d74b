#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace wbst {

// Infinite 0/1 path v1 v2 ... through the complete binary tree (0 = left).
// At most 64 leading bits are stored; beyond them the path continues with
// zeros, or with ones for the all-ones path.
class DyadicPath {
 public:
  static constexpr std::size_t max_bits = 64;

  DyadicPath() = default;

  static DyadicPath zeros() { return {}; }
  static DyadicPath ones();
  static DyadicPath from_bits(std::string_view bits);
  // Binary expansion of x in [0, 1]; dyadic x gets the terminating expansion,
  // and x == 1 maps to the all-ones path.
  static DyadicPath from_value(double x);

  // Every bit flipped: the path of 1 - x.
  DyadicPath mirrored() const;

  // i is 1-based.
  int bit(std::size_t i) const;
  std::size_t stored_bits() const { return length_; }
  bool ones_tail() const { return ones_tail_; }
  double value() const;
  std::string to_string(std::size_t width = 0) const;

 private:
  std::uint64_t bits_ = 0;  // bit i-1 of this word is v_i
  std::size_t length_ = 0;
  bool ones_tail_ = false;
};

}  // namespace wbst
