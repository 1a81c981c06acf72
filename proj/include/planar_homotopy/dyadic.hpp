#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ph {

// num / 2^exp. Used for epsilons, meshes and puncture coordinates so that
// "is this point on a grid line" stays an integer question.
struct Dyadic {
  std::int64_t num = 0;
  int exp = 0;

  double value() const;
  Dyadic reduced() const;
  Dyadic with_exp(int e) const;  // requires e >= exp

  // accepts "3", "3/8", "3/2^3"
  static Dyadic parse(std::string_view s);
  std::string str() const;          // reduced "3/8"
  std::string str_pow() const;      // unreduced "3/2^3"

  friend bool operator==(const Dyadic& a, const Dyadic& b);
  friend bool operator<(const Dyadic& a, const Dyadic& b);
};

std::vector<Dyadic> parse_schedule(std::string_view csv);
std::string format_schedule(const std::vector<Dyadic>& eps);

struct DyadicPoint {
  Dyadic x, y;
};

}  // namespace ph
