#include "planar_homotopy/dyadic.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace ph {

namespace {

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto first = s.data(), last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last || first == last)
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  return v;
}

}  // namespace

double Dyadic::value() const { return std::ldexp(static_cast<double>(num), -exp); }

Dyadic Dyadic::reduced() const {
  Dyadic d = *this;
  while (d.exp > 0 && d.num % 2 == 0) {
    d.num /= 2;
    --d.exp;
  }
  if (d.num == 0) d.exp = 0;
  return d;
}

Dyadic Dyadic::with_exp(int e) const {
  if (e < exp) throw std::invalid_argument("Dyadic::with_exp would lose precision");
  return {num << (e - exp), e};
}

Dyadic Dyadic::parse(std::string_view s) {
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return Dyadic{parse_int(s), 0};
  std::int64_t n = parse_int(s.substr(0, slash));
  auto den = s.substr(slash + 1);
  int e = 0;
  if (den.rfind("2^", 0) == 0) {
    e = static_cast<int>(parse_int(den.substr(2)));
  } else {
    std::int64_t d = parse_int(den);
    if (d <= 0 || (d & (d - 1)) != 0)
      throw std::invalid_argument("denominator is not a power of two: '" + std::string(s) + "'");
    while ((std::int64_t{1} << e) < d) ++e;
  }
  if (e < 0 || e > 60) throw std::invalid_argument("dyadic exponent out of range");
  return Dyadic{n, e};
}

std::string Dyadic::str() const {
  Dyadic r = reduced();
  if (r.exp == 0) return std::to_string(r.num);
  return std::to_string(r.num) + "/" + std::to_string(std::int64_t{1} << r.exp);
}

std::string Dyadic::str_pow() const { return std::to_string(num) + "/2^" + std::to_string(exp); }

bool operator==(const Dyadic& a, const Dyadic& b) {
  int e = std::max(a.exp, b.exp);
  return a.with_exp(e).num == b.with_exp(e).num;
}

bool operator<(const Dyadic& a, const Dyadic& b) {
  int e = std::max(a.exp, b.exp);
  return a.with_exp(e).num < b.with_exp(e).num;
}

std::vector<Dyadic> parse_schedule(std::string_view csv) {
  std::vector<Dyadic> out;
  while (!csv.empty()) {
    auto comma = csv.find(',');
    auto tok = csv.substr(0, comma);
    if (!tok.empty()) out.push_back(Dyadic::parse(tok));
    if (comma == std::string_view::npos) break;
    csv.remove_prefix(comma + 1);
  }
  return out;
}

std::string format_schedule(const std::vector<Dyadic>& eps) {
  std::string s;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (i) s += ',';
    s += eps[i].str();
  }
  return s;
}

}  // namespace ph
