#pragma once

// Exact scalar and lattice-vector utilities shared by every module.

#include <gmpxx.h>

#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace troplift {

using Rational = mpq_class;
using Integer = mpz_class;

using QVec = std::vector<Rational>;
using ZVec = std::vector<Integer>;

// Thrown for input that violates a structural invariant (bad ids, non-primitive
// directions, unparsable numbers, ...).
class MalformedInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when an operation's documented precondition does not hold.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Rational make_rational(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Parses "p", "-p" or "p/q". Whitespace is not accepted.
inline Rational parse_rational(std::string_view text) {
  if (text.empty()) throw MalformedInput("empty rational");
  auto valid_int = [](std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  auto slash = text.find('/');
  std::string num(text.substr(0, slash));
  std::string den = slash == std::string_view::npos ? "1" : std::string(text.substr(slash + 1));
  if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+')
    throw MalformedInput("not a rational: '" + std::string(text) + "'");
  if (num[0] == '+') num.erase(0, 1);
  Integer d(den);
  if (d == 0) throw MalformedInput("zero denominator in '" + std::string(text) + "'");
  Rational q{Integer(num), d};
  q.canonicalize();
  return q;
}

// Canonical "p/q" (or "p" when integral) form.
inline std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline std::string to_string(const Integer& z) { return z.get_str(); }

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline Integer floor_of(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline Integer gcd_of(const ZVec& v) {
  Integer g = 0;
  for (const auto& x : v) {
    Integer a = abs(x);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
  }
  return g;
}

inline bool is_zero(const ZVec& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

inline bool is_zero(const QVec& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

inline bool is_primitive(const ZVec& v) { return !is_zero(v) && gcd_of(v) == 1; }

inline ZVec primitive_of(const ZVec& v) {
  Integer g = gcd_of(v);
  if (g == 0) throw MalformedInput("zero vector has no primitive direction");
  ZVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / g;
  return out;
}

inline QVec to_qvec(const ZVec& v) {
  QVec out;
  out.reserve(v.size());
  for (const auto& x : v) out.emplace_back(x);
  return out;
}

inline QVec operator-(const QVec& a, const QVec& b) {
  QVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline QVec operator+(const QVec& a, const QVec& b) {
  QVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline QVec scaled(const QVec& a, const Rational& s) {
  QVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * s;
  return out;
}

inline ZVec negated(const ZVec& a) {
  ZVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
  return out;
}

template <class A, class B>
inline Rational dot(const A& a, const B& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += Rational(a[i]) * Rational(b[i]);
  return s;
}

// Splits a rational displacement d into (lattice length, primitive direction)
// with d = length * direction. Throws for the zero vector.
inline std::pair<Rational, ZVec> lattice_decompose(const QVec& d) {
  if (is_zero(d)) throw MalformedInput("zero displacement has no direction");
  Integer lcm_den = 1;
  for (const auto& x : d) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), x.get_den_mpz_t());
  ZVec scaled_int(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    Rational s = d[i] * lcm_den;
    scaled_int[i] = s.get_num();
  }
  Integer g = gcd_of(scaled_int);
  ZVec dir(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) dir[i] = scaled_int[i] / g;
  Rational len(g, lcm_den);
  len.canonicalize();
  return {len, dir};
}

inline std::string to_string(const ZVec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += v[i].get_str();
  }
  return s + ")";
}

inline std::string to_string(const QVec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += to_string(v[i]);
  }
  return s + ")";
}

}  // namespace troplift
