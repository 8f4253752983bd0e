#pragma once

// Shared primitives: exact rational arithmetic on 64-bit integers,
// a 128-bit structural digest, integer geometry helpers, and the
// fault types the engine raises while evaluating models.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmc {

using Int = std::int64_t;

// ---------------------------------------------------------------------------
// Faults

// A model-level evaluation error: division by zero, overflow, subscript out
// of bounds, non-integral value where an integer is required, and so on.
struct EvalFault : std::runtime_error {
  explicit EvalFault(const std::string& what) : std::runtime_error(what) {}
};

// A write left the variable's declared (or default) range.
struct RangeFault : std::runtime_error {
  std::string variable;
  Int value = 0, lo = 0, hi = 0;
  RangeFault(std::string var, Int v, Int l, Int h)
      : std::runtime_error("range fault: " + var + " = " + std::to_string(v) +
                           " outside {" + std::to_string(l) + ".." +
                           std::to_string(h) + "}"),
        variable(std::move(var)), value(v), lo(l), hi(h) {}
};

// A configured engine limit was exceeded.
struct LimitFault : std::runtime_error {
  enum class Kind { StateCap, DepthCap, RecursionCap };
  Kind kind;
  LimitFault(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

// ---------------------------------------------------------------------------
// Checked 64-bit helpers

inline Int checked_narrow(__int128 v, const char* ctx) {
  if (v > (__int128)INT64_MAX || v < (__int128)INT64_MIN)
    throw EvalFault(std::string("arithmetic overflow in ") + ctx);
  return (Int)v;
}

// ---------------------------------------------------------------------------
// Exact rationals. Normalized: den > 0, gcd(|num|, den) == 1.

struct Rat {
  Int num = 0;
  Int den = 1;

  Rat() = default;
  Rat(Int n) : num(n), den(1) {}
  Rat(Int n, Int d) {
    if (d == 0) throw EvalFault("division by zero");
    __int128 nn = n, dd = d;
    if (dd < 0) { nn = -nn; dd = -dd; }
    Int g = std::gcd((Int)(nn < 0 ? -nn : nn), (Int)dd);
    if (g > 1) { nn /= g; dd /= g; }
    num = checked_narrow(nn, "rational");
    den = checked_narrow(dd, "rational");
  }

  bool is_int() const { return den == 1; }
  Int as_int(const char* ctx = "expression") const {
    if (den != 1) throw EvalFault(std::string("non-integral value in ") + ctx);
    return num;
  }

  static Rat make(__int128 n, __int128 d) {
    if (d == 0) throw EvalFault("division by zero");
    if (d < 0) { n = -n; d = -d; }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b) { __int128 t = a % b; a = b; b = t; }
    if (a > 1) { n /= a; d /= a; }
    Rat r;
    r.num = checked_narrow(n, "rational");
    r.den = checked_narrow(d, "rational");
    return r;
  }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return make((__int128)a.num * b.den + (__int128)b.num * a.den,
                (__int128)a.den * b.den);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return make((__int128)a.num * b.den - (__int128)b.num * a.den,
                (__int128)a.den * b.den);
  }
  friend Rat operator-(const Rat& a) { return make(-(__int128)a.num, a.den); }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return make((__int128)a.num * b.num, (__int128)a.den * b.den);
  }

  // Exact rational division; callers wanting truncating integer division
  // must handle the both-integral case themselves.
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num == 0) throw EvalFault("division by zero");
    return make((__int128)a.num * b.den, (__int128)a.den * b.num);
  }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator<(const Rat& a, const Rat& b) {
    return (__int128)a.num * b.den < (__int128)b.num * a.den;
  }
  friend bool operator<=(const Rat& a, const Rat& b) {
    return (__int128)a.num * b.den <= (__int128)b.num * a.den;
  }

  Int floor() const {
    Int q = num / den;
    if (num % den != 0 && num < 0) --q;
    return q;
  }
};

// x^e with rational base and integer exponent; negative exponents yield
// exact rationals. 0^0 == 1, 0^negative faults.
inline Rat rat_pow(const Rat& base, Int expo) {
  if (expo < 0) {
    if (base.num == 0) throw EvalFault("zero raised to a negative power");
    return rat_pow(Rat(base.den, base.num), -expo);
  }
  Rat acc(1);
  Rat b = base;
  Int e = expo;
  if (e > 256 && !(b == Rat(0)) && !(b == Rat(1)) && !(b == Rat(-1)))
    throw EvalFault("exponent too large");
  while (e > 0) {
    if (e & 1) acc = acc * b;
    b = (e >>= 1) ? b * b : b;
  }
  return acc;
}

// Largest n >= 0 with base^n <= x; 0 for x < base. base >= 2.
inline Int int_log(Int base, Int x) {
  if (base < 2) throw EvalFault("ilog base must be >= 2");
  if (x < base) return 0;
  Int n = 0;
  __int128 p = 1;
  while (p * base <= x) { p *= base; ++n; }
  return n;
}

inline Int int_sqrt(Int n) {
  if (n < 0) throw EvalFault("sqrt of negative value");
  if (n == 0) return 0;
  Int k = (Int)__builtin_sqrtl((long double)n);
  while (k > 0 && (__int128)k * k > n) --k;
  while ((__int128)(k + 1) * (k + 1) <= n) ++k;
  return k;
}

// Euclidean length rounded half-up: floor(sqrt(dx^2+dy^2) + 1/2).
inline Int euclid_dist(Int x0, Int y0, Int x1, Int y1) {
  __int128 dx = (__int128)x1 - x0, dy = (__int128)y1 - y0;
  Int n = checked_narrow(dx * dx + dy * dy, "distance");
  Int k = int_sqrt(n);
  Int r = n - k * k;
  return k + (r > k ? 1 : 0);
}

// ---------------------------------------------------------------------------
// 128-bit structural digest (splitmix-style avalanche over two lanes).
// Used as visited-set identity; collisions at 2^128 are not a concern
// at the configured state caps.

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct Digest {
  std::uint64_t hi = 0x6a09e667f3bcc908ull;
  std::uint64_t lo = 0xbb67ae8584caa73bull;

  void absorb(std::uint64_t x) {
    hi = mix64(hi ^ x);
    lo = mix64(lo + (x ^ 0x9e3779b97f4a7c15ull));
  }
  void absorb_int(Int v) { absorb((std::uint64_t)v); }
  void absorb(const Digest& d) { absorb(d.hi); absorb(d.lo); }
  void absorb(const std::string& s) {
    absorb((std::uint64_t)s.size());
    std::uint64_t w = 0;
    int k = 0;
    for (unsigned char c : s) {
      w |= (std::uint64_t)c << (8 * k);
      if (++k == 8) { absorb(w); w = 0; k = 0; }
    }
    if (k) absorb(w);
  }

  friend bool operator==(const Digest& a, const Digest& b) {
    return a.hi == b.hi && a.lo == b.lo;
  }
  friend bool operator!=(const Digest& a, const Digest& b) { return !(a == b); }

  std::string hex() const {
    static const char* h = "0123456789abcdef";
    std::string out(32, '0');
    for (int i = 0; i < 16; ++i) {
      std::uint64_t src = i < 8 ? hi : lo;
      int shift = 60 - 8 * (i % 8);
      out[2 * i] = h[(src >> (shift + 4)) & 0xf];
      out[2 * i + 1] = h[(src >> shift) & 0xf];
    }
    return out;
  }
};

struct DigestHash {
  std::size_t operator()(const Digest& d) const noexcept {
    return (std::size_t)(d.hi ^ (d.lo * 0x9e3779b97f4a7c15ull));
  }
};

// ---------------------------------------------------------------------------
// Source positions for parser and validator diagnostics.

struct SourcePos {
  int line = 0;
  int col = 0;
};

struct ParseError : std::runtime_error {
  SourcePos pos;
  std::string detail;                 // bare message, no location prefix
  std::vector<std::string> expected;  // token spellings that would have been accepted

  ParseError(SourcePos p, std::string msg, std::vector<std::string> exp = {})
      : std::runtime_error(std::to_string(p.line) + ":" + std::to_string(p.col) +
                           ": " + msg),
        pos(p), detail(std::move(msg)), expected(std::move(exp)) {}
};

}  // namespace gmc
