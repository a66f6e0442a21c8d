#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <string>
#include <vector>

#include "numrange/errors.hpp"

namespace numrange::kadison {

using Rational = boost::multiprecision::cpp_rational;

Rational parse_rational(const std::string& s);  // "p/q", "p" or a finite decimal
std::string to_string(const Rational& q);

/// Tail stream with exact parameters. Geometric terms are base + c r^i with
/// 0 < r < 1, so every sum it feeds is a closed-form rational.
struct Stream {
  enum class Kind { constant, periodic, geometric };
  Kind kind = Kind::constant;
  Rational c = 0;
  Rational r = 0;
  Rational base = 0;
  std::vector<Rational> values;  // periodic cycle

  static Stream constant(Rational c);
  static Stream periodic(std::vector<Rational> cycle);
  static Stream geometric(Rational c, Rational r, Rational base = 0);

  Rational at(std::size_t i) const;
  /// The stream with its first term removed.
  Stream shifted() const;
  bool operator==(const Stream&) const = default;
};

/// prefix, then the tails interleaved round-robin.
struct DiagonalSeq {
  std::vector<Rational> prefix;
  std::vector<Stream> tails;

  Rational at(std::size_t pos) const;
  std::size_t interleave() const noexcept { return tails.size(); }
  /// Throws OutOfRangeEntry unless every entry lies in [0, 1].
  void validate() const;
};

/// Exact rational or +infinity.
struct Extended {
  bool infinite = false;
  Rational value = 0;
  bool operator==(const Extended&) const = default;
};
std::string to_string(const Extended& e);

enum class Convention { strict, le_half };  // a-bucket: d < 1/2, or d <= 1/2

struct KadisonSums {
  Extended a;  // sum of d_j in the a-bucket
  Extended b;  // sum of 1 - d_j over the rest
  long half_count = 0;  // entries exactly 1/2; -1 when infinitely many
  Convention convention = Convention::strict;
};

enum class Decision { Diagonal, NotDiagonal };
std::string to_string(Decision d);

KadisonSums sums(const DiagonalSeq& d, Convention conv = Convention::strict);
/// a + b infinite, or a - b an integer.
Decision decide(const KadisonSums& s);
Decision decide(const DiagonalSeq& d, Convention conv = Convention::strict);

/// Entrywise average, rewriting prefixes to a common length first.
DiagonalSeq midpoint(const DiagonalSeq& d, const DiagonalSeq& e);

/// sum d_k and sum (1 - d_k).
Extended trace(const DiagonalSeq& d);
Extended co_trace(const DiagonalSeq& d);
/// Both must be diagonals; compares trace and co-trace.
bool same_projection_class(const DiagonalSeq& d, const DiagonalSeq& e);

/// d1, d2, d0 and a few sanity sequences.
std::map<std::string, DiagonalSeq> catalog();

}  // namespace numrange::kadison
