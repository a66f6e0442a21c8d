#include <doctest.h>

#include "numrange/kadison.hpp"

using namespace numrange;
using namespace numrange::kadison;

namespace {

const Rational half(1, 2);

Extended fin(Rational q) { return Extended{false, q}; }
const Extended inf{true, 0};

}  // namespace

TEST_CASE("parse_rational accepts fractions, integers and decimals") {
  CHECK(parse_rational("3/6") == half);
  CHECK(parse_rational(" -2 ") == Rational(-2));
  CHECK(parse_rational("0.125") == Rational(1, 8));
  CHECK(parse_rational("-1.5") == Rational(-3, 2));
  CHECK(to_string(Rational(1, 4)) == "1/4");
  CHECK(to_string(Rational(3)) == "3");
  CHECK_THROWS_AS(parse_rational("1/0"), InvalidInput);
  CHECK_THROWS_AS(parse_rational("abc"), InvalidInput);
  CHECK_THROWS_AS(parse_rational(""), InvalidInput);
}

TEST_CASE("streams and interleaving") {
  const DiagonalSeq d0 = catalog().at("d0");
  const std::vector<Rational> head{Rational(1, 4), 1, Rational(1, 8), 1, Rational(1, 16), 1};
  for (std::size_t i = 0; i < head.size(); ++i) CHECK(d0.at(i) == head[i]);
  const Stream g = Stream::geometric(half, half, 1);
  CHECK(g.at(0) == Rational(3, 2));
  CHECK(g.shifted().at(0) == Rational(5, 4));
  CHECK(Stream::periodic({0, 1}).shifted().at(0) == Rational(1));
}

TEST_CASE("sums: catalog sequences") {
  const auto cat = catalog();
  const KadisonSums s1 = sums(cat.at("d1"));
  CHECK(s1.a == fin(0));
  CHECK(s1.b == fin(0));

  const KadisonSums s0 = sums(cat.at("d0"));
  CHECK(s0.a == fin(half));
  CHECK(s0.b == fin(0));

  const KadisonSums s2 = sums(cat.at("d2"));
  CHECK(s2.a == fin(half));
  CHECK(s2.b == fin(half));
  CHECK(s2.half_count == 1);
  const KadisonSums s2le = sums(cat.at("d2"), Convention::le_half);
  CHECK(s2le.a == fin(1));
  CHECK(s2le.b == fin(0));

  CHECK(sums(cat.at("third")).a == inf);
  CHECK(sums(cat.at("rising_to_one")).b == fin(1));
}

TEST_CASE("decide: catalog sequences") {
  const auto cat = catalog();
  CHECK(decide(cat.at("d1")) == Decision::Diagonal);
  CHECK(decide(cat.at("d2")) == Decision::Diagonal);
  CHECK(decide(cat.at("d0")) == Decision::NotDiagonal);
  CHECK(decide(cat.at("third")) == Decision::Diagonal);
  CHECK(decide(cat.at("single_half")) == Decision::NotDiagonal);
  CHECK(decide(cat.at("halves")) == Decision::Diagonal);
  CHECK(to_string(Decision::NotDiagonal) == "NotDiagonal");
}

TEST_CASE("midpoint of d1 and d2 is d0 and not a diagonal") {
  const auto cat = catalog();
  const DiagonalSeq m = midpoint(cat.at("d1"), cat.at("d2"));
  for (std::size_t i = 0; i < 40; ++i) CHECK(m.at(i) == cat.at("d0").at(i));
  const KadisonSums s = sums(m);
  CHECK(s.a == fin(half));
  CHECK(s.b == fin(0));
  CHECK(decide(m) == Decision::NotDiagonal);
  for (std::size_t i = 0; i < 40; ++i) CHECK(m.at(i) == (cat.at("d1").at(i) + cat.at("d2").at(i)) / 2);
}

TEST_CASE("midpoint aligns prefixes of different lengths") {
  const DiagonalSeq a{{1, 0, 1, 1}, {Stream::constant(0), Stream::periodic({0, 1})}};
  const DiagonalSeq b{{}, {Stream::geometric(half, half), Stream::constant(1)}};
  const DiagonalSeq m = midpoint(a, b);
  for (std::size_t i = 0; i < 30; ++i) CHECK(m.at(i) == (a.at(i) + b.at(i)) / 2);
  const DiagonalSeq single{{}, {Stream::constant(0)}};
  CHECK_THROWS_AS(midpoint(single, b), IncompatibleStreams);
}

TEST_CASE("same_projection_class") {
  const auto cat = catalog();
  CHECK(same_projection_class(cat.at("d1"), cat.at("d2")));
  CHECK(same_projection_class(cat.at("finite_011"), cat.at("finite_110")));
  CHECK_FALSE(same_projection_class(cat.at("one_zero"), cat.at("two_ones")));
  CHECK(trace(cat.at("two_ones")) == fin(2));
  CHECK(co_trace(cat.at("d1")) == inf);
}

TEST_CASE("decisions do not depend on the 1/2 convention") {
  for (const auto& [name, d] : catalog()) {
    INFO(name);
    CHECK(decide(d, Convention::strict) == decide(d, Convention::le_half));
  }
}

TEST_CASE("validate rejects entries outside [0, 1]") {
  const DiagonalSeq bad{{Rational(3, 2)}, {Stream::constant(0)}};
  CHECK_THROWS_AS(bad.validate(), OutOfRangeEntry);
  const DiagonalSeq neg{{}, {Stream::geometric(-1, half)}};
  CHECK_THROWS_AS(neg.validate(), OutOfRangeEntry);
  for (const auto& [name, d] : catalog()) CHECK_NOTHROW(d.validate());
}
