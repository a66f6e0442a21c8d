#include "numrange/kadison.hpp"

#include <cctype>
#include <sstream>

namespace numrange::kadison {
namespace {

using boost::multiprecision::cpp_int;

const Rational kHalf = Rational(1, 2);

bool in_a(const Rational& x, Convention conv) { return conv == Convention::strict ? x < kHalf : x <= kHalf; }

void add(Extended& e, const Rational& v) {
  if (!e.infinite) e.value += v;
}

void make_infinite(Extended& e) {
  e.infinite = true;
  e.value = 0;
}

void check_unit(const Rational& x, const char* where) {
  if (x < 0 || x > 1) throw OutOfRangeEntry(std::string(where) + ": entry " + to_string(x) + " outside [0,1]");
}

// An entry repeated infinitely often.
void recurring(const Rational& x, Convention conv, KadisonSums& s) {
  if (in_a(x, conv)) {
    if (x != 0) make_infinite(s.a);
  } else if (x != 1) {
    make_infinite(s.b);
  }
  if (x == kHalf) s.half_count = -1;
}

void single(const Rational& x, Convention conv, KadisonSums& s) {
  if (in_a(x, conv)) add(s.a, x);
  else add(s.b, 1 - x);
  if (x == kHalf && s.half_count >= 0) ++s.half_count;
}

Rational power(Rational r, std::size_t i) {
  Rational out = 1;
  while (i) {
    if (i & 1) out *= r;
    r *= r;
    i >>= 1;
  }
  return out;
}

Stream average(const Stream& s, const Stream& t) {
  using K = Stream::Kind;
  if (s.kind == K::constant && t.kind == K::constant) return Stream::constant((s.c + t.c) / 2);
  if (s.kind == K::geometric && t.kind == K::geometric) {
    if (s.r != t.r) throw IncompatibleStreams("geometric tails with different ratios");
    return Stream::geometric((s.c + t.c) / 2, s.r, (s.base + t.base) / 2);
  }
  if (s.kind == K::geometric && t.kind == K::constant) return Stream::geometric(s.c / 2, s.r, (s.base + t.c) / 2);
  if (s.kind == K::constant && t.kind == K::geometric) return average(t, s);
  if (s.kind == K::periodic && (t.kind == K::periodic || t.kind == K::constant)) {
    std::vector<Rational> tv = t.kind == K::constant ? std::vector<Rational>(s.values.size(), t.c) : t.values;
    if (tv.size() != s.values.size()) throw IncompatibleStreams("periodic tails with different periods");
    std::vector<Rational> v;
    for (std::size_t i = 0; i < tv.size(); ++i) v.push_back((s.values[i] + tv[i]) / 2);
    return Stream::periodic(std::move(v));
  }
  if (s.kind == K::constant && t.kind == K::periodic) return average(t, s);
  throw IncompatibleStreams("periodic and geometric tails cannot be averaged stream-wise");
}

// Peels whole rounds off the tails into the prefix.
DiagonalSeq with_prefix(const DiagonalSeq& d, std::size_t len) {
  DiagonalSeq out = d;
  while (out.prefix.size() < len) {
    for (std::size_t s = 0; s < out.tails.size(); ++s) {
      out.prefix.push_back(out.tails[s].at(0));
      out.tails[s] = out.tails[s].shifted();
    }
  }
  return out;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw InvalidInput("empty rational");
  try {
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
      const cpp_int num(s.substr(0, slash));
      const cpp_int den(s.substr(slash + 1));
      if (den == 0) throw InvalidInput("zero denominator in '" + text + "'");
      return Rational(num, den);
    }
    const auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(cpp_int(s));
    const std::string frac = s.substr(dot + 1);
    std::string whole = s.substr(0, dot);
    const bool negative = !whole.empty() && whole[0] == '-';
    if (negative || (!whole.empty() && whole[0] == '+')) whole.erase(0, 1);
    for (char ch : frac)
      if (!std::isdigit(static_cast<unsigned char>(ch))) throw InvalidInput("bad rational '" + text + "'");
    cpp_int num(whole.empty() ? std::string("0") : whole);
    cpp_int den = 1;
    for (char ch : frac) {
      num = num * 10 + (ch - '0');
      den *= 10;
    }
    Rational q(num, den);
    return negative ? Rational(-q) : q;
  } catch (const InvalidInput&) {
    throw;
  } catch (const std::exception&) {
    throw InvalidInput("bad rational '" + text + "'");
  }
}

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(q);
  if (boost::multiprecision::denominator(q) != 1) os << '/' << boost::multiprecision::denominator(q);
  return os.str();
}

std::string to_string(const Extended& e) { return e.infinite ? "inf" : to_string(e.value); }

std::string to_string(Decision d) { return d == Decision::Diagonal ? "Diagonal" : "NotDiagonal"; }

Stream Stream::constant(Rational c) {
  Stream s;
  s.kind = Kind::constant;
  s.c = std::move(c);
  return s;
}

Stream Stream::periodic(std::vector<Rational> cycle) {
  if (cycle.empty()) throw InvalidInput("periodic tail needs a nonempty cycle");
  Stream s;
  s.kind = Kind::periodic;
  s.values = std::move(cycle);
  return s;
}

Stream Stream::geometric(Rational c, Rational r, Rational base) {
  if (!(r > 0 && r < 1)) throw InvalidInput("geometric ratio must lie in (0,1), got " + to_string(r));
  Stream s;
  s.kind = Kind::geometric;
  s.c = std::move(c);
  s.r = std::move(r);
  s.base = std::move(base);
  return s;
}

Rational Stream::at(std::size_t i) const {
  switch (kind) {
    case Kind::constant:
      return c;
    case Kind::periodic:
      return values[i % values.size()];
    case Kind::geometric:
      return base + c * power(r, i);
  }
  return 0;
}

Stream Stream::shifted() const {
  Stream s = *this;
  if (kind == Kind::periodic) std::rotate(s.values.begin(), s.values.begin() + 1, s.values.end());
  if (kind == Kind::geometric) s.c *= r;
  return s;
}

Rational DiagonalSeq::at(std::size_t pos) const {
  if (pos < prefix.size()) return prefix[pos];
  if (tails.empty()) throw InvalidInput("position past the end of a finite sequence");
  const std::size_t k = pos - prefix.size();
  return tails[k % tails.size()].at(k / tails.size());
}

void DiagonalSeq::validate() const {
  for (const auto& x : prefix) check_unit(x, "prefix");
  for (const auto& s : tails) {
    switch (s.kind) {
      case Stream::Kind::constant:
        check_unit(s.c, "constant tail");
        break;
      case Stream::Kind::periodic:
        for (const auto& v : s.values) check_unit(v, "periodic tail");
        break;
      case Stream::Kind::geometric:
        // Monotone between the first term and the limit.
        check_unit(s.base + s.c, "geometric tail");
        check_unit(s.base, "geometric tail limit");
        break;
    }
  }
}

KadisonSums sums(const DiagonalSeq& d, Convention conv) {
  d.validate();
  KadisonSums s;
  s.convention = conv;
  for (const auto& x : d.prefix) single(x, conv, s);
  for (const auto& t : d.tails) {
    switch (t.kind) {
      case Stream::Kind::constant:
        recurring(t.c, conv, s);
        break;
      case Stream::Kind::periodic:
        for (const auto& v : t.values) recurring(v, conv, s);
        break;
      case Stream::Kind::geometric: {
        if (t.c == 0) {
          recurring(t.base, conv, s);
          break;
        }
        if (t.base == kHalf) {
          // Every term sits strictly on one side of 1/2 at distance -> 0.
          make_infinite(t.c > 0 ? s.b : s.a);
          break;
        }
        const bool limit_a = t.base < kHalf;
        // Finitely many leading terms on the far side of (or at) 1/2.
        std::size_t i = 0;
        for (;; ++i) {
          const Rational x = t.at(i);
          if (limit_a ? x < kHalf : x > kHalf) break;
          single(x, conv, s);
          if (i > 100000) throw NumericalBreakdown("geometric tail does not settle");
        }
        const Rational head = t.c * power(t.r, i) / (1 - t.r);
        if (limit_a) {
          if (t.base != 0) make_infinite(s.a);
          else add(s.a, head);
        } else {
          if (t.base != 1) make_infinite(s.b);
          else add(s.b, -head);
        }
        break;
      }
    }
  }
  return s;
}

Decision decide(const KadisonSums& s) {
  if (s.a.infinite || s.b.infinite) return Decision::Diagonal;
  const Rational diff = s.a.value - s.b.value;
  return boost::multiprecision::denominator(diff) == 1 ? Decision::Diagonal : Decision::NotDiagonal;
}

Decision decide(const DiagonalSeq& d, Convention conv) { return decide(sums(d, conv)); }

DiagonalSeq midpoint(const DiagonalSeq& d, const DiagonalSeq& e) {
  d.validate();
  e.validate();
  const std::size_t m = d.interleave();
  if (m != e.interleave()) throw IncompatibleStreams("different interleaving arity");
  std::size_t len = std::max(d.prefix.size(), e.prefix.size());
  if (m == 0) {
    if (d.prefix.size() != e.prefix.size()) throw IncompatibleStreams("finite sequences of different length");
  } else {
    const std::size_t pd = d.prefix.size() % m, pe = e.prefix.size() % m;
    if (pd != pe) throw IncompatibleStreams("prefix lengths differ by a non-multiple of the interleaving");
  }
  const DiagonalSeq a = with_prefix(d, len), b = with_prefix(e, len);
  DiagonalSeq out;
  for (std::size_t i = 0; i < len; ++i) out.prefix.push_back((a.prefix[i] + b.prefix[i]) / 2);
  for (std::size_t s = 0; s < m; ++s) out.tails.push_back(average(a.tails[s], b.tails[s]));
  return out;
}

Extended trace(const DiagonalSeq& d) {
  d.validate();
  Extended e;
  for (const auto& x : d.prefix) add(e, x);
  for (const auto& t : d.tails) {
    switch (t.kind) {
      case Stream::Kind::constant:
        if (t.c != 0) make_infinite(e);
        break;
      case Stream::Kind::periodic:
        for (const auto& v : t.values)
          if (v != 0) make_infinite(e);
        break;
      case Stream::Kind::geometric:
        if (t.base != 0) make_infinite(e);
        else add(e, t.c / (1 - t.r));
        break;
    }
  }
  return e;
}

Extended co_trace(const DiagonalSeq& d) {
  d.validate();
  Extended e;
  for (const auto& x : d.prefix) add(e, 1 - x);
  for (const auto& t : d.tails) {
    switch (t.kind) {
      case Stream::Kind::constant:
        if (t.c != 1) make_infinite(e);
        break;
      case Stream::Kind::periodic:
        for (const auto& v : t.values)
          if (v != 1) make_infinite(e);
        break;
      case Stream::Kind::geometric:
        if (t.base != 1) make_infinite(e);
        else add(e, -t.c / (1 - t.r));
        break;
    }
  }
  return e;
}

bool same_projection_class(const DiagonalSeq& d, const DiagonalSeq& e) {
  if (decide(d) != Decision::Diagonal) throw NotADiagonal("first sequence is not a projection diagonal");
  if (decide(e) != Decision::Diagonal) throw NotADiagonal("second sequence is not a projection diagonal");
  return trace(d) == trace(e) && co_trace(d) == co_trace(e);
}

std::map<std::string, DiagonalSeq> catalog() {
  std::map<std::string, DiagonalSeq> cat;
  const Rational h = kHalf;
  cat["d1"] = DiagonalSeq{{}, {Stream::constant(0), Stream::constant(1)}};
  cat["d2"] = DiagonalSeq{{}, {Stream::geometric(h, h), Stream::constant(1)}};
  cat["d0"] = DiagonalSeq{{Rational(1, 4), 1}, {Stream::geometric(Rational(1, 8), h), Stream::constant(1)}};
  cat["third"] = DiagonalSeq{{}, {Stream::constant(Rational(1, 3))}};
  cat["finite_011"] = DiagonalSeq{{0, 1, 1}, {Stream::constant(0)}};
  cat["finite_110"] = DiagonalSeq{{1, 1, 0}, {Stream::constant(0)}};
  cat["one_zero"] = DiagonalSeq{{1}, {Stream::constant(0)}};
  cat["two_ones"] = DiagonalSeq{{1, 1}, {Stream::constant(0)}};
  cat["halves"] = DiagonalSeq{{h, h}, {Stream::constant(0)}};
  cat["single_half"] = DiagonalSeq{{h}, {Stream::constant(0)}};
  cat["rising_to_one"] = DiagonalSeq{{}, {Stream::geometric(-h, h, 1), Stream::constant(0)}};
  return cat;
}

}  // namespace numrange::kadison
