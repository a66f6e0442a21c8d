#include "numrange/io.hpp"

#include <fstream>
#include <sstream>

namespace numrange::io {
namespace {

[[noreturn]] void bad(const std::string& what) { throw InvalidInput(what); }

const Json& field(const Json& j, const char* key, const char* where) {
  if (!j.is_object()) bad(std::string(where) + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string(where) + ": missing field \"" + key + "\"");
  return *it;
}

const Json& array_field(const Json& j, const char* key, const char* where) {
  const Json& a = field(j, key, where);
  if (!a.is_array()) bad(std::string(where) + ": field \"" + key + "\" must be an array");
  return a;
}

Ratio ratio_from_json(const Json& j) {
  if (j.is_number()) {
    // Only exact binary fractions are accepted as numbers.
    const double v = j.get<double>();
    for (std::int64_t den = 2; den <= (std::int64_t(1) << 40); den *= 2) {
      const double num = v * static_cast<double>(den);
      if (num == std::floor(num)) return Ratio{static_cast<std::int64_t>(num), den};
    }
    bad("ratio must be given as \"p/q\"");
  }
  if (!j.is_string()) bad("ratio must be a string \"p/q\"");
  const auto q = kadison::parse_rational(j.get<std::string>());
  const auto num = boost::multiprecision::numerator(q), den = boost::multiprecision::denominator(q);
  if (num > std::numeric_limits<std::int64_t>::max() || den > std::numeric_limits<std::int64_t>::max())
    bad("ratio too large");
  return Ratio{num.convert_to<std::int64_t>(), den.convert_to<std::int64_t>()};
}

std::string ratio_to_string(const Ratio& r) { return std::to_string(r.num) + "/" + std::to_string(r.den); }

Json vector_to_json(const ComplexVector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(complex_to_json(v(i)));
  return a;
}

ComplexVector vector_from_json(const Json& j) {
  if (!j.is_array()) bad("expected an array of complex numbers");
  ComplexVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_from_json(j[i]);
  return v;
}

Json sparse_to_json(const SparseVector& v) {
  Json idx = Json::array(), vals = Json::array();
  for (SparseVector::InnerIterator it(v); it; ++it) {
    idx.push_back(it.index());
    vals.push_back(complex_to_json(it.value()));
  }
  return Json{{"indices", idx}, {"values", vals}};
}

SparseVector sparse_from_json(const Json& j, Index ambient) {
  const Json& idx = array_field(j, "indices", "sparse vector");
  const Json& vals = array_field(j, "values", "sparse vector");
  if (idx.size() != vals.size()) bad("sparse vector: indices and values differ in length");
  SparseVector v(ambient);
  Index last = -1;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const Index g = idx[i].get<Index>();
    if (g <= last || g >= ambient) bad("sparse vector: indices must increase and stay below the ambient size");
    v.insert(g) = complex_from_json(vals[i]);
    last = g;
  }
  return v;
}

Json complex_list(const std::vector<Complex>& zs) {
  Json a = Json::array();
  for (const Complex& z : zs) a.push_back(complex_to_json(z));
  return a;
}

std::vector<Complex> complex_list_from(const Json& j) {
  if (!j.is_array()) bad("expected an array of complex numbers");
  std::vector<Complex> out;
  for (const auto& e : j) out.push_back(complex_from_json(e));
  return out;
}

template <typename F>
auto guarded(const char* where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string(where) + ": " + e.what());
  }
}

Complex parse_complex_token(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s.empty()) bad("empty coordinate");
  try {
    std::size_t used = 0;
    if (s.back() != 'i' && s.back() != 'j') {
      const double re = std::stod(s, &used);
      if (used != s.size()) bad("bad coordinate '" + s + "'");
      return {re, 0.0};
    }
    s.pop_back();
    // Split at the last sign that is not an exponent sign.
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;)
      if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
        split = k;
        break;
      }
    auto num = [&](const std::string& t) {
      if (t.empty() || t == "+") return 1.0;
      if (t == "-") return -1.0;
      std::size_t n = 0;
      const double v = std::stod(t, &n);
      if (n != t.size()) bad("bad coordinate");
      return v;
    };
    if (split == std::string::npos) return {0.0, num(s)};
    const std::string re = s.substr(0, split);
    std::size_t n = 0;
    const double rv = std::stod(re, &n);
    if (n != re.size()) bad("bad coordinate");
    return {rv, num(s.substr(split))};
  } catch (const std::logic_error&) {
    bad("bad coordinate '" + s + "'");
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("error while writing '" + path + "'");
}

Json parse(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(source + ": " + e.what());
  }
}

Json read_json(const std::string& path) { return parse(read_file(path), path); }

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_string()) return parse_complex_token(j.get<std::string>());
  bad("expected a complex number [re, im], got " + j.dump());
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return Json{{"dim", m.rows()}, {"entries", rows}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  return guarded("matrix", [&] {
    const Json& dim = field(j, "dim", "matrix");
    if (!dim.is_number_integer() || dim.get<long long>() < 0) bad("matrix: \"dim\" must be a nonnegative integer");
    const Index n = dim.get<Index>();
    const Json& rows = array_field(j, "entries", "matrix");
    if (static_cast<Index>(rows.size()) != n) bad("matrix: expected " + std::to_string(n) + " rows");
    ComplexMatrix m(n, n);
    for (Index i = 0; i < n; ++i) {
      const Json& row = rows[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Index>(row.size()) != n)
        bad("matrix: row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
      for (Index k = 0; k < n; ++k) m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
    }
    if (!m.allFinite()) bad("matrix: non-finite entry");
    return m;
  });
}

Json model_to_json(const OperatorModel& m) {
  Json tail = Json::array();
  for (const auto& s : m.tail()) {
    switch (s.kind) {
      case TailStream::Kind::constant:
        tail.push_back(Json{{"kind", "constant"}, {"c", complex_to_json(s.values.front())}});
        break;
      case TailStream::Kind::periodic:
        tail.push_back(Json{{"kind", "periodic"}, {"values", complex_list(s.values)}});
        break;
      case TailStream::Kind::geometric:
        tail.push_back(Json{{"kind", "geometric"},
                            {"c", complex_to_json(s.c)},
                            {"r", ratio_to_string(s.ratio)},
                            {"base", complex_to_json(s.base)}});
        break;
    }
  }
  return Json{{"head", matrix_to_json(m.head())},
              {"tail", tail},
              {"limit_points", complex_list(m.limit_points())},
              {"capacity", m.tail_capacity()}};
}

OperatorModel model_from_json(const Json& j) {
  return guarded("model", [&] {
    ComplexMatrix head(0, 0);
    if (j.is_object() && j.contains("head")) head = matrix_from_json(j.at("head"));
    std::vector<TailStream> tail;
    for (const auto& s : array_field(j, "tail", "model")) {
      const std::string kind = field(s, "kind", "tail stream").get<std::string>();
      if (kind == "constant") {
        tail.push_back(TailStream::constant(complex_from_json(field(s, "c", "constant tail"))));
      } else if (kind == "periodic") {
        tail.push_back(TailStream::periodic(complex_list_from(field(s, "values", "periodic tail"))));
      } else if (kind == "geometric") {
        const Complex base = s.contains("base") ? complex_from_json(s.at("base")) : Complex(0.0);
        tail.push_back(TailStream::geometric(complex_from_json(field(s, "c", "geometric tail")),
                                             ratio_from_json(field(s, "r", "geometric tail")), base));
      } else {
        bad("tail stream: unknown kind \"" + kind + "\"");
      }
    }
    std::vector<Complex> lps = complex_list_from(array_field(j, "limit_points", "model"));
    const Index cap = j.contains("capacity") ? j.at("capacity").get<Index>() : OperatorModel::kDefaultCapacity;
    return OperatorModel(std::move(head), std::move(tail), std::move(lps), cap);
  });
}

Json tuple_to_json(const OperatorTuple& t) {
  Json ms = Json::array();
  for (const auto& m : t.members) ms.push_back(matrix_to_json(m));
  return Json{{"members", ms}};
}

OperatorTuple tuple_from_json(const Json& j) {
  return guarded("tuple", [&] {
    std::vector<ComplexMatrix> ms;
    for (const auto& m : array_field(j, "members", "tuple")) ms.push_back(matrix_from_json(m));
    return OperatorTuple(std::move(ms));
  });
}

Json seq_to_json(const kadison::DiagonalSeq& d) {
  using kadison::to_string;
  Json prefix = Json::array(), tails = Json::array();
  for (const auto& x : d.prefix) prefix.push_back(to_string(x));
  for (const auto& s : d.tails) {
    switch (s.kind) {
      case kadison::Stream::Kind::constant:
        tails.push_back(Json{{"kind", "constant"}, {"c", to_string(s.c)}});
        break;
      case kadison::Stream::Kind::periodic: {
        Json vs = Json::array();
        for (const auto& v : s.values) vs.push_back(to_string(v));
        tails.push_back(Json{{"kind", "periodic"}, {"values", vs}});
        break;
      }
      case kadison::Stream::Kind::geometric: {
        Json g{{"kind", "geometric"}, {"c", to_string(s.c)}, {"r", to_string(s.r)}};
        if (s.base != 0) g["base"] = to_string(s.base);
        tails.push_back(std::move(g));
        break;
      }
    }
  }
  return Json{{"prefix", prefix}, {"tails", tails}, {"interleave", d.tails.size()}};
}

kadison::DiagonalSeq seq_from_json(const Json& j) {
  return guarded("sequence", [&] {
    auto rat = [](const Json& v) {
      if (v.is_string()) return kadison::parse_rational(v.get<std::string>());
      if (v.is_number_integer()) return kadison::Rational(v.get<long long>());
      bad("sequence: rationals must be strings like \"1/4\"");
    };
    kadison::DiagonalSeq d;
    if (j.is_object() && j.contains("prefix")) {
      const Json& p = j.at("prefix");
      if (!p.is_array()) bad("sequence: \"prefix\" must be an array");
      for (const auto& x : p) d.prefix.push_back(rat(x));
    }
    for (const auto& s : array_field(j, "tails", "sequence")) {
      const std::string kind = field(s, "kind", "tail").get<std::string>();
      if (kind == "constant") {
        d.tails.push_back(kadison::Stream::constant(rat(field(s, "c", "constant tail"))));
      } else if (kind == "periodic") {
        std::vector<kadison::Rational> vs;
        for (const auto& v : array_field(s, "values", "periodic tail")) vs.push_back(rat(v));
        d.tails.push_back(kadison::Stream::periodic(std::move(vs)));
      } else if (kind == "geometric") {
        const kadison::Rational base = s.contains("base") ? rat(s.at("base")) : kadison::Rational(0);
        d.tails.push_back(
            kadison::Stream::geometric(rat(field(s, "c", "geometric tail")), rat(field(s, "r", "geometric tail")), base));
      } else {
        bad("tail: unknown kind \"" + kind + "\"");
      }
    }
    const std::size_t m = j.contains("interleave") ? j.at("interleave").get<std::size_t>() : d.tails.size();
    if (m != d.tails.size()) bad("sequence: \"interleave\" must equal the number of tails");
    d.validate();
    return d;
  });
}

Json sums_to_json(const kadison::KadisonSums& s) {
  return Json{{"convention", s.convention == kadison::Convention::strict ? "strict" : "le_half"},
              {"a", kadison::to_string(s.a)},
              {"b", kadison::to_string(s.b)},
              {"half_count", s.half_count},
              {"decision", kadison::to_string(kadison::decide(s))}};
}

Json report_to_json(const DiagonalReport& r) {
  const bool sparse = r.frame.ambient_dim() >= kModelAmbient;
  Json frame = Json::array();
  for (Index j = 0; j < r.frame.size(); ++j)
    frame.push_back(sparse ? sparse_to_json(r.frame[j]) : vector_to_json(r.frame.dense_vector(j)));
  return Json{{"ambient", sparse ? Json("model") : Json(r.frame.ambient_dim())},
              {"frame", frame},
              {"values", complex_list(r.values)},
              {"partial_sums", complex_list(r.partial_sums)},
              {"target", complex_to_json(r.target)},
              {"max_deviation", r.max_deviation},
              {"checkpoints", r.checkpoints},
              {"max_trace_drift", r.max_trace_drift},
              {"max_index", r.max_index}};
}

DiagonalReport report_from_json(const Json& j) {
  return guarded("diagonal report", [&] {
    const Json& amb = field(j, "ambient", "diagonal report");
    const bool sparse = amb.is_string();
    if (sparse && amb.get<std::string>() != "model") bad("diagonal report: bad ambient");
    std::vector<SparseVector> vs;
    Index ambient = sparse ? kModelAmbient : amb.get<Index>();
    for (const auto& v : array_field(j, "frame", "diagonal report")) {
      if (sparse) {
        vs.push_back(sparse_from_json(v, ambient));
      } else {
        const ComplexVector d = vector_from_json(v);
        if (d.size() != ambient) bad("diagonal report: frame vector of wrong length");
        vs.push_back(to_sparse(d));
      }
    }
    DiagonalReport r;
    r.frame = OrthonormalFrame(ambient, std::move(vs));
    r.values = complex_list_from(array_field(j, "values", "diagonal report"));
    r.partial_sums = complex_list_from(array_field(j, "partial_sums", "diagonal report"));
    r.target = complex_from_json(field(j, "target", "diagonal report"));
    r.max_deviation = field(j, "max_deviation", "diagonal report").get<double>();
    r.checkpoints = field(j, "checkpoints", "diagonal report").get<std::vector<Index>>();
    r.max_trace_drift = field(j, "max_trace_drift", "diagonal report").get<double>();
    r.max_index = field(j, "max_index", "diagonal report").get<Index>();
    if (static_cast<Index>(r.values.size()) != r.frame.size() || r.partial_sums.size() != r.values.size())
      bad("diagonal report: values, partial sums and frame differ in length");
    return r;
  });
}

Json probe_to_json(const ProbeReport& r) {
  Json j{{"mode", r.mode == ProbeMode::joint ? "joint" : "ap"},
         {"target", vector_to_json(r.target)},
         {"best_distance", r.best_distance},
         {"best_point", vector_to_json(r.best_point)},
         {"best_x", vector_to_json(r.best_x)},
         {"restarts", r.restarts},
         {"seeds", r.seeds},
         {"distances", r.distances}};
  if (r.mode == ProbeMode::ap) j["best_y"] = vector_to_json(r.best_y);
  return j;
}

ProbeReport probe_from_json(const Json& j) {
  return guarded("probe report", [&] {
    ProbeReport r;
    const std::string mode = field(j, "mode", "probe report").get<std::string>();
    if (mode != "joint" && mode != "ap") bad("probe report: mode must be joint or ap");
    r.mode = mode == "joint" ? ProbeMode::joint : ProbeMode::ap;
    r.target = vector_from_json(field(j, "target", "probe report"));
    r.best_distance = field(j, "best_distance", "probe report").get<double>();
    r.best_point = vector_from_json(field(j, "best_point", "probe report"));
    r.best_x = vector_from_json(field(j, "best_x", "probe report"));
    if (r.mode == ProbeMode::ap) r.best_y = vector_from_json(field(j, "best_y", "probe report"));
    r.restarts = field(j, "restarts", "probe report").get<int>();
    r.seeds = field(j, "seeds", "probe report").get<std::vector<std::uint64_t>>();
    r.distances = field(j, "distances", "probe report").get<std::vector<double>>();
    if (r.best_distance < 0) bad("probe report: negative distance");
    return r;
  });
}

JointPoint point_from_string(const std::string& csv) {
  std::vector<Complex> zs;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) zs.push_back(parse_complex_token(tok));
  if (zs.empty()) bad("empty point");
  JointPoint p(static_cast<Index>(zs.size()));
  for (std::size_t i = 0; i < zs.size(); ++i) p(static_cast<Index>(i)) = zs[i];
  return p;
}

}  // namespace numrange::io
