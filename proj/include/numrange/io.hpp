#pragma once

#include <json.hpp>

#include <string>

#include "numrange/diagonals.hpp"
#include "numrange/jointrange.hpp"
#include "numrange/kadison.hpp"
#include "numrange/model.hpp"

namespace numrange {

/// File could not be read or written.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("IoError", what) {}
};

namespace io {

using Json = nlohmann::ordered_json;

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
/// Parse errors become InvalidInput naming `source`, line and column.
Json parse(const std::string& text, const std::string& source);
Json read_json(const std::string& path);

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);

// {"dim": N, "entries": [[[re,im], ...], ...]}, row-major.
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

Json model_to_json(const OperatorModel& m);
OperatorModel model_from_json(const Json& j);

// {"members": [<matrix>, ...]}
Json tuple_to_json(const OperatorTuple& t);
OperatorTuple tuple_from_json(const Json& j);

// {"prefix": ["1/4", ...], "tails": [...], "interleave": m}
Json seq_to_json(const kadison::DiagonalSeq& d);
kadison::DiagonalSeq seq_from_json(const Json& j);

Json sums_to_json(const kadison::KadisonSums& s);

/// Frames on a model's coordinates are written sparsely
/// ({"indices": [...], "values": [...]}), finite ones densely.
Json report_to_json(const DiagonalReport& r);
DiagonalReport report_from_json(const Json& j);

Json probe_to_json(const ProbeReport& r);
ProbeReport probe_from_json(const Json& j);

JointPoint point_from_string(const std::string& csv);  // "0,0.25,0.25" or "1+2i,..."

}  // namespace io
}  // namespace numrange
