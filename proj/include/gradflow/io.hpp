#pragma once

// File formats used by the command-line tool.
//
// Matrix:    {"dim": d, "rows": [[...], ...]}   (row-major)
//            generators additionally carry "convention": "transposed"
// System:    {"schema_version", "dim", "A", "K", "B", "pi", "V", "f"}
//            matrices stored as row arrays
// Trajectory CSV: header t,x1,...,xd then one row per node, %.17g

#include "gradflow/flow.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace gradflow::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSystemSchemaVersion = "1.0";

/// Malformed JSON or missing fields.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[nodiscard]] std::string read_text(const std::filesystem::path& path);

/// Throws ParseError, or Error(DimensionMismatch) when "dim" and "rows"
/// disagree.
[[nodiscard]] Matrix matrix_from_json(const Json& j);
[[nodiscard]] Json matrix_to_json(const Matrix& m);
[[nodiscard]] Vector vector_from_json(const Json& j, Eigen::Index dim, const char* what);
[[nodiscard]] Json vector_to_json(const Vector& v);

/// Requires "convention": "transposed".
[[nodiscard]] Matrix generator_from_json(const Json& j);

struct SystemFile {
    Matrix A;
    CanonicalGradientSystem gs;
    Diagonalisation diag;
};

[[nodiscard]] Json system_to_json(const SystemFile& s);
[[nodiscard]] SystemFile system_from_json(const Json& j);

void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

/// "1,0,0" -> (1, 0, 0)
[[nodiscard]] Vector parse_vector_list(const std::string& text);

}  // namespace gradflow::io
