#include "gradflow/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace gradflow::io {
namespace {

Matrix rows_to_matrix(const Json& rows, Eigen::Index dim, const char* what) {
    if (!rows.is_array()) throw ParseError(std::string(what) + ": expected an array of rows");
    if (static_cast<Eigen::Index>(rows.size()) != dim) {
        throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": expected " + std::to_string(dim) +
                                                      " rows, got " + std::to_string(rows.size()));
    }
    Matrix m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array()) throw ParseError(std::string(what) + ": row " + std::to_string(i) + " is not an array");
        if (static_cast<Eigen::Index>(row.size()) != dim) {
            throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": row " + std::to_string(i) + " has " +
                                                          std::to_string(row.size()) + " entries, expected " +
                                                          std::to_string(dim));
        }
        for (Eigen::Index k = 0; k < dim; ++k) {
            const auto& v = row[static_cast<std::size_t>(k)];
            if (!v.is_number()) throw ParseError(std::string(what) + ": non-numeric entry");
            m(i, k) = v.get<double>();
        }
    }
    return m;
}

Json rows_of(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::Index read_dim(const Json& j) {
    if (!j.is_object()) throw ParseError("expected a JSON object");
    if (!j.contains("dim") || !j["dim"].is_number_integer()) throw ParseError("missing integer field \"dim\"");
    const auto dim = j["dim"].get<long long>();
    if (dim <= 0) throw Error(ErrorKind::DimensionMismatch, "\"dim\" must be positive");
    return static_cast<Eigen::Index>(dim);
}

const Json& field(const Json& j, const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
    return j[key];
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Matrix matrix_from_json(const Json& j) {
    const auto dim = read_dim(j);
    return rows_to_matrix(field(j, "rows"), dim, "rows");
}

Json matrix_to_json(const Matrix& m) {
    Json j;
    j["dim"] = m.rows();
    j["rows"] = rows_of(m);
    return j;
}

Vector vector_from_json(const Json& j, Eigen::Index dim, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
    if (static_cast<Eigen::Index>(j.size()) != dim) {
        throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": expected length " + std::to_string(dim));
    }
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto& x = j[static_cast<std::size_t>(i)];
        if (!x.is_number()) throw ParseError(std::string(what) + ": non-numeric entry");
        v(i) = x.get<double>();
    }
    return v;
}

Json vector_to_json(const Vector& v) {
    Json arr = Json::array();
    for (double x : v) arr.push_back(x);
    return arr;
}

Matrix generator_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("convention")) {
        throw ParseError("generator input must declare \"convention\": \"transposed\"");
    }
    if (j["convention"] != "transposed") {
        throw ParseError("unsupported generator convention; only \"transposed\" (columns sum to zero) is accepted");
    }
    return matrix_from_json(j);
}

Json system_to_json(const SystemFile& s) {
    Json j;
    j["schema_version"] = kSystemSchemaVersion;
    j["dim"] = s.A.rows();
    j["A"] = rows_of(s.A);
    j["K"] = rows_of(s.gs.K);
    j["B"] = rows_of(s.gs.B);
    j["pi"] = vector_to_json(s.gs.pi);
    j["V"] = rows_of(s.diag.V);
    j["f"] = vector_to_json(s.diag.f);
    j["diagonalisation_residual"] = s.diag.residual;
    return j;
}

SystemFile system_from_json(const Json& j) {
    const auto dim = read_dim(j);
    SystemFile s;
    s.A = rows_to_matrix(field(j, "A"), dim, "A");
    s.gs.K = rows_to_matrix(field(j, "K"), dim, "K");
    s.gs.B = rows_to_matrix(field(j, "B"), dim, "B");
    s.gs.pi = vector_from_json(field(j, "pi"), dim, "pi");
    s.diag = Diagonalisation::from(rows_to_matrix(field(j, "V"), dim, "V"), vector_from_json(field(j, "f"), dim, "f"));
    if (j.contains("diagonalisation_residual") && j["diagonalisation_residual"].is_number()) {
        s.diag.residual = j["diagonalisation_residual"].get<double>();
    }
    return s;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    const auto d = traj.states.empty() ? 0 : traj.states.front().size();
    out << "t";
    for (Eigen::Index i = 1; i <= d; ++i) out << ",x" << i;
    out << '\n';
    out << std::setprecision(17);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out << traj.times[k];
        for (double x : traj.states[k]) out << ',' << x;
        out << '\n';
    }
}

Vector parse_vector_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ParseError("cannot parse \"" + item + "\" as a number");
        }
        if (item.find_first_not_of(" \t", used) != std::string::npos) {
            throw ParseError("trailing characters in \"" + item + "\"");
        }
        values.push_back(v);
    }
    if (values.empty()) throw ParseError("empty vector");
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace gradflow::io
