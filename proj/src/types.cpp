#include "gradflow/types.hpp"

namespace gradflow {

void require_square_finite(const Matrix& m, std::string_view what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(what) + " must be a non-empty square matrix, got " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (!m.allFinite()) {
        throw Error(ErrorKind::NonFiniteEntry, std::string(what) + " has NaN or Inf entries");
    }
}

void require_size(const Vector& v, Eigen::Index dim, std::string_view what) {
    if (v.size() != dim) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(what) + " has length " + std::to_string(v.size()) +
                        ", expected " + std::to_string(dim));
    }
}

}  // namespace gradflow
