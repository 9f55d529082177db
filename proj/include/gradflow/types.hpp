#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace gradflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative tolerance used when callers do not supply one.
inline constexpr double kDefaultTol = 1e-9;

enum class ErrorKind {
    InvalidArgument,
    DimensionMismatch,
    NonFiniteEntry,
    ComplexSpectrum,
    Defective,
    NotSPD,
    IllConditioned,
    FlowMismatch,
    AsymmetryDefect,
    NotCritical,
    Overflow,
    NonFinite,
    SingularStep,
    NegativeRate,
    ColumnSumNonzero,
    DegenerateKernel,
    NonPositive,
    NonPositiveInput,
    NonPositiveState,
    NotReversible,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NonFiniteEntry: return "NonFiniteEntry";
        case ErrorKind::ComplexSpectrum: return "ComplexSpectrum";
        case ErrorKind::Defective: return "Defective";
        case ErrorKind::NotSPD: return "NotSPD";
        case ErrorKind::IllConditioned: return "IllConditioned";
        case ErrorKind::FlowMismatch: return "FlowMismatch";
        case ErrorKind::AsymmetryDefect: return "AsymmetryDefect";
        case ErrorKind::NotCritical: return "NotCritical";
        case ErrorKind::Overflow: return "Overflow";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::SingularStep: return "SingularStep";
        case ErrorKind::NegativeRate: return "NegativeRate";
        case ErrorKind::ColumnSumNonzero: return "ColumnSumNonzero";
        case ErrorKind::DegenerateKernel: return "DegenerateKernel";
        case ErrorKind::NonPositive: return "NonPositive";
        case ErrorKind::NonPositiveInput: return "NonPositiveInput";
        case ErrorKind::NonPositiveState: return "NonPositiveState";
        case ErrorKind::NotReversible: return "NotReversible";
    }
    return "Unknown";
}

/// Base exception for every failure raised by the library. The kind is
/// stable and is what callers (and the CLI exit-code mapping) dispatch on.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Throws DimensionMismatch unless `m` is square, NonFiniteEntry on NaN/Inf.
void require_square_finite(const Matrix& m, std::string_view what);

void require_size(const Vector& v, Eigen::Index dim, std::string_view what);

[[nodiscard]] inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace gradflow
