#pragma once

#include <filesystem>
#include <string>

#include "covpath/symmat.hpp"

namespace covpath {

// Plain numeric CSV, one row per line. Blank lines are skipped.
// Throws ParseError on ragged rows, empty input or non-numeric fields.
MatrixXd read_csv(const std::filesystem::path& file);
MatrixXd parse_csv(const std::string& text);

// 17 significant digits, so finite doubles round-trip exactly.
std::string format_csv(const MatrixXd& m);
void write_csv(const std::filesystem::path& file, const MatrixXd& m);

inline constexpr double kAsymmetryTolerance = 1e-6;

// Square CSV symmetrized by averaging with its transpose.
// Throws ParseError, AsymmetricInput, NonPositiveDiagonal.
SymMatrix load_covariance(const std::filesystem::path& file);
SymMatrix to_covariance(const MatrixXd& m);

// Square and symmetric within kAsymmetryTolerance; the diagonal is free.
// Throws ParseError, AsymmetricInput.
SymMatrix to_symmetric(const MatrixXd& m);
SymMatrix load_symmetric(const std::filesystem::path& file);

// (1/m) sum (x_k - mean)(x_k - mean)^T over the m rows of data.
// Throws ParseError with fewer than two rows, NonPositiveDiagonal for a
// constant column.
SymMatrix sample_covariance(const MatrixXd& data);
SymMatrix load_samples(const std::filesystem::path& file);

// Solved instance used to seed the online mode.
struct SolverState {
    double rho = 0.0;
    double t = 0.0;
    SymMatrix sigma;
    SymMatrix U;
};

void write_state(const std::filesystem::path& file, const SolverState& s);
// Throws ParseError.
SolverState read_state(const std::filesystem::path& file);

std::string read_text(const std::filesystem::path& file);
void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace covpath
