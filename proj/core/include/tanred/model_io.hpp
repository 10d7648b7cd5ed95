#pragma once

#include <filesystem>
#include <string>

#include "tanred/state_space.hpp"

namespace tanred {

enum class ModelFormat { Auto, DenseText, MatrixMarket };

/// "auto", "dense"/"txt", "mtx"/"matrix-market". Throws InvalidArgument.
ModelFormat parse_model_format(const std::string& tag);

/// Dense text: sections `A = ...`, `B: ...` etc. with row-major values, optional
/// `n`, `p`, `q` dimensions (inferred otherwise), `name` and `field` metadata;
/// `#` starts a comment, brackets/commas/semicolons are ignored, complex values
/// read as `a+bj`. D defaults to zero.
///
/// MatrixMarket: `path` is a directory holding A.mtx, B.mtx, C.mtx [, D.mtx],
/// or a prefix P with files P.A.mtx / P_A.mtx etc.
///
/// Throws ParseError (with line:column), IoError, DimensionMismatch, and
/// InvariantViolation for poles on the imaginary axis.
StateSpace load_model(const std::filesystem::path& path, ModelFormat format = ModelFormat::Auto);

/// Parses dense text held in memory; `origin` names it in error messages.
StateSpace parse_dense_text(const std::string& text, const std::string& origin = "<text>");
std::string format_dense_text(const StateSpace& sys, const std::string& name = "");

/// DenseText writes `path` itself; MatrixMarket writes path.A.mtx ... path.D.mtx.
/// Throws IoError, InvalidArgument for Auto.
void save_model(const StateSpace& sys, const std::filesystem::path& path, ModelFormat format);

/// One MatrixMarket file (coordinate or array; real, integer or complex; general
/// or symmetric/hermitian/skew-symmetric).
CMatrix read_matrix_market(const std::filesystem::path& file);
void write_matrix_market(const CMatrix& m, bool real, const std::filesystem::path& file);

}  // namespace tanred
