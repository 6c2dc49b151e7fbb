#pragma once

// JSON matrix literals {"dim": d, "re": [[...]], "im": [[...]]} and the
// "k,mu_k" singular value CSV.

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "moilab/matrix.hpp"

namespace moilab {

/// Square matrices carry "dim"; rectangular ones carry "rows" and "cols".
/// "im" may be omitted on input (all zero).
nlohmann::json matrix_to_json(const ComplexMatrix& x);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

ComplexMatrix read_matrix(const std::filesystem::path& path);
HermitianMatrix read_hermitian(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const ComplexMatrix& x);

void write_singular_values_csv(std::ostream& out, const SingularValueList& mu);

}  // namespace moilab
