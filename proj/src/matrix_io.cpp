#include "moilab/matrix_io.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "moilab/errors.hpp"

namespace moilab {

using nlohmann::json;

json matrix_to_json(const ComplexMatrix& x) {
  json re = json::array();
  json im = json::array();
  for (Index i = 0; i < x.rows(); ++i) {
    json re_row = json::array();
    json im_row = json::array();
    for (Index j = 0; j < x.cols(); ++j) {
      re_row.push_back(x(i, j).real());
      im_row.push_back(x(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  json out;
  if (x.rows() == x.cols()) {
    out["dim"] = x.rows();
  } else {
    out["rows"] = x.rows();
    out["cols"] = x.cols();
  }
  out["re"] = std::move(re);
  out["im"] = std::move(im);
  return out;
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("re")) {
    detail::throw_precondition("matrix_from_json", "expected an object with a \"re\" field");
  }
  Index rows = 0;
  Index cols = 0;
  if (j.contains("dim")) {
    rows = cols = j.at("dim").get<Index>();
  } else {
    rows = j.at("rows").get<Index>();
    cols = j.at("cols").get<Index>();
  }
  if (rows < 1 || cols < 1) detail::throw_precondition("matrix_from_json", "dimensions must be positive");

  auto read_part = [&](const char* key, bool required) {
    Eigen::MatrixXd part = Eigen::MatrixXd::Zero(rows, cols);
    if (!j.contains(key)) {
      if (required) detail::throw_precondition("matrix_from_json", std::string("missing field ") + key);
      return part;
    }
    const json& rows_json = j.at(key);
    if (!rows_json.is_array() || static_cast<Index>(rows_json.size()) != rows) {
      detail::throw_precondition("matrix_from_json", std::string("field ") + key + " has the wrong row count");
    }
    for (Index r = 0; r < rows; ++r) {
      const json& row = rows_json.at(static_cast<std::size_t>(r));
      if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
        detail::throw_precondition("matrix_from_json", std::string("field ") + key + " has a ragged row");
      }
      for (Index c = 0; c < cols; ++c) part(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return part;
  };

  const Eigen::MatrixXd re = read_part("re", true);
  const Eigen::MatrixXd im = read_part("im", false);
  ComplexMatrix out(rows, cols);
  out.real() = re;
  out.imag() = im;
  return out;
}

ComplexMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return matrix_from_json(json::parse(in));
}

HermitianMatrix read_hermitian(const std::filesystem::path& path) { return HermitianMatrix(read_matrix(path)); }

void write_matrix(const std::filesystem::path& path, const ComplexMatrix& x) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << matrix_to_json(x).dump() << "\n";
}

void write_singular_values_csv(std::ostream& out, const SingularValueList& mu) {
  out << "k,mu_k\n";
  const auto old_precision = out.precision(17);
  for (std::size_t k = 0; k < mu.values.size(); ++k) out << k << "," << mu.values[k] << "\n";
  out.precision(old_precision);
}

}  // namespace moilab
