#include "gbm/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "gbm/errors.hpp"

namespace gbm::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s) {
  const std::string t = trim(s);
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::IoError, "cannot parse number '" + t + "'");
  }
}

long parse_long(const std::string& s) {
  const std::string t = trim(s);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw Error(ErrorKind::IoError, "cannot parse integer '" + t + "'");
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

CoefficientTensor<double> read_tensor(std::istream& in) {
  std::string line;
  int dim = 0;
  CoefficientTensor<double> tensor;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream ss(line);
    if (dim == 0) {
      if (!(ss >> dim) || dim < 1) throw Error(ErrorKind::IoError, "tensor file: bad dimension line " + std::to_string(lineno));
      tensor = CoefficientTensor<double>(dim);
      continue;
    }
    int i, j, k, l;
    std::string value;
    if (!(ss >> i >> j >> k >> l >> value))
      throw Error(ErrorKind::IoError, "tensor file: malformed row at line " + std::to_string(lineno));
    for (int idx : {i, j, k, l})
      if (idx < 1 || idx > dim)
        throw Error(ErrorKind::IoError, "tensor file: index out of range at line " + std::to_string(lineno));
    const double v = parse_double(value);
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "tensor file: non-finite entry at line " + std::to_string(lineno));
    tensor(i - 1, j - 1, k - 1, l - 1) = v;
  }
  if (dim == 0) throw Error(ErrorKind::IoError, "tensor file: missing dimension line");
  return tensor;
}

CoefficientTensor<double> read_tensor(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_tensor(in);
}

void write_tensor(std::ostream& out, const CoefficientTensor<double>& tensor) {
  const int n = tensor.dim();
  out << n << "\n";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          if (tensor(i, j, k, l) != 0)
            out << i + 1 << ' ' << j + 1 << ' ' << k + 1 << ' ' << l + 1 << ' ' << format_double(tensor(i, j, k, l)) << "\n";
}

void write_field_csv(std::ostream& out, const GridField<double>& field) {
  const int n = field.grid.dim();
  for (int d = 0; d < n; ++d) out << (d ? "," : "") << "x" << d + 1;
  for (int c = 0; c < field.components(); ++c) out << ",f" << c + 1;
  out << "\n";
  for (std::size_t p = 0; p < field.grid.size(); ++p) {
    const Eigen::VectorXd x = field.grid.point(p);
    for (int d = 0; d < n; ++d) out << (d ? "," : "") << format_double(x(d));
    for (int c = 0; c < field.components(); ++c)
      out << "," << format_double(field.values(static_cast<Eigen::Index>(p), c));
    out << "\n";
  }
}

GridField<double> read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::IoError, "field csv: empty input");
  const auto header = split(trim(line), ',');
  int dim = 0, comps = 0;
  for (const auto& h : header) {
    const std::string t = trim(h);
    if (!t.empty() && t[0] == 'x') ++dim;
    else if (!t.empty() && t[0] == 'f') ++comps;
    else throw Error(ErrorKind::IoError, "field csv: unexpected column '" + t + "'");
  }
  if (dim < 1 || comps < 1) throw Error(ErrorKind::IoError, "field csv: header needs x and f columns");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != header.size()) throw Error(ErrorKind::IoError, "field csv: row width differs from header");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c));
    rows.push_back(std::move(row));
  }
  const int g = static_cast<int>(std::lround(std::pow(static_cast<double>(rows.size()), 1.0 / dim)));
  const TorusGrid grid(dim, std::max(g, 1));
  if (grid.size() != rows.size()) throw Error(ErrorKind::IoError, "field csv: row count is not G^n");
  GridField<double> field{grid, Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), comps)};
  // rows may come in any order; place each by its coordinates
  std::vector<bool> seen(rows.size(), false);
  for (const auto& row : rows) {
    Eigen::VectorXi cell(dim);
    for (int d = 0; d < dim; ++d) {
      const double k = row[static_cast<std::size_t>(d)] * g;
      cell(d) = static_cast<int>(std::lround(k));
      if (std::abs(k - cell(d)) > 1e-6) throw Error(ErrorKind::IoError, "field csv: point off the uniform grid");
    }
    const std::size_t index = grid.index_of(cell);
    if (seen[index]) throw Error(ErrorKind::IoError, "field csv: duplicate grid point");
    seen[index] = true;
    for (int c = 0; c < comps; ++c) field.values(static_cast<Eigen::Index>(index), c) = row[static_cast<std::size_t>(dim + c)];
  }
  return field;
}

GridField<double> read_field_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_field_csv(in);
}

void write_spectral_csv(std::ostream& out, const SpectralField<double>& field) {
  for (int d = 0; d < field.dim; ++d) out << (d ? "," : "") << "alpha" << d + 1;
  for (int c = 0; c < field.components; ++c) out << ",re_f" << c + 1 << ",im_f" << c + 1;
  out << "\n";
  const ModeBox box = field.box();
  for (std::size_t m = 0; m < box.size(); ++m) {
    const MultiIndex alpha = box[m];
    for (int d = 0; d < field.dim; ++d) out << (d ? "," : "") << alpha(d);
    for (int c = 0; c < field.components; ++c)
      out << "," << format_double(field.coeffs[m](c).real()) << "," << format_double(field.coeffs[m](c).imag());
    out << "\n";
  }
}

SpectralField<double> read_spectral_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::IoError, "spectral csv: empty input");
  const auto header = split(trim(line), ',');
  int dim = 0;
  for (const auto& h : header)
    if (trim(h).rfind("alpha", 0) == 0) ++dim;
  const int rest = static_cast<int>(header.size()) - dim;
  if (dim < 1 || rest < 2 || rest % 2) throw Error(ErrorKind::IoError, "spectral csv: malformed header");
  const int comps = rest / 2;
  std::vector<std::pair<MultiIndex, Eigen::VectorXcd>> rows;
  int radius = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != header.size()) throw Error(ErrorKind::IoError, "spectral csv: row width differs from header");
    MultiIndex alpha(dim);
    for (int d = 0; d < dim; ++d) alpha(d) = static_cast<int>(parse_long(cells[static_cast<std::size_t>(d)]));
    Eigen::VectorXcd c(comps);
    for (int i = 0; i < comps; ++i)
      c(i) = {parse_double(cells[static_cast<std::size_t>(dim + 2 * i)]),
              parse_double(cells[static_cast<std::size_t>(dim + 2 * i + 1)])};
    radius = std::max(radius, alpha.cwiseAbs().maxCoeff());
    rows.emplace_back(std::move(alpha), std::move(c));
  }
  SpectralField<double> field(dim, comps, radius);
  for (const auto& [alpha, c] : rows) field[alpha] = c;
  return field;
}

SpectralField<double> read_spectral_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_spectral_csv(in);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::IoError, "sha256 failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

}  // namespace gbm::io
