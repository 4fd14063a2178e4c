#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gbm/mode_algebra.hpp"
#include "gbm/torus_fourier.hpp"

namespace gbm::io {

/// Plain-text tensor: first non-comment line is the dimension n, then one
/// `i j k l value` row per nonzero entry with 1-based indices. '#' starts a
/// comment. Entries not listed are zero.
CoefficientTensor<double> read_tensor(std::istream& in);
CoefficientTensor<double> read_tensor(const std::filesystem::path& path);
void write_tensor(std::ostream& out, const CoefficientTensor<double>& tensor);

/// Field samples: header `x1,...,xn,f1,...,fn`, one row per grid point in
/// TorusGrid order. Reading infers G from the row count (rows = G^n).
void write_field_csv(std::ostream& out, const GridField<double>& field);
GridField<double> read_field_csv(std::istream& in);
GridField<double> read_field_csv(const std::filesystem::path& path);

/// Spectral coefficients: header `alpha1,...,alphan,re_f1,im_f1,...`, one row
/// per mode. Modes absent from the file are zero; K is the largest |alpha_i|.
void write_spectral_csv(std::ostream& out, const SpectralField<double>& field);
SpectralField<double> read_spectral_csv(std::istream& in);
SpectralField<double> read_spectral_csv(const std::filesystem::path& path);

/// Hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

}  // namespace gbm::io
