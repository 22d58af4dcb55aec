#include "vinecop/data_matrix.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "csv.hpp"
#include "vinecop/error.hpp"

namespace vinecop {

DataMatrix::DataMatrix(std::size_t rows, std::vector<std::string> names, Scale scale)
    : rows_(rows), names_(std::move(names)), values_(rows * names_.size(), 0.0), scale_(scale) {}

DataMatrix::DataMatrix(std::size_t rows, std::vector<std::string> names,
                       std::vector<double> values, Scale scale)
    : rows_(rows), names_(std::move(names)), values_(std::move(values)), scale_(scale) {
  if (values_.size() != rows_ * names_.size()) {
    throw Error(ErrorCode::InvalidArgument, "DataMatrix: value count does not match rows x cols");
  }
}

std::size_t DataMatrix::index_of(const std::string& name) const {
  for (std::size_t j = 0; j < names_.size(); ++j)
    if (names_[j] == name) return j;
  throw Error(ErrorCode::InvalidArgument, "no column named '" + name + "'");
}

std::vector<double> DataMatrix::column(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

void DataMatrix::set_column(std::size_t j, std::span<const double> values) {
  if (values.size() != rows_) throw Error(ErrorCode::InvalidArgument, "column length mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

DataMatrix DataMatrix::select(const std::vector<std::string>& columns) const {
  std::vector<std::size_t> idx;
  idx.reserve(columns.size());
  for (const auto& c : columns) idx.push_back(index_of(c));
  DataMatrix out(rows_, columns, scale_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < idx.size(); ++k) out(i, k) = (*this)(i, idx[k]);
  return out;
}

void DataMatrix::require_copula_scale() const {
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols(); ++j) {
      const double u = (*this)(i, j);
      if (!(u > 0.0 && u < 1.0)) {
        std::ostringstream os;
        os << "copula-scale value outside (0,1) at row " << i + 1 << ", column '" << names_[j]
           << "': " << u;
        throw DomainError(os.str());
      }
    }
  }
}

std::string format_number(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

DataMatrix read_csv(std::istream& in, const std::string& source,
                    const std::vector<std::string>& columns) {
  detail::CsvReader reader(in, source);
  std::vector<std::string> header;
  if (!reader.next(header)) throw ParseError(source + ": empty CSV (missing header)");
  std::vector<std::size_t> keep;
  std::vector<std::string> names;
  if (columns.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) keep.push_back(j);
    names = header;
  } else {
    for (const auto& c : columns) {
      const auto it = std::find(header.begin(), header.end(), c);
      if (it == header.end()) throw ParseError(source + ": missing column '" + c + "'");
      keep.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    names = columns;
  }
  std::vector<double> values;
  std::vector<std::string> fields;
  std::size_t rows = 0;
  while (reader.next(fields)) {
    if (fields.size() != header.size()) {
      std::ostringstream os;
      os << source << ":" << reader.line() << ": expected " << header.size() << " fields, got "
         << fields.size();
      throw ParseError(os.str());
    }
    for (const std::size_t j : keep)
      values.push_back(detail::parse_double(fields[j], source, reader.line(), header[j]));
    ++rows;
  }
  return DataMatrix(rows, std::move(names), std::move(values));
}

DataMatrix read_csv_file(const std::string& path, const std::vector<std::string>& columns) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return read_csv(in, path, columns);
}

void write_csv(const DataMatrix& data, std::ostream& out) {
  for (std::size_t j = 0; j < data.cols(); ++j) out << (j ? "," : "") << data.name(j);
  out << '\n';
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) out << (j ? "," : "") << format_number(data(i, j));
    out << '\n';
  }
}

void write_csv_file(const DataMatrix& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  write_csv(data, out);
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

}  // namespace vinecop
