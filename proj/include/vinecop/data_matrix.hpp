#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace vinecop {

enum class Scale { Data, Copula };

/// Row-major n x d matrix of observations with named columns.
class DataMatrix {
 public:
  DataMatrix() = default;
  DataMatrix(std::size_t rows, std::vector<std::string> names, Scale scale = Scale::Data);
  DataMatrix(std::size_t rows, std::vector<std::string> names, std::vector<double> values,
             Scale scale = Scale::Data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return names_.size(); }
  Scale scale() const noexcept { return scale_; }
  void set_scale(Scale scale) noexcept { scale_ = scale; }

  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t j) const { return names_.at(j); }
  /// Column index by name; throws InvalidArgument error when absent.
  std::size_t index_of(const std::string& name) const;

  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols() + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols() + j]; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols(), cols()};
  }
  std::vector<double> column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> values);
  const std::vector<double>& values() const noexcept { return values_; }

  /// New matrix with the named columns in the given order.
  DataMatrix select(const std::vector<std::string>& columns) const;

  /// Throws DomainError unless every entry lies in the open unit interval.
  void require_copula_scale() const;

 private:
  std::size_t rows_ = 0;
  std::vector<std::string> names_;
  std::vector<double> values_;
  Scale scale_ = Scale::Data;
};

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double x);

/// Reads a header plus numeric rows. A non-empty `columns` keeps only those
/// columns, in that order; other columns may hold anything.
DataMatrix read_csv(std::istream& in, const std::string& source = "<stream>",
                    const std::vector<std::string>& columns = {});
DataMatrix read_csv_file(const std::string& path, const std::vector<std::string>& columns = {});
void write_csv(const DataMatrix& data, std::ostream& out);
void write_csv_file(const DataMatrix& data, const std::string& path);

}  // namespace vinecop
