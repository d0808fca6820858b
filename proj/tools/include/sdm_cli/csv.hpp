#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace sdm::cli {

/**
 * @brief Reads a single numeric column.
 *
 * A first line whose cell does not parse as a number is treated as a header
 * and skipped. Blank lines are ignored. Throws InvalidModel on any other
 * malformed line and EmptyInput when no value is found.
 */
std::vector<double> read_series(const std::filesystem::path& path);

/// Writes one value per line with 17 significant digits and no header.
void write_series(const std::filesystem::path& path, const std::vector<double>& values);

/// Writes a header line followed by one comma-separated row per matrix row.
void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const Eigen::MatrixXd& rows);

/// Locale-independent shortest form that still carries 17 significant digits.
std::string format_double(double x);

/// Shortest round-trip form, used for column labels such as "q0.025".
std::string format_label(double x);

}  // namespace sdm::cli
