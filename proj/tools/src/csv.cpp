#include "sdm_cli/csv.hpp"

#include "sdm/errors.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

namespace sdm::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\"");
    return s.substr(first, last - first + 1);
}

bool parse_number(std::string_view text, double& out) {
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

std::vector<double> read_series(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidModel("cannot open data file '" + path.string() + "'");
    }
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool first_cell = true;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view cell = trim(line);
        if (cell.empty()) {
            continue;
        }
        if (cell.find(',') != std::string_view::npos || cell.find(';') != std::string_view::npos) {
            throw InvalidModel(path.string() + ":" + std::to_string(line_no) +
                               ": expected a single column");
        }
        double v = 0.0;
        if (!parse_number(cell, v)) {
            if (first_cell) {
                first_cell = false;
                continue;  // header
            }
            throw InvalidModel(path.string() + ":" + std::to_string(line_no) + ": '" +
                               std::string(cell) + "' is not a number");
        }
        first_cell = false;
        values.push_back(v);
    }
    if (values.empty()) {
        throw EmptyInput("data file '" + path.string() + "' contains no observations");
    }
    return values;
}

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    (void)ec;
    return std::string(buf, ptr);
}

std::string format_label(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

void write_series(const std::filesystem::path& path, const std::vector<double>& values) {
    std::ofstream out(path);
    if (!out) {
        throw InvalidModel("cannot write '" + path.string() + "'");
    }
    for (double v : values) {
        out << format_double(v) << '\n';
    }
}

void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const Eigen::MatrixXd& rows) {
    std::ofstream out(path);
    if (!out) {
        throw InvalidModel("cannot write '" + path.string() + "'");
    }
    for (std::size_t j = 0; j < header.size(); ++j) {
        out << (j ? "," : "") << header[j];
    }
    out << '\n';
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < rows.cols(); ++j) {
            out << (j ? "," : "") << format_double(rows(i, j));
        }
        out << '\n';
    }
}

}  // namespace sdm::cli
