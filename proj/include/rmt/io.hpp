#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <complex>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmt/eigen_solve.hpp"
#include "rmt/errors.hpp"

namespace rmt {

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) {
        // trim spaces
        std::size_t b = field.find_first_not_of(" \t\r");
        std::size_t e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    return out;
}

inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

inline std::vector<std::vector<std::string>> read_csv_fields(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        rows.push_back(split_csv_line(line));
    }
    return rows;
}

} // namespace detail

// Headerless row-major real matrix.
inline Eigen::MatrixXd read_matrix_csv(const std::string& path) {
    auto rows = detail::read_csv_fields(path);
    if (rows.empty()) throw InputError("empty matrix file: " + path);
    const std::size_t cols = rows[0].size();
    Eigen::MatrixXd m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols)
            throw InputError("ragged CSV row " + std::to_string(i + 1) + " in " + path);
        for (std::size_t j = 0; j < cols; ++j) {
            double v;
            if (!detail::parse_double(rows[i][j], v))
                throw InputError("non-numeric CSV entry '" + rows[i][j] + "' in " + path);
            m(i, j) = v;
        }
    }
    return m;
}

// Data matrix with an optional (non-numeric) header row.
inline Eigen::MatrixXd read_data_csv(const std::string& path) {
    auto rows = detail::read_csv_fields(path);
    if (rows.empty()) throw InputError("empty data file: " + path);
    std::size_t start = 0;
    double probe;
    if (!rows[0].empty() && !detail::parse_double(rows[0][0], probe)) start = 1;
    if (rows.size() <= start) throw InputError("no data rows in " + path);
    const std::size_t cols = rows[start].size();
    Eigen::MatrixXd m(rows.size() - start, cols);
    for (std::size_t i = start; i < rows.size(); ++i) {
        if (rows[i].size() != cols)
            throw InputError("ragged CSV row " + std::to_string(i + 1) + " in " + path);
        for (std::size_t j = 0; j < cols; ++j) {
            double v;
            if (!detail::parse_double(rows[i][j], v))
                throw InputError("non-numeric CSV entry '" + rows[i][j] + "' in " + path);
            m(i - start, j) = v;
        }
    }
    return m;
}

inline void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << (j ? "," : "") << format_double(m(i, j));
        out << "\n";
    }
}

// Complex entries occupy two adjacent fields: re, im.
inline void write_matrix_csv(const std::string& path, const Eigen::MatrixXcd& m) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << (j ? "," : "") << format_double(m(i, j).real()) << ","
                << format_double(m(i, j).imag());
        out << "\n";
    }
}

// Single-column spectrum file.
inline Spectrum read_spectrum_csv(const std::string& path) {
    auto rows = detail::read_csv_fields(path);
    Spectrum s;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != 1)
            throw InputError("spectrum file must be single-column: " + path);
        double v;
        if (!detail::parse_double(rows[i][0], v))
            throw InputError("non-numeric spectrum entry '" + rows[i][0] + "' in " + path);
        s.values.push_back(v);
    }
    if (s.values.empty()) throw InputError("empty spectrum file: " + path);
    std::sort(s.values.begin(), s.values.end(), std::greater<double>());
    return s;
}

inline void write_spectrum_csv(const std::string& path, const Spectrum& s) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    for (double v : s.values) out << format_double(v) << "\n";
}

// Envelope around every JSON artifact the CLI emits.  The payload is a
// pure function of (command, seed); wall time lives outside it so that
// reproducibility can be checked on the payload alone.
inline nlohmann::json report_envelope(const std::string& command_echo, nlohmann::json payload,
                                      double wall_seconds = 0.0) {
    nlohmann::json env;
    env["schema_version"] = 1;
    env["tool_version"] = "1.0.0";
    env["command"] = command_echo;
    env["config_hash"] = std::to_string(std::hash<std::string>{}(command_echo));
    env["wall_time_seconds"] = wall_seconds;
    env["payload"] = std::move(payload);
    return env;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

} // namespace rmt
