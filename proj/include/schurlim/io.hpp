#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "schurlim/convergence.hpp"
#include "schurlim/matrix.hpp"
#include "schurlim/trek.hpp"

namespace schurlim {

/// Matrix JSON format: {"rows": [[r11, r12, ...], ...]}. Ragged rows are
/// rejected.
inline Matrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("rows") || !j["rows"].is_array())
        throw parse_error("matrix JSON must be an object with a \"rows\" array");
    const auto& rows = j["rows"];
    const std::size_t r = rows.size();
    std::size_t c = 0;
    std::vector<double> data;
    for (std::size_t i = 0; i < r; ++i) {
        if (!rows[i].is_array()) throw parse_error("matrix JSON rows must be arrays");
        if (i == 0) {
            c = rows[i].size();
            data.reserve(r * c);
        } else if (rows[i].size() != c) {
            throw parse_error("matrix JSON has ragged rows");
        }
        for (const auto& v : rows[i]) {
            if (!v.is_number()) throw parse_error("matrix JSON entries must be numbers");
            data.push_back(v.get<double>());
        }
    }
    return Matrix(r, c, std::move(data));
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return nlohmann::json{{"rows", std::move(rows)}};
}

/// CSV alternative: one row per line, comma-separated, no header.
inline Matrix matrix_from_csv(std::istream& in) {
    std::vector<double> data;
    std::size_t rows = 0, cols = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t count = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(cell, &pos);
                while (pos < cell.size() &&
                       (cell[pos] == ' ' || cell[pos] == '\t' || cell[pos] == '\r'))
                    ++pos;
                if (pos != cell.size()) throw parse_error("trailing characters in CSV cell");
                data.push_back(v);
            } catch (const parse_error&) {
                throw;
            } catch (const std::exception&) {
                throw parse_error("CSV cell is not a number: '" + cell + "'");
            }
            ++count;
        }
        if (rows == 0) {
            cols = count;
        } else if (count != cols) {
            throw parse_error("CSV has ragged rows");
        }
        ++rows;
    }
    if (rows == 0) throw parse_error("CSV input is empty");
    return Matrix(rows, cols, std::move(data));
}

inline std::string matrix_to_csv(const Matrix& m) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
    return out.str();
}

/// Load a matrix from a .json or .csv file; files without a known extension
/// are sniffed by their first non-space byte.
inline Matrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open matrix file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    bool json = false;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        json = true;
    } else if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
        json = false;
    } else {
        const auto pos = text.find_first_not_of(" \t\r\n");
        json = pos != std::string::npos && text[pos] == '{';
    }
    if (json) {
        nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
        if (j.is_discarded()) throw parse_error("invalid JSON in matrix file: " + path);
        return matrix_from_json(j);
    }
    std::istringstream csv(text);
    return matrix_from_csv(csv);
}

inline nlohmann::json theorem_report_to_json(const TheoremReport& rep) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& row : rep.empirical_table) {
        nlohmann::json r{{"m", row.m}, {"available", row.available}};
        if (row.available) r["error"] = row.error;
        table.push_back(std::move(r));
    }
    return nlohmann::json{
        {"condition_i_value", rep.condition_i_value},
        {"condition_i_holds", rep.condition_i_holds},
        {"condition_ii_holds", rep.condition_ii_holds},
        {"rank_r", rep.rank_r},
        {"limit_conditional", matrix_to_json(rep.limit_conditional)},
        {"empirical_table", std::move(table)},
        {"verdict", to_string(rep.verdict)},
    };
}

inline std::string theorem_report_to_text(const TheoremReport& rep) {
    std::ostringstream out;
    out.precision(12);
    out << "condition (i)  f(U, Sigma^(1,inf)_SS) = " << rep.condition_i_value
        << (rep.condition_i_holds ? "  [holds]" : "  [fails]") << '\n';
    out << "condition (ii) column-space inclusion  "
        << (rep.condition_ii_holds ? "[holds]" : "[fails]") << '\n';
    out << "rank(Sigma_SS) = " << rep.rank_r << '\n';
    out << "limit conditional covariance:\n";
    for (std::size_t i = 0; i < rep.limit_conditional.rows(); ++i) {
        out << "  ";
        for (std::size_t j = 0; j < rep.limit_conditional.cols(); ++j) {
            if (j) out << ' ';
            out << rep.limit_conditional(i, j);
        }
        out << '\n';
    }
    if (!rep.empirical_table.empty()) {
        out << "empirical convergence (||Schur(m) - limit||_max):\n";
        for (const auto& row : rep.empirical_table) {
            out << "  m = " << row.m << ":  ";
            if (row.available)
                out << row.error;
            else
                out << "unavailable (Sigma^(m)_SS singular)";
            out << '\n';
        }
    }
    out << "verdict: " << to_string(rep.verdict) << '\n';
    return out.str();
}

inline nlohmann::json trek_report_to_json(const TrekReport& rep) {
    nlohmann::json j{
        {"left_edges", rep.spec.left_edges},
        {"right_edges", rep.spec.right_edges},
        {"p", rep.spec.p()},
        {"case", to_string(rep.kase)},
        {"computed_limit", rep.computed_limit},
        {"nonzero_limit", rep.nonzero_limit},
        {"matches_expected", rep.matches_expected},
        {"theorem", theorem_report_to_json(rep.theorem)},
    };
    if (rep.expected_limit) j["expected_limit"] = *rep.expected_limit;
    return j;
}

}  // namespace schurlim
