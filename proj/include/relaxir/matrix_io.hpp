#pragma once

// Dense Matrix Market ("array real general") reader and writer.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "relaxir/errors.hpp"
#include "relaxir/linalg.hpp"
#include "relaxir/text.hpp"

namespace relaxir {

namespace detail {

inline std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline bool blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

} // namespace detail

inline DenseMatrix read_matrix(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "empty input, expected a %%MatrixMarket header");
    ++lineno;
    {
        std::istringstream hs(line);
        std::string banner, object, format, field, symmetry;
        hs >> banner >> object >> format >> field >> symmetry;
        if (banner != "%%MatrixMarket") throw ParseError(lineno, "malformed header: missing %%MatrixMarket banner");
        object = detail::lowercase(object);
        format = detail::lowercase(format);
        field = detail::lowercase(field);
        symmetry = detail::lowercase(symmetry);
        if (object.empty() || format.empty() || field.empty() || symmetry.empty()) {
            throw ParseError(lineno, "malformed header: expected 'matrix array real general'");
        }
        if (object != "matrix" || format != "array" || field != "real" || symmetry != "general") {
            throw ParseError(lineno, "unsupported profile '" + object + " " + format + " " + field + " " + symmetry +
                                         "', only 'matrix array real general' is accepted");
        }
    }

    std::size_t rows = 0, cols = 0;
    bool have_dims = false;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::blank(line)) continue;
        if (!have_dims) {
            if (line.front() == '%') continue;
            std::istringstream ds(line);
            long long r = 0, c = 0;
            std::string extra;
            if (!(ds >> r >> c) || (ds >> extra) || r <= 0 || c <= 0) {
                throw ParseError(lineno, "malformed dimensions line, expected two positive integers");
            }
            rows = static_cast<std::size_t>(r);
            cols = static_cast<std::size_t>(c);
            values.reserve(rows * cols);
            have_dims = true;
            continue;
        }
        const auto v = parse_double(line);
        if (!v) throw ParseError(lineno, "malformed value '" + line + "'");
        if (!std::isfinite(*v)) throw ParseError(lineno, "non-finite value '" + line + "'");
        if (values.size() == rows * cols) throw ParseError(lineno, "dimension mismatch: more values than rows * cols");
        values.push_back(*v);
    }
    if (!have_dims) throw ParseError(lineno, "missing dimensions line");
    if (values.size() != rows * cols) {
        throw ParseError(lineno, "dimension mismatch: expected " + std::to_string(rows * cols) + " values, found " +
                                     std::to_string(values.size()));
    }
    return DenseMatrix(rows, cols, std::move(values));
}

inline void write_matrix(std::ostream& out, const DenseMatrix& a) {
    out << "%%MatrixMarket matrix array real general\n";
    out << a.rows() << ' ' << a.cols() << '\n';
    for (double v : a.values()) out << format_shortest(v) << '\n';
}

inline DenseMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open matrix file '" + path + "'");
    try {
        return read_matrix(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path + ": " + e.detail());
    }
}

inline void save_matrix(const DenseMatrix& a, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_matrix(out, a);
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

} // namespace relaxir
