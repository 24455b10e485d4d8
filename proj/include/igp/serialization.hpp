#pragma once

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "igp/core.hpp"

namespace igp {

using nlohmann::json;

/// Matrix wire format: {"dim": d, "re": [[...]], "im": [[...]]} with
/// row-major nested arrays.
inline json matrix_to_json(const CMatrix& m) {
    require_square(m, "matrix_to_json");
    const int d = static_cast<int>(m.rows());
    json re = json::array();
    json im = json::array();
    for (int i = 0; i < d; ++i) {
        json rrow = json::array();
        json irow = json::array();
        for (int j = 0; j < d; ++j) {
            rrow.push_back(m(i, j).real());
            irow.push_back(m(i, j).imag());
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    return json{{"dim", d}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline CMatrix matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("re") || !j.contains("im")) {
        throw ParseError("matrix: expected object with fields dim, re, im");
    }
    int d = 0;
    try {
        d = j.at("dim").get<int>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("matrix: bad dim field: ") + e.what());
    }
    if (d < 1) {
        throw ParseError("matrix: dim must be >= 1, got " + std::to_string(d));
    }
    const json& re = j.at("re");
    const json& im = j.at("im");
    if (!re.is_array() || !im.is_array() || static_cast<int>(re.size()) != d ||
        static_cast<int>(im.size()) != d) {
        throw ParseError("matrix: re/im must be " + std::to_string(d) + " rows");
    }
    CMatrix m(d, d);
    for (int i = 0; i < d; ++i) {
        const json& rrow = re.at(i);
        const json& irow = im.at(i);
        if (!rrow.is_array() || !irow.is_array() || static_cast<int>(rrow.size()) != d ||
            static_cast<int>(irow.size()) != d) {
            throw ParseError("matrix: row " + std::to_string(i) + " must hold " +
                             std::to_string(d) + " numbers");
        }
        for (int jj = 0; jj < d; ++jj) {
            double x = 0.0;
            double y = 0.0;
            try {
                x = rrow.at(jj).get<double>();
                y = irow.at(jj).get<double>();
            } catch (const json::exception& e) {
                throw ParseError("matrix: entry (" + std::to_string(i) + "," +
                                 std::to_string(jj) + "): " + e.what());
            }
            m(i, jj) = Complex(x, y);
        }
    }
    if (!all_finite(m)) {
        throw ParseError("matrix: non-finite entry");
    }
    return m;
}

inline CMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open matrix file: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("matrix file " + path + ": " + e.what());
    }
    return matrix_from_json(j);
}

inline void save_matrix(const std::string& path, const CMatrix& m) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open output file: " + path);
    }
    out << matrix_to_json(m).dump(2) << "\n";
}

} // namespace igp
