#pragma once

// On-disk matrix sets and result records.
//
// Input (MatrixSetFile):
//   {
//     "matrices": [ [[1, 0], [0, 2]], [[2, [0.5, 0.1]], [[0.5, -0.1], 3]] ],
//     "weights":  [0.25, 0.75],      // optional, normalized on load
//     "mean":     "geometric",       // optional
//     "alpha":    0.5                // optional
//   }
// Entries are real numbers or [re, im] pairs.
//
// Output records are JSON objects with keys "op", "inputs", "result" and an
// optional "report". Floating point values are written with 17 significant
// digits so that records round-trip losslessly.

#include "opmean/divergence.hpp"
#include "opmean/errors.hpp"
#include "opmean/matcore.hpp"
#include "opmean/means.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace opmean::io {

using Json = nlohmann::ordered_json;

/// Invalid input file. The message starts with the offending field, e.g. "matrices[1]: ...".
class ValidationError : public Error {
public:
    using Error::Error;
};

struct MatrixSetFile {
    std::vector<PDMatrix> matrices;
    std::optional<WeightVector> weights;
    std::optional<std::string> mean;
    std::optional<double> alpha;
    bool complex_encoding = false;  ///< any entry was given as an [re, im] pair
    std::vector<std::string> warnings;

    [[nodiscard]] WeightVector weights_or_uniform() const
    {
        return weights ? *weights : WeightVector::uniform(matrices.size());
    }
};

namespace detail {

inline std::string index_path(const std::string& field, std::size_t i)
{
    return field + "[" + std::to_string(i) + "]";
}

inline Complex parse_entry(const Json& e, const std::string& where, bool& complex_seen)
{
    if (e.is_number()) {
        return {e.get<double>(), 0.0};
    }
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        complex_seen = true;
        return {e[0].get<double>(), e[1].get<double>()};
    }
    throw ValidationError(where + ": expected a number or a [re, im] pair");
}

inline CMatrix parse_matrix(const Json& m, const std::string& where, bool& complex_seen)
{
    if (!m.is_array() || m.empty()) {
        throw ValidationError(where + ": expected a non-empty list of rows");
    }
    const auto n = static_cast<Index>(m.size());
    CMatrix out(n, n);
    for (std::size_t r = 0; r < m.size(); ++r) {
        const Json& row = m[r];
        if (!row.is_array() || row.size() != m.size()) {
            throw ValidationError(where + ": not square (row " + std::to_string(r) + " has " +
                                  std::to_string(row.is_array() ? row.size() : 0) + " entries, expected " +
                                  std::to_string(m.size()) + ")");
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            out(static_cast<Index>(r), static_cast<Index>(c)) = parse_entry(
                row[c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]", complex_seen);
        }
    }
    if (!out.allFinite()) {
        throw ValidationError(where + ": non-finite entry");
    }
    return out;
}

} // namespace detail

/// Relative asymmetry ||M - M*||_F / max(1, ||M||_F) accepted before symmetrization.
inline constexpr double kHermitianTolerance = 1e-8;

inline MatrixSetFile parse_matrix_set(const Json& doc)
{
    if (!doc.is_object()) {
        throw ValidationError("input: expected a JSON object");
    }
    MatrixSetFile out;
    if (!doc.contains("matrices") || !doc["matrices"].is_array()) {
        throw ValidationError("matrices: missing or not a list");
    }
    const Json& mats = doc["matrices"];
    if (mats.empty()) {
        throw ValidationError("matrices: empty list");
    }
    for (std::size_t i = 0; i < mats.size(); ++i) {
        const std::string where = detail::index_path("matrices", i);
        const CMatrix m = detail::parse_matrix(mats[i], where, out.complex_encoding);
        if (i > 0 && m.rows() != out.matrices.front().dim()) {
            throw ValidationError(where + ": dimension " + std::to_string(m.rows()) +
                                  " does not match matrices[0] dimension " +
                                  std::to_string(out.matrices.front().dim()));
        }
        const double asym = CMatrix(m - m.adjoint()).norm();
        if (asym > kHermitianTolerance * std::max(1.0, m.norm())) {
            throw ValidationError(where + ": not Hermitian (||M - M*||_F = " + std::to_string(asym) + ")");
        }
        try {
            out.matrices.emplace_back(m);
        } catch (const NotPositiveDefinite&) {
            const double lmin = eigensystem(HermitianMatrix(m)).eigenvalues(0);
            throw ValidationError(where + ": not positive definite (smallest eigenvalue " +
                                  std::to_string(lmin) + ")");
        }
    }

    if (doc.contains("weights")) {
        const Json& w = doc["weights"];
        if (!w.is_array()) {
            throw ValidationError("weights: expected a list of numbers");
        }
        if (w.size() != mats.size()) {
            throw ValidationError("weights: length " + std::to_string(w.size()) + " does not match " +
                                  std::to_string(mats.size()) + " matrices");
        }
        std::vector<double> raw;
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (!w[j].is_number()) {
                throw ValidationError(detail::index_path("weights", j) + ": expected a number");
            }
            raw.push_back(w[j].get<double>());
            if (!(raw.back() > 0.0)) {
                throw ValidationError(detail::index_path("weights", j) + ": must be positive, got " +
                                      std::to_string(raw.back()));
            }
        }
        out.weights.emplace(raw);
        if (out.weights->renormalized()) {
            out.warnings.push_back("weights: sum differs from 1, normalized");
        }
    }

    if (doc.contains("mean")) {
        if (!doc["mean"].is_string()) {
            throw ValidationError("mean: expected a string");
        }
        out.mean = doc["mean"].get<std::string>();
    }

    if (doc.contains("alpha")) {
        if (!doc["alpha"].is_number()) {
            throw ValidationError("alpha: expected a number");
        }
        out.alpha = doc["alpha"].get<double>();
    }
    return out;
}

inline MatrixSetFile load_matrix_set(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("input: cannot open '" + path + "'");
    }
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(std::string("input: malformed JSON (") + e.what() + ")");
    }
    return parse_matrix_set(doc);
}

/// Rows of real numbers, or rows of [re, im] pairs when complex_encoding is set.
inline Json encode_matrix(const HermitianMatrix& m, bool complex_encoding)
{
    Json rows = Json::array();
    for (Index r = 0; r < m.dim(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.dim(); ++c) {
            const Complex z = m(r, c);
            if (complex_encoding) {
                row.push_back(Json::array({z.real(), z.imag()}));
            } else {
                row.push_back(z.real());
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json encode_divergence(const DivergenceValue& v)
{
    return v.finite() ? Json(v.value()) : Json("inf");
}

namespace detail {

inline std::string format_double(double x)
{
    if (std::isnan(x)) {
        return "\"nan\"";
    }
    if (std::isinf(x)) {
        return x > 0 ? "\"inf\"" : "\"-inf\"";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    if (s.find_first_of(".eE") == std::string::npos) {
        s += ".0";
    }
    return s;
}

inline bool is_flat(const Json& j)
{
    for (const auto& e : j) {
        if (e.is_structured() && !(e.is_array() && e.size() <= 2 && is_flat(e))) {
            return false;
        }
    }
    return true;
}

inline void emit(const Json& j, std::string& out, int indent)
{
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
    case Json::value_t::number_float:
        out += format_double(j.get<double>());
        return;
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        if (is_flat(j)) {
            out += "[";
            bool first = true;
            for (const auto& e : j) {
                out += first ? "" : ", ";
                emit(e, out, indent);
                first = false;
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            out += inner;
            emit(j[i], out, indent + 1);
            out += i + 1 < j.size() ? ",\n" : "\n";
        }
        out += pad + "]";
        return;
    }
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        std::size_t i = 0;
        for (auto it = j.begin(); it != j.end(); ++it, ++i) {
            out += inner + Json(it.key()).dump() + ": ";
            emit(it.value(), out, indent + 1);
            out += i + 1 < j.size() ? ",\n" : "\n";
        }
        out += pad + "}";
        return;
    }
    default:
        out += j.dump();
        return;
    }
}

} // namespace detail

/// Indented JSON with every double written as %.17g.
inline std::string dump_record(const Json& record)
{
    std::string out;
    detail::emit(record, out, 0);
    out += "\n";
    return out;
}

/// Parses a matrix encoded by encode_matrix back into a Hermitian matrix.
inline HermitianMatrix decode_matrix(const Json& m)
{
    bool complex_seen = false;
    return HermitianMatrix(detail::parse_matrix(m, "matrix", complex_seen));
}

} // namespace opmean::io
