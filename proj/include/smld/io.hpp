#pragma once

// JSON forms of the domain objects. Parsers report schema problems as
// ValidationError with the JSON path of the offending field.

#include <json.hpp>

#include <string>

#include "smld/errors.hpp"
#include "smld/exp_poly.hpp"
#include "smld/orbit.hpp"
#include "smld/return_set.hpp"

namespace smld {

using Json = nlohmann::json;

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error("ParseError", what) {}
};

class ValidationError : public Error {
public:
    ValidationError(const std::string& path, const std::string& what)
        : Error("ValidationError", (path.empty() ? std::string(".") : path) + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

Json parse_json(const std::string& text);

// Deterministic text: sorted keys, integers as integers, other numbers with
// 17 significant digits.
std::string render_json(const Json& j, int indent = 2);

// path is the location of j inside the document, used in diagnostics.
double number_from_json(const Json& j, const std::string& path);
long integer_from_json(const Json& j, const std::string& path);
const Json& field(const Json& obj, const std::string& key, const std::string& path);

Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Matrix matrix_from_json(const Json& j, const std::string& path);
Vector vector_from_json(const Json& j, const std::string& path);

Json to_json(const Germ& g);
Germ germ_from_json(const Json& j, const std::string& path);

Json to_json(const MonomialMap& m);
MonomialMap monomial_map_from_json(const Json& j, const std::string& path);

Json to_json(const Factor& f);
Factor factor_from_json(const Json& j, const std::string& path);

// {"factors": [...]} plus "a" when a point is given.
Json to_json(const ProductSystem& s, const Vector* a = nullptr);
ProductSystem system_from_json(const Json& j, const std::string& path);

Json to_json(const ExpPoly& ep);
ExpPoly exp_poly_from_json(const Json& j, const std::string& path);

Json to_json(const Recurrence& r);
Recurrence recurrence_from_json(const Json& j, const std::string& path);

Json to_json(const Variety& H);
Variety variety_from_json(const Json& j, const std::string& path);

Json to_json(const ClassVerdict& v);
Json to_json(const ReturnSetDecomposition& d);
ReturnSetDecomposition decomposition_from_json(const Json& j, const std::string& path);

} // namespace smld
