#pragma once

#include "deform/descent.hpp"
#include "deform/stacks.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace deform {

using Json = nlohmann::json;

// Input that does not match the expected shape; `location` is a JSON pointer.
struct SchemaError : std::runtime_error {
    SchemaError(std::string location, const std::string& what)
        : std::runtime_error(location + ": " + what), location(std::move(location)) {}
    std::string location;
};

// A node of the input together with its JSON pointer, for error locations.
class Node {
public:
    Node(const Json& value, std::string path = "") : value_(&value), path_(std::move(path)) {}

    const Json& value() const { return *value_; }
    const std::string& path() const { return path_; }
    bool has(const std::string& key) const { return value_->is_object() && value_->contains(key); }
    Node operator[](const std::string& key) const;
    Node operator[](std::size_t i) const;
    std::size_t size() const;  // arrays and objects

    int as_int() const;
    std::string as_string() const;
    bool as_bool() const;
    Rational as_rational() const;
    [[noreturn]] void fail(const std::string& what) const { throw SchemaError(path_.empty() ? "/" : path_, what); }

private:
    const Json* value_;
    std::string path_;
};

Json to_json(const Rational& r);
Json to_json(const RElement& r);
Json to_json(const Vec& v);
Json to_json(const Matrix& m);
Json to_json(const std::vector<Violation>& v);

RElement relement_from(const Node& n);
Vec vec_from(const Node& n);
Matrix matrix_from(const Node& n);

// {"dim", "unit", "mult": mult[i][j] = coordinates of e_i e_j}
Json to_json(const FinAlgebra& a);
FinAlgebra algebra_from(const Node& n);
// The algebra fields plus "N" and "corrections", each shaped like "mult".
Json to_json(const StarProduct& s);
StarProduct star_from(const Node& n);

// {"degrees": {"-1": d, ...}, "differential": [{"degree", "matrix"}], "bracket": [{"i","j","k","deg_a","deg_b","c"}]}
Json to_json(const Dgla& g);
Dgla dgla_from(const Node& n);
// Dense: {"degree", "N", "coefficients": one RElement per basis vector}.
Json to_json(const DglaElement& x);
DglaElement element_from(const Node& n, const DglaModel& g, int degree);
// Sparse, for the large cosimplicial levels: {"degree", "N", "entries": [[coordinate, RElement], ...]}.
Json to_sparse_json(const DglaElement& x);
DglaElement sparse_element_from(const Node& n, const DglaModel& g, int degree);

// {"points", "order": [[x, y], ...] meaning x < y, "cover": [[point, ...], ...]}; the cover defaults to
// the maximal one.
Json to_json(const Cover& c);
Cover cover_from(const Node& n);
SheafData sheaf_from(const Node& n, const FiniteSpace& x);

Json to_json(const FiniteSpace& x, const NerveFunction& f);
// Unlisted nerve points of the level take the value 1.
NerveFunction nerve_function_from(const Node& n, const Cover& c, int level, int order);
// {"N", "a01", "a012", "fiber"}; all fields optional.
Json to_json(const DescentDatum& d);
DescentDatum datum_from(const Node& n, const Cover& c);

Json to_json(const GStack& s);
GStack gstack_from(const Node& n, const CosimplicialDgla& g);
Json to_json(const StackOneMorphism& j);

}  // namespace deform
