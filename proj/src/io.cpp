#include "deform/io.hpp"

#include <algorithm>
#include <set>

namespace deform {

Node Node::operator[](const std::string& key) const {
    if (!value_->is_object()) fail("expected an object");
    auto it = value_->find(key);
    if (it == value_->end()) fail("missing field \"" + key + "\"");
    return {*it, path_ + "/" + key};
}

Node Node::operator[](std::size_t i) const {
    if (!value_->is_array()) fail("expected an array");
    if (i >= value_->size()) fail("index " + std::to_string(i) + " out of range");
    return {(*value_)[i], path_ + "/" + std::to_string(i)};
}

std::size_t Node::size() const {
    if (!value_->is_array() && !value_->is_object()) fail("expected an array or object");
    return value_->size();
}

int Node::as_int() const {
    if (!value_->is_number_integer()) fail("expected an integer");
    auto v = value_->get<std::int64_t>();
    if (v < INT32_MIN || v > INT32_MAX) fail("integer out of range");
    return static_cast<int>(v);
}

std::string Node::as_string() const {
    if (!value_->is_string()) fail("expected a string");
    return value_->get<std::string>();
}

bool Node::as_bool() const {
    if (!value_->is_boolean()) fail("expected true or false");
    return value_->get<bool>();
}

Rational Node::as_rational() const {
    if (value_->is_number_integer()) return Rational(value_->get<std::int64_t>());
    if (!value_->is_string()) fail("expected a rational string \"p/q\"");
    try {
        return Rational::parse(value_->get<std::string>());
    } catch (const std::exception& e) {
        fail(e.what());
    }
}

Json to_json(const Rational& r) { return r.str(); }

Json to_json(const RElement& r) {
    Json out = Json::array();
    for (const auto& c : r.coeffs()) out.push_back(c.str());
    return out;
}

Json to_json(const Vec& v) {
    Json out = Json::array();
    for (const auto& c : v) out.push_back(c.str());
    return out;
}

Json to_json(const Matrix& m) {
    Json out = Json::array();
    for (int i = 0; i < m.rows(); ++i) out.push_back(to_json(Vec(m.row(i).begin(), m.row(i).end())));
    return out;
}

Json to_json(const std::vector<Violation>& v) {
    Json out = Json::array();
    for (const auto& x : v) out.push_back({{"axiom", x.axiom}, {"witness", x.witness}});
    return out;
}

RElement relement_from(const Node& n) {
    Vec c = vec_from(n);
    if (c.empty()) n.fail("an RElement needs at least one coefficient");
    return RElement(std::move(c));
}

Vec vec_from(const Node& n) {
    if (!n.value().is_array()) n.fail("expected an array of rationals");
    Vec out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(n[i].as_rational());
    return out;
}

Matrix matrix_from(const Node& n) {
    if (!n.value().is_array()) n.fail("expected an array of rows");
    std::vector<Vec> rows;
    for (std::size_t i = 0; i < n.size(); ++i) rows.push_back(vec_from(n[i]));
    int cols = rows.empty() ? 0 : static_cast<int>(rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (static_cast<int>(rows[i].size()) != cols) n[i].fail("ragged matrix");
    return Matrix::from_rows(rows, cols);
}

namespace {

Json tensor_to_json(int dim, const Vec& t) {
    Json out = Json::array();
    for (int i = 0; i < dim; ++i) {
        Json row = Json::array();
        for (int j = 0; j < dim; ++j) {
            auto begin = t.begin() + (i * dim + j) * dim;
            row.push_back(to_json(Vec(begin, begin + dim)));
        }
        out.push_back(std::move(row));
    }
    return out;
}

Vec tensor_from(const Node& n, int dim) {
    Vec out;
    if (n.size() != static_cast<std::size_t>(dim)) n.fail("expected " + std::to_string(dim) + " rows");
    for (int i = 0; i < dim; ++i) {
        Node row = n[static_cast<std::size_t>(i)];
        if (row.size() != static_cast<std::size_t>(dim)) row.fail("expected " + std::to_string(dim) + " entries");
        for (int j = 0; j < dim; ++j) {
            Vec v = vec_from(row[static_cast<std::size_t>(j)]);
            if (v.size() != static_cast<std::size_t>(dim)) row[static_cast<std::size_t>(j)].fail("expected " + std::to_string(dim) + " coordinates");
            out.insert(out.end(), v.begin(), v.end());
        }
    }
    return out;
}

int positive(const Node& n, const std::string& what) {
    int v = n.as_int();
    if (v < 1) n.fail(what + " must be positive");
    return v;
}

}  // namespace

Json to_json(const FinAlgebra& a) { return {{"dim", a.dim}, {"unit", to_json(a.unit)}, {"mult", tensor_to_json(a.dim, a.mult)}}; }

FinAlgebra algebra_from(const Node& n) {
    FinAlgebra a;
    a.dim = positive(n["dim"], "dim");
    a.unit = vec_from(n["unit"]);
    if (a.unit.size() != static_cast<std::size_t>(a.dim)) n["unit"].fail("expected " + std::to_string(a.dim) + " coordinates");
    a.mult = tensor_from(n["mult"], a.dim);
    return a;
}

Json to_json(const StarProduct& s) {
    Json out = to_json(s.algebra);
    out["N"] = s.order;
    Json corr = Json::array();
    for (const auto& b : s.corrections) corr.push_back(tensor_to_json(s.algebra.dim, b));
    out["corrections"] = std::move(corr);
    return out;
}

StarProduct star_from(const Node& n) {
    StarProduct s{algebra_from(n), positive(n["N"], "N"), {}};
    Node corr = n["corrections"];
    if (corr.size() != static_cast<std::size_t>(s.order - 1)) corr.fail("expected N - 1 = " + std::to_string(s.order - 1) + " corrections");
    for (std::size_t r = 0; r < corr.size(); ++r) s.corrections.push_back(tensor_from(corr[r], s.algebra.dim));
    return s;
}

Json to_json(const Dgla& g) {
    Json degrees = Json::object();
    for (const auto& [d, n] : g.dims()) degrees[std::to_string(d)] = n;
    Json diff = Json::array();
    for (const auto& [d, m] : g.differential_blocks()) diff.push_back({{"degree", d}, {"matrix", to_json(m)}});
    Json br = Json::array();
    for (const auto& b : g.bracket_constants())
        br.push_back({{"i", b.i}, {"j", b.j}, {"k", b.k}, {"deg_a", b.deg_a}, {"deg_b", b.deg_b}, {"c", b.c.str()}});
    return {{"degrees", degrees}, {"differential", diff}, {"bracket", br}};
}

Dgla dgla_from(const Node& n) {
    Node degrees = n["degrees"];
    if (!degrees.value().is_object() || degrees.value().empty()) degrees.fail("expected a nonempty object of dimensions");
    std::map<int, int> dims;
    for (const auto& [key, value] : degrees.value().items()) {
        std::size_t used = 0;
        int d = 0;
        try {
            d = std::stoi(key, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != key.size()) degrees.fail("degree key \"" + key + "\" is not an integer");
        int dim = degrees[key].as_int();
        if (dim < 0) degrees[key].fail("negative dimension");
        dims[d] = dim;
    }
    Dgla g(dims);
    if (n.has("differential")) {
        Node diff = n["differential"];
        for (std::size_t i = 0; i < diff.size(); ++i) {
            int d = diff[i]["degree"].as_int();
            Matrix m = matrix_from(diff[i]["matrix"]);
            if (m.rows() != g.dim_or_zero(d + 1) || m.cols() != g.dim_or_zero(d))
                diff[i]["matrix"].fail("expected a " + std::to_string(g.dim_or_zero(d + 1)) + " x " + std::to_string(g.dim_or_zero(d)) + " block");
            g.set_differential(d, std::move(m));
        }
    }
    if (n.has("bracket")) {
        Node br = n["bracket"];
        for (std::size_t i = 0; i < br.size(); ++i) {
            Node e = br[i];
            BracketConstant b{e["i"].as_int(), e["j"].as_int(), e["k"].as_int(), e["deg_a"].as_int(), e["deg_b"].as_int(),
                              e["c"].as_rational()};
            if (b.i < 0 || b.i >= g.dim_or_zero(b.deg_a) || b.j < 0 || b.j >= g.dim_or_zero(b.deg_b) || b.k < 0 ||
                b.k >= g.dim_or_zero(b.deg_a + b.deg_b))
                e.fail("index outside the basis");
            g.add_bracket(b);
        }
    }
    return g;
}

Json to_json(const DglaElement& x) {
    Json coeffs = Json::array();
    for (int i = 0; i < x.dim(); ++i) coeffs.push_back(to_json(x.coefficient(i)));
    return {{"degree", x.degree()}, {"N", x.order()}, {"coefficients", coeffs}};
}

namespace {

void check_header(const Node& n, int degree) {
    if (n["degree"].as_int() != degree) n["degree"].fail("expected degree " + std::to_string(degree));
}

}  // namespace

DglaElement element_from(const Node& n, const DglaModel& g, int degree) {
    check_header(n, degree);
    int order = positive(n["N"], "N");
    Node coeffs = n["coefficients"];
    DglaElement x = DglaElement::zero(g, degree, order);
    if (coeffs.size() != static_cast<std::size_t>(x.dim())) coeffs.fail("expected " + std::to_string(x.dim()) + " coefficients");
    for (int i = 0; i < x.dim(); ++i) {
        RElement c = relement_from(coeffs[static_cast<std::size_t>(i)]);
        if (c.order() != order) coeffs[static_cast<std::size_t>(i)].fail("expected " + std::to_string(order) + " coefficients");
        x.set_coefficient(i, c);
    }
    return x;
}

Json to_sparse_json(const DglaElement& x) {
    Json entries = Json::array();
    for (int i = 0; i < x.dim(); ++i) {
        RElement c = x.coefficient(i);
        if (!c.is_zero()) entries.push_back({i, to_json(c)});
    }
    return {{"degree", x.degree()}, {"N", x.order()}, {"dim", x.dim()}, {"entries", entries}};
}

DglaElement sparse_element_from(const Node& n, const DglaModel& g, int degree) {
    check_header(n, degree);
    int order = positive(n["N"], "N");
    DglaElement x = DglaElement::zero(g, degree, order);
    if (n.has("dim") && n["dim"].as_int() != x.dim()) n["dim"].fail("expected dimension " + std::to_string(x.dim()));
    if (!n.has("entries")) return x;
    Node entries = n["entries"];
    std::set<int> seen;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        Node e = entries[k];
        if (e.size() != 2) e.fail("expected [coordinate, RElement]");
        int i = e[0].as_int();
        if (i < 0 || i >= x.dim()) e[0].fail("coordinate outside 0.." + std::to_string(x.dim() - 1));
        if (!seen.insert(i).second) e[0].fail("repeated coordinate");
        RElement c = relement_from(e[1]);
        if (c.order() != order) e[1].fail("expected " + std::to_string(order) + " coefficients");
        x.set_coefficient(i, c);
    }
    return x;
}

Json to_json(const Cover& c) {
    const FiniteSpace& x = c.space;
    Json order = Json::array();
    for (auto [a, b] : x.covering_relations()) order.push_back({x.name(a), x.name(b)});
    Json members = Json::array();
    for (const auto& m : c.members) {
        Json names = Json::array();
        for (int p : m) names.push_back(x.name(p));
        members.push_back(std::move(names));
    }
    return {{"points", x.names()}, {"order", order}, {"cover", members}};
}

Cover cover_from(const Node& n) {
    Node points = n["points"];
    std::vector<std::string> names;
    for (std::size_t i = 0; i < points.size(); ++i) names.push_back(points[i].as_string());
    std::vector<std::pair<std::string, std::string>> less;
    if (n.has("order")) {
        Node order = n["order"];
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (order[i].size() != 2) order[i].fail("expected [smaller, larger]");
            less.emplace_back(order[i][0].as_string(), order[i][1].as_string());
        }
    }
    FiniteSpace x;
    try {
        x = FiniteSpace(names, less);
    } catch (const std::invalid_argument& e) {
        n.fail(e.what());
    }
    if (!n.has("cover")) return maximal_cover(x);
    Cover c{x, {}};
    Node cover = n["cover"];
    for (std::size_t i = 0; i < cover.size(); ++i) {
        std::vector<int> m;
        for (std::size_t k = 0; k < cover[i].size(); ++k) {
            std::string name = cover[i][k].as_string();
            try {
                m.push_back(x.index(name));
            } catch (const std::invalid_argument& e) {
                cover[i][k].fail(e.what());
            }
        }
        std::sort(m.begin(), m.end());
        c.members.push_back(std::move(m));
    }
    return c;
}

SheafData sheaf_from(const Node& n, const FiniteSpace& x) {
    SheafData f;
    Node stalks = n["stalks"];
    for (const auto& name : x.names()) {
        int d = stalks[name].as_int();
        if (d < 0) stalks[name].fail("negative dimension");
        f.stalk_dims.push_back(d);
    }
    if (!n.has("restrictions")) return f;
    Node res = n["restrictions"];
    for (std::size_t i = 0; i < res.size(); ++i) {
        int from = 0, to = 0;
        try {
            from = x.index(res[i]["from"].as_string());
            to = x.index(res[i]["to"].as_string());
        } catch (const std::invalid_argument& e) {
            res[i].fail(e.what());
        }
        f.restrictions[{to, from}] = matrix_from(res[i]["matrix"]);
    }
    return f;
}

Json to_json(const FiniteSpace& x, const NerveFunction& f) {
    Json out = Json::object();
    for (const auto& [pt, v] : f) out[nerve_key(x, pt)] = to_json(v);
    return out;
}

NerveFunction nerve_function_from(const Node& n, const Cover& c, int level, int order) {
    NerveFunction f = constant_function(c, level, RElement(order, 1));
    if (!n.value().is_object()) n.fail("expected an object keyed by \"x|i0,i1,...\"");
    for (const auto& [key, value] : n.value().items()) {
        NervePoint pt;
        try {
            pt = parse_nerve_key(c.space, key);
        } catch (const std::invalid_argument& e) {
            n[key].fail(e.what());
        }
        auto it = f.find(pt);
        if (it == f.end()) n[key].fail("not a nerve point of level " + std::to_string(level));
        RElement v = relement_from(n[key]);
        if (v.order() != order) n[key].fail("expected " + std::to_string(order) + " coefficients");
        it->second = std::move(v);
    }
    return f;
}

Json to_json(const DescentDatum& d) {
    return {{"N", d.order}, {"a01", to_json(d.cover.space, d.a01)}, {"a012", to_json(d.cover.space, d.a012)}, {"fiber", to_json(d.fiber)}};
}

DescentDatum datum_from(const Node& n, const Cover& c) {
    int order = n.has("N") ? positive(n["N"], "N") : 1;
    FinAlgebra fiber = n.has("fiber") ? algebra_from(n["fiber"]) : algebra_q();
    NerveFunction a01 = n.has("a01") ? nerve_function_from(n["a01"], c, 1, order) : constant_function(c, 1, RElement(order, 1));
    NerveFunction a012 = n.has("a012") ? nerve_function_from(n["a012"], c, 2, order) : constant_function(c, 2, RElement(order, 1));
    return make_descent_datum(c, order, std::move(a01), std::move(a012), std::move(fiber));
}

Json to_json(const GStack& s) {
    return {{"gamma0", to_sparse_json(s.gamma0)}, {"gamma1", to_sparse_json(s.gamma1)}, {"gamma2", to_sparse_json(s.gamma2)}};
}

GStack gstack_from(const Node& n, const CosimplicialDgla& g) {
    GStack s;
    s.gamma0 = sparse_element_from(n["gamma0"], g.level(0), 1);
    int order = s.gamma0.order();
    auto part = [&](const char* key, int level, int degree) {
        if (!n.has(key)) return DglaElement::zero(g.level(level), degree, order);
        DglaElement x = sparse_element_from(n[key], g.level(level), degree);
        if (x.order() != order) n[key]["N"].fail("all parts need the same N");
        return x;
    };
    s.gamma1 = part("gamma1", 1, 0);
    s.gamma2 = part("gamma2", 2, -1);
    return s;
}

Json to_json(const StackOneMorphism& j) { return {{"j1", to_sparse_json(j.j1)}, {"j2", to_sparse_json(j.j2)}}; }

}  // namespace deform
