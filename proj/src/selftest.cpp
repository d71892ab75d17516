#include "deform/cli.hpp"
#include "deform/dgla_families.hpp"
#include "deform/hochschild_families.hpp"

#include <functional>
#include <optional>

namespace deform {

namespace {

using Counterexample = std::optional<Json>;

struct Property {
    std::string name;
    int instances;
    // `size` runs from 0 to 2 and grows with the instance index.
    std::function<Counterexample(Rng&, int size)> check;
};

Counterexample field_axioms(Rng& rng, int size) {
    int bound = 3 + 10 * size;
    Rational a = rng.rational(bound, bound), b = rng.rational(bound, bound), c = rng.nonzero_rational(bound, bound);
    Json where = {{"a", a.str()}, {"b", b.str()}, {"c", c.str()}};
    if ((a + b) * c != a * c + b * c) return where;
    if (c * c.inverse() != Rational(1)) return where;
    if (Rational::parse(a.str()) != a) return where;
    return std::nullopt;
}

Counterexample exp_log(Rng& rng, int size) {
    RElement a = rng.relement(2 + size, true);
    if (r_log(r_exp(a)) != a) return Json{{"a", to_json(a)}};
    return std::nullopt;
}

Counterexample bch_associative(Rng& rng, int size) {
    DglaInstance inst = random_dgla_instance(rng);
    int order = 2 + size;
    DglaElement x = random_element(inst.g, rng, 0, order), y = random_element(inst.g, rng, 0, order),
                z = random_element(inst.g, rng, 0, order);
    if (bch_plain(inst.g, bch_plain(inst.g, x, y), z) != bch_plain(inst.g, x, bch_plain(inst.g, y, z)))
        return Json{{"family", inst.family}, {"x", to_json(x)}, {"y", to_json(y)}, {"z", to_json(z)}};
    return std::nullopt;
}

Counterexample gauge_preserves_mc(Rng& rng, int size) {
    DglaInstance inst = random_dgla_instance(rng);
    int order = 2 + size;
    DglaElement gamma = inst.random_mc(rng, order);
    DglaElement x = random_element(inst.g, rng, 0, order);
    if (!is_mc(inst.g, gauge_act(inst.g, GaugeTransform{x}, gamma, false)))
        return Json{{"family", inst.family}, {"mc", to_json(gamma)}, {"gauge", to_json(x)}};
    return std::nullopt;
}

Counterexample gauge_composes(Rng& rng, int size) {
    DglaInstance inst = random_dgla_instance(rng);
    int order = 2 + size;
    DglaElement gamma = inst.random_mc(rng, order);
    DglaElement x = random_element(inst.g, rng, 0, order), y = random_element(inst.g, rng, 0, order);
#ifdef DEFORM_PLANTED_BUG
    DglaElement xy = bch_plain(inst.g, y, x);
#else
    DglaElement xy = bch_plain(inst.g, x, y);
#endif
    DglaElement once = gauge_act(inst.g, GaugeTransform{xy}, gamma);
    DglaElement twice = gauge_act(inst.g, GaugeTransform{x}, gauge_act(inst.g, GaugeTransform{y}, gamma));
    if (once != twice) return Json{{"family", inst.family}, {"mc", to_json(gamma)}, {"x", to_json(x)}, {"y", to_json(y)}};
    return std::nullopt;
}

Counterexample hochschild_square_zero(Rng& rng, int size) {
    HochschildDgla g(random_algebra(rng, 1 + size), 3);
    for (int arity : {0, 1}) {
        DglaElement d = random_cochain(g, rng, arity, 2);
        if (!hochschild_diff(g, hochschild_diff(g, d)).is_zero())
            return Json{{"algebra", to_json(g.algebra())}, {"cochain", to_json(d)}};
    }
    return std::nullopt;
}

Counterexample star_iff_mc(Rng& rng, int size) {
    HochschildDgla g(random_algebra(rng, 1 + size), 3);
    bool associative = g.algebra().dim == 1 || rng.coin();
    StarProduct s = planted_star_product(g, rng, 2 + size, associative);
    if (is_mc(g, mu_from_star(g, s)) != !associativity_defect(s)) return Json{{"star", to_json(s)}};
    return std::nullopt;
}

Counterexample cosimplicial_square_zero(Rng& rng, int size) {
    CosimplicialVS v = random_cosimplicial(rng, 3, 1 + size);
    if (!v.validate().empty()) return Json{{"dims", v.dims()}, {"law", "cosimplicial identities"}};
    for (int n = 0; n + 2 <= v.top(); ++n)
        if (!(cochain_differential_matrix(v, n + 1) * cochain_differential_matrix(v, n)).is_zero())
            return Json{{"dims", v.dims()}, {"level", n}};
    return std::nullopt;
}

Counterexample coboundary_class_trivial(Rng& rng, int size) {
    Cover c = size == 0 ? maximal_cover(FiniteSpace::discrete(2)) : pseudocircle_cover();
    int order = 1 + size;
    Nerve nerve(c);
    std::map<int, RElement> per_cell;
    NerveFunction phi;
    for (auto& pt : build_nerve(c, 1)) {
        int cell = nerve.cell_of(pt);
        if (!per_cell.count(cell)) {
            RElement v = rng.relement(order, true);
            v[0] = rng.nonzero_rational();
            per_cell.emplace(cell, std::move(v));
        }
        phi.emplace(std::move(pt), per_cell.at(cell));
    }
    NerveFunction a012 = multiplicative_coboundary(c, phi, 1);
    DescentDatum d = make_descent_datum(c, order, constant_function(c, 1, RElement(order, 1)), a012);
    auto v = validate_descent_datum(d);
    if (!v.empty()) return Json{{"phi", to_json(c.space, phi)}, {"violations", to_json(v)}};
    if (!twisted_form_class(d).trivial) return Json{{"phi", to_json(c.space, phi)}};
    return std::nullopt;
}

Counterexample strictify_valid(Rng& rng, int size) {
    static const CosimplicialG g(trivial_datum(pseudocircle_cover()), GCaps{3, 1, 3});
    RandomStack r = random_gstack(g, 2 + size / 2, rng);
    StrictifyResult res = strictify(g, r.stack);
    if (!is_strict(g, res.strict) || !validate_gstack(g, res.strict).empty() ||
        !validate_one_morphism(g, r.stack, res.strict, res.morphism).empty())
        return Json{{"stack", to_json(r.stack)}};
    return std::nullopt;
}

const std::vector<Property>& properties() {
    static const std::vector<Property> all{
        {"rational: field axioms and parsing", 200, field_axioms},
        {"artin: log inverts exp", 60, exp_log},
        {"dgla: BCH is associative", 30, bch_associative},
        {"dgla: gauge action preserves Maurer-Cartan elements", 30, gauge_preserves_mc},
        {"dgla: gauge action composes along BCH", 30, gauge_composes},
        {"hochschild: the differential squares to zero", 20, hochschild_square_zero},
        {"hochschild: associative iff Maurer-Cartan", 20, star_iff_mc},
        {"simplicial: cosimplicial identities and d^2 = 0", 20, cosimplicial_square_zero},
        {"descent: coboundary twists have trivial class", 10, coboundary_class_trivial},
        {"stacks: strictify returns a strict stack and a 1-morphism", 3, strictify_valid},
    };
    return all;
}

}  // namespace

Report selftest(const JobSpec& job) {
    Report r;
    Json results = Json::array();
    for (std::size_t p = 0; p < properties().size(); ++p) {
        const Property& prop = properties()[p];
        Json entry = {{"property", prop.name}, {"instances", 0}, {"passed", true}};
        for (int i = 0; i < prop.instances; ++i) {
            Rng rng(job.seed * 1000003u + p * 7919u + static_cast<std::uint64_t>(i));
            Counterexample bad;
            try {
                bad = prop.check(rng, 3 * i / prop.instances);
            } catch (const std::exception& e) {
                bad = Json{{"exception", e.what()}};
            }
            entry["instances"] = i + 1;
            if (bad) {
                entry["passed"] = false;
                entry["counterexample"] = {{"instance", i}, {"data", *bad}};
                r.witnesses.push_back({prop.name, "instance " + std::to_string(i) + ": " + bad->dump()});
                break;
            }
        }
        results.push_back(std::move(entry));
    }
    r.payload["properties"] = results;
    r.payload["seed"] = job.seed;
    if (!r.witnesses.empty()) r.status = "violations";
    return r;
}

}  // namespace deform
