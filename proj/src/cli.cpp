#include "deform/cli.hpp"

#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

namespace deform {

Json Report::to_json() const {
    return {{"command", command}, {"status", status}, {"payload", payload}, {"witnesses", deform::to_json(witnesses)}};
}

std::string Report::dump() const { return to_json().dump(2) + "\n"; }

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names{"validate", "mc", "gauge", "hochschild", "cech",
                                                "class", "strictify", "classify", "selftest"};
    return names;
}

namespace {

void check_order(const JobSpec& job, int order, const std::string& where) {
    if (order > job.n_order_cap)
        throw CapError("N", where + " has N = " + std::to_string(order) + " above the cap --N " + std::to_string(job.n_order_cap));
}

void require_cap(const char* name, int value, int needed, const std::string& why) {
    if (value < needed)
        throw CapError(name, why + " needs --" + std::string(name) + " >= " + std::to_string(needed) + ", got " + std::to_string(value));
}

void finish(Report& r, std::vector<Violation> v) {
    r.witnesses.insert(r.witnesses.end(), v.begin(), v.end());
    if (!r.witnesses.empty()) r.status = "violations";
}

DescentDatum read_datum(const JobSpec& job, const Node& in, const Cover& c) {
    DescentDatum d = in.has("datum") ? datum_from(in["datum"], c) : trivial_datum(c);
    check_order(job, d.order, "datum");
    return d;
}

// Cover and datum checks that must pass before anything is built on them.
std::vector<Violation> datum_violations(const DescentDatum& d) {
    auto v = validate_cover(d.cover);
    if (!v.empty()) return v;
    v = validate_algebra(d.fiber);
    if (!v.empty()) return v;
    return validate_descent_datum(d);
}

std::unique_ptr<CosimplicialG> build_g(const JobSpec& job, const Node& in, const DescentDatum& d) {
    if (d.order != 1) in["datum"]["N"].fail("the cosimplicial DGLA is built from a datum over Q; use N = 1");
    return std::make_unique<CosimplicialG>(d, GCaps{job.n_cap, job.d_cap, job.arity_cap});
}

void require_stack_caps(const JobSpec& job) {
    require_cap("n-cap", job.n_cap, 3, "the stack cocycle condition");
    require_cap("arity-cap", job.arity_cap, 3, "the Maurer-Cartan equation");
}

Report validate(const JobSpec& job, const Node& in) {
    Report r;
    if (in.has("stack") || in.has("datum")) {
        Cover c = cover_from(in["space"]);
        DescentDatum d = read_datum(job, in, c);
        auto v = datum_violations(d);
        if (!in.has("stack") || !v.empty()) {
            r.payload["kind"] = in.has("stack") ? "stack" : "datum";
            finish(r, v);
            return r;
        }
        require_stack_caps(job);
        auto g = build_g(job, in, d);
        GStack s = gstack_from(in["stack"], *g);
        check_order(job, s.order(), "stack");
        r.payload["kind"] = "stack";
        r.payload["strict"] = is_strict(*g, s);
        finish(r, validate_gstack(*g, s));
    } else if (in.has("space")) {
        Cover c = cover_from(in["space"]);
        auto v = validate_cover(c);
        r.payload["kind"] = "cover";
        if (v.empty() && in.has("sheaf")) {
            r.payload["kind"] = "sheaf";
            v = validate_sheaf(c.space, sheaf_from(in["sheaf"], c.space));
        }
        finish(r, v);
    } else if (in.has("star")) {
        StarProduct s = star_from(in["star"]);
        check_order(job, s.order, "star");
        r.payload["kind"] = "star";
        auto v = validate_algebra(s.algebra);
        if (v.empty())
            if (auto w = associativity_defect(s))
                v.push_back({"associativity", "(e" + std::to_string(w->i) + " * e" + std::to_string(w->j) + ") * e" + std::to_string(w->k) +
                                                  " - e" + std::to_string(w->i) + " * (e" + std::to_string(w->j) + " * e" + std::to_string(w->k) +
                                                  ") = " + to_json(w->defect).dump()});
        finish(r, v);
    } else if (in.has("algebra")) {
        r.payload["kind"] = "algebra";
        finish(r, validate_algebra(algebra_from(in["algebra"])));
    } else if (in.has("dgla")) {
        r.payload["kind"] = "dgla";
        finish(r, validate_dgla(dgla_from(in["dgla"])));
    } else {
        in.fail("expected one of \"stack\", \"datum\", \"space\", \"star\", \"algebra\", \"dgla\"");
    }
    return r;
}

Report mc(const JobSpec& job, const Node& in) {
    Report r;
    if (in.has("star")) {
        StarProduct s = star_from(in["star"]);
        check_order(job, s.order, "star");
        require_cap("arity-cap", job.arity_cap, 3, "the bracket of two products");
        finish(r, validate_algebra(s.algebra));
        if (!r.witnesses.empty()) return r;
        HochschildDgla h(s.algebra, job.arity_cap);
        DglaElement res = mc_residual(h, mu_from_star(h, s));
        r.payload["residual"] = to_sparse_json(res);
        r.payload["is_mc"] = res.is_zero();
        if (auto w = associativity_defect(s))
            finish(r, {{"Maurer-Cartan", "associator on (e" + std::to_string(w->i) + ", e" + std::to_string(w->j) + ", e" +
                                             std::to_string(w->k) + ") = " + to_json(w->defect).dump()}});
        return r;
    }
    Dgla g = dgla_from(in["dgla"]);
    DglaElement x = element_from(in["element"], g, 1);
    check_order(job, x.order(), "element");
    DglaElement res = mc_residual(g, x);
    r.payload["residual"] = to_json(res);
    r.payload["is_mc"] = res.is_zero();
    for (int i = 0; i < res.dim(); ++i)
        if (!res.coefficient(i).is_zero()) {
            finish(r, {{"Maurer-Cartan", "residual coefficient " + std::to_string(i) + " = " + to_json(res.coefficient(i)).dump()}});
            break;
        }
    return r;
}

Report gauge(const JobSpec& job, const Node& in) {
    Report r;
    Dgla g = dgla_from(in["dgla"]);
    DglaElement x = element_from(in["mc"], g, 1);
    DglaElement a = element_from(in["gauge"], g, 0);
    check_order(job, x.order(), "mc");
    if (a.order() != x.order()) in["gauge"]["N"].fail("must match the N of \"mc\"");
    if (!a.in_maximal_ideal()) in["gauge"].fail("coefficients must lie in the maximal ideal (zero constant terms)");
    if (!is_mc(g, x)) {
        finish(r, {{"Maurer-Cartan", "the input \"mc\" is not a Maurer-Cartan element"}});
        return r;
    }
    DglaElement y = gauge_act(g, GaugeTransform{a}, x);
    r.payload["result"] = to_json(y);
    if (in.has("target")) {
        DglaElement t = element_from(in["target"], g, 1);
        r.payload["matches_target"] = t == y;
        if (t != y) finish(r, {{"conjugation", "exp(gauge) . mc differs from target"}});
    }
    return r;
}

Report hochschild(const JobSpec& job, const Node& in) {
    Report r;
    FinAlgebra a = algebra_from(in["algebra"]);
    int n_max = in.has("n_max") ? in["n_max"].as_int() : job.arity_cap - 1;
    if (n_max < 0) in["n_max"].fail("must be nonnegative");
    require_cap("arity-cap", job.arity_cap, n_max + 1, "HH^" + std::to_string(n_max));
    finish(r, validate_algebra(a));
    if (!r.witnesses.empty()) return r;
    HochschildDims dims = hochschild_cohomology(a, n_max);
    r.payload["full"] = dims.full;
    r.payload["normalized"] = dims.normalized;
    return r;
}

Report cech(const JobSpec& job, const Node& in) {
    Report r;
    Cover c = cover_from(in["space"]);
    int n_max = in.has("n_max") ? in["n_max"].as_int() : std::min(2, job.n_cap);
    if (n_max < 0) in["n_max"].fail("must be nonnegative");
    require_cap("n-cap", job.n_cap, n_max, "H^" + std::to_string(n_max));
    SheafData f = in.has("sheaf") ? sheaf_from(in["sheaf"], c.space) : constant_sheaf(c.space);
    auto v = validate_cover(c);
    if (v.empty()) v = validate_sheaf(c.space, f);
    finish(r, v);
    if (!r.witnesses.empty()) return r;
    r.payload["dims"] = cech_cohomology(c, f, n_max);
    return r;
}

Json function_or_null(const FiniteSpace& x, const std::optional<NerveFunction>& f) { return f ? to_json(x, *f) : Json(); }

Report twisted_class(const JobSpec& job, const Node& in) {
    Report r;
    Cover c = cover_from(in["space"]);
    DescentDatum d = read_datum(job, in, c);
    finish(r, datum_violations(d));
    if (!r.witnesses.empty()) return r;
    TwistedFormClass cls = twisted_form_class(d);
    r.payload["trivial"] = cls.trivial;
    r.payload["cocycle"] = to_json(c.space, cls.cocycle);
    r.payload["trivialization"] = function_or_null(c.space, cls.trivialization);
    Json obs = Json::array();
    for (const auto& o : cls.obstructions)
        obs.push_back({{"part", o.part}, {"functional", to_json(o.functional)}, {"modulus", o.modulus.str()}, {"value", o.value.str()}});
    r.payload["obstructions"] = obs;
    return r;
}

Json trace_json(const StrictifyResult& res) {
    Json out = Json::array();
    for (const auto& s : res.trace)
        out.push_back({{"phase", s.phase}, {"order", s.order}, {"residual_l1", s.residual_l1.str()}, {"support", s.support}});
    return out;
}

Report strictify_job(const JobSpec& job, const Node& in) {
    Report r;
    Cover c = cover_from(in["space"]);
    DescentDatum d = read_datum(job, in, c);
    finish(r, datum_violations(d));
    if (!r.witnesses.empty()) return r;
    require_stack_caps(job);
    auto g = build_g(job, in, d);
    GStack s;
    if (in.has("stack")) {
        s = gstack_from(in["stack"], *g);
    } else if (in.has("random")) {
        int order = in["random"]["N"].as_int();
        if (order < 1) in["random"]["N"].fail("N must be positive");
        check_order(job, order, "random");
        Rng rng(job.seed);
        s = random_gstack(*g, order, rng).stack;
        r.payload["input"] = to_json(s);
    } else {
        in.fail("expected \"stack\" or \"random\"");
    }
    check_order(job, s.order(), "stack");
    finish(r, validate_gstack(*g, s));
    if (!r.witnesses.empty()) return r;
    StrictifyResult res = strictify(*g, s);
    r.payload["iterations"] = res.trace.size();
    r.payload["rounds"] = {{"phase1", res.rounds(1)}, {"phase2", res.rounds(2)}};
    r.payload["trace"] = trace_json(res);
    r.payload["strict"] = to_json(res.strict);
    r.payload["morphism"] = to_json(res.morphism);
    auto v = validate_gstack(*g, res.strict);
    if (!is_strict(*g, res.strict)) v.push_back({"strictness", "output has nonzero gamma1 or gamma2"});
    auto w = validate_one_morphism(*g, s, res.strict, res.morphism);
    v.insert(v.end(), w.begin(), w.end());
    finish(r, v);
    return r;
}

Report classify(const JobSpec& job, const Node& in) {
    Report r;
    Cover c = cover_from(in["space"]);
    DescentDatum d = read_datum(job, in, c);
    finish(r, datum_violations(d));
    if (!r.witnesses.empty()) return r;
    require_cap("arity-cap", job.arity_cap, 3, "degree 2 of the equalizer");
    require_cap("n-cap", job.n_cap, 1, "the equalizer");
    auto g = build_g(job, in, d);
    FirstOrderClasses cls = classify_first_order(*g);
    r.payload["count"] = cls.count;
    Json reps = Json::array();
    for (const auto& v : cls.representatives) {
        Json entries = Json::array();
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!v[i].is_zero()) entries.push_back({i, v[i].str()});
        reps.push_back(std::move(entries));
    }
    r.payload["representatives"] = reps;
    return r;
}

Report error_report(const std::string& kind, const std::string& message) {
    Report r;
    r.status = "error";
    r.payload = {{"error", kind}, {"message", message}};
    return r;
}

Report dispatch(const JobSpec& job, const Json& input) {
    Node in(input);
    if (!input.is_object()) in.fail("expected a JSON object");
    const std::string& c = job.command;
    if (c == "validate") return validate(job, in);
    if (c == "mc") return mc(job, in);
    if (c == "gauge") return gauge(job, in);
    if (c == "hochschild") return hochschild(job, in);
    if (c == "cech") return cech(job, in);
    if (c == "class") return twisted_class(job, in);
    if (c == "strictify") return strictify_job(job, in);
    if (c == "classify") return classify(job, in);
    throw std::invalid_argument("unknown command " + c);
}

void check_caps(const JobSpec& job) {
    for (auto [name, value] : {std::pair{"N", job.n_order_cap}, {"n-cap", job.n_cap}, {"d-cap", job.d_cap}, {"arity-cap", job.arity_cap}})
        if (value < 1) throw CapError(name, std::string("--") + name + " must be positive");
}

Report guarded(const JobSpec& job, const std::function<Report()>& body) {
    Report r;
    try {
        check_caps(job);
        r = body();
    } catch (const SchemaError& e) {
        r = error_report("schema", e.what());
        r.payload["location"] = e.location;
    } catch (const CapError& e) {
        r = error_report("cap", e.what());
        r.payload["cap"] = e.cap;
    } catch (const CosimplicialSolveError& e) {
        r = error_report("acyclicity", e.what());
        r.payload["certificate"] = to_json(e.certificate);
    } catch (const std::exception& e) {
        r = error_report("failure", e.what());
    }
    r.command = job.command;
    r.payload["options"] = {{"N", job.n_order_cap}, {"n_cap", job.n_cap}, {"d_cap", job.d_cap},
                            {"arity_cap", job.arity_cap}, {"seed", job.seed}};
    return r;
}

}  // namespace

Report run(const JobSpec& job, const Json& input) {
    if (job.command == "selftest") return guarded(job, [&] { return selftest(job); });
    return guarded(job, [&] { return dispatch(job, input); });
}

Report run(const JobSpec& job) {
    if (job.command == "selftest") return guarded(job, [&] { return selftest(job); });
    return guarded(job, [&] {
        std::ifstream f(job.input_path);
        if (!f) throw std::runtime_error("cannot open " + job.input_path);
        Json input;
        try {
            input = Json::parse(f);
        } catch (const Json::parse_error& e) {
            throw SchemaError("byte " + std::to_string(e.byte), e.what());
        }
        return dispatch(job, input);
    });
}

}  // namespace deform
