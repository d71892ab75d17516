#include <doctest.h>

#include "deform/cli.hpp"
#include "deform/dgla_families.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace deform;

namespace {

std::string data(const std::string& name) {
    const char* dir = std::getenv("DEFORM_DATA");
    REQUIRE(dir != nullptr);
    return std::string(dir) + "/" + name;
}

Report run_on(const std::string& command, const std::string& file, JobSpec job = {}) {
    job.command = command;
    job.input_path = data(file);
    return run(job);
}

bool has_float(const Json& j) {
    if (j.is_number_float()) return true;
    if (j.is_structured())
        for (const auto& x : j)
            if (has_float(x)) return true;
    return false;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Runs the binary, writing the report to `out`; returns the exit code.
int invoke(const std::string& args, const std::string& out) {
    const char* bin = std::getenv("DEFORM_BIN");
    REQUIRE(bin != nullptr);
    int status = std::system((std::string(bin) + " " + args + " --out " + out + " 2>/dev/null").c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::vector<int> ints(const Json& j) { return j.get<std::vector<int>>(); }

}  // namespace

TEST_CASE("mc on star products") {
    Report ok = run_on("mc", "star_square_is_t.json");
    CHECK(ok.status == "ok");
    CHECK(ok.exit_code() == 0);
    CHECK(ok.payload["is_mc"] == true);
    CHECK(ok.payload["residual"]["entries"].empty());

    Report bad = run_on("mc", "star_broken_unit.json");
    CHECK(bad.exit_code() == 1);
    REQUIRE(bad.witnesses.size() == 1);
    CHECK(bad.witnesses[0].witness.find("(e0, e0, e1)") != std::string::npos);
    CHECK(bad.payload["residual"]["entries"].size() == 1);
}

TEST_CASE("mc and gauge on a dgla") {
    CHECK(run_on("mc", "dgla_mc.json").status == "ok");
    Report bad = run_on("mc", "dgla_not_mc.json");
    CHECK(bad.status == "violations");
    CHECK(bad.payload["residual"]["coefficients"][0] == Json{"0", "1", "1"});

    Report g = run_on("gauge", "dgla_gauge.json");
    CHECK(g.status == "ok");
    CHECK(g.payload["matches_target"] == true);

    // The result is again Maurer-Cartan: u + v + u v = 0 for this quadric.
    Json in = Json::parse(slurp(data("dgla_gauge.json")));
    Dgla q = dgla_from(Node(in["dgla"]));
    DglaElement y = element_from(Node(g.payload["result"]), q, 1);
    RElement u = y.coefficient(0), v = y.coefficient(1);
    CHECK((u + v + u * v).is_zero());
}

TEST_CASE("hochschild, cech and twisted-form classes") {
    Report h = run_on("hochschild", "algebra_dual.json");
    CHECK(ints(h.payload["full"]) == std::vector<int>{2, 1, 1});
    CHECK(ints(h.payload["normalized"]) == std::vector<int>{2, 1, 1});

    Report c = run_on("cech", "pseudocircle.json");
    CHECK(ints(c.payload["dims"]) == std::vector<int>{1, 1, 0});

    Report sphere = run_on("class", "sphere_sign.json");
    CHECK(sphere.status == "ok");
    CHECK(sphere.payload["trivial"] == false);
    CHECK(sphere.payload["trivialization"].is_null());
    REQUIRE(sphere.payload["obstructions"].size() == 1);
    CHECK(sphere.payload["obstructions"][0]["part"] == "sign");

    Report cob = run_on("class", "pseudocircle_coboundary.json");
    CHECK(cob.payload["trivial"] == true);
    Cover pc = pseudocircle_cover();
    NerveFunction phi = nerve_function_from(Node(cob.payload["trivialization"]), pc, 1, 2);
    NerveFunction cocycle = nerve_function_from(Node(cob.payload["cocycle"]), pc, 2, 2);
    CHECK(multiplicative_coboundary(pc, phi, 1) == cocycle);
}

TEST_CASE("strictify and classify") {
    Report strict = run_on("strictify", "strict_stack.json");
    CHECK(strict.status == "ok");
    CHECK(strict.payload["iterations"] == 0);
    CHECK(run_on("validate", "strict_stack.json").payload["strict"] == true);

    JobSpec job;
    job.seed = 5;
    Report random = run_on("strictify", "random_stack.json", job);
    CHECK(random.status == "ok");
    CHECK(random.payload["rounds"]["phase1"].get<int>() <= 2);
    CHECK(random.payload["rounds"]["phase2"].get<int>() <= 2);
    CHECK(random.payload["strict"]["gamma1"]["entries"].empty());
    CHECK(random.payload["strict"]["gamma2"]["entries"].empty());
    CHECK_FALSE(random.payload["input"]["gamma2"]["entries"].empty());

    Report point = run_on("classify", "point_dual.json");
    CHECK(point.payload["count"] == hochschild_cohomology(algebra_dual_numbers(), 2).normalized[2]);
    CHECK(run_on("classify", "pseudocircle.json").payload["count"] == 0);
}

TEST_CASE("schema and cap errors") {
    Report schema = run_on("validate", "bad_schema.json");
    CHECK(schema.exit_code() == 2);
    CHECK(schema.payload["location"] == "/star/dim");

    Report parse = run_on("mc", "not_json.json");
    CHECK(parse.exit_code() == 2);
    CHECK(parse.payload["error"] == "schema");

    JobSpec small;
    small.n_order_cap = 2;
    Report cap = run_on("mc", "dgla_mc.json", small);
    CHECK(cap.exit_code() == 2);
    CHECK(cap.payload["cap"] == "N");

    JobSpec shallow;
    shallow.n_cap = 2;
    CHECK(run_on("strictify", "strict_stack.json", shallow).payload["cap"] == "n-cap");

    JobSpec zero;
    zero.d_cap = 0;
    CHECK(run_on("cech", "pseudocircle.json", zero).payload["cap"] == "d-cap");

    JobSpec missing;
    missing.command = "mc";
    missing.input_path = data("no_such_file.json");
    CHECK(run(missing).exit_code() == 2);

    Json wrong_degree = {{"dgla", {{"degrees", {{"0", 1}, {"1", 1}}}}}, {"element", {{"degree", 0}, {"N", 2}, {"coefficients", {{"0", "1"}}}}}};
    JobSpec mc_job;
    mc_job.command = "mc";
    Report r = run(mc_job, wrong_degree);
    CHECK(r.payload["location"] == "/element/degree");
}

TEST_CASE("reports are exact and deterministic") {
    for (const auto& [command, file] : std::vector<std::pair<std::string, std::string>>{
             {"mc", "star_square_is_t.json"}, {"class", "sphere_sign.json"}, {"strictify", "random_stack.json"}}) {
        Report a = run_on(command, file), b = run_on(command, file);
        CHECK(a.dump() == b.dump());
        CHECK_FALSE(has_float(a.to_json()));
    }
    JobSpec st;
    st.command = "selftest";
    st.seed = 3;
    Report s = run(st);
    CHECK(s.status == "ok");
    CHECK(s.payload["properties"].size() == 10);
    for (const auto& p : s.payload["properties"]) CHECK(p["passed"] == true);
    CHECK(s.dump() == run(st).dump());
}

TEST_CASE("the binary: exit codes and byte-identical output") {
    std::string dir = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp");
    std::string a = dir + "/deform_cli_a.json", b = dir + "/deform_cli_b.json";
    CHECK(invoke("cech --input " + data("pseudocircle.json"), a) == 0);
    CHECK(Json::parse(slurp(a))["payload"]["dims"] == Json{1, 1, 0});
    CHECK(invoke("mc --input " + data("star_broken_unit.json"), a) == 1);
    CHECK(invoke("validate --input " + data("bad_schema.json"), a) == 2);
    CHECK(invoke("mc --input " + data("dgla_mc.json") + " --N 1", a) == 2);
    CHECK(Json::parse(slurp(a))["payload"]["cap"] == "N");

    CHECK(invoke("selftest --seed 11", a) == 0);
    CHECK(invoke("selftest --seed 11", b) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(invoke("strictify --seed 2 --input " + data("random_stack.json"), a) == 0);
    CHECK(invoke("strictify --seed 2 --input " + data("random_stack.json"), b) == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("serialization round trips") {
    Rng rng(17);
    DglaInstance inst = random_dgla_instance(rng);
    Json gj = to_json(inst.g);
    Dgla back = dgla_from(Node(gj));
    CHECK(to_json(back) == gj);
    DglaElement x = inst.random_mc(rng, 3);
    CHECK(element_from(Node(to_json(x)), back, 1) == x);
    CHECK(sparse_element_from(Node(to_sparse_json(x)), back, 1) == x);

    Vec b1(8);
    b1[7] = Rational(-3, 4);
    StarProduct s{algebra_dual_numbers(), 2, {b1}};
    StarProduct s2 = star_from(Node(to_json(s)));
    CHECK(s2.corrections == s.corrections);
    CHECK(s2.algebra.mult == s.algebra.mult);

    Cover c = sphere_cover();
    Cover c2 = cover_from(Node(to_json(c)));
    CHECK(c2.members == c.members);
    CHECK(c2.space.names() == c.space.names());

    DescentDatum d = make_descent_datum(c, 1, constant_function(c, 1, RElement(1, 1)), sign_cocycle(c, 1, {0, 1, 3}));
    DescentDatum d2 = datum_from(Node(to_json(d)), c);
    CHECK(d2.a012 == d.a012);
    CHECK(d2.unit == d.unit);

    CosimplicialG g(trivial_datum(pseudocircle_cover()), GCaps{3, 1, 3});
    GStack st = random_gstack(g, 3, rng).stack;
    CHECK(gstack_from(Node(to_json(st)), g) == st);
}
