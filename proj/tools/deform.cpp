#include "deform/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

namespace {

const std::map<std::string, std::string> descriptions{
    {"validate", "check the axioms of a dgla, algebra, star product, cover, sheaf, descent datum or stack"},
    {"mc", "Maurer-Cartan residual of a dgla element or a star product"},
    {"gauge", "act by exp of a degree-0 element on a Maurer-Cartan element"},
    {"hochschild", "Hochschild cohomology dimensions of a finite algebra"},
    {"cech", "Cech cohomology of a sheaf (default: constant Q) on a finite cover"},
    {"class", "class of a twisted form, with a trivialization or an obstruction"},
    {"strictify", "turn a stack into a strict one and report the 1-morphism"},
    {"classify", "first-order deformations of a descent datum"},
    {"selftest", "randomized invariant suite"},
};

}  // namespace

int main(int argc, char** argv) {
    deform::JobSpec job;
    std::string out_path;

    CLI::App app{"Exact deformation-theory computations over Q[t]/(t^N)"};
    app.require_subcommand(1);
    for (const auto& name : deform::commands()) {
        CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
        if (name != "selftest") sub->add_option("--input", job.input_path, "JSON input file")->required();
        sub->add_option("--N", job.n_order_cap, "largest truncation order accepted");
        sub->add_option("--n-cap", job.n_cap, "top cosimplicial level");
        sub->add_option("--d-cap", job.d_cap, "largest simplex object");
        sub->add_option("--arity-cap", job.arity_cap, "largest Hochschild arity");
        sub->add_option("--seed", job.seed, "seed for randomized inputs");
        sub->add_option("--out", out_path, "write the report here instead of stdout");
        sub->callback([&job, name] { job.command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    deform::Report report = deform::run(job);
    std::string text = report.dump();
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path);
        if (!f) {
            std::cerr << "cannot write " << out_path << "\n";
            return 2;
        }
        f << text;
    }
    return report.exit_code();
}
