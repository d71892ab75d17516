#pragma once

#include "deform/io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace deform {

struct JobSpec {
    std::string command;  // validate, mc, gauge, hochschild, cech, class, strictify, classify, selftest
    std::string input_path;
    int n_order_cap = 8;  // --N: largest truncation order accepted
    int n_cap = 3;
    int d_cap = 1;
    int arity_cap = 3;
    std::uint64_t seed = 0;
};

struct Report {
    std::string command;
    std::string status = "ok";  // ok, violations, error
    Json payload = Json::object();
    std::vector<Violation> witnesses;

    int exit_code() const { return status == "ok" ? 0 : status == "violations" ? 1 : 2; }
    Json to_json() const;
    // Sorted keys, two-space indent, trailing newline.
    std::string dump() const;
};

// Raised when an input exceeds a configured cap; `cap` is the option name.
struct CapError : std::runtime_error {
    CapError(std::string cap, const std::string& what) : std::runtime_error(what), cap(std::move(cap)) {}
    std::string cap;
};

const std::vector<std::string>& commands();

// Reads the input file (unless the command is selftest) and dispatches. Never throws.
Report run(const JobSpec& job);
Report run(const JobSpec& job, const Json& input);

// The randomized invariant suite; instances grow with the index, so the first failure is the smallest.
Report selftest(const JobSpec& job);

}  // namespace deform
