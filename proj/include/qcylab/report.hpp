#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace qcylab {

/// One verification outcome.  status is pass exactly when the error is
/// within the check's declared tolerance (0 for exact checks); runtime_ms is
/// excluded from the determinism contract.
struct VerificationReport {
    std::string check_id;
    int n = 1;
    std::uint64_t seed = 0;
    bool pass = false;
    std::string expected;
    std::string actual;
    std::string error;  // "exact" or a float in text form
    long runtime_ms = 0;
};

struct RunConfig {
    int n = 1;
    std::uint64_t seed = 0;
    long samples = 100000;
    int wmax = 6;
    double tol = 0;  // per-check override; 0 keeps each check's default
    std::string format = "json";
};

struct CheckGroup {
    std::string name;
    std::function<std::vector<VerificationReport>(const RunConfig&)> run;
};

/// Registry of check groups in fixed report order; the CLI subcommands map
/// onto the group names.
const std::vector<CheckGroup>& check_registry();

std::vector<VerificationReport> run_group(const std::string& name, const RunConfig& cfg);
std::vector<VerificationReport> run_all(const RunConfig& cfg);

void emit_reports(std::ostream& os, const std::vector<VerificationReport>& reports,
                  const std::string& format);

bool all_pass(const std::vector<VerificationReport>& reports);

} // namespace qcylab
