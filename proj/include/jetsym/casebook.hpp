#pragma once

#include <jetsym/jet.hpp>

#include <map>

namespace jetsym
{

enum class claim_status : std::uint8_t { verified, refuted, skipped };

// "verified", "refuted-witness", "skipped"
std::string to_string(claim_status s);

struct claim {
    std::string id;
    claim_status status;
    // Printed residual: "0" when verified, otherwise the witness (or the
    // measured drift for numeric claims).
    std::string residual;
    std::string paper_ref;
    double millis;
};

struct case_report {
    std::string id;
    std::string name;
    std::vector<claim> claims;

    [[nodiscard]] bool all_verified() const;
};

struct case_entry {
    std::string id;
    std::string name;
    // Which results of the source the case covers, as descriptive anchors.
    std::vector<std::string> anchors;
};

const std::vector<case_entry> &case_inventory();

// Throws invalid_argument for an unknown id. Claim failures are reported,
// never thrown.
case_report run_case(const std::string &id);

// Every case, run concurrently, ordered by id.
std::vector<case_report> run_all_cases();

struct numeric_options {
    double x0 = 0;
    double span = 2;
    int steps = 2000;
    std::map<std::string, long double> params;
};

enum class report_format : std::uint8_t { text, json };

// JSON: {"case": id or null, "claims": [{id, status, residual, paper_ref, millis}]}
// with fields in that order. A report with an empty id is the empty report.
std::string emit_report(const case_report &r, report_format f);
// Several reports: a JSON array, or the text blocks one after another.
std::string emit_reports(const std::vector<case_report> &rs, report_format f);

// Integrates the equation with classical RK4 from the initial jet
// (y, y1, ..., y_{n-1}) at x0 and returns max |F(x) - F(x0)| / max(1, |F(x0)|).
// The symbol q and its derivatives are replaced by q_concrete. Throws
// singularity_encountered when the trajectory leaves the domain.
double numeric_validate(const expr &f, const diff_eq &eq, const expr &q_concrete, const std::vector<long double> &ic,
                        const numeric_options &opts = {});

} // namespace jetsym
