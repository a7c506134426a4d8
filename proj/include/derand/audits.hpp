#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "derand/polynomial.hpp"
#include "json.hpp"

// Finite verification harnesses that tie the modules together. Each check
// yields audit entries {id, measured, bound, relation, status}.
namespace derand {

struct AuditEntry {
    std::string id;
    nlohmann::json measured;
    nlohmann::json bound;        // null when the entry only reports a value or trend
    std::string relation;        // e.g. "<=", "==", ">", "trend"
    std::string status;          // "pass", "fail" or "na"
    std::string note;
};

nlohmann::json to_json(const AuditEntry& e);
AuditEntry make_check(std::string id, nlohmann::json measured, nlohmann::json bound, std::string relation, bool ok,
                      std::string note = {});
AuditEntry make_info(std::string id, nlohmann::json measured, std::string note = {});

struct CriterionResult {
    int number = 0;
    std::string name;
    std::vector<AuditEntry> entries;
    double seconds = 0;
    bool pass() const;
};

struct AuditAllOptions {
    uint64_t rng_seed = 1;
    std::vector<int> only;       // criterion numbers; empty = all
    int fooling_polynomials = 50;
    int pruning_polynomials = 100;
};

// Random multilinear polynomial with `terms` Gaussian coefficients on
// monomials of degree <= max_degree over variables 1..n.
MultilinearPolynomial random_sparse_polynomial(std::mt19937_64& rng, int n, int max_degree, int terms);

// Every coordinate subset of size <= order is exactly uniform under a uniform codeword.
struct IndependenceCheck {
    uint64_t subsets = 0;
    uint64_t violations = 0;
};
IndependenceCheck exact_independence(int n, int d, int order);

// Sum of materialized cloud tensors (tensor power 3t) for N = 2^n <= 8, t = 1 only.
std::vector<double> materialized_cloud_tensor(uint64_t v, int n);

CriterionResult criterion_duality_independence();
CriterionResult criterion_pruning(const AuditAllOptions& o);
CriterionResult criterion_tail_bound();
CriterionResult criterion_lipschitz_fooling(const AuditAllOptions& o);
CriterionResult criterion_spectrum(const AuditAllOptions& o);
CriterionResult criterion_automorphism_folding(const AuditAllOptions& o);
CriterionResult criterion_clouds(const AuditAllOptions& o);
CriterionResult criterion_lifted();
CriterionResult criterion_gap_trend();
CriterionResult criterion_gaussian();

std::vector<CriterionResult> audit_all(const AuditAllOptions& o);

}  // namespace derand
