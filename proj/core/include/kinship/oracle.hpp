#pragma once

#include <cstdint>
#include <set>
#include <string>

#include "kinship/network.hpp"
#include "kinship/oobn.hpp"
#include "kinship/random.hpp"

namespace kinship::oracle {

// Random-instance options sized so that joint enumeration stays cheap.
struct CaseOptions {
    int min_variables = 2;
    int max_variables = 12;
    int min_cardinality = 2;
    int max_cardinality = 4;
    int max_parents = 3;
    double edge_probability = 0.4;
    double evidence_probability = 0.3;
    std::size_t max_joint_size = std::size_t{1} << 16;
};

struct Case {
    Network network;
    EvidenceAssignment evidence;
    std::set<std::string> targets;  // nonempty, disjoint from the evidence
};

Network random_network(Rng& rng, const CaseOptions& opt = {});
Case random_case(Rng& rng, const CaseOptions& opt = {});

// Reference results computed from the enumerated joint (never through
// variable elimination).
double enumerated_likelihood(const Network& net, const EvidenceAssignment& e);
QueryResult enumerated_query(const Network& net, const std::set<std::string>& targets,
                             const EvidenceAssignment& e);

struct SuiteResult {
    int cases_run = 0;
    bool ok = true;
    std::string failure;         // human description of the first mismatch
    std::string counterexample;  // the failing network as a loadable .oobn document
};

// Generates `count` cases from `seed` and checks that variable elimination
// matches enumeration for both posteriors and evidence likelihoods.
SuiteResult run_suite(std::uint64_t seed, int count, double tolerance = 1e-9,
                      const CaseOptions& opt = {});

// Renders a network as a single-class document (ids sanitized to bare
// identifiers); parsing and flattening it reproduces the network.
oobn::ModelDocument document_from_network(const Network& net,
                                          const std::string& class_name = "Generated");

}  // namespace kinship::oracle
