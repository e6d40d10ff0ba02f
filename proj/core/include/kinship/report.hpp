#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kinship/scenario.hpp"

namespace kinship {

// Everything a run wants to tell the user, in plain data. The same Report
// renders as human text and as canonical machine JSON; the machine form is
// byte-stable for identical inputs.
struct Report {
    struct ItemRow {
        std::string id;
        std::string kind;  // "onomasticon" | "dna" | "direct"
        LrValue lr = LrValue::finite(1.0);
        std::string provenance;
        std::optional<double> alt_likelihood;
        std::optional<double> null_likelihood;
    };

    struct Selection {
        std::string trials;      // e.g. "T=1000" or "E over ossuary_count prior"
        double probability = 0.0;
        double adjusted = 0.0;
    };

    struct SweepTable {
        std::vector<std::string> axis_paths;
        struct Row {
            std::vector<std::string> point;
            LrValue overall = LrValue::finite(1.0);
            LrValue posterior_prob_alt = LrValue::undefined();
        };
        std::vector<Row> rows;
    };

    struct PedigreeTable {
        struct Row {
            std::string label;
            double likelihood = 0.0;
            double posterior = 0.0;
            bool argmax = false;
        };
        std::vector<Row> rows;  // sorted by posterior descending, ties in list order
        bool undefined = false;
    };

    std::string scenario_name;
    std::string scenario_path;

    // Scenario echo: resolved parameters as label/value pairs.
    std::vector<std::pair<std::string, std::string>> parameters;

    evidence::HypothesisPair hypotheses;

    std::vector<ItemRow> items;
    LrValue overall = LrValue::finite(1.0);           // alternative over null
    LrValue overall_inverse = LrValue::finite(1.0);   // null over alternative
    LrValue posterior_odds = LrValue::undefined();
    LrValue posterior_prob_alt = LrValue::undefined();

    std::optional<Selection> selection;
    std::optional<SweepTable> sweep;
    std::optional<PedigreeTable> pedigrees;

    std::vector<std::string> warnings;
};

Report make_report(const Scenario& s, const EvaluationOutcome& outcome);
Report make_sweep_report(const Scenario& s, const SweepOutcome& sweep);
Report make_pedigree_report(const Scenario& s, const PedigreeComparison& cmp);

// Human-readable rendering. The timestamp is embedded only when requested,
// keeping default output reproducible.
std::string render_human(const Report& r, bool with_timestamp = false);

// Canonical machine JSON (schema in docs/results-schema.md). Identical
// inputs produce byte-identical output.
std::string render_machine(const Report& r);

}  // namespace kinship
