#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kinship/diagnostics.hpp"
#include "kinship/evidence.hpp"
#include "kinship/oobn.hpp"
#include "kinship/onomasticon.hpp"
#include "kinship/pedigree.hpp"

namespace kinship {

// ---------------------------------------------------------------------------
// Scenario files (.scn) are JSON documents; docs/file-formats.md documents the
// accepted subset. A scenario aggregates every input of one analysis: the
// hypothesis pair, the evidence channels, count priors, the selection-effect
// setting and sweep axes. Relative paths resolve against the scenario file.
// ---------------------------------------------------------------------------

struct PriorSpec {
    enum class Kind { Uniform, Scaled, Explicit };
    Kind kind = Kind::Uniform;
    double alpha = 1.0;            // Uniform: per-category concentration
    double total = 0.0;            // Scaled: total mass distributed as the table
    std::vector<double> values;    // Explicit

    onomasticon::DirichletPrior build(const onomasticon::NameTable& t) const;
};

struct NameEvidenceSpec {
    struct TableRef {
        std::string path;                  // resolved absolute path
        onomasticon::NameTable table;      // loaded contents
        PriorSpec prior;
    };
    std::map<onomasticon::Sex, TableRef> tables;
    onomasticon::FamilyConfiguration family;
    onomasticon::NamingConstraints constraints;
    std::vector<onomasticon::IdentificationAssumption> identifications;

    onomasticon::SexTables build_tables() const;
};

struct DnaEvidenceSpec {
    std::map<std::string, dna::HaplotypePopulation> populations;  // keyed by name
    double mutation_rate = 0.001;
    bool mutation_rate_defaulted = false;
    std::optional<dna::Pedigree> null_pedigree;
    std::optional<dna::Pedigree> alt_pedigree;
    std::vector<dna::Pedigree> candidates;
    std::vector<double> candidate_prior;  // empty means flat

    struct Observation {
        std::string id;          // item id, e.g. "dna:mt"
        std::string population;  // key into populations
        dna::DnaObservation observation;
    };
    std::vector<Observation> observations;
};

struct ModelSpec {
    std::string path;  // resolved .oobn path
    oobn::ModelDocument document;
    std::string hypothesis_node;  // qualified name; empty when unused
    std::string null_state;
    std::string alt_state;
    std::map<std::string, std::string> joint_evidence;  // node -> state label
};

struct DirectItemSpec {
    std::string id;
    LrValue lr = LrValue::finite(1.0);
};

// An item whose LR is computed on the scenario's OOBN model by clamping the
// hypothesis node to each of its states.
struct NetworkItemSpec {
    std::string id;
    std::map<std::string, std::string> evidence;  // node -> state label
};

struct SelectionSpec {
    std::optional<long> trials;              // explicit T
    std::optional<std::string> trials_from;  // count-prior quantity name
    std::optional<double> probability;       // explicit per-trial p
};

struct SweepAxis {
    std::string path;                         // dotted path into the document
    std::vector<std::string> value_literals;  // JSON scalars, serialized
};

struct Scenario {
    std::string name;
    std::filesystem::path source_path;
    std::filesystem::path base_dir;

    evidence::HypothesisPair hypotheses;
    bool prior_odds_defaulted = false;

    std::optional<ModelSpec> model;
    std::optional<NameEvidenceSpec> name_evidence;
    std::optional<DnaEvidenceSpec> dna_evidence;
    std::vector<DirectItemSpec> direct_items;
    std::vector<NetworkItemSpec> network_items;

    std::vector<evidence::CountPrior> count_priors;
    std::optional<SelectionSpec> selection;
    bool independent_items = true;
    std::vector<SweepAxis> sweep_axes;
};

// The raw JSON document, kept so sweeps can override dotted parameter paths
// and rebuild. Opaque pimpl to keep vendor headers out of this interface.
class ScenarioDocument {
  public:
    ScenarioDocument(ScenarioDocument&&) noexcept;
    ScenarioDocument& operator=(ScenarioDocument&&) noexcept;
    ~ScenarioDocument();

    // Throws IoError on unreadable files or malformed JSON.
    static ScenarioDocument load(const std::string& path);

    // Returns a copy with the JSON value at `dotted.path` replaced by the
    // parsed `value_literal`. Throws Error when the path does not resolve.
    ScenarioDocument with_override(const std::string& dotted_path,
                                   const std::string& value_literal) const;

    // Materializes the scenario, loading every referenced artifact. Throws
    // IoError for missing/malformed referenced files (including OOBN parse
    // failures, whose diagnostics are embedded in the message).
    Scenario build() const;

    const std::filesystem::path& path() const;

  private:
    ScenarioDocument();
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Semantic validation across all referenced artifacts: model document, name
// tables, family configuration, pedigrees, populations, observations, and
// cross-references (selection, sweep axes, independence requirements).
std::vector<Diagnostic> validate_scenario(const Scenario& s);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

// LR of the alternative state against the null state of one network variable
// given evidence e: P(e | hyp=alt) / P(e | hyp=null), each side computed by
// two evidence_likelihood calls. Absolute likelihood outputs are optional.
LrValue network_lr(const Network& net, const std::string& hypothesis_var, int null_state,
                   int alt_state, const EvidenceAssignment& e,
                   double* alt_likelihood = nullptr, double* null_likelihood = nullptr);

struct EvaluationOutcome {
    std::vector<evidence::EvidenceItem> items;
    evidence::CombinedResult combined;
    evidence::PosteriorResult posterior{LrValue::undefined(), LrValue::undefined()};
    std::optional<double> selection_probability;
    std::optional<double> selection_adjusted;
    std::string selection_trials;
    std::vector<std::string> warnings;
};

// Runs every evidence channel present in the scenario and combines them.
// Requires a scenario that validates without errors.
EvaluationOutcome evaluate(const Scenario& s);

struct SweepRow {
    std::vector<std::size_t> grid_indices;           // one per axis
    std::vector<std::string> point;                  // literal per axis
    EvaluationOutcome outcome;
};

struct SweepOutcome {
    std::vector<SweepAxis> axes;
    std::vector<SweepRow> rows;  // lexicographic by grid indices
};

// Full Cartesian product over the axes; each point is applied to the raw
// document, rebuilt, validated and evaluated.
SweepOutcome run_sweep(const ScenarioDocument& doc, const std::vector<SweepAxis>& axes);

struct PedigreeComparison {
    std::vector<std::string> labels;
    std::vector<double> likelihoods;  // product over the scenario's observations
    std::vector<double> posterior;
    int argmax = -1;
    bool undefined = false;
};

// Posterior over the scenario's candidate pedigrees given all of its DNA
// observations (per-observation likelihoods multiply).
PedigreeComparison compare_pedigrees(const Scenario& s);

}  // namespace kinship
