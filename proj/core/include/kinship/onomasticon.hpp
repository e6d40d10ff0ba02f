#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kinship/diagnostics.hpp"
#include "kinship/lr_value.hpp"
#include "kinship/sex.hpp"

namespace kinship::onomasticon {

inline constexpr const char* kOtherCategory = "Other";
// Published tables are rounded; their columns are allowed this much slack.
inline constexpr double kTableSumTolerance = 0.005;

// A name-frequency distribution for one population, with the catch-all
// `Other` category last.
struct NameTable {
    std::string source_label;
    std::vector<std::string> categories;
    std::vector<double> frequencies;
    long sample_size = 0;

    int index_of(const std::string& category) const;  // -1 when absent
    std::size_t category_count() const { return categories.size(); }
    // Synthetic tables are demo-only; reports must flag them.
    bool is_synthetic() const { return source_label.rfind("SYNTHETIC", 0) == 0; }
};

std::vector<Diagnostic> validate_table(const NameTable& t);

// CSV loader: header `name,frequency`, one metadata line `# source=<label> n=<N>`.
NameTable load_table(const std::string& path);
NameTable parse_table(const std::string& text, std::vector<Diagnostic>* diags = nullptr);

// Weighted blend of tables over an identical category list: frequencies are
// the weighted average, the sample size the weighted mean. Lets scenarios
// combine published columns instead of applying ad hoc correction factors.
NameTable mix_tables(const std::vector<std::pair<NameTable, double>>& components);

// Integer counts consistent with the table: round(f_i * N) per named
// category, remainder to Other (clamped at 0; clamping means the published
// row is inconsistent and is reported as a warning).
struct CountResult {
    std::vector<long> counts;
    bool clamped = false;
};
CountResult counts_from_frequencies(const NameTable& t);

struct DirichletPrior {
    std::vector<double> concentrations;

    double total() const;
    static DirichletPrior uniform(std::size_t categories, double alpha = 1.0);
    // alpha_i proportional to the table frequencies with the given total mass.
    static DirichletPrior scaled_to(const NameTable& t, double total);
};

// (alpha_i + c_i) / (alpha_0 + N): the predictive probability of category i
// after observing counts c.
double posterior_predictive(const DirichletPrior& prior, const std::vector<long>& counts,
                            std::size_t index);

// Product of sequential predictives, counts incremented after each draw.
// Exchangeable: any permutation of `names` gives the same value.
double sequence_likelihood(const DirichletPrior& prior, const std::vector<long>& counts,
                           const std::vector<std::string>& names, const NameTable& t);

using kinship::Sex;

struct FamilyMember {
    std::string id;
    Sex sex = Sex::Female;
    std::string name;  // observed name, one of the relevant table's categories
    std::string role;  // free text
};

struct ParentLink {
    std::optional<std::string> mother;
    std::optional<std::string> father;
};

struct FamilyConfiguration {
    std::vector<FamilyMember> members;
    std::vector<std::vector<std::string>> sibling_groups;
    std::map<std::string, ParentLink> parent_links;

    const FamilyMember* find_member(const std::string& id) const;
};

std::vector<Diagnostic> validate_configuration(const FamilyConfiguration& config);

struct NamingConstraints {
    // Within a sibling group, names already used by processed siblings are
    // excluded and the remainder renormalized.
    bool sibling_distinct = false;
    // weight_i proportional to p_i * (1 + boost * [name i borne by an
    // ancestor]); 0 turns the feature off.
    double ancestor_boost = 0.0;
};

// One per-member naming model: table plus Dirichlet prior.
struct NameModel {
    NameTable table;
    DirichletPrior prior;
};
using SexTables = std::map<Sex, NameModel>;

// A weighted identification: with probability `weight` the member's name is
// fixed to `required_name` under the null hypothesis; with the remaining
// probability the name is an ordinary draw (what `alternative` documents).
struct IdentificationAssumption {
    std::string assumption_id;
    std::string member_id;
    std::string required_name;
    double weight = 1.0;
    std::string alternative;  // free text, echoed in reports
};

struct FamilyLikelihood {
    double value = 0.0;
    // Set when a constraint makes the configuration structurally impossible
    // (more distinct siblings than categories); value is 0 then.
    bool impossible = false;
};

// P(observed names | random family of this structure): members processed in
// topological order (parents first, ids as tie-break), each drawing from the
// urn of their sex with the constraints applied.
FamilyLikelihood family_likelihood_alt(const FamilyConfiguration& config,
                                       const SexTables& tables,
                                       const NamingConstraints& constraints);

// P(observed names | the hypothesized family): per member, a two-branch
// mixture of the forced identification (weight w) and the alt-model draw
// (weight 1-w); members without an assumption are unconstrained.
FamilyLikelihood family_likelihood_null(const FamilyConfiguration& config,
                                        const std::vector<IdentificationAssumption>& nt_spec,
                                        const SexTables& tables,
                                        const NamingConstraints& constraints);

struct OnomasticonLr {
    LrValue lr;              // alt / null
    double alt_likelihood = 0.0;
    double null_likelihood = 0.0;
};

OnomasticonLr likelihood_ratio(const FamilyConfiguration& config,
                               const std::vector<IdentificationAssumption>& nt_spec,
                               const SexTables& tables, const NamingConstraints& constraints);

}  // namespace kinship::onomasticon
