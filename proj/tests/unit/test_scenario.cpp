#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "kinship/report.hpp"
#include "kinship/scenario.hpp"

using namespace kinship;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::path(KINSHIP_REPO_ROOT);
const fs::path kScenarios = kRoot / "scenarios";
const fs::path kFixtures = kRoot / "tests" / "fixtures";

Scenario load_valid(const fs::path& p) {
    ScenarioDocument doc = ScenarioDocument::load(p.string());
    Scenario s = doc.build();
    auto ds = validate_scenario(s);
    for (const auto& d : ds) INFO(format_diagnostic(d));
    REQUIRE_FALSE(has_errors(ds));
    return s;
}

}  // namespace

TEST_CASE("bundled scenarios validate cleanly") {
    for (const auto& name : {"talpiyot.scn", "romanov_toy.scn", "single_mary.scn"}) {
        INFO(name);
        load_valid(kScenarios / name);
    }
}

TEST_CASE("evaluate: direct items multiply (2.0 * 0.25 = 0.5)") {
    Scenario s = load_valid(kFixtures / "direct_items.scn");
    EvaluationOutcome o = evaluate(s);
    REQUIRE(o.combined.overall.is_finite());
    CHECK(o.combined.overall.value() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("evaluate: single-Mary demo lands on the table frequency") {
    Scenario s = load_valid(kScenarios / "single_mary.scn");
    EvaluationOutcome o = evaluate(s);
    REQUIRE(o.combined.overall.is_finite());
    // Prior-dominated: 0.242 / 0.998 (the column sums to 0.998).
    CHECK(std::abs(o.combined.overall.value() - 0.242) < 1e-3);
    CHECK(o.combined.overall.value() == doctest::Approx(0.242 / 0.998).epsilon(1e-6));
}

TEST_CASE("evaluate: mu=0 mismatch reports +infinity with a disconfirmation note") {
    Scenario s = load_valid(kFixtures / "mismatch_mu0.scn");
    EvaluationOutcome o = evaluate(s);
    CHECK(o.combined.overall.is_infinite());
    bool note = false;
    for (const auto& w : o.warnings)
        if (w.find("disconfirmed") != std::string::npos) note = true;
    CHECK(note);
    // Posterior probability of the alternative saturates at 1.
    CHECK(o.posterior.prob_alt.value() == 1.0);
}

TEST_CASE("evaluate: network items match hand two-clamp ratios") {
    Scenario s = load_valid(kFixtures / "network_items.scn");
    EvaluationOutcome o = evaluate(s);
    REQUIRE(o.items.size() == 2);

    // Hand values for the bundled tomb model.
    // P(match=yes | hyp) = P(pattern=weak|hyp)*0.1 + P(pattern=strong|hyp)*0.75.
    const double p_match_ntped = 0.2 * 0.1 + 0.8 * 0.75;  // 0.62
    const double p_match_other = 0.7 * 0.1 + 0.3 * 0.75;  // 0.295
    CHECK(o.items[0].lr.value() ==
          doctest::Approx(p_match_other / p_match_ntped).epsilon(1e-9));

    // P(compatible=no | hyp) marginalizes the 0.8/0.2 frequency node.
    const double p_no_ntped = 0.8 * 0.1 + 0.2 * 0.05;   // 0.09
    const double p_no_other = 0.8 * 0.6 + 0.2 * 0.85;   // 0.65
    CHECK(o.items[1].lr.value() == doctest::Approx(p_no_other / p_no_ntped).epsilon(1e-9));

    // d-separation given the hypothesis: the product equals the joint LR.
    Scenario joint = load_valid(kFixtures / "independence_off.scn");
    EvaluationOutcome oj = evaluate(joint);
    REQUIRE(oj.combined.overall.is_finite());
    CHECK(oj.combined.overall.value() ==
          doctest::Approx(o.combined.overall.value()).epsilon(1e-9));
}

TEST_CASE("validate: independence off without a joint model is an error") {
    ScenarioDocument doc =
        ScenarioDocument::load((kFixtures / "not_independent_missing_model.scn").string());
    Scenario s = doc.build();
    auto ds = validate_scenario(s);
    bool found = false;
    for (const auto& d : ds)
        if (d.code == "E_NOT_INDEPENDENT") found = true;
    CHECK(found);
}

TEST_CASE("validate: invalid referenced model surfaces its diagnostics") {
    ScenarioDocument doc = ScenarioDocument::load((kFixtures / "invalid_cpt.scn").string());
    Scenario s = doc.build();
    auto ds = validate_scenario(s);
    bool found = false;
    for (const auto& d : ds)
        if (d.code == "E_CPT_NOT_NORMALIZED") found = true;
    CHECK(found);
}

TEST_CASE("load: missing referenced table raises IoError") {
    ScenarioDocument doc = ScenarioDocument::load((kFixtures / "missing_table.scn").string());
    CHECK_THROWS_AS(doc.build(), IoError);
}

TEST_CASE("load: malformed JSON raises IoError") {
    CHECK_THROWS_AS(ScenarioDocument::load((kScenarios / "models" / "talpiyot.oobn").string()),
                    IoError);
    CHECK_THROWS_AS(ScenarioDocument::load("/no/such/file.scn"), IoError);
}

TEST_CASE("sweep: single axis with one value equals plain evaluation") {
    ScenarioDocument doc = ScenarioDocument::load((kScenarios / "talpiyot.scn").string());
    Scenario s = doc.build();
    EvaluationOutcome direct = evaluate(s);

    SweepAxis axis;
    axis.path = "dna_evidence.mutation_rate";
    axis.value_literals = {"0.001"};
    SweepOutcome sweep = run_sweep(doc, {axis});
    REQUIRE(sweep.rows.size() == 1);
    CHECK(sweep.rows[0].outcome.combined.overall.value() ==
          doctest::Approx(direct.combined.overall.value()).epsilon(1e-12));
}

TEST_CASE("sweep: 3 x 4 axes produce 12 rows in lexicographic order") {
    ScenarioDocument doc = ScenarioDocument::load((kFixtures / "direct_items.scn").string());
    SweepAxis a;
    a.path = "direct_items.0.lr";
    a.value_literals = {"1.0", "2.0", "3.0"};
    SweepAxis b;
    b.path = "direct_items.1.lr";
    b.value_literals = {"0.5", "1.0", "1.5", "2.0"};
    SweepOutcome sweep = run_sweep(doc, {a, b});
    REQUIRE(sweep.rows.size() == 12);
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(sweep.rows[i].grid_indices[0] == i / 4);
        CHECK(sweep.rows[i].grid_indices[1] == i % 4);
        const double lhs = std::stod(sweep.rows[i].point[0]);
        const double rhs = std::stod(sweep.rows[i].point[1]);
        CHECK(sweep.rows[i].outcome.combined.overall.value() ==
              doctest::Approx(lhs * rhs).epsilon(1e-12));
    }
}

TEST_CASE("sweep: the prior-total axis converges to the fixed-frequency LR") {
    ScenarioDocument doc = ScenarioDocument::load((kScenarios / "single_mary.scn").string());
    Scenario s = doc.build();
    SweepOutcome sweep = run_sweep(doc, s.sweep_axes);
    REQUIRE(sweep.rows.size() == 3);
    const double target = 0.242 / 0.998;
    double prev_gap = 1e9;
    for (const auto& row : sweep.rows) {
        const double gap = std::abs(row.outcome.combined.overall.value() - target);
        CHECK(gap < prev_gap + 1e-15);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-6);
}

TEST_CASE("sweep: unresolvable parameter path throws") {
    ScenarioDocument doc = ScenarioDocument::load((kFixtures / "direct_items.scn").string());
    SweepAxis a;
    a.path = "no.such.path";
    a.value_literals = {"1.0"};
    CHECK_THROWS_AS(run_sweep(doc, {a}), Error);
}

TEST_CASE("compare_pedigrees: the bundled toy selects the family pedigree") {
    Scenario s = load_valid(kScenarios / "romanov_toy.scn");
    PedigreeComparison cmp = compare_pedigrees(s);
    REQUIRE_FALSE(cmp.undefined);
    REQUIRE(cmp.labels.size() == 3);
    CHECK(cmp.labels[static_cast<std::size_t>(cmp.argmax)] == "romanov_family");
    double sum = 0.0;
    for (double p : cmp.posterior) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("reports: machine rendering is byte-stable") {
    Scenario s = load_valid(kScenarios / "talpiyot.scn");
    EvaluationOutcome o1 = evaluate(s);
    EvaluationOutcome o2 = evaluate(s);
    CHECK(render_machine(make_report(s, o1)) == render_machine(make_report(s, o2)));
}

TEST_CASE("reports: warnings appear exactly once") {
    Scenario s = load_valid(kScenarios / "talpiyot.scn");
    Report r = make_report(s, evaluate(s));
    for (std::size_t i = 0; i < r.warnings.size(); ++i)
        for (std::size_t j = i + 1; j < r.warnings.size(); ++j)
            CHECK(r.warnings[i] != r.warnings[j]);
    bool synthetic = false;
    for (const auto& w : r.warnings)
        if (w.find("synthetic") != std::string::npos) synthetic = true;
    CHECK(synthetic);
}

TEST_CASE("reports: both LR orientations are printed") {
    Scenario s = load_valid(kScenarios / "single_mary.scn");
    Report r = make_report(s, evaluate(s));
    REQUIRE(r.overall.is_finite());
    CHECK(r.overall_inverse.value() == doctest::Approx(1.0 / r.overall.value()).epsilon(1e-12));
    const std::string human = render_human(r);
    CHECK(human.find("LR (H1/H0)") != std::string::npos);
    CHECK(human.find("inverted (H0/H1)") != std::string::npos);
}

TEST_CASE("evaluate: mixed table columns blend the frequencies") {
    Scenario s = load_valid(kFixtures / "mixed_tables.scn");
    EvaluationOutcome o = evaluate(s);
    REQUIRE(o.combined.overall.is_finite());
    // Prior-dominated single Mary over the 0.5/0.5 blend of the two columns.
    const double f_mary = (0.242 + 0.228) / 2;
    const double f_sum = (0.998 + 0.999) / 2;
    CHECK(o.combined.overall.value() == doctest::Approx(f_mary / f_sum).epsilon(1e-6));
}

TEST_CASE("evaluate: poisson count prior drives the selection expectation") {
    ScenarioDocument doc = ScenarioDocument::load((kScenarios / "talpiyot.scn").string());
    ScenarioDocument patched = doc.with_override(
        "count_priors.0",
        R"({"quantity": "ossuary_count", "kind": "poisson", "mean": 1100})");
    Scenario s = patched.build();
    REQUIRE_FALSE(has_errors(validate_scenario(s)));
    EvaluationOutcome o = evaluate(s);
    REQUIRE(o.selection_adjusted.has_value());
    CHECK(*o.selection_adjusted > 0.0);

    // Close to the point-prior value: the Poisson mass sits near its mean.
    EvaluationOutcome point = evaluate(doc.build());
    REQUIRE(point.selection_adjusted.has_value());
    CHECK(*o.selection_adjusted ==
          doctest::Approx(*point.selection_adjusted).epsilon(0.05));
}

TEST_CASE("evaluate: names outside the table map to Other with a warning") {
    ScenarioDocument doc = ScenarioDocument::load((kScenarios / "single_mary.scn").string());
    ScenarioDocument patched =
        doc.with_override("name_evidence.family.members.0.name", "\"Ruth\"");
    Scenario s = patched.build();
    REQUIRE_FALSE(has_errors(validate_scenario(s)));
    EvaluationOutcome o = evaluate(s);
    bool mapped = false;
    for (const auto& w : o.warnings)
        if (w.find("treated as 'Other'") != std::string::npos) mapped = true;
    CHECK(mapped);
}
