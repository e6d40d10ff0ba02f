// Acceptance suite: one numbered check per release criterion, one PASS/FAIL
// line each, nonzero exit on any failure.
//
//   kinship_acceptance <repo_root> <kinship-lr binary> [--cli-only]
//
// --cli-only runs just the CLI exit-code contract (fast); the default run
// executes the full numbered suite.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kinship/evidence.hpp"
#include "kinship/numeric.hpp"
#include "kinship/oobn.hpp"
#include "kinship/onomasticon.hpp"
#include "kinship/oracle.hpp"
#include "kinship/pedigree.hpp"
#include "kinship/random.hpp"
#include "kinship/scenario.hpp"

namespace fs = std::filesystem;
using namespace kinship;

namespace {

int g_failures = 0;

class Criterion {
  public:
    Criterion(int number, std::string title)
        : number_(number), title_(std::move(title)), start_(std::chrono::steady_clock::now()) {}

    void check(bool ok, const std::string& what) {
        if (ok) return;
        failed_ = true;
        details_.push_back(what);
    }

    void check_close(double actual, double expected, double tol, const std::string& what) {
        if (std::abs(actual - expected) <= tol) return;
        failed_ = true;
        std::ostringstream os;
        os << what << ": got " << format_double(actual) << ", expected "
           << format_double(expected) << " +/- " << format_double(tol);
        details_.push_back(os.str());
    }

    void check_runtime(double limit_seconds) {
        const double elapsed = seconds();
        if (elapsed <= limit_seconds) return;
        failed_ = true;
        std::ostringstream os;
        os << "runtime " << elapsed << "s exceeds " << limit_seconds << "s";
        details_.push_back(os.str());
    }

    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    ~Criterion() {
        std::ostringstream os;
        os << (failed_ ? "[FAIL] " : "[PASS] ") << "criterion " << number_ << ": " << title_
           << " (" << static_cast<int>(seconds() * 1000) << " ms)";
        std::cout << os.str() << "\n";
        for (const auto& d : details_) std::cout << "       " << d << "\n";
        if (failed_) ++g_failures;
    }

  private:
    int number_;
    std::string title_;
    std::chrono::steady_clock::time_point start_;
    bool failed_ = false;
    std::vector<std::string> details_;
};

fs::path g_root;
std::string g_cli;

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_cli(const std::string& args, const fs::path& stdout_to = {}) {
    std::string cmd = g_cli + " " + args;
    if (!stdout_to.empty())
        cmd += " > " + stdout_to.string() + " 2>&1";
    else
        cmd += " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// ---------------------------------------------------------------------------
// 1. Table 1 fidelity
// ---------------------------------------------------------------------------
void criterion_1() {
    Criterion c(1, "bundled name tables reproduce the published columns");

    struct Expected {
        const char* file;
        const char* label;
        long n;
        double column_sum;
        std::vector<std::pair<std::string, double>> rows;
    };
    const std::vector<Expected> tables = {
        {"ilan_nonossuary_female.csv",
         "Ilan nonossuary",
         317,
         0.998,
         {{"Mary", 0.242},
          {"Salome", 0.161},
          {"Shelamzon", 0.048},
          {"Martha", 0.032},
          {"Joanna", 0.040},
          {"Shiphra", 0.024},
          {"Berenice", 0.056},
          {"Sara", 0.024},
          {"Imma", 0.016},
          {"Mara", 0.016},
          {"Other", 0.339}}},
        {"ilan_ossuary_female.csv",
         "Ilan ossuaries",
         193,
         0.999,
         {{"Mary", 0.228},
          {"Salome", 0.212},
          {"Shelamzon", 0.098},
          {"Martha", 0.088},
          {"Joanna", 0.036},
          {"Shiphra", 0.047},
          {"Berenice", 0.010},
          {"Sara", 0.026},
          {"Imma", 0.031},
          {"Mara", 0.026},
          {"Other", 0.197}}},
    };

    for (const auto& exp : tables) {
        onomasticon::NameTable t = onomasticon::load_table((g_root / "data" / exp.file).string());
        c.check(onomasticon::validate_table(t).empty(), std::string(exp.file) + " must validate");
        c.check(t.source_label == exp.label, std::string(exp.file) + ": source label");
        c.check(t.sample_size == exp.n, std::string(exp.file) + ": sample size");
        c.check(t.categories.size() == exp.rows.size(),
                std::string(exp.file) + ": category count");
        double sum = 0.0;
        for (std::size_t i = 0; i < exp.rows.size() && i < t.categories.size(); ++i) {
            c.check(t.categories[i] == exp.rows[i].first,
                    std::string(exp.file) + ": category " + exp.rows[i].first);
            c.check(t.frequencies[i] == exp.rows[i].second,
                    std::string(exp.file) + ": frequency of " + exp.rows[i].first +
                        " must match exactly");
            sum += t.frequencies[i];
        }
        c.check_close(sum, exp.column_sum, 1e-12, std::string(exp.file) + ": column sum");
        c.check(std::abs(sum - 1.0) <= onomasticon::kTableSumTolerance,
                std::string(exp.file) + ": column sum inside the 0.005 tolerance");
    }
    c.check_runtime(1.0);
}

// ---------------------------------------------------------------------------
// 2. Oracle equivalence
// ---------------------------------------------------------------------------
void criterion_2() {
    Criterion c(2, "variable elimination matches joint enumeration on 200 random networks");
    oracle::SuiteResult r = oracle::run_suite(20260810, 200, 1e-9);
    c.check(r.ok, r.failure);
    c.check(r.cases_run == 200, "expected 200 cases");
    c.check_runtime(30.0);
}

// ---------------------------------------------------------------------------
// 3. Dirichlet-multinomial identities
// ---------------------------------------------------------------------------
void criterion_3() {
    Criterion c(3, "urn likelihoods equal the rising-factorial closed form");
    onomasticon::NameTable t =
        onomasticon::load_table((g_root / "data" / "ilan_nonossuary_female.csv").string());
    onomasticon::CountResult counts = onomasticon::counts_from_frequencies(t);
    const onomasticon::DirichletPrior prior =
        onomasticon::DirichletPrior::uniform(t.category_count());

    double n_total = 0.0;
    for (long x : counts.counts) n_total += static_cast<double>(x);

    Rng rng(3);
    int closed_bad = 0, perm_bad = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = rng.uniform_int(1, 6);
        std::vector<std::string> names;
        std::vector<int> multiplicity(t.category_count(), 0);
        for (int i = 0; i < n; ++i) {
            const int idx = rng.uniform_int(0, static_cast<int>(t.category_count()) - 1);
            names.push_back(t.categories[static_cast<std::size_t>(idx)]);
            ++multiplicity[static_cast<std::size_t>(idx)];
        }

        const double urn = onomasticon::sequence_likelihood(prior, counts.counts, names, t);
        double log_num = 0.0;
        for (std::size_t i = 0; i < multiplicity.size(); ++i)
            log_num += log_rising_factorial(
                prior.concentrations[i] + static_cast<double>(counts.counts[i]),
                multiplicity[i]);
        const double closed =
            std::exp(log_num - log_rising_factorial(prior.total() + n_total, n));
        if (std::abs(urn - closed) > 1e-12) ++closed_bad;

        std::vector<std::string> shuffled = names;
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[static_cast<std::size_t>(rng.uniform_int(
                                           0, static_cast<int>(i) - 1))]);
        const double permuted =
            onomasticon::sequence_likelihood(prior, counts.counts, shuffled, t);
        if (std::abs(urn - permuted) > 1e-12) ++perm_bad;
    }
    c.check(closed_bad == 0,
            std::to_string(closed_bad) + "/500 cases off the closed form by more than 1e-12");
    c.check(perm_bad == 0,
            std::to_string(perm_bad) + "/500 cases not permutation-invariant within 1e-12");
}

// ---------------------------------------------------------------------------
// 4. Product rule vs joint network
// ---------------------------------------------------------------------------
void criterion_4() {
    Criterion c(4, "per-item LR product equals the two-clamp network LR on 3 bundled models");

    struct ModelCase {
        const char* file;
        const char* hypothesis;
        std::vector<std::pair<std::string, std::string>> evidence;  // node -> state
    };
    const std::vector<ModelCase> cases = {
        {"talpiyot.oobn",
         "is_nt",
         {{"onomasticon.match", "yes"}, {"dna.compatible", "no"}}},
        {"nested_chain.oobn", "start", {{"sensor1", "on"}, {"sensor2", "off"}}},
        {"multi_item.oobn",
         "hyp",
         {{"p1.reading", "c"}, {"direct2", "y"}, {"wide4", "w0"}}},
    };

    for (const auto& mc : cases) {
        auto parsed = oobn::parse_file((g_root / "scenarios" / "models" / mc.file).string());
        if (!parsed.ok()) {
            c.check(false, std::string(mc.file) + " failed to parse");
            continue;
        }
        oobn::FlatNetwork flat = oobn::flatten(*parsed.document);
        const std::string hyp = flat.resolve(mc.hypothesis);

        // Per-item LRs through the evidence engine.
        std::vector<evidence::EvidenceItem> items;
        EvidenceAssignment joint;
        for (const auto& [node, state] : mc.evidence) {
            const std::string id = flat.resolve(node);
            const auto& var = flat.network.variable(id);
            int idx = -1;
            for (std::size_t i = 0; i < var.state_labels.size(); ++i)
                if (var.state_labels[i] == state) idx = static_cast<int>(i);
            EvidenceAssignment e;
            e.assignments[id] = idx;
            joint.assignments[id] = idx;

            evidence::EvidenceItem item;
            item.id = node;
            item.lr = network_lr(flat.network, hyp, 0, 1, e);
            items.push_back(std::move(item));
        }
        const LrValue product = evidence::combine_lrs(items).overall;
        const LrValue joint_lr = network_lr(flat.network, hyp, 0, 1, joint);

        c.check(product.is_finite() && joint_lr.is_finite(),
                std::string(mc.file) + ": both routes must be finite");
        if (product.is_finite() && joint_lr.is_finite())
            c.check_close(product.value(), joint_lr.value(), 1e-9,
                          std::string(mc.file) + ": product rule vs joint network");
    }
}

// ---------------------------------------------------------------------------
// 5. Disconfirmation asymmetry
// ---------------------------------------------------------------------------
void criterion_5() {
    Criterion c(5, "mu=0 mtDNA mismatch yields null likelihood 0 and an infinite LR");

    dna::Pedigree maternal;
    maternal.label = "maternal";
    maternal.individuals.push_back({"mom", Sex::Female, std::nullopt, std::nullopt});
    maternal.individuals.push_back({"kid", Sex::Female, std::string("mom"), std::nullopt});
    dna::Pedigree unrelated;
    unrelated.label = "unrelated";
    unrelated.individuals.push_back({"mom", Sex::Female, std::nullopt, std::nullopt});
    unrelated.individuals.push_back({"kid", Sex::Female, std::nullopt, std::nullopt});

    dna::HaplotypePopulation pop{dna::Marker::MtDna, {"h1", "h2"}, {0.6, 0.4}};
    const dna::MutationModel mu0{0.0};

    dna::DnaObservation mismatch{dna::Marker::MtDna, {{"mom", "h1"}, {"kid", "h2"}}};
    const double null_lik = dna::dna_likelihood(maternal, pop, mu0, mismatch);
    c.check(null_lik == 0.0, "null likelihood must be exactly 0");

    dna::DnaLr lr = dna::dna_lr(mismatch, pop, mu0, maternal, unrelated);
    c.check(lr.lr.is_infinite(), "LR must carry the +infinity flag");
    c.check_close(lr.alt_likelihood, 0.6 * 0.4, 1e-15,
                  "unrelated pair: product of population frequencies");

    dna::DnaObservation both_h1{dna::Marker::MtDna, {{"mom", "h1"}, {"kid", "h1"}}};
    c.check_close(dna::dna_likelihood(unrelated, pop, mu0, both_h1), 0.36, 1e-15,
                  "unrelated 0.6/0.6 case");
}

// ---------------------------------------------------------------------------
// 6. Pedigree selection on the bundled toy
// ---------------------------------------------------------------------------
std::map<std::string, std::string> simulate_readings(const dna::Pedigree& p,
                                                     const dna::HaplotypePopulation& pop,
                                                     double mu, Rng& rng) {
    std::map<std::string, std::string> hap;
    std::size_t relevant_total = 0;
    for (const auto& ind : p.individuals)
        if (pop.marker == dna::Marker::MtDna || ind.sex == Sex::Male) ++relevant_total;

    // Draw parents before children; loop until every relevant individual has
    // a haplotype (the fixtures are shallow, so this settles fast).
    while (hap.size() < relevant_total) {
        bool progress = false;
        for (const auto& ind : p.individuals) {
            const bool relevant = pop.marker == dna::Marker::MtDna || ind.sex == Sex::Male;
            if (!relevant || hap.count(ind.id)) continue;
            const auto parent = pop.marker == dna::Marker::MtDna ? ind.mother : ind.father;
            bool parent_pending = false;
            if (parent && !hap.count(*parent)) {
                const dna::Individual* par = p.find(*parent);
                parent_pending =
                    par && (pop.marker == dna::Marker::MtDna || par->sex == Sex::Male);
            }
            if (parent_pending) continue;
            if (parent && hap.count(*parent)) {
                if (rng.bernoulli(1.0 - mu)) {
                    hap[ind.id] = hap.at(*parent);
                } else {
                    std::vector<double> w(pop.labels.size(), 1.0);
                    w[static_cast<std::size_t>(pop.index_of(hap.at(*parent)))] = 0.0;
                    hap[ind.id] = pop.labels[rng.categorical(w)];
                }
            } else {
                hap[ind.id] = pop.labels[rng.categorical(pop.frequencies)];
            }
            progress = true;
        }
        if (!progress) break;
    }
    return hap;
}

void criterion_6() {
    Criterion c(6, "simulated family data selects the family pedigree in >= 95/100 replicates");

    ScenarioDocument doc =
        ScenarioDocument::load((g_root / "scenarios" / "romanov_toy.scn").string());
    Scenario s = doc.build();
    const auto& de = *s.dna_evidence;
    const dna::Pedigree& family = de.candidates[0];
    c.check(family.individuals.size() == 9, "the toy must have 9 individuals");
    const dna::HaplotypePopulation& mtpop = de.populations.at("mt");
    const dna::HaplotypePopulation& ypop = de.populations.at("y");
    const dna::MutationModel mut{de.mutation_rate};

    int wins = 0;
    for (int seed = 1; seed <= 100; ++seed) {
        Rng rng(static_cast<std::uint64_t>(seed));
        dna::DnaObservation mt{dna::Marker::MtDna,
                               simulate_readings(family, mtpop, mut.rate, rng)};
        dna::DnaObservation y{dna::Marker::Y, simulate_readings(family, ypop, mut.rate, rng)};

        int best = -1;
        double best_lik = -1.0;
        for (std::size_t i = 0; i < de.candidates.size(); ++i) {
            const double lik = dna::dna_likelihood(de.candidates[i], mtpop, mut, mt) *
                               dna::dna_likelihood(de.candidates[i], ypop, mut, y);
            if (lik > best_lik) {
                best_lik = lik;
                best = static_cast<int>(i);
            }
        }
        if (best == 0) ++wins;
    }
    c.check(wins >= 95, "family pedigree won only " + std::to_string(wins) + "/100 replicates");
    c.check_runtime(60.0);
}

// ---------------------------------------------------------------------------
// 7. Selection-effect closed form and Monte Carlo
// ---------------------------------------------------------------------------
void criterion_7() {
    Criterion c(7, "selection_adjust closed form and a 1e6-draw Monte Carlo agree");

    const double closed = evidence::selection_adjust(0.001, 1000);
    c.check_close(closed, 0.632305, 1e-6, "closed form at p=0.001, T=1000");

    // Independent stochastic route: simulate the 1000 Bernoulli trials.
    Rng rng(7777);
    const int draws = 1000000;
    const std::uint64_t threshold =
        static_cast<std::uint64_t>(0.001 * 18446744073709551616.0);
    int hits = 0;
    for (int i = 0; i < draws; ++i) {
        for (int t = 0; t < 1000; ++t) {
            if (rng.next_u64() < threshold) {
                ++hits;
                break;
            }
        }
    }
    const double estimate = static_cast<double>(hits) / draws;
    const double se = std::sqrt(closed * (1.0 - closed) / draws);
    c.check(std::abs(estimate - closed) <= 3.0 * se,
            "Monte Carlo estimate " + format_double(estimate) + " beyond 3 SE (" +
                format_double(3.0 * se) + ") of " + format_double(closed));
}

// ---------------------------------------------------------------------------
// 8. Flattening soundness on the corpus
// ---------------------------------------------------------------------------
Network hand_built(const std::string& name) {
    auto f = [](std::vector<std::string> s, std::vector<int> c, std::vector<double> v) {
        return Factor(std::move(s), std::move(c), std::move(v));
    };
    auto var = [](const std::string& id, std::vector<std::string> labels) {
        return DiscreteVariable{id, id, static_cast<int>(labels.size()), std::move(labels)};
    };

    if (name == "talpiyot.oobn") {
        return Network(
            {var("is_nt", {"ntped", "other"}), var("gene_freq", {"common", "rare"}),
             var("onomasticon.pattern", {"weak", "strong"}),
             var("onomasticon.match", {"no", "yes"}), var("dna.compatible", {"no", "yes"})},
            {f({"is_nt"}, {2}, {0.5, 0.5}), f({"gene_freq"}, {2}, {0.8, 0.2}),
             f({"onomasticon.pattern", "is_nt"}, {2, 2}, {0.2, 0.7, 0.8, 0.3}),
             f({"onomasticon.match", "onomasticon.pattern"}, {2, 2}, {0.9, 0.25, 0.1, 0.75}),
             f({"dna.compatible", "is_nt", "gene_freq"}, {2, 2, 2},
               {0.1, 0.05, 0.6, 0.85, 0.9, 0.95, 0.4, 0.15})});
    }
    if (name == "nested_chain.oobn") {
        return Network(
            {var("start", {"lo", "hi"}), var("b1.inner.out", {"lo", "hi"}),
             var("b2.inner.out", {"lo", "hi"}), var("sensor1", {"off", "on"}),
             var("sensor2", {"off", "on"})},
            {f({"start"}, {2}, {0.7, 0.3}),
             f({"b1.inner.out", "start"}, {2, 2}, {0.9, 0.2, 0.1, 0.8}),
             f({"b2.inner.out", "start"}, {2, 2}, {0.9, 0.2, 0.1, 0.8}),
             f({"sensor1", "b1.inner.out"}, {2, 2}, {0.95, 0.3, 0.05, 0.7}),
             f({"sensor2", "b2.inner.out"}, {2, 2}, {0.9, 0.4, 0.1, 0.6})});
    }
    if (name == "multi_item.oobn") {
        return Network(
            {var("hyp", {"t", "f"}), var("p1.reading", {"a", "b", "c"}),
             var("direct2", {"n", "y"}), var("wide4", {"w0", "w1", "w2", "w3"})},
            {f({"hyp"}, {2}, {0.35, 0.65}),
             f({"p1.reading", "hyp"}, {3, 2}, {0.5, 0.1, 0.3, 0.3, 0.2, 0.6}),
             f({"direct2", "hyp"}, {2, 2}, {0.8, 0.3, 0.2, 0.7}),
             f({"wide4", "hyp"}, {4, 2}, {0.1, 0.4, 0.2, 0.3, 0.3, 0.2, 0.4, 0.1})});
    }
    if (name == "maternal_line.oobn") {
        auto transmit3 = [&](const std::string& child, const std::string& parent,
                             double mu) {
            const double off = mu / 2.0;
            return f({child, parent}, {3, 3},
                     {1.0 - mu, off, off, off, 1.0 - mu, off, off, off, 1.0 - mu});
        };
        return Network({var("founder", {"h1", "h2", "h3"}),
                        var("g1.child", {"h1", "h2", "h3"}),
                        var("g2.child", {"h1", "h2", "h3"}),
                        var("typed", {"h1", "h2", "h3"})},
                       {f({"founder"}, {3}, {0.5, 0.3, 0.2}),
                        transmit3("g1.child", "founder", 0.01),
                        transmit3("g2.child", "g1.child", 0.01),
                        transmit3("typed", "g2.child", 0.05)});
    }
    if (name == "shared_input.oobn") {
        return Network({var("frequency", {"f1", "f2"}), var("left.draw", {"f1", "f2"}),
                        var("right.draw", {"f1", "f2"})},
                       {f({"frequency"}, {2}, {0.3, 0.7}),
                        f({"left.draw", "frequency"}, {2, 2}, {0.99, 0.02, 0.01, 0.98}),
                        f({"right.draw", "frequency"}, {2, 2}, {0.99, 0.02, 0.01, 0.98})});
    }
    // single_node.oobn
    return Network({var("only", {"a", "b"})}, {f({"only"}, {2}, {0.25, 0.75})});
}

void criterion_8() {
    Criterion c(8, "flattened corpus models match hand-flattened networks; invalid files diagnose");

    const std::vector<std::string> models = {"talpiyot.oobn",     "nested_chain.oobn",
                                             "multi_item.oobn",   "shared_input.oobn",
                                             "single_node.oobn",  "maternal_line.oobn"};
    Rng rng(808);
    for (const auto& name : models) {
        auto parsed = oobn::parse_file((g_root / "scenarios" / "models" / name).string());
        if (!parsed.ok()) {
            c.check(false, name + " failed to parse");
            continue;
        }
        oobn::FlatNetwork flat = oobn::flatten(*parsed.document);
        Network hand = hand_built(name);
        c.check(flat.network.variables().size() == hand.variables().size(),
                name + ": variable count");

        // Full-joint agreement implies agreement of every query; also probe
        // posterior queries with random evidence through both networks.
        c.check(enumerate_joint(flat.network).same_table(enumerate_joint(hand), 1e-9),
                name + ": joint distribution differs from the hand-flattened fixture");

        const auto& vars = hand.variables();
        for (int probe = 0; probe < 3; ++probe) {
            EvidenceAssignment e;
            const auto& evar = vars[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<int>(vars.size()) - 1))];
            e.assignments[evar.id] = rng.uniform_int(0, evar.cardinality - 1);
            std::set<std::string> targets;
            for (const auto& v : vars)
                if (v.id != evar.id) targets.insert(v.id);
            if (targets.empty()) continue;
            QueryResult qa = query(flat.network, {*targets.begin()}, e);
            QueryResult qb = query(hand, {*targets.begin()}, e);
            c.check(qa.impossible == qb.impossible, name + ": impossibility flags");
            if (!qa.impossible && !qb.impossible) {
                c.check_close(qa.evidence_prob, qb.evidence_prob, 1e-9,
                              name + ": evidence probability");
                c.check(qa.posterior.same_table(qb.posterior, 1e-9), name + ": posterior");
            }
        }
    }

    int invalid_checked = 0;
    for (const auto& entry :
         fs::directory_iterator(g_root / "scenarios" / "models" / "invalid")) {
        if (entry.path().extension() != ".oobn") continue;
        ++invalid_checked;
        bool located = false;
        try {
            auto r = oobn::parse_file(entry.path().string());
            std::vector<Diagnostic> ds = r.diagnostics;
            if (r.ok()) {
                auto vs = oobn::validate(*r.document);
                ds.insert(ds.end(), vs.begin(), vs.end());
            }
            for (const auto& d : ds)
                if (d.is_error() && d.line >= 1) located = true;
        } catch (const std::exception& e) {
            c.check(false, entry.path().filename().string() + " crashed: " + e.what());
            continue;
        }
        c.check(located, entry.path().filename().string() +
                             " must produce a located error diagnostic");
    }
    c.check(invalid_checked >= 10, "expected at least 10 invalid corpus files");
}

// ---------------------------------------------------------------------------
// 9. End-to-end determinism
// ---------------------------------------------------------------------------
void criterion_9() {
    Criterion c(9, "machine output is byte-identical across runs");
    const fs::path scn = g_root / "scenarios" / "talpiyot.scn";
    const fs::path out1 = fs::temp_directory_path() / "kinship_accept_out1.json";
    const fs::path out2 = fs::temp_directory_path() / "kinship_accept_out2.json";
    const int rc1 = run_cli("eval " + scn.string() + " --machine " + out1.string());
    const int rc2 = run_cli("eval " + scn.string() + " --machine " + out2.string());
    c.check(rc1 == 0 && rc2 == 0, "eval must exit 0");
    const std::string a = read_file(out1), b = read_file(out2);
    c.check(!a.empty(), "machine output must not be empty");
    c.check(a == b, "machine outputs differ between runs");
    fs::remove(out1);
    fs::remove(out2);
}

// ---------------------------------------------------------------------------
// CLI exit-code contract (exercised by the cli_contract ctest entry)
// ---------------------------------------------------------------------------
void cli_contract() {
    Criterion c(0, "CLI exit-code contract (0 ok / 1 validation / 2 io-parse)");

    const fs::path scn = g_root / "scenarios";
    const fs::path fixtures = g_root / "tests" / "fixtures";

    c.check(run_cli("validate " + (scn / "talpiyot.scn").string()) == 0,
            "validate talpiyot.scn must exit 0");
    c.check(run_cli("validate " + (scn / "romanov_toy.scn").string()) == 0,
            "validate romanov_toy.scn must exit 0");
    c.check(run_cli("validate " + (scn / "single_mary.scn").string()) == 0,
            "validate single_mary.scn must exit 0");
    c.check(run_cli("validate " + (fixtures / "missing_table.scn").string()) == 2,
            "missing referenced table must exit 2");
    c.check(run_cli("validate /no/such/file.scn") == 2, "missing scenario must exit 2");
    c.check(run_cli("validate " + (fixtures / "invalid_cpt.scn").string()) == 1,
            "non-normalized model CPT must exit 1");

    // E_CPT_NOT_NORMALIZED must appear on stderr in file:line:col form.
    {
        const fs::path err = fs::temp_directory_path() / "kinship_accept_err.txt";
        std::string cmd = g_cli + " validate " + (fixtures / "invalid_cpt.scn").string() +
                          " 2> " + err.string() + " > /dev/null";
        const int rc = std::system(cmd.c_str());
        c.check(WIFEXITED(rc) && WEXITSTATUS(rc) == 1, "invalid model must exit 1");
        const std::string text = read_file(err);
        c.check(text.find("E_CPT_NOT_NORMALIZED") != std::string::npos,
                "stderr must carry E_CPT_NOT_NORMALIZED");
        c.check(text.find(":2:") != std::string::npos,
                "diagnostic must carry the line number of the bad row");
        fs::remove(err);
    }

    c.check(run_cli("eval " + (fixtures / "direct_items.scn").string()) == 0,
            "eval direct_items must exit 0 (flags are results)");
    c.check(run_cli("eval " + (fixtures / "mismatch_mu0.scn").string()) == 0,
            "eval mismatch_mu0 must exit 0 with the +infinity flag in the report");
    c.check(run_cli("sweep " + (fixtures / "direct_items.scn").string()) == 1,
            "sweep without axes must exit 1");
    c.check(run_cli("sweep " + (scn / "single_mary.scn").string()) == 0,
            "sweep with scenario axes must exit 0");
    c.check(run_cli("pedigrees " + (scn / "romanov_toy.scn").string()) == 0,
            "pedigrees on the toy must exit 0");
    c.check(run_cli("pedigrees " + (fixtures / "direct_items.scn").string()) == 1,
            "pedigrees without candidates must exit 1");
    c.check(run_cli("oracle --seed 42 --count 50") == 0, "oracle seed 42 x50 must exit 0");
    c.check(run_cli("oracle --count 0") == 1, "oracle count 0 is a usage error");

    // Determinism of the oracle command itself.
    const fs::path o1 = fs::temp_directory_path() / "kinship_accept_oracle1.txt";
    const fs::path o2 = fs::temp_directory_path() / "kinship_accept_oracle2.txt";
    run_cli("oracle --seed 7 --count 20", o1);
    run_cli("oracle --seed 7 --count 20", o2);
    c.check(read_file(o1) == read_file(o2), "oracle output must be seed-deterministic");
    fs::remove(o1);
    fs::remove(o2);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: kinship_acceptance <repo_root> <kinship-lr binary> [--cli-only]\n";
        return 2;
    }
    g_root = fs::path(argv[1]);
    g_cli = argv[2];
    const bool cli_only = argc > 3 && std::string(argv[3]) == "--cli-only";

    try {
        if (cli_only) {
            cli_contract();
        } else {
            criterion_1();
            criterion_2();
            criterion_3();
            criterion_4();
            criterion_5();
            criterion_6();
            criterion_7();
            criterion_8();
            criterion_9();
        }
    } catch (const std::exception& e) {
        std::cerr << "[FAIL] suite aborted: " << e.what() << "\n";
        return 1;
    }

    if (g_failures == 0) {
        std::cout << (cli_only ? "CLI contract: all checks passed\n"
                               : "acceptance: all criteria passed\n");
        return 0;
    }
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
}
