#include <benchmark/benchmark.h>

#include "kinship/evidence.hpp"
#include "kinship/onomasticon.hpp"
#include "kinship/pedigree.hpp"

using namespace kinship;

namespace {

onomasticon::NameTable demo_table() {
    onomasticon::NameTable t;
    t.source_label = "SYNTHETIC bench";
    t.categories = {"A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "Other"};
    t.frequencies = {0.24, 0.16, 0.05, 0.03, 0.04, 0.02, 0.06, 0.02, 0.02, 0.02, 0.34};
    t.sample_size = 317;
    return t;
}

void BM_SequenceLikelihood(benchmark::State& state) {
    onomasticon::NameTable t = demo_table();
    auto counts = onomasticon::counts_from_frequencies(t).counts;
    auto prior = onomasticon::DirichletPrior::uniform(t.category_count());
    std::vector<std::string> names;
    for (int i = 0; i < state.range(0); ++i)
        names.push_back(t.categories[static_cast<std::size_t>(i) % t.categories.size()]);
    for (auto _ : state)
        benchmark::DoNotOptimize(onomasticon::sequence_likelihood(prior, counts, names, t));
}
BENCHMARK(BM_SequenceLikelihood)->Arg(2)->Arg(6)->Arg(20);

void BM_FamilyLikelihood(benchmark::State& state) {
    onomasticon::NameTable t = demo_table();
    onomasticon::SexTables tables;
    tables.emplace(Sex::Female,
                   onomasticon::NameModel{
                       t, onomasticon::DirichletPrior::uniform(t.category_count())});
    onomasticon::FamilyConfiguration config;
    std::vector<std::string> group;
    for (int i = 0; i < 6; ++i) {
        std::string id = "m" + std::to_string(i);
        config.members.push_back(
            {id, Sex::Female, t.categories[static_cast<std::size_t>(i)], ""});
        if (i >= 2) {
            group.push_back(id);
            config.parent_links[id] = onomasticon::ParentLink{std::string("m0"), std::nullopt};
        }
    }
    config.sibling_groups.push_back(group);
    onomasticon::NamingConstraints constraints;
    constraints.sibling_distinct = true;
    constraints.ancestor_boost = 0.5;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            onomasticon::family_likelihood_alt(config, tables, constraints));
}
BENCHMARK(BM_FamilyLikelihood);

void BM_DnaLikelihood(benchmark::State& state) {
    // Three-generation maternal line plus unrelated individuals.
    dna::Pedigree p;
    p.label = "bench";
    p.individuals.push_back({"g", Sex::Female, std::nullopt, std::nullopt});
    p.individuals.push_back({"m", Sex::Female, std::string("g"), std::nullopt});
    for (int i = 0; i < 4; ++i)
        p.individuals.push_back(
            {"c" + std::to_string(i), Sex::Female, std::string("m"), std::nullopt});
    for (int i = 0; i < 3; ++i)
        p.individuals.push_back({"u" + std::to_string(i), Sex::Female, std::nullopt, std::nullopt});

    dna::HaplotypePopulation pop{dna::Marker::MtDna,
                                 {"h1", "h2", "h3", "h4", "h5", "h6"},
                                 {0.3, 0.25, 0.15, 0.12, 0.1, 0.08}};
    dna::DnaObservation obs{dna::Marker::MtDna,
                            {{"m", "h1"}, {"c0", "h1"}, {"c1", "h1"}, {"u0", "h3"}}};
    const dna::MutationModel mut{0.001};
    for (auto _ : state)
        benchmark::DoNotOptimize(dna::dna_likelihood(p, pop, mut, obs));
}
BENCHMARK(BM_DnaLikelihood);

void BM_IntegratePoisson(benchmark::State& state) {
    auto prior = evidence::CountPrior::poisson(
        evidence::CountPrior::Quantity::OssuaryCount, 1100.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(evidence::integrate_over_count(prior, [](long n) {
            return n >= 1 ? evidence::selection_adjust(1e-5, n) : 0.0;
        }));
}
BENCHMARK(BM_IntegratePoisson);

}  // namespace
