#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kinship/diagnostics.hpp"
#include "kinship/lr_value.hpp"
#include "kinship/network.hpp"
#include "kinship/sex.hpp"

namespace kinship::dna {

using kinship::Sex;

enum class Marker { MtDna, Y };

struct Individual {
    std::string id;
    Sex sex = Sex::Female;
    std::optional<std::string> mother;
    std::optional<std::string> father;

    bool is_founder() const { return !mother && !father; }
};

struct Pedigree {
    std::string label;
    std::vector<Individual> individuals;

    const Individual* find(const std::string& id) const;
};

std::vector<Diagnostic> validate_pedigree(const Pedigree& p);

// CSV loader: header `id,sex,mother,father`, empty parent fields for founders.
Pedigree load_pedigree(const std::string& path, const std::string& label = "");
Pedigree parse_pedigree(const std::string& text, std::vector<Diagnostic>* diags = nullptr);

// Haplotype classes of one marker with their population frequencies
// (normalized within 1e-9).
struct HaplotypePopulation {
    Marker marker = Marker::MtDna;
    std::vector<std::string> labels;
    std::vector<double> frequencies;

    int index_of(const std::string& label) const;
    int size() const { return static_cast<int>(labels.size()); }
};

std::vector<Diagnostic> validate_population(const HaplotypePopulation& pop);

// Uniform single-step mutation: rate mu to any of the other K-1 classes.
struct MutationModel {
    double rate = 0.001;
};

struct DnaObservation {
    Marker marker = Marker::MtDna;
    std::map<std::string, std::string> readings;  // individual id -> haplotype label
};

std::vector<Diagnostic> validate_observation(const DnaObservation& obs, const Pedigree& p,
                                             const HaplotypePopulation& pop);

// Child-given-parent transmission table: stays identical with probability
// 1 - mu, otherwise uniform over the other K-1 classes. Rows sum to 1
// exactly. Scope ids default to ("child", "parent").
Factor transmit_cpt(double mu, int haplotype_count,
                    const std::string& child_id = "child",
                    const std::string& parent_id = "parent");

// One variable per marker-relevant individual (everyone for mtDNA, males
// for Y); founders and individuals whose transmitting parent is outside the
// network take the population frequencies, everyone else the transmit CPT.
Network build_marker_network(const Pedigree& p, const HaplotypePopulation& pop,
                             const MutationModel& mut);

// P(observation | pedigree); unobserved individuals are marginalized. A
// result of 0 is a legitimate disconfirmation, not an error.
double dna_likelihood(const Pedigree& p, const HaplotypePopulation& pop,
                      const MutationModel& mut, const DnaObservation& obs);

struct DnaLr {
    LrValue lr;  // alt / null
    double alt_likelihood = 0.0;
    double null_likelihood = 0.0;
};

DnaLr dna_lr(const DnaObservation& obs, const HaplotypePopulation& pop,
             const MutationModel& mut, const Pedigree& ped_null, const Pedigree& ped_alt);

struct PedigreePosterior {
    std::vector<double> likelihoods;  // aligned with the candidate list
    std::vector<double> posterior;
    int argmax = -1;                  // first index among ties
    bool undefined = false;           // all likelihoods zero
};

// posterior_i proportional to prior_i * P(obs | candidate_i).
PedigreePosterior most_probable_pedigree(const std::vector<Pedigree>& candidates,
                                         const HaplotypePopulation& pop,
                                         const MutationModel& mut, const DnaObservation& obs,
                                         const std::vector<double>& prior);

}  // namespace kinship::dna
