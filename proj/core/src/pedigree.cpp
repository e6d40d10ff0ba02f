#include "kinship/pedigree.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "kinship/numeric.hpp"

namespace kinship::dna {

const Individual* Pedigree::find(const std::string& id) const {
    for (const auto& ind : individuals)
        if (ind.id == id) return &ind;
    return nullptr;
}

std::vector<Diagnostic> validate_pedigree(const Pedigree& p) {
    std::vector<Diagnostic> ds;
    auto err = [&](const std::string& code, const std::string& msg) {
        ds.push_back({Severity::Error, 0, 0, code, msg, ""});
    };

    std::set<std::string> ids;
    for (const auto& ind : p.individuals)
        if (!ids.insert(ind.id).second) err("E_PED_DUP", "duplicate individual '" + ind.id + "'");

    for (const auto& ind : p.individuals) {
        if (ind.mother) {
            const Individual* m = p.find(*ind.mother);
            if (!m)
                err("E_PED_UNKNOWN", "individual '" + ind.id + "' lists unknown mother '" +
                                         *ind.mother + "'");
            else if (m->sex != Sex::Female)
                err("E_PED_SEX", "mother '" + *ind.mother + "' of '" + ind.id + "' is not female");
        }
        if (ind.father) {
            const Individual* f = p.find(*ind.father);
            if (!f)
                err("E_PED_UNKNOWN", "individual '" + ind.id + "' lists unknown father '" +
                                         *ind.father + "'");
            else if (f->sex != Sex::Male)
                err("E_PED_SEX", "father '" + *ind.father + "' of '" + ind.id + "' is not male");
        }
    }

    // No individual may be its own ancestor.
    std::map<std::string, int> state;
    bool cyclic = false;
    std::function<void(const Individual&)> visit = [&](const Individual& ind) {
        int& s = state[ind.id];
        if (s == 1) {
            cyclic = true;
            return;
        }
        if (s == 2 || cyclic) return;
        s = 1;
        for (const auto& pid : {ind.mother, ind.father})
            if (pid)
                if (const Individual* parent = p.find(*pid)) visit(*parent);
        s = 2;
    };
    for (const auto& ind : p.individuals) visit(ind);
    if (cyclic) err("E_PED_CYCLE", "pedigree contains an ancestry cycle");

    return ds;
}

Pedigree parse_pedigree(const std::string& text, std::vector<Diagnostic>* diags) {
    Pedigree p;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool saw_header = false;
    auto report = [&](int ln, const std::string& code, const std::string& msg) {
        if (diags) diags->push_back({Severity::Error, ln, 1, code, msg, ""});
    };

    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                out.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        out.push_back(cur);
        return out;
    };

    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line != "id,sex,mother,father")
                report(lineno, "E_PED_HEADER", "expected header 'id,sex,mother,father'");
            saw_header = true;
            continue;
        }
        auto fields = split(line);
        if (fields.size() != 4) {
            report(lineno, "E_PED_ROW", "expected 4 comma-separated fields");
            continue;
        }
        Individual ind;
        ind.id = fields[0];
        if (fields[1] == "F")
            ind.sex = Sex::Female;
        else if (fields[1] == "M")
            ind.sex = Sex::Male;
        else
            report(lineno, "E_PED_ROW", "sex must be F or M");
        if (!fields[2].empty()) ind.mother = fields[2];
        if (!fields[3].empty()) ind.father = fields[3];
        p.individuals.push_back(std::move(ind));
    }
    return p;
}

Pedigree load_pedigree(const std::string& path, const std::string& label) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open pedigree: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::vector<Diagnostic> ds;
    Pedigree p = parse_pedigree(buf.str(), &ds);
    if (has_errors(ds)) throw IoError("malformed pedigree " + path + ": " + ds.front().message);
    p.label = label.empty() ? path : label;
    return p;
}

int HaplotypePopulation::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return static_cast<int>(i);
    return -1;
}

std::vector<Diagnostic> validate_population(const HaplotypePopulation& pop) {
    std::vector<Diagnostic> ds;
    auto err = [&](const std::string& code, const std::string& msg) {
        ds.push_back({Severity::Error, 0, 0, code, msg, ""});
    };
    if (pop.labels.size() < 2) err("E_POP_SIZE", "at least 2 haplotype classes required");
    if (pop.labels.size() != pop.frequencies.size())
        err("E_POP_SHAPE", "label and frequency counts differ");
    std::set<std::string> seen;
    for (const auto& l : pop.labels)
        if (!seen.insert(l).second) err("E_POP_DUP", "duplicate haplotype label '" + l + "'");
    if (pop.labels.size() == pop.frequencies.size()) {
        double sum = 0.0;
        for (double f : pop.frequencies) {
            if (f < 0.0) err("E_POP_NEGATIVE", "negative haplotype frequency");
            sum += f;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            err("E_POP_NOT_NORMALIZED", "frequencies sum to " + format_double(sum));
    }
    return ds;
}

std::vector<Diagnostic> validate_observation(const DnaObservation& obs, const Pedigree& p,
                                             const HaplotypePopulation& pop) {
    std::vector<Diagnostic> ds;
    auto err = [&](const std::string& code, const std::string& msg) {
        ds.push_back({Severity::Error, 0, 0, code, msg, ""});
    };
    if (obs.marker != pop.marker)
        err("E_OBS_MARKER", "observation and population disagree on the marker kind");
    for (const auto& [id, label] : obs.readings) {
        const Individual* ind = p.find(id);
        if (!ind) {
            err("E_OBS_UNKNOWN", "reading for unknown individual '" + id + "'");
            continue;
        }
        if (obs.marker == Marker::Y && ind->sex != Sex::Male)
            err("E_OBS_SEX", "Y-marker reading on non-male individual '" + id + "'");
        if (pop.index_of(label) < 0)
            err("E_OBS_LABEL", "reading '" + label + "' is not a population haplotype");
    }
    return ds;
}

Factor transmit_cpt(double mu, int haplotype_count, const std::string& child_id,
                    const std::string& parent_id) {
    if (haplotype_count < 2) throw Error("transmit_cpt: need at least 2 haplotype classes");
    if (mu < 0.0 || mu >= 1.0) throw Error("transmit_cpt: mutation rate must lie in [0, 1)");

    const int k = haplotype_count;
    const double off = mu / static_cast<double>(k - 1);
    std::vector<double> values(static_cast<std::size_t>(k) * k);
    // Scope (child, parent): child varies slowest. The final child entry of
    // each parent column is the remainder of the ascending partial sum, so a
    // natural-order row sum lands on 1.0 exactly (the formula values are off
    // by at most one ulp).
    for (int parent = 0; parent < k; ++parent) {
        double partial = 0.0;
        for (int child = 0; child + 1 < k; ++child) {
            const double v = (child == parent) ? 1.0 - mu : off;
            values[static_cast<std::size_t>(child) * k + parent] = v;
            partial += v;
        }
        values[static_cast<std::size_t>(k - 1) * k + parent] = std::max(0.0, 1.0 - partial);
    }
    return Factor({child_id, parent_id}, {k, k}, std::move(values));
}

namespace {

bool relevant(const Individual& ind, Marker marker) {
    return marker == Marker::MtDna || ind.sex == Sex::Male;
}

// The transmitting parent for the marker, or nullopt for founders.
std::optional<std::string> marker_parent(const Individual& ind, Marker marker) {
    return marker == Marker::MtDna ? ind.mother : ind.father;
}

}  // namespace

Network build_marker_network(const Pedigree& p, const HaplotypePopulation& pop,
                             const MutationModel& mut) {
    auto pd = validate_pedigree(p);
    if (has_errors(pd)) throw Error("invalid pedigree: " + pd.front().message);
    auto od = validate_population(pop);
    if (has_errors(od)) throw Error("invalid haplotype population: " + od.front().message);

    const int k = pop.size();
    std::set<std::string> in_network;
    for (const auto& ind : p.individuals)
        if (relevant(ind, pop.marker)) in_network.insert(ind.id);

    std::vector<DiscreteVariable> variables;
    std::vector<Factor> cpts;
    for (const auto& ind : p.individuals) {
        if (!in_network.count(ind.id)) continue;
        DiscreteVariable v;
        v.id = ind.id;
        v.name = ind.id;
        v.cardinality = k;
        v.state_labels = pop.labels;
        variables.push_back(std::move(v));

        std::optional<std::string> parent = marker_parent(ind, pop.marker);
        if (parent && in_network.count(*parent)) {
            cpts.push_back(transmit_cpt(mut.rate, k, ind.id, *parent));
        } else {
            // Founder, or transmitting parent outside the network.
            cpts.push_back(Factor({ind.id}, {k}, pop.frequencies));
        }
    }
    return Network(std::move(variables), std::move(cpts));
}

double dna_likelihood(const Pedigree& p, const HaplotypePopulation& pop,
                      const MutationModel& mut, const DnaObservation& obs) {
    auto ds = validate_observation(obs, p, pop);
    if (has_errors(ds)) throw Error("invalid observation: " + ds.front().message);

    Network net = build_marker_network(p, pop, mut);
    EvidenceAssignment e;
    for (const auto& [id, label] : obs.readings)
        e.assignments[id] = pop.index_of(label);
    return evidence_likelihood(net, e);
}

DnaLr dna_lr(const DnaObservation& obs, const HaplotypePopulation& pop,
             const MutationModel& mut, const Pedigree& ped_null, const Pedigree& ped_alt) {
    DnaLr out;
    out.null_likelihood = dna_likelihood(ped_null, pop, mut, obs);
    out.alt_likelihood = dna_likelihood(ped_alt, pop, mut, obs);
    out.lr = LrValue::from_ratio(out.alt_likelihood, out.null_likelihood);
    return out;
}

PedigreePosterior most_probable_pedigree(const std::vector<Pedigree>& candidates,
                                         const HaplotypePopulation& pop,
                                         const MutationModel& mut, const DnaObservation& obs,
                                         const std::vector<double>& prior) {
    if (candidates.empty()) throw Error("most_probable_pedigree: no candidates");
    if (prior.size() != candidates.size())
        throw Error("most_probable_pedigree: prior length must match candidates");
    double prior_sum = 0.0;
    for (double w : prior) {
        if (w < 0.0) throw Error("most_probable_pedigree: negative prior weight");
        prior_sum += w;
    }
    if (prior_sum <= 0.0) throw Error("most_probable_pedigree: prior weights all zero");

    PedigreePosterior out;
    out.likelihoods.reserve(candidates.size());
    double total = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        double lik = dna_likelihood(candidates[i], pop, mut, obs);
        out.likelihoods.push_back(lik);
        total += prior[i] * lik;
    }
    out.posterior.assign(candidates.size(), 0.0);
    if (total <= 0.0) {
        out.undefined = true;
        return out;
    }
    for (std::size_t i = 0; i < candidates.size(); ++i)
        out.posterior[i] = prior[i] * out.likelihoods[i] / total;
    out.argmax = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i)
        if (out.posterior[i] > out.posterior[out.argmax]) out.argmax = static_cast<int>(i);
    return out;
}

}  // namespace kinship::dna
