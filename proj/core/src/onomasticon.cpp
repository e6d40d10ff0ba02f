#include "kinship/onomasticon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "kinship/numeric.hpp"

namespace kinship::onomasticon {

int NameTable::index_of(const std::string& category) const {
    for (std::size_t i = 0; i < categories.size(); ++i)
        if (categories[i] == category) return static_cast<int>(i);
    return -1;
}

std::vector<Diagnostic> validate_table(const NameTable& t) {
    std::vector<Diagnostic> ds;
    auto err = [&](const std::string& code, const std::string& msg) {
        ds.push_back({Severity::Error, 0, 0, code, msg, ""});
    };

    if (t.categories.empty()) {
        err("E_TABLE_EMPTY", "table has no categories");
        return ds;
    }
    if (t.categories.size() != t.frequencies.size())
        err("E_TABLE_SHAPE", "category and frequency counts differ");
    if (t.sample_size < 1)
        err("E_TABLE_N", "sample size must be >= 1");

    int other_count = 0;
    for (const auto& c : t.categories)
        if (c == kOtherCategory) ++other_count;
    if (other_count != 1)
        err("E_TABLE_OTHER", "category 'Other' must appear exactly once");
    else if (t.categories.back() != kOtherCategory)
        err("E_TABLE_OTHER", "category 'Other' must be last");

    std::set<std::string> seen;
    for (const auto& c : t.categories)
        if (!seen.insert(c).second) err("E_TABLE_DUP", "duplicate category '" + c + "'");

    if (t.categories.size() == t.frequencies.size()) {
        double sum = 0.0;
        for (std::size_t i = 0; i < t.frequencies.size(); ++i) {
            if (t.frequencies[i] < 0.0)
                err("E_TABLE_NEGATIVE", "negative frequency for '" + t.categories[i] + "'");
            sum += t.frequencies[i];
        }
        if (std::abs(sum - 1.0) > kTableSumTolerance)
            err("E_TABLE_NOT_NORMALIZED",
                "frequencies sum to " + format_double(sum) + ", outside 1 +/- " +
                    format_double(kTableSumTolerance));
    }
    return ds;
}

NameTable parse_table(const std::string& text, std::vector<Diagnostic>* diags) {
    NameTable t;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool saw_header = false;
    auto report = [&](int ln, const std::string& code, const std::string& msg) {
        if (diags) diags->push_back({Severity::Error, ln, 1, code, msg, ""});
    };

    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            // metadata: # source=<label> n=<N>
            auto spos = line.find("source=");
            auto npos = line.rfind(" n=");
            if (spos != std::string::npos && npos != std::string::npos && npos > spos) {
                t.source_label = line.substr(spos + 7, npos - (spos + 7));
                try {
                    t.sample_size = std::stol(line.substr(npos + 3));
                } catch (const std::exception&) {
                    report(lineno, "E_TABLE_META", "malformed sample size");
                }
            }
            continue;
        }
        if (!saw_header) {
            if (line != "name,frequency")
                report(lineno, "E_TABLE_HEADER", "expected header 'name,frequency'");
            saw_header = true;
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            report(lineno, "E_TABLE_ROW", "expected 'name,frequency'");
            continue;
        }
        t.categories.push_back(line.substr(0, comma));
        try {
            t.frequencies.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            report(lineno, "E_TABLE_ROW", "malformed frequency");
            t.frequencies.push_back(0.0);
        }
    }
    if (t.source_label.empty())
        report(0, "E_TABLE_META", "missing '# source=<label> n=<N>' metadata line");
    return t;
}

NameTable load_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open name table: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::vector<Diagnostic> ds;
    NameTable t = parse_table(buf.str(), &ds);
    if (has_errors(ds)) throw IoError("malformed name table " + path + ": " + ds.front().message);
    return t;
}

NameTable mix_tables(const std::vector<std::pair<NameTable, double>>& components) {
    if (components.empty()) throw Error("mix_tables: no components");
    double total_weight = 0.0;
    for (const auto& [t, w] : components) {
        if (w <= 0.0) throw Error("mix_tables: weights must be positive");
        auto ds = validate_table(t);
        if (has_errors(ds))
            throw Error("mix_tables: component '" + t.source_label +
                        "' is invalid: " + ds.front().message);
        if (t.categories != components.front().first.categories)
            throw Error("mix_tables: component '" + t.source_label +
                        "' has a different category list");
        total_weight += w;
    }

    NameTable mixed;
    mixed.categories = components.front().first.categories;
    mixed.frequencies.assign(mixed.categories.size(), 0.0);
    double n = 0.0;
    bool synthetic = false;
    std::string label;
    for (const auto& [t, w] : components) {
        const double share = w / total_weight;
        for (std::size_t i = 0; i < mixed.frequencies.size(); ++i)
            mixed.frequencies[i] += share * t.frequencies[i];
        n += share * static_cast<double>(t.sample_size);
        synthetic = synthetic || t.is_synthetic();
        if (!label.empty()) label += " + ";
        label += t.source_label + "*" + format_double(share);
    }
    mixed.sample_size = std::max<long>(1, std::lround(n));
    mixed.source_label = (synthetic ? "SYNTHETIC mix(" : "mix(") + label + ")";
    return mixed;
}

CountResult counts_from_frequencies(const NameTable& t) {
    auto ds = validate_table(t);
    if (has_errors(ds)) throw Error("counts_from_frequencies: invalid table: " + ds.front().message);

    CountResult r;
    r.counts.resize(t.categories.size(), 0);
    long named_total = 0;
    for (std::size_t i = 0; i + 1 < t.categories.size(); ++i) {
        r.counts[i] = std::lround(t.frequencies[i] * static_cast<double>(t.sample_size));
        named_total += r.counts[i];
    }
    long other = t.sample_size - named_total;
    if (other < 0) {
        other = 0;
        r.clamped = true;
    }
    r.counts.back() = other;
    return r;
}

double DirichletPrior::total() const {
    double s = 0.0;
    for (double a : concentrations) s += a;
    return s;
}

DirichletPrior DirichletPrior::uniform(std::size_t categories, double alpha) {
    if (alpha <= 0.0) throw Error("DirichletPrior: concentrations must be positive");
    return DirichletPrior{std::vector<double>(categories, alpha)};
}

DirichletPrior DirichletPrior::scaled_to(const NameTable& t, double total) {
    if (total <= 0.0) throw Error("DirichletPrior: total mass must be positive");
    double fsum = 0.0;
    for (double f : t.frequencies) fsum += f;
    if (fsum <= 0.0) throw Error("DirichletPrior: table frequencies sum to zero");
    DirichletPrior p;
    p.concentrations.reserve(t.frequencies.size());
    for (double f : t.frequencies) {
        double a = f / fsum * total;
        // A zero frequency would give an invalid concentration; keep a sliver.
        p.concentrations.push_back(a > 0.0 ? a : 1e-12);
    }
    return p;
}

namespace {

void check_alignment(const DirichletPrior& prior, const std::vector<long>& counts) {
    if (prior.concentrations.size() != counts.size())
        throw Error("Dirichlet prior and counts differ in length");
    for (double a : prior.concentrations)
        if (a <= 0.0) throw Error("Dirichlet concentrations must be positive");
    for (long c : counts)
        if (c < 0) throw Error("counts must be nonnegative");
}

}  // namespace

double posterior_predictive(const DirichletPrior& prior, const std::vector<long>& counts,
                            std::size_t index) {
    check_alignment(prior, counts);
    if (index >= counts.size()) throw Error("posterior_predictive: index out of range");
    double n = 0.0;
    for (long c : counts) n += static_cast<double>(c);
    return (prior.concentrations[index] + static_cast<double>(counts[index])) /
           (prior.total() + n);
}

double sequence_likelihood(const DirichletPrior& prior, const std::vector<long>& counts,
                           const std::vector<std::string>& names, const NameTable& t) {
    check_alignment(prior, counts);
    std::vector<long> c(counts);
    ProductAccumulator acc;
    for (const auto& name : names) {
        int idx = t.index_of(name);
        if (idx < 0) throw Error("sequence_likelihood: unknown name label '" + name + "'");
        acc.multiply(posterior_predictive(prior, c, static_cast<std::size_t>(idx)));
        ++c[idx];
    }
    return acc.value();
}

const FamilyMember* FamilyConfiguration::find_member(const std::string& id) const {
    for (const auto& m : members)
        if (m.id == id) return &m;
    return nullptr;
}

std::vector<Diagnostic> validate_configuration(const FamilyConfiguration& config) {
    std::vector<Diagnostic> ds;
    auto err = [&](const std::string& code, const std::string& msg) {
        ds.push_back({Severity::Error, 0, 0, code, msg, ""});
    };

    std::set<std::string> ids;
    for (const auto& m : config.members)
        if (!ids.insert(m.id).second) err("E_FAMILY_DUP", "duplicate member id '" + m.id + "'");

    std::set<std::string> grouped;
    for (const auto& g : config.sibling_groups) {
        for (const auto& id : g) {
            if (!ids.count(id))
                err("E_FAMILY_UNKNOWN", "sibling group references unknown member '" + id + "'");
            else if (!grouped.insert(id).second)
                err("E_FAMILY_GROUPS", "member '" + id + "' appears in two sibling groups");
        }
    }

    for (const auto& [child, link] : config.parent_links) {
        if (!ids.count(child))
            err("E_FAMILY_UNKNOWN", "parent link references unknown member '" + child + "'");
        for (const auto& parent : {link.mother, link.father})
            if (parent && !ids.count(*parent))
                err("E_FAMILY_UNKNOWN", "parent link references unknown member '" + *parent + "'");
    }

    // Parent links must be acyclic.
    std::map<std::string, int> state;
    bool cyclic = false;
    std::function<void(const std::string&)> visit = [&](const std::string& id) {
        int& s = state[id];
        if (s == 1) {
            cyclic = true;
            return;
        }
        if (s == 2 || cyclic) return;
        s = 1;
        auto it = config.parent_links.find(id);
        if (it != config.parent_links.end()) {
            if (it->second.mother) visit(*it->second.mother);
            if (it->second.father) visit(*it->second.father);
        }
        s = 2;
    };
    for (const auto& m : config.members) visit(m.id);
    if (cyclic) err("E_FAMILY_CYCLE", "parent links contain a cycle");

    return ds;
}

namespace {

// Deterministic processing order: parents before children, ties by id.
std::vector<const FamilyMember*> topological_members(const FamilyConfiguration& config) {
    std::map<std::string, const FamilyMember*> by_id;
    for (const auto& m : config.members) by_id[m.id] = &m;

    std::map<std::string, std::set<std::string>> pending_parents;
    for (const auto& m : config.members) {
        auto it = config.parent_links.find(m.id);
        if (it == config.parent_links.end()) continue;
        for (const auto& p : {it->second.mother, it->second.father})
            if (p && by_id.count(*p)) pending_parents[m.id].insert(*p);
    }

    std::vector<const FamilyMember*> order;
    std::set<std::string> done;
    while (order.size() < config.members.size()) {
        const FamilyMember* next = nullptr;
        for (const auto& [id, m] : by_id) {
            if (done.count(id)) continue;
            bool ready = true;
            for (const auto& p : pending_parents[id])
                if (!done.count(p)) ready = false;
            if (ready) {
                next = m;
                break;  // by_id is id-sorted, so this is the smallest ready id
            }
        }
        if (!next) throw Error("family configuration has cyclic parent links");
        done.insert(next->id);
        order.push_back(next);
    }
    return order;
}

std::set<std::string> ancestor_names(const FamilyConfiguration& config,
                                     const std::string& member_id) {
    std::set<std::string> names;
    std::set<std::string> visited;
    std::function<void(const std::string&)> walk = [&](const std::string& id) {
        auto it = config.parent_links.find(id);
        if (it == config.parent_links.end()) return;
        for (const auto& p : {it->second.mother, it->second.father}) {
            if (!p || !visited.insert(*p).second) continue;
            if (const FamilyMember* m = config.find_member(*p)) names.insert(m->name);
            walk(*p);
        }
    };
    walk(member_id);
    return names;
}

struct MemberDrawProbabilities {
    std::vector<double> alt_probs;  // aligned with topological order
    std::vector<const FamilyMember*> order;
    bool impossible = false;
};

// The per-member draw probabilities under the alternative (random family)
// model. Shared by both likelihood directions so the null mixture reweights
// exactly the same urn path.
MemberDrawProbabilities member_draw_probabilities(const FamilyConfiguration& config,
                                                  const SexTables& tables,
                                                  const NamingConstraints& constraints) {
    auto ds = validate_configuration(config);
    if (has_errors(ds)) throw Error("invalid family configuration: " + ds.front().message);

    MemberDrawProbabilities out;
    out.order = topological_members(config);

    // Urn state per sex: prior-augmented counts, incremented per draw.
    std::map<Sex, std::vector<long>> draws;
    for (const auto& [sex, model] : tables) {
        if (model.prior.concentrations.size() != model.table.category_count())
            throw Error("prior length does not match table");
        draws[sex] = std::vector<long>(model.table.category_count(), 0);
    }

    std::map<std::string, int> group_of;
    for (std::size_t g = 0; g < config.sibling_groups.size(); ++g)
        for (const auto& id : config.sibling_groups[g]) group_of[id] = static_cast<int>(g);
    std::vector<std::set<std::string>> used_in_group(config.sibling_groups.size());

    for (const FamilyMember* m : out.order) {
        auto tit = tables.find(m->sex);
        if (tit == tables.end())
            throw Error("no name table for the sex of member '" + m->id + "'");
        const NameModel& model = tit->second;

        int obs = model.table.index_of(m->name);
        if (obs < 0)
            throw Error("member '" + m->id + "' has name '" + m->name +
                        "' outside the table categories");

        CountResult base = counts_from_frequencies(model.table);
        std::vector<long>& extra = draws[m->sex];

        // Base urn weights: alpha_i + table counts + previous same-sex draws.
        const std::size_t K = model.table.category_count();
        std::vector<double> weights(K);
        for (std::size_t i = 0; i < K; ++i)
            weights[i] = model.prior.concentrations[i] +
                         static_cast<double>(base.counts[i] + extra[i]);

        // Sibling exclusion: zero out names already used within the group.
        auto git = group_of.find(m->id);
        if (constraints.sibling_distinct && git != group_of.end()) {
            for (const auto& used : used_in_group[git->second]) {
                int idx = model.table.index_of(used);
                if (idx >= 0) weights[static_cast<std::size_t>(idx)] = 0.0;
            }
        }

        // Ancestor-name boost.
        if (constraints.ancestor_boost > 0.0) {
            const std::set<std::string> anc = ancestor_names(config, m->id);
            for (std::size_t i = 0; i < K; ++i)
                if (anc.count(model.table.categories[i]))
                    weights[i] *= 1.0 + constraints.ancestor_boost;
        }

        double total = 0.0;
        for (double w : weights) total += w;
        if (total <= 0.0) {
            // Every category excluded: structurally impossible configuration.
            out.impossible = true;
            out.alt_probs.push_back(0.0);
        } else {
            out.alt_probs.push_back(weights[static_cast<std::size_t>(obs)] / total);
        }

        ++extra[static_cast<std::size_t>(obs)];
        if (git != group_of.end()) used_in_group[git->second].insert(m->name);
    }
    return out;
}

}  // namespace

FamilyLikelihood family_likelihood_alt(const FamilyConfiguration& config,
                                       const SexTables& tables,
                                       const NamingConstraints& constraints) {
    MemberDrawProbabilities d = member_draw_probabilities(config, tables, constraints);
    ProductAccumulator acc;
    for (double p : d.alt_probs) acc.multiply(p);
    return FamilyLikelihood{acc.value(), d.impossible};
}

FamilyLikelihood family_likelihood_null(const FamilyConfiguration& config,
                                        const std::vector<IdentificationAssumption>& nt_spec,
                                        const SexTables& tables,
                                        const NamingConstraints& constraints) {
    for (const auto& a : nt_spec) {
        if (a.weight < 0.0 || a.weight > 1.0)
            throw Error("identification weight must lie in [0, 1]");
        if (!config.find_member(a.member_id))
            throw Error("identification references unknown member '" + a.member_id + "'");
    }

    MemberDrawProbabilities d = member_draw_probabilities(config, tables, constraints);

    ProductAccumulator acc;
    for (std::size_t i = 0; i < d.order.size(); ++i) {
        const FamilyMember* m = d.order[i];
        const IdentificationAssumption* assumption = nullptr;
        for (const auto& a : nt_spec)
            if (a.member_id == m->id) assumption = &a;

        double p_draw = d.alt_probs[i];
        if (!assumption) {
            acc.multiply(p_draw);
            continue;
        }
        double match = (m->name == assumption->required_name) ? 1.0 : 0.0;
        acc.multiply(assumption->weight * match + (1.0 - assumption->weight) * p_draw);
    }
    return FamilyLikelihood{acc.value(), d.impossible};
}

OnomasticonLr likelihood_ratio(const FamilyConfiguration& config,
                               const std::vector<IdentificationAssumption>& nt_spec,
                               const SexTables& tables,
                               const NamingConstraints& constraints) {
    FamilyLikelihood alt = family_likelihood_alt(config, tables, constraints);
    FamilyLikelihood null = family_likelihood_null(config, nt_spec, tables, constraints);
    OnomasticonLr out;
    out.alt_likelihood = alt.value;
    out.null_likelihood = null.value;
    out.lr = LrValue::from_ratio(alt.value, null.value);
    return out;
}

}  // namespace kinship::onomasticon
