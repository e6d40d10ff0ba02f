#include "kinship/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kinship/numeric.hpp"

namespace kinship {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// ScenarioDocument
// ---------------------------------------------------------------------------

struct ScenarioDocument::Impl {
    ojson json;
    std::filesystem::path path;
    std::filesystem::path base_dir;
};

ScenarioDocument::ScenarioDocument() : impl_(std::make_unique<Impl>()) {}
ScenarioDocument::ScenarioDocument(ScenarioDocument&&) noexcept = default;
ScenarioDocument& ScenarioDocument::operator=(ScenarioDocument&&) noexcept = default;
ScenarioDocument::~ScenarioDocument() = default;

const std::filesystem::path& ScenarioDocument::path() const { return impl_->path; }

ScenarioDocument ScenarioDocument::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scenario: " + path);
    ScenarioDocument doc;
    try {
        doc.impl_->json = ojson::parse(in);
    } catch (const ojson::parse_error& e) {
        throw IoError(path + ": " + e.what());
    }
    doc.impl_->path = std::filesystem::path(path);
    doc.impl_->base_dir = doc.impl_->path.parent_path();
    return doc;
}

ScenarioDocument ScenarioDocument::with_override(const std::string& dotted_path,
                                                 const std::string& value_literal) const {
    ScenarioDocument out;
    out.impl_->json = impl_->json;
    out.impl_->path = impl_->path;
    out.impl_->base_dir = impl_->base_dir;

    ojson value;
    try {
        value = ojson::parse(value_literal);
    } catch (const ojson::parse_error&) {
        value = value_literal;  // bare word: treat as a string
    }

    // Walk the dotted path; numeric components index arrays.
    std::vector<std::string> parts;
    std::string cur;
    for (char c : dotted_path) {
        if (c == '.') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);

    ojson* node = &out.impl_->json;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string& key = parts[i];
        if (key.empty()) throw Error("parameter path '" + dotted_path + "' has an empty component");
        const bool numeric = std::all_of(key.begin(), key.end(),
                                         [](char c) { return c >= '0' && c <= '9'; });
        if (node->is_array() && numeric) {
            std::size_t idx = std::stoul(key);
            if (idx >= node->size())
                throw Error("parameter path '" + dotted_path + "': index " + key +
                            " out of range");
            node = &(*node)[idx];
        } else if (node->is_object() && node->contains(key)) {
            node = &(*node)[key];
        } else {
            throw Error("parameter path '" + dotted_path + "' does not resolve at '" + key + "'");
        }
    }
    *node = value;
    return out;
}

// ---------------------------------------------------------------------------
// JSON -> Scenario
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw IoError("scenario: " + where + ": " + what);
}

void check_keys(const ojson& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known) fail(where, "unknown key '" + it.key() + "'");
    }
}

const ojson* get_opt(const ojson& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const ojson& get_req(const ojson& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(where, "missing required key '" + std::string(key) + "'");
    return *it;
}

std::string as_string(const ojson& v, const std::string& where) {
    if (!v.is_string()) fail(where, "expected a string");
    return v.get<std::string>();
}

double as_number(const ojson& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
}

long as_integer(const ojson& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<long>();
}

bool as_bool(const ojson& v, const std::string& where) {
    if (!v.is_boolean()) fail(where, "expected a boolean");
    return v.get<bool>();
}

std::string resolve_path(const std::filesystem::path& base, const std::string& rel) {
    std::filesystem::path p(rel);
    if (p.is_absolute()) return p.string();
    return (base / p).lexically_normal().string();
}

dna::Marker parse_marker(const std::string& s, const std::string& where) {
    if (s == "mtDNA") return dna::Marker::MtDna;
    if (s == "Y") return dna::Marker::Y;
    fail(where, "marker must be 'mtDNA' or 'Y'");
}

PriorSpec parse_prior(const ojson& v, const std::string& where) {
    PriorSpec p;
    if (!v.is_object()) fail(where, "expected a prior object");
    check_keys(v, where, {"kind", "alpha", "total", "values"});
    const std::string kind = as_string(get_req(v, where, "kind"), where + ".kind");
    if (kind == "uniform") {
        p.kind = PriorSpec::Kind::Uniform;
        if (const ojson* a = get_opt(v, "alpha")) p.alpha = as_number(*a, where + ".alpha");
    } else if (kind == "scaled") {
        p.kind = PriorSpec::Kind::Scaled;
        p.total = as_number(get_req(v, where, "total"), where + ".total");
    } else if (kind == "explicit") {
        p.kind = PriorSpec::Kind::Explicit;
        const ojson& vals = get_req(v, where, "values");
        if (!vals.is_array()) fail(where, "'values' must be an array");
        for (const auto& x : vals) p.values.push_back(as_number(x, where + ".values"));
    } else {
        fail(where, "prior kind must be 'uniform', 'scaled' or 'explicit'");
    }
    return p;
}

LrValue parse_lr(const ojson& v, const std::string& where) {
    if (v.is_number()) {
        double x = v.get<double>();
        if (x < 0.0) fail(where, "LR must be nonnegative");
        return LrValue::finite(x);
    }
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "infinity" || s == "+infinity") return LrValue::infinite();
        if (s == "undefined") return LrValue::undefined();
    }
    fail(where, "LR must be a number, 'infinity' or 'undefined'");
}

NameEvidenceSpec parse_name_evidence(const ojson& v, const std::filesystem::path& base) {
    const std::string where = "name_evidence";
    check_keys(v, where, {"tables", "family", "constraints", "identifications"});
    NameEvidenceSpec spec;

    const ojson& tables = get_req(v, where, "tables");
    if (!tables.is_object()) fail(where, "'tables' must be an object keyed by sex");
    for (auto it = tables.begin(); it != tables.end(); ++it) {
        Sex sex = sex_from_code(it.key());
        const std::string twhere = where + ".tables." + it.key();
        check_keys(*it, twhere, {"path", "mix", "prior"});
        NameEvidenceSpec::TableRef ref;
        const ojson* mix = get_opt(*it, "mix");
        const ojson* path = get_opt(*it, "path");
        if (mix && path) fail(twhere, "give 'path' or 'mix', not both");
        if (mix) {
            // Weighted blend of source columns over one category list.
            if (!mix->is_array() || mix->empty()) fail(twhere, "'mix' must be a nonempty array");
            std::vector<std::pair<onomasticon::NameTable, double>> components;
            for (const auto& comp : *mix) {
                check_keys(comp, twhere + ".mix", {"path", "weight"});
                std::string p = resolve_path(
                    base, as_string(get_req(comp, twhere, "path"), twhere + ".mix.path"));
                double w = as_number(get_req(comp, twhere, "weight"), twhere + ".mix.weight");
                components.emplace_back(onomasticon::load_table(p), w);
                ref.path += (ref.path.empty() ? "" : " + ") + p;
            }
            try {
                ref.table = onomasticon::mix_tables(components);
            } catch (const Error& e) {
                fail(twhere, e.what());
            }
        } else {
            ref.path = resolve_path(base,
                                    as_string(get_req(*it, twhere, "path"), twhere + ".path"));
            ref.table = onomasticon::load_table(ref.path);
        }
        if (const ojson* prior = get_opt(*it, "prior"))
            ref.prior = parse_prior(*prior, twhere + ".prior");
        spec.tables.emplace(sex, std::move(ref));
    }

    const ojson& family = get_req(v, where, "family");
    check_keys(family, where + ".family", {"members", "sibling_groups", "parents"});
    const ojson& members = get_req(family, where + ".family", "members");
    if (!members.is_array()) fail(where, "'family.members' must be an array");
    for (const auto& m : members) {
        const std::string mwhere = where + ".family.members";
        check_keys(m, mwhere, {"id", "sex", "name", "role"});
        onomasticon::FamilyMember member;
        member.id = as_string(get_req(m, mwhere, "id"), mwhere + ".id");
        member.sex = sex_from_code(as_string(get_req(m, mwhere, "sex"), mwhere + ".sex"));
        member.name = as_string(get_req(m, mwhere, "name"), mwhere + ".name");
        if (const ojson* role = get_opt(m, "role")) member.role = as_string(*role, mwhere + ".role");
        spec.family.members.push_back(std::move(member));
    }
    if (const ojson* groups = get_opt(family, "sibling_groups")) {
        if (!groups->is_array()) fail(where, "'family.sibling_groups' must be an array");
        for (const auto& g : *groups) {
            std::vector<std::string> ids;
            for (const auto& id : g) ids.push_back(as_string(id, where + ".family.sibling_groups"));
            spec.family.sibling_groups.push_back(std::move(ids));
        }
    }
    if (const ojson* parents = get_opt(family, "parents")) {
        if (!parents->is_object()) fail(where, "'family.parents' must be an object");
        for (auto it = parents->begin(); it != parents->end(); ++it) {
            const std::string pwhere = where + ".family.parents." + it.key();
            check_keys(*it, pwhere, {"mother", "father"});
            onomasticon::ParentLink link;
            if (const ojson* mo = get_opt(*it, "mother")) link.mother = as_string(*mo, pwhere);
            if (const ojson* fa = get_opt(*it, "father")) link.father = as_string(*fa, pwhere);
            spec.family.parent_links[it.key()] = std::move(link);
        }
    }

    if (const ojson* constraints = get_opt(v, "constraints")) {
        const std::string cwhere = where + ".constraints";
        check_keys(*constraints, cwhere, {"sibling_distinct", "ancestor_boost"});
        if (const ojson* sd = get_opt(*constraints, "sibling_distinct"))
            spec.constraints.sibling_distinct = as_bool(*sd, cwhere + ".sibling_distinct");
        if (const ojson* ab = get_opt(*constraints, "ancestor_boost"))
            spec.constraints.ancestor_boost = as_number(*ab, cwhere + ".ancestor_boost");
    }

    if (const ojson* idents = get_opt(v, "identifications")) {
        if (!idents->is_array()) fail(where, "'identifications' must be an array");
        for (const auto& a : *idents) {
            const std::string awhere = where + ".identifications";
            check_keys(a, awhere, {"id", "member", "name", "weight", "alternative"});
            onomasticon::IdentificationAssumption ia;
            if (const ojson* id = get_opt(a, "id")) ia.assumption_id = as_string(*id, awhere);
            ia.member_id = as_string(get_req(a, awhere, "member"), awhere + ".member");
            ia.required_name = as_string(get_req(a, awhere, "name"), awhere + ".name");
            ia.weight = as_number(get_req(a, awhere, "weight"), awhere + ".weight");
            if (const ojson* alt = get_opt(a, "alternative"))
                ia.alternative = as_string(*alt, awhere + ".alternative");
            spec.identifications.push_back(std::move(ia));
        }
    }
    return spec;
}

DnaEvidenceSpec parse_dna_evidence(const ojson& v, const std::filesystem::path& base) {
    const std::string where = "dna_evidence";
    check_keys(v, where, {"populations", "mutation_rate", "pedigrees", "observations"});
    DnaEvidenceSpec spec;

    const ojson& pops = get_req(v, where, "populations");
    if (!pops.is_object()) fail(where, "'populations' must be an object");
    for (auto it = pops.begin(); it != pops.end(); ++it) {
        const std::string pwhere = where + ".populations." + it.key();
        check_keys(*it, pwhere, {"marker", "labels", "frequencies"});
        dna::HaplotypePopulation pop;
        pop.marker = parse_marker(as_string(get_req(*it, pwhere, "marker"), pwhere), pwhere);
        for (const auto& l : get_req(*it, pwhere, "labels"))
            pop.labels.push_back(as_string(l, pwhere + ".labels"));
        for (const auto& f : get_req(*it, pwhere, "frequencies"))
            pop.frequencies.push_back(as_number(f, pwhere + ".frequencies"));
        spec.populations.emplace(it.key(), std::move(pop));
    }

    if (const ojson* mu = get_opt(v, "mutation_rate")) {
        spec.mutation_rate = as_number(*mu, where + ".mutation_rate");
    } else {
        spec.mutation_rate_defaulted = true;
    }

    if (const ojson* peds = get_opt(v, "pedigrees")) {
        const std::string pwhere = where + ".pedigrees";
        check_keys(*peds, pwhere, {"null", "alt", "candidates", "candidate_prior"});
        auto load = [&](const ojson& node, const std::string& w) {
            std::string p = resolve_path(base, as_string(node, w));
            return dna::load_pedigree(p, std::filesystem::path(p).stem().string());
        };
        if (const ojson* n = get_opt(*peds, "null")) spec.null_pedigree = load(*n, pwhere + ".null");
        if (const ojson* a = get_opt(*peds, "alt")) spec.alt_pedigree = load(*a, pwhere + ".alt");
        if (const ojson* c = get_opt(*peds, "candidates")) {
            if (!c->is_array()) fail(pwhere, "'candidates' must be an array");
            for (const auto& path : *c) spec.candidates.push_back(load(path, pwhere + ".candidates"));
        }
        if (const ojson* cp = get_opt(*peds, "candidate_prior")) {
            for (const auto& w : *cp)
                spec.candidate_prior.push_back(as_number(w, pwhere + ".candidate_prior"));
        }
    }

    if (const ojson* obs = get_opt(v, "observations")) {
        if (!obs->is_array()) fail(where, "'observations' must be an array");
        for (const auto& o : *obs) {
            const std::string owhere = where + ".observations";
            check_keys(o, owhere, {"id", "population", "readings"});
            DnaEvidenceSpec::Observation entry;
            entry.population = as_string(get_req(o, owhere, "population"), owhere + ".population");
            entry.id = "dna:" + entry.population;
            if (const ojson* id = get_opt(o, "id")) entry.id = as_string(*id, owhere + ".id");
            auto pit = spec.populations.find(entry.population);
            if (pit != spec.populations.end())
                entry.observation.marker = pit->second.marker;
            const ojson& readings = get_req(o, owhere, "readings");
            if (!readings.is_object()) fail(owhere, "'readings' must be an object");
            for (auto it = readings.begin(); it != readings.end(); ++it)
                entry.observation.readings[it.key()] = as_string(*it, owhere + ".readings");
            spec.observations.push_back(std::move(entry));
        }
    }
    return spec;
}

ModelSpec parse_model(const ojson& v, const std::filesystem::path& base) {
    const std::string where = "model";
    check_keys(v, where,
               {"path", "hypothesis_node", "null_state", "alt_state", "joint_evidence"});
    ModelSpec spec;
    spec.path = resolve_path(base, as_string(get_req(v, where, "path"), where + ".path"));
    oobn::ParseResult parsed = oobn::parse_file(spec.path);
    if (!parsed.ok()) {
        std::ostringstream os;
        os << "model document " << spec.path << " does not parse:";
        for (const auto& d : parsed.diagnostics)
            os << "\n" << spec.path << ":" << format_diagnostic(d);
        throw IoError(os.str());
    }
    spec.document = std::move(*parsed.document);
    if (const ojson* h = get_opt(v, "hypothesis_node"))
        spec.hypothesis_node = as_string(*h, where + ".hypothesis_node");
    if (const ojson* s = get_opt(v, "null_state"))
        spec.null_state = as_string(*s, where + ".null_state");
    if (const ojson* s = get_opt(v, "alt_state"))
        spec.alt_state = as_string(*s, where + ".alt_state");
    if (const ojson* je = get_opt(v, "joint_evidence")) {
        if (!je->is_object()) fail(where, "'joint_evidence' must be an object");
        for (auto it = je->begin(); it != je->end(); ++it)
            spec.joint_evidence[it.key()] = as_string(*it, where + ".joint_evidence");
    }
    return spec;
}

evidence::CountPrior parse_count_prior(const ojson& v) {
    const std::string where = "count_priors";
    check_keys(v, where, {"quantity", "kind", "value", "lo", "hi", "mean"});
    evidence::CountPrior prior;
    const std::string q = as_string(get_req(v, where, "quantity"), where + ".quantity");
    if (q == "ossuary_count")
        prior.quantity = evidence::CountPrior::Quantity::OssuaryCount;
    else if (q == "population_size")
        prior.quantity = evidence::CountPrior::Quantity::PopulationSize;
    else
        fail(where, "quantity must be 'ossuary_count' or 'population_size'");

    const std::string kind = as_string(get_req(v, where, "kind"), where + ".kind");
    if (kind == "point") {
        prior.kind = evidence::CountPrior::Kind::Point;
        prior.point_value = as_integer(get_req(v, where, "value"), where + ".value");
    } else if (kind == "uniform") {
        prior.kind = evidence::CountPrior::Kind::UniformRange;
        prior.range_lo = as_integer(get_req(v, where, "lo"), where + ".lo");
        prior.range_hi = as_integer(get_req(v, where, "hi"), where + ".hi");
    } else if (kind == "poisson") {
        prior.kind = evidence::CountPrior::Kind::Poisson;
        prior.poisson_mean = as_number(get_req(v, where, "mean"), where + ".mean");
    } else {
        fail(where, "kind must be 'point', 'uniform' or 'poisson'");
    }
    return prior;
}

}  // namespace

Scenario ScenarioDocument::build() const {
    const ojson& j = impl_->json;
    if (!j.is_object()) throw IoError("scenario: top level must be a JSON object");
    check_keys(j, "scenario",
               {"name", "hypotheses", "model", "name_evidence", "dna_evidence", "direct_items",
                "network_items", "count_priors", "selection", "independent_items", "sweep_axes"});

    Scenario s;
    s.source_path = impl_->path;
    s.base_dir = impl_->base_dir;
    s.name = as_string(get_req(j, "scenario", "name"), "name");

    if (const ojson* h = get_opt(j, "hypotheses")) {
        check_keys(*h, "hypotheses", {"null_label", "alt_label", "prior_odds"});
        if (const ojson* v = get_opt(*h, "null_label"))
            s.hypotheses.null_label = as_string(*v, "hypotheses.null_label");
        if (const ojson* v = get_opt(*h, "alt_label"))
            s.hypotheses.alt_label = as_string(*v, "hypotheses.alt_label");
        if (const ojson* v = get_opt(*h, "prior_odds"))
            s.hypotheses.prior_odds = as_number(*v, "hypotheses.prior_odds");
        else
            s.prior_odds_defaulted = true;
    } else {
        s.prior_odds_defaulted = true;
    }

    if (const ojson* m = get_opt(j, "model")) s.model = parse_model(*m, s.base_dir);
    if (const ojson* ne = get_opt(j, "name_evidence"))
        s.name_evidence = parse_name_evidence(*ne, s.base_dir);
    if (const ojson* de = get_opt(j, "dna_evidence"))
        s.dna_evidence = parse_dna_evidence(*de, s.base_dir);

    if (const ojson* items = get_opt(j, "direct_items")) {
        if (!items->is_array()) fail("direct_items", "expected an array");
        for (const auto& item : *items) {
            check_keys(item, "direct_items", {"id", "lr"});
            DirectItemSpec d;
            d.id = as_string(get_req(item, "direct_items", "id"), "direct_items.id");
            d.lr = parse_lr(get_req(item, "direct_items", "lr"), "direct_items.lr");
            s.direct_items.push_back(std::move(d));
        }
    }
    if (const ojson* items = get_opt(j, "network_items")) {
        if (!items->is_array()) fail("network_items", "expected an array");
        for (const auto& item : *items) {
            check_keys(item, "network_items", {"id", "evidence"});
            NetworkItemSpec n;
            n.id = as_string(get_req(item, "network_items", "id"), "network_items.id");
            const ojson& ev = get_req(item, "network_items", "evidence");
            if (!ev.is_object()) fail("network_items", "'evidence' must be an object");
            for (auto it = ev.begin(); it != ev.end(); ++it)
                n.evidence[it.key()] = as_string(*it, "network_items.evidence");
            s.network_items.push_back(std::move(n));
        }
    }

    if (const ojson* priors = get_opt(j, "count_priors")) {
        if (!priors->is_array()) fail("count_priors", "expected an array");
        for (const auto& p : *priors) s.count_priors.push_back(parse_count_prior(p));
    }

    if (const ojson* sel = get_opt(j, "selection")) {
        check_keys(*sel, "selection", {"trials", "trials_from", "probability"});
        SelectionSpec spec;
        if (const ojson* t = get_opt(*sel, "trials"))
            spec.trials = as_integer(*t, "selection.trials");
        if (const ojson* tf = get_opt(*sel, "trials_from"))
            spec.trials_from = as_string(*tf, "selection.trials_from");
        if (const ojson* p = get_opt(*sel, "probability"))
            spec.probability = as_number(*p, "selection.probability");
        s.selection = std::move(spec);
    }

    if (const ojson* ind = get_opt(j, "independent_items"))
        s.independent_items = as_bool(*ind, "independent_items");

    if (const ojson* axes = get_opt(j, "sweep_axes")) {
        if (!axes->is_array()) fail("sweep_axes", "expected an array");
        for (const auto& a : *axes) {
            check_keys(a, "sweep_axes", {"path", "values"});
            SweepAxis axis;
            axis.path = as_string(get_req(a, "sweep_axes", "path"), "sweep_axes.path");
            const ojson& values = get_req(a, "sweep_axes", "values");
            if (!values.is_array() || values.empty())
                fail("sweep_axes", "'values' must be a nonempty array");
            for (const auto& v : values) axis.value_literals.push_back(v.dump());
            s.sweep_axes.push_back(std::move(axis));
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Scenario-level helpers
// ---------------------------------------------------------------------------

onomasticon::DirichletPrior PriorSpec::build(const onomasticon::NameTable& t) const {
    switch (kind) {
        case Kind::Uniform:
            return onomasticon::DirichletPrior::uniform(t.category_count(), alpha);
        case Kind::Scaled:
            return onomasticon::DirichletPrior::scaled_to(t, total);
        case Kind::Explicit:
            break;
    }
    if (values.size() != t.category_count())
        throw Error("explicit prior length does not match table '" + t.source_label + "'");
    return onomasticon::DirichletPrior{values};
}

onomasticon::SexTables NameEvidenceSpec::build_tables() const {
    onomasticon::SexTables out;
    for (const auto& [sex, ref] : tables)
        out.emplace(sex, onomasticon::NameModel{ref.table, ref.prior.build(ref.table)});
    return out;
}

namespace {

Diagnostic err_diag(const std::string& code, const std::string& msg,
                    const std::string& file = "") {
    return Diagnostic{Severity::Error, 0, 0, code, msg, file};
}

// Builds the evidence assignment for a label-keyed map against a flattened
// model; unresolved names/labels are reported into `ds`.
std::optional<EvidenceAssignment> assignment_from_labels(
    const oobn::FlatNetwork& flat, const std::map<std::string, std::string>& labels,
    const std::string& context, std::vector<Diagnostic>* ds) {
    EvidenceAssignment e;
    bool ok = true;
    for (const auto& [name, state] : labels) {
        const std::string id = flat.resolve(name);
        if (!flat.network.has_variable(id)) {
            if (ds)
                ds->push_back(err_diag("E_UNKNOWN_NODE",
                                       context + ": no node '" + name + "' in the model"));
            ok = false;
            continue;
        }
        const auto& var = flat.network.variable(id);
        int idx = -1;
        for (std::size_t i = 0; i < var.state_labels.size(); ++i)
            if (var.state_labels[i] == state) idx = static_cast<int>(i);
        if (idx < 0) {
            if (ds)
                ds->push_back(err_diag("E_UNKNOWN_STATE", context + ": node '" + name +
                                                              "' has no state '" + state + "'"));
            ok = false;
            continue;
        }
        e.assignments[id] = idx;
    }
    if (!ok) return std::nullopt;
    return e;
}

std::string quantity_name(evidence::CountPrior::Quantity q) {
    return q == evidence::CountPrior::Quantity::OssuaryCount ? "ossuary_count"
                                                             : "population_size";
}

}  // namespace

std::vector<Diagnostic> validate_scenario(const Scenario& s) {
    std::vector<Diagnostic> ds;

    // --- model ---
    std::optional<oobn::FlatNetwork> flat;
    if (s.model) {
        auto model_ds = oobn::validate(s.model->document);
        for (auto& d : model_ds) d.file = s.model->path;
        bool model_ok = !has_errors(model_ds);
        ds.insert(ds.end(), model_ds.begin(), model_ds.end());

        if (model_ok) {
            flat = oobn::flatten(s.model->document);
            if (!s.model->hypothesis_node.empty()) {
                const std::string id = flat->resolve(s.model->hypothesis_node);
                if (!flat->network.has_variable(id)) {
                    ds.push_back(err_diag("E_UNKNOWN_NODE", "model.hypothesis_node '" +
                                                                s.model->hypothesis_node +
                                                                "' not found in the model"));
                } else {
                    const auto& var = flat->network.variable(id);
                    for (const std::string* st : {&s.model->null_state, &s.model->alt_state}) {
                        if (st->empty()) {
                            ds.push_back(err_diag("E_UNKNOWN_STATE",
                                                  "model: hypothesis_node requires both "
                                                  "null_state and alt_state"));
                            continue;
                        }
                        bool found = false;
                        for (const auto& l : var.state_labels)
                            if (l == *st) found = true;
                        if (!found)
                            ds.push_back(err_diag("E_UNKNOWN_STATE",
                                                  "model: hypothesis node has no state '" +
                                                      *st + "'"));
                    }
                }
            }
            if (!s.model->joint_evidence.empty())
                assignment_from_labels(*flat, s.model->joint_evidence, "model.joint_evidence",
                                       &ds);
        }
    }

    // --- name evidence ---
    if (s.name_evidence) {
        const auto& ne = *s.name_evidence;
        for (const auto& [sex, ref] : ne.tables) {
            auto tds = onomasticon::validate_table(ref.table);
            for (auto& d : tds) d.file = ref.path;
            ds.insert(ds.end(), tds.begin(), tds.end());
            try {
                ref.prior.build(ref.table);
            } catch (const Error& e) {
                ds.push_back(err_diag("E_PRIOR", std::string("name_evidence: ") + e.what()));
            }
        }
        auto fds = onomasticon::validate_configuration(ne.family);
        ds.insert(ds.end(), fds.begin(), fds.end());

        for (const auto& m : ne.family.members)
            if (!ne.tables.count(m.sex))
                ds.push_back(err_diag("E_FAMILY_TABLE",
                                      "no name table for sex '" + std::string(1, sex_code(m.sex)) +
                                          "' required by member '" + m.id + "'"));
        for (const auto& a : ne.identifications) {
            if (!ne.family.find_member(a.member_id))
                ds.push_back(err_diag("E_IDENT_MEMBER", "identification references unknown member '" +
                                                            a.member_id + "'"));
            if (a.weight < 0.0 || a.weight > 1.0)
                ds.push_back(err_diag("E_IDENT_WEIGHT", "identification weight for '" +
                                                            a.member_id +
                                                            "' must lie in [0, 1]"));
        }
        if (ne.constraints.ancestor_boost < 0.0 ||
            !std::isfinite(ne.constraints.ancestor_boost))
            ds.push_back(err_diag("E_CONSTRAINT", "ancestor_boost must be finite and >= 0"));
    }

    // --- dna evidence ---
    if (s.dna_evidence) {
        const auto& de = *s.dna_evidence;
        for (const auto& [key, pop] : de.populations) {
            auto pds = dna::validate_population(pop);
            for (auto& d : pds) d.message = "population '" + key + "': " + d.message;
            ds.insert(ds.end(), pds.begin(), pds.end());
        }
        if (de.mutation_rate < 0.0 || de.mutation_rate >= 1.0)
            ds.push_back(err_diag("E_MUTATION_RATE", "mutation_rate must lie in [0, 1)"));

        auto check_ped = [&](const dna::Pedigree& p) {
            auto pds = dna::validate_pedigree(p);
            for (auto& d : pds) d.message = "pedigree '" + p.label + "': " + d.message;
            ds.insert(ds.end(), pds.begin(), pds.end());
        };
        if (de.null_pedigree) check_ped(*de.null_pedigree);
        if (de.alt_pedigree) check_ped(*de.alt_pedigree);
        for (const auto& c : de.candidates) check_ped(c);

        if (!de.candidate_prior.empty()) {
            if (de.candidate_prior.size() != de.candidates.size())
                ds.push_back(err_diag("E_CANDIDATE_PRIOR",
                                      "candidate_prior length must match candidates"));
            double total = 0.0;
            for (double w : de.candidate_prior) {
                if (w < 0.0)
                    ds.push_back(err_diag("E_CANDIDATE_PRIOR", "candidate_prior must be >= 0"));
                total += w;
            }
            if (total <= 0.0)
                ds.push_back(err_diag("E_CANDIDATE_PRIOR", "candidate_prior sums to zero"));
        }

        if (!de.observations.empty() && (!de.null_pedigree || !de.alt_pedigree))
            ds.push_back(err_diag("E_PEDIGREES",
                                  "dna observations require both a null and an alt pedigree"));

        for (const auto& obs : de.observations) {
            auto pit = de.populations.find(obs.population);
            if (pit == de.populations.end()) {
                ds.push_back(err_diag("E_OBS_POPULATION", "observation '" + obs.id +
                                                              "' references unknown population '" +
                                                              obs.population + "'"));
                continue;
            }
            auto check_obs = [&](const dna::Pedigree& p) {
                auto ods = dna::validate_observation(obs.observation, p, pit->second);
                for (auto& d : ods)
                    d.message = "observation '" + obs.id + "' vs pedigree '" + p.label +
                                "': " + d.message;
                ds.insert(ds.end(), ods.begin(), ods.end());
            };
            if (de.null_pedigree) check_obs(*de.null_pedigree);
            if (de.alt_pedigree) check_obs(*de.alt_pedigree);
            for (const auto& c : de.candidates) check_obs(c);
        }
    }

    // --- items ---
    std::set<std::string> item_ids;
    auto check_id = [&](const std::string& id) {
        if (!item_ids.insert(id).second)
            ds.push_back(err_diag("E_ITEM_DUP", "duplicate evidence item id '" + id + "'"));
    };
    if (s.name_evidence) check_id("onomasticon");
    if (s.dna_evidence)
        for (const auto& o : s.dna_evidence->observations) check_id(o.id);
    for (const auto& d : s.direct_items) check_id(d.id);
    for (const auto& n : s.network_items) check_id(n.id);

    if (!s.network_items.empty()) {
        if (!s.model || s.model->hypothesis_node.empty())
            ds.push_back(err_diag("E_NETWORK_ITEMS",
                                  "network_items require a model with a hypothesis_node"));
        else if (flat)
            for (const auto& item : s.network_items)
                assignment_from_labels(*flat, item.evidence, "network item '" + item.id + "'",
                                       &ds);
    }

    // --- selection & priors ---
    if (!(s.hypotheses.prior_odds > 0.0) || !std::isfinite(s.hypotheses.prior_odds))
        ds.push_back(err_diag("E_PRIOR_ODDS", "prior_odds must be positive and finite"));

    std::set<std::string> quantities;
    for (const auto& p : s.count_priors) {
        if (!quantities.insert(quantity_name(p.quantity)).second)
            ds.push_back(err_diag("E_COUNT_PRIOR", "duplicate count prior for '" +
                                                       quantity_name(p.quantity) + "'"));
        switch (p.kind) {
            case evidence::CountPrior::Kind::Point:
                if (p.point_value < 1)
                    ds.push_back(err_diag("E_COUNT_PRIOR", "point prior must be >= 1"));
                break;
            case evidence::CountPrior::Kind::UniformRange:
                if (p.range_lo < 1 || p.range_lo > p.range_hi)
                    ds.push_back(err_diag("E_COUNT_PRIOR", "uniform prior needs 1 <= lo <= hi"));
                break;
            case evidence::CountPrior::Kind::Poisson:
                if (!(p.poisson_mean > 0.0))
                    ds.push_back(err_diag("E_COUNT_PRIOR", "poisson mean must be positive"));
                break;
        }
    }

    if (s.selection) {
        const auto& sel = *s.selection;
        if (sel.trials && sel.trials_from)
            ds.push_back(err_diag("E_SELECTION", "selection: give 'trials' or 'trials_from', not both"));
        if (!sel.trials && !sel.trials_from)
            ds.push_back(err_diag("E_SELECTION", "selection: needs 'trials' or 'trials_from'"));
        if (sel.trials && *sel.trials < 1)
            ds.push_back(err_diag("E_SELECTION", "selection.trials must be >= 1"));
        if (sel.trials_from && !quantities.count(*sel.trials_from))
            ds.push_back(err_diag("E_SELECTION", "selection.trials_from references no count prior '" +
                                                     *sel.trials_from + "'"));
        if (sel.probability && (*sel.probability < 0.0 || *sel.probability > 1.0))
            ds.push_back(err_diag("E_SELECTION", "selection.probability must lie in [0, 1]"));
    }

    if (!s.independent_items) {
        if (!s.model || s.model->hypothesis_node.empty() || s.model->joint_evidence.empty())
            ds.push_back(
                err_diag("E_NOT_INDEPENDENT",
                         "independent_items=false: per-item LRs cannot be multiplied; the "
                         "scenario must provide a model with hypothesis_node and joint_evidence"));
    }

    sort_diagnostics(ds);
    return ds;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

LrValue network_lr(const Network& net, const std::string& hypothesis_var, int null_state,
                   int alt_state, const EvidenceAssignment& e, double* alt_likelihood,
                   double* null_likelihood) {
    if (e.contains(hypothesis_var))
        throw Error("network_lr: evidence must not assign the hypothesis variable");

    auto conditional = [&](int state) {
        EvidenceAssignment clamp;
        clamp.assignments[hypothesis_var] = state;
        const double joint_prior = evidence_likelihood(net, clamp);
        if (joint_prior <= 0.0)
            throw Error("network_lr: hypothesis state has zero prior probability");
        EvidenceAssignment both = clamp;
        for (const auto& [id, st] : e.assignments) both.assignments[id] = st;
        return evidence_likelihood(net, both) / joint_prior;
    };

    const double p_alt = conditional(alt_state);
    const double p_null = conditional(null_state);
    if (alt_likelihood) *alt_likelihood = p_alt;
    if (null_likelihood) *null_likelihood = p_null;
    return LrValue::from_ratio(p_alt, p_null);
}

namespace {

void add_warning(std::vector<std::string>& warnings, const std::string& w) {
    for (const auto& existing : warnings)
        if (existing == w) return;
    warnings.push_back(w);
}

// Maps member and identification names outside the table categories onto
// `Other`, warning once per mapped name.
void normalize_names(NameEvidenceSpec& ne, std::vector<std::string>& warnings) {
    for (auto& m : ne.family.members) {
        const auto& table = ne.tables.at(m.sex).table;
        if (table.index_of(m.name) < 0) {
            add_warning(warnings, "name '" + m.name + "' of member '" + m.id +
                                      "' is not a category of table '" + table.source_label +
                                      "'; treated as 'Other'");
            m.name = onomasticon::kOtherCategory;
        }
    }
    for (auto& a : ne.identifications) {
        const auto* member = ne.family.find_member(a.member_id);
        if (!member) continue;
        const auto& table = ne.tables.at(member->sex).table;
        if (table.index_of(a.required_name) < 0) {
            add_warning(warnings, "identification name '" + a.required_name + "' for member '" +
                                      a.member_id + "' is not a category of table '" +
                                      table.source_label + "'; treated as 'Other'");
            a.required_name = onomasticon::kOtherCategory;
        }
    }
}

}  // namespace

EvaluationOutcome evaluate(const Scenario& s) {
    EvaluationOutcome out;

    if (s.prior_odds_defaulted)
        add_warning(out.warnings,
                    "prior odds defaulted to 1 (no value in the scenario); posterior "
                    "columns assume even prior odds");

    // --- onomasticon channel ---
    if (s.name_evidence) {
        NameEvidenceSpec ne = *s.name_evidence;  // copy: names may be normalized
        normalize_names(ne, out.warnings);
        for (const auto& [sex, ref] : ne.tables) {
            if (ref.table.is_synthetic())
                add_warning(out.warnings, "name table '" + ref.table.source_label +
                                              "' is synthetic demo data, not a published source");
            if (onomasticon::counts_from_frequencies(ref.table).clamped)
                add_warning(out.warnings,
                            "name table '" + ref.table.source_label +
                                "': named-category counts exceed N; 'Other' clamped to 0");
        }

        const auto tables = ne.build_tables();
        const auto alt = onomasticon::family_likelihood_alt(ne.family, tables, ne.constraints);
        const auto lr = onomasticon::likelihood_ratio(ne.family, ne.identifications, tables,
                                                      ne.constraints);
        if (alt.impossible)
            add_warning(out.warnings,
                        "onomasticon: the family configuration is impossible under the "
                        "naming constraints (likelihood 0)");
        evidence::EvidenceItem item;
        item.id = "onomasticon";
        item.kind = evidence::ItemKind::Onomasticon;
        item.lr = lr.lr;
        item.alt_likelihood = lr.alt_likelihood;
        item.null_likelihood = lr.null_likelihood;
        std::string sources;
        for (const auto& [sex, ref] : ne.tables) {
            if (!sources.empty()) sources += ", ";
            sources += std::string(1, sex_code(sex)) + "=" + ref.table.source_label;
        }
        item.provenance = "tables: " + sources;
        out.items.push_back(std::move(item));
    }

    // --- dna channel ---
    if (s.dna_evidence) {
        const auto& de = *s.dna_evidence;
        if (de.mutation_rate_defaulted && !de.observations.empty())
            add_warning(out.warnings, "mutation rate defaulted to 0.001 per transmission");
        const dna::MutationModel mut{de.mutation_rate};
        for (const auto& obs : de.observations) {
            const auto& pop = de.populations.at(obs.population);
            const auto lr = dna::dna_lr(obs.observation, pop, mut, *de.null_pedigree,
                                        *de.alt_pedigree);
            evidence::EvidenceItem item;
            item.id = obs.id;
            item.kind = evidence::ItemKind::Dna;
            item.lr = lr.lr;
            item.alt_likelihood = lr.alt_likelihood;
            item.null_likelihood = lr.null_likelihood;
            item.provenance = "pedigrees: null=" + de.null_pedigree->label +
                              ", alt=" + de.alt_pedigree->label;
            if (lr.lr.is_infinite())
                add_warning(out.warnings,
                            "item '" + obs.id +
                                "': evidence impossible under the null pedigree at mu=" +
                                format_double(de.mutation_rate) +
                                "; the null hypothesis is disconfirmed (LR +infinity). DNA can "
                                "rule the pedigree out, never prove identity.");
            if (lr.lr.is_undefined())
                add_warning(out.warnings, "item '" + obs.id +
                                              "': evidence impossible under both pedigrees "
                                              "(0/0); LR undefined");
            out.items.push_back(std::move(item));
        }
    }

    // --- direct items ---
    for (const auto& d : s.direct_items) {
        evidence::EvidenceItem item;
        item.id = d.id;
        item.kind = evidence::ItemKind::Direct;
        item.lr = d.lr;
        item.provenance = "scenario literal";
        out.items.push_back(std::move(item));
    }

    // --- network items ---
    std::optional<oobn::FlatNetwork> flat;
    if (s.model && (!s.network_items.empty() || !s.independent_items))
        flat = oobn::flatten(s.model->document);

    std::optional<int> null_state, alt_state;
    std::string hyp_id;
    if (flat && !s.model->hypothesis_node.empty()) {
        hyp_id = flat->resolve(s.model->hypothesis_node);
        const auto& var = flat->network.variable(hyp_id);
        for (std::size_t i = 0; i < var.state_labels.size(); ++i) {
            if (var.state_labels[i] == s.model->null_state) null_state = static_cast<int>(i);
            if (var.state_labels[i] == s.model->alt_state) alt_state = static_cast<int>(i);
        }
    }

    for (const auto& n : s.network_items) {
        if (!flat || !null_state || !alt_state)
            throw Error("network items require a model with hypothesis_node/states");
        auto e = assignment_from_labels(*flat, n.evidence, "network item", nullptr);
        if (!e) throw Error("network item '" + n.id + "' has unresolvable evidence");
        evidence::EvidenceItem item;
        item.id = n.id;
        item.kind = evidence::ItemKind::Direct;
        double alt_lik = 0.0, null_lik = 0.0;
        item.lr = network_lr(flat->network, hyp_id, *null_state, *alt_state, *e, &alt_lik,
                             &null_lik);
        item.alt_likelihood = alt_lik;
        item.null_likelihood = null_lik;
        item.provenance = "network: " + s.model->path;
        out.items.push_back(std::move(item));
    }

    // Every flagged item surfaces in warnings exactly once (the dna channel
    // already emits its specific disconfirmation wording above).
    for (const auto& item : out.items) {
        if (item.kind == evidence::ItemKind::Dna) continue;
        if (item.lr.is_infinite())
            add_warning(out.warnings, "item '" + item.id +
                                          "': evidence impossible under the null hypothesis "
                                          "(LR +infinity)");
        if (item.lr.is_undefined())
            add_warning(out.warnings,
                        "item '" + item.id + "': LR undefined (0/0)");
    }

    // --- combination ---
    if (s.independent_items) {
        out.combined = evidence::combine_lrs(out.items);
    } else {
        if (!flat || !null_state || !alt_state || s.model->joint_evidence.empty())
            throw Error("independent_items=false requires a joint model with evidence");
        add_warning(out.warnings,
                    "items are not assumed conditionally independent; the product rule is "
                    "disabled and the overall LR comes from the joint network model");
        auto e = assignment_from_labels(*flat, s.model->joint_evidence, "joint evidence",
                                        nullptr);
        if (!e) throw Error("joint evidence does not resolve against the model");
        for (const auto& item : out.items)
            out.combined.per_item.emplace_back(item.id, item.lr);
        out.combined.overall =
            network_lr(flat->network, hyp_id, *null_state, *alt_state, *e);
    }

    if (out.combined.overall.is_undefined())
        add_warning(out.warnings, "overall LR is undefined (evidence impossible under both "
                                  "hypotheses); posterior columns are undefined");

    out.posterior = evidence::posterior_from_lr(s.hypotheses, out.combined.overall);

    // --- selection effect ---
    if (s.selection) {
        const auto& sel = *s.selection;
        std::optional<double> p = sel.probability;
        if (!p) {
            // Default p: probability of evidence this probable under the
            // alternative, i.e. the product of the items' alt-likelihoods.
            bool all_have = !out.items.empty();
            double prod = 1.0;
            for (const auto& item : out.items) {
                if (!item.alt_likelihood) {
                    all_have = false;
                    break;
                }
                prod *= *item.alt_likelihood;
            }
            if (all_have)
                p = prod;
            else
                add_warning(out.warnings,
                            "selection adjustment skipped: no explicit probability and some "
                            "items carry no absolute likelihood");
        }
        if (p) {
            out.selection_probability = p;
            if (sel.trials) {
                out.selection_trials = "T=" + std::to_string(*sel.trials);
                out.selection_adjusted = evidence::selection_adjust(*p, *sel.trials);
            } else {
                const evidence::CountPrior* prior = nullptr;
                for (const auto& cp : s.count_priors)
                    if (quantity_name(cp.quantity) == *sel.trials_from) prior = &cp;
                if (!prior) throw Error("selection.trials_from references no count prior");
                out.selection_trials = "E over " + *sel.trials_from + " prior";
                // Zero trials (possible in a Poisson prior's support) cannot
                // produce the event.
                out.selection_adjusted = evidence::integrate_over_count(
                    *prior,
                    [&](long n) { return n >= 1 ? evidence::selection_adjust(*p, n) : 0.0; });
            }
        }
    }

    return out;
}

SweepOutcome run_sweep(const ScenarioDocument& doc, const std::vector<SweepAxis>& axes) {
    if (axes.empty()) throw Error("sweep: no axes given");
    for (const auto& a : axes)
        if (a.value_literals.empty()) throw Error("sweep: axis '" + a.path + "' has no values");

    SweepOutcome out;
    out.axes = axes;

    // Lexicographic odometer over the grid, last axis fastest.
    std::vector<std::size_t> idx(axes.size(), 0);
    bool done = false;
    while (!done) {
        ScenarioDocument point = doc.with_override(axes[0].path, axes[0].value_literals[idx[0]]);
        for (std::size_t a = 1; a < axes.size(); ++a)
            point = point.with_override(axes[a].path, axes[a].value_literals[idx[a]]);

        Scenario s = point.build();
        auto ds = validate_scenario(s);
        if (has_errors(ds)) {
            std::string label;
            for (std::size_t a = 0; a < axes.size(); ++a)
                label += (a ? ", " : "") + axes[a].path + "=" + axes[a].value_literals[idx[a]];
            throw Error("sweep point (" + label + ") does not validate: " +
                        ds.front().message);
        }

        SweepRow row;
        row.grid_indices = idx;
        for (std::size_t a = 0; a < axes.size(); ++a)
            row.point.push_back(axes[a].value_literals[idx[a]]);
        row.outcome = evaluate(s);
        out.rows.push_back(std::move(row));

        done = true;
        for (std::size_t a = axes.size(); a-- > 0;) {
            if (++idx[a] < axes[a].value_literals.size()) {
                done = false;
                break;
            }
            idx[a] = 0;
        }
    }
    return out;
}

PedigreeComparison compare_pedigrees(const Scenario& s) {
    if (!s.dna_evidence || s.dna_evidence->candidates.empty())
        throw Error("pedigree comparison requires dna_evidence with a candidate list");
    const auto& de = *s.dna_evidence;
    if (de.observations.empty())
        throw Error("pedigree comparison requires at least one observation");

    std::vector<double> prior = de.candidate_prior;
    if (prior.empty()) prior.assign(de.candidates.size(), 1.0);

    PedigreeComparison out;
    const dna::MutationModel mut{de.mutation_rate};
    double total = 0.0;
    for (std::size_t i = 0; i < de.candidates.size(); ++i) {
        const auto& cand = de.candidates[i];
        out.labels.push_back(cand.label);
        double lik = 1.0;
        for (const auto& obs : de.observations) {
            const auto& pop = de.populations.at(obs.population);
            lik *= dna::dna_likelihood(cand, pop, mut, obs.observation);
        }
        out.likelihoods.push_back(lik);
        total += prior[i] * lik;
    }
    out.posterior.assign(de.candidates.size(), 0.0);
    if (total <= 0.0) {
        out.undefined = true;
        return out;
    }
    for (std::size_t i = 0; i < de.candidates.size(); ++i)
        out.posterior[i] = prior[i] * out.likelihoods[i] / total;
    out.argmax = 0;
    for (std::size_t i = 1; i < de.candidates.size(); ++i)
        if (out.posterior[i] > out.posterior[out.argmax]) out.argmax = static_cast<int>(i);
    return out;
}

}  // namespace kinship
