#include "kinship/report.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "kinship/numeric.hpp"

namespace kinship {

using ojson = nlohmann::ordered_json;

namespace {

std::string item_kind_name(evidence::ItemKind k) {
    switch (k) {
        case evidence::ItemKind::Onomasticon: return "onomasticon";
        case evidence::ItemKind::Dna: return "dna";
        case evidence::ItemKind::Direct: return "direct";
    }
    return "direct";
}

std::string prior_desc(const PriorSpec& p) {
    switch (p.kind) {
        case PriorSpec::Kind::Uniform:
            return "uniform alpha=" + format_double(p.alpha);
        case PriorSpec::Kind::Scaled:
            return "scaled total=" + format_double(p.total);
        case PriorSpec::Kind::Explicit:
            return "explicit (" + std::to_string(p.values.size()) + " values)";
    }
    return "";
}

std::string count_prior_desc(const evidence::CountPrior& p) {
    std::string q = p.quantity == evidence::CountPrior::Quantity::OssuaryCount
                        ? "ossuary_count"
                        : "population_size";
    switch (p.kind) {
        case evidence::CountPrior::Kind::Point:
            return q + ": point " + std::to_string(p.point_value);
        case evidence::CountPrior::Kind::UniformRange:
            return q + ": uniform [" + std::to_string(p.range_lo) + ", " +
                   std::to_string(p.range_hi) + "]";
        case evidence::CountPrior::Kind::Poisson:
            return q + ": poisson mean " + format_double(p.poisson_mean);
    }
    return q;
}

void fill_parameters(Report& r, const Scenario& s) {
    auto add = [&](const std::string& k, const std::string& v) {
        r.parameters.emplace_back(k, v);
    };
    add("hypotheses", "H0 '" + s.hypotheses.null_label + "' vs H1 '" + s.hypotheses.alt_label +
                          "', prior odds (H1:H0) = " + format_double(s.hypotheses.prior_odds));
    if (s.model) {
        add("model", s.model->path);
        if (!s.model->hypothesis_node.empty())
            add("model hypothesis node", s.model->hypothesis_node + " (null='" +
                                             s.model->null_state + "', alt='" +
                                             s.model->alt_state + "')");
    }
    if (s.name_evidence) {
        for (const auto& [sex, ref] : s.name_evidence->tables)
            add(std::string("name table ") + sex_code(sex),
                ref.table.source_label + " (N=" + std::to_string(ref.table.sample_size) +
                    "), prior " + prior_desc(ref.prior));
        add("family members", std::to_string(s.name_evidence->family.members.size()));
        const auto& c = s.name_evidence->constraints;
        add("naming constraints",
            std::string("sibling_distinct=") + (c.sibling_distinct ? "on" : "off") +
                ", ancestor_boost=" + format_double(c.ancestor_boost));
        for (const auto& a : s.name_evidence->identifications) {
            std::string key = "identification";
            if (!a.assumption_id.empty()) key += " " + a.assumption_id;
            std::string value = a.member_id + " is named '" + a.required_name +
                                "' with weight " + format_double(a.weight);
            if (!a.alternative.empty()) value += "; otherwise " + a.alternative;
            add(key, value);
        }
    }
    if (s.dna_evidence) {
        const auto& de = *s.dna_evidence;
        add("mutation rate", format_double(de.mutation_rate));
        if (de.null_pedigree) add("pedigree null", de.null_pedigree->label);
        if (de.alt_pedigree) add("pedigree alt", de.alt_pedigree->label);
        if (!de.candidates.empty())
            add("candidate pedigrees", std::to_string(de.candidates.size()));
    }
    for (const auto& cp : s.count_priors) add("count prior", count_prior_desc(cp));
    add("items combined", s.independent_items ? "product rule (conditionally independent)"
                                              : "joint network model");
}

void fill_overall(Report& r, const Scenario& s, const EvaluationOutcome& o) {
    for (const auto& item : o.items) {
        Report::ItemRow row;
        row.id = item.id;
        row.kind = item_kind_name(item.kind);
        row.lr = item.lr;
        row.provenance = item.provenance;
        row.alt_likelihood = item.alt_likelihood;
        row.null_likelihood = item.null_likelihood;
        r.items.push_back(std::move(row));
    }
    r.overall = o.combined.overall;
    r.overall_inverse = o.combined.overall.inverted();
    r.posterior_odds = o.posterior.odds;
    r.posterior_prob_alt = o.posterior.prob_alt;
    if (o.selection_probability) {
        Report::Selection sel;
        sel.trials = o.selection_trials;
        sel.probability = *o.selection_probability;
        sel.adjusted = o.selection_adjusted.value_or(0.0);
        r.selection = sel;
    }
    r.warnings = o.warnings;
    r.hypotheses = s.hypotheses;
}

}  // namespace

Report make_report(const Scenario& s, const EvaluationOutcome& outcome) {
    Report r;
    r.scenario_name = s.name;
    r.scenario_path = s.source_path.string();
    fill_parameters(r, s);
    fill_overall(r, s, outcome);
    return r;
}

Report make_sweep_report(const Scenario& s, const SweepOutcome& sweep) {
    Report r;
    r.scenario_name = s.name;
    r.scenario_path = s.source_path.string();
    fill_parameters(r, s);
    r.hypotheses = s.hypotheses;

    Report::SweepTable table;
    for (const auto& a : sweep.axes) table.axis_paths.push_back(a.path);
    for (const auto& row : sweep.rows) {
        Report::SweepTable::Row out;
        out.point = row.point;
        out.overall = row.outcome.combined.overall;
        out.posterior_prob_alt = row.outcome.posterior.prob_alt;
        table.rows.push_back(std::move(out));
        for (const auto& w : row.outcome.warnings) {
            bool seen = false;
            for (const auto& e : r.warnings)
                if (e == w) seen = true;
            if (!seen) r.warnings.push_back(w);
        }
    }
    r.sweep = std::move(table);
    return r;
}

Report make_pedigree_report(const Scenario& s, const PedigreeComparison& cmp) {
    Report r;
    r.scenario_name = s.name;
    r.scenario_path = s.source_path.string();
    fill_parameters(r, s);
    r.hypotheses = s.hypotheses;

    Report::PedigreeTable table;
    table.undefined = cmp.undefined;
    std::vector<std::size_t> order(cmp.labels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return cmp.posterior[a] > cmp.posterior[b];
    });
    for (std::size_t i : order) {
        Report::PedigreeTable::Row row;
        row.label = cmp.labels[i];
        row.likelihood = cmp.likelihoods[i];
        row.posterior = cmp.posterior[i];
        row.argmax = static_cast<int>(i) == cmp.argmax;
        table.rows.push_back(std::move(row));
    }
    if (cmp.undefined)
        r.warnings.push_back(
            "all candidate pedigrees have zero likelihood; posterior undefined");
    r.pedigrees = std::move(table);
    return r;
}

// ---------------------------------------------------------------------------
// Human rendering
// ---------------------------------------------------------------------------

namespace {

std::string lr_text(const LrValue& v) { return v.to_string(); }

}  // namespace

std::string render_human(const Report& r, bool with_timestamp) {
    std::ostringstream os;
    os << "kinship-lr report\n";
    os << "scenario: " << r.scenario_name;
    if (!r.scenario_path.empty()) os << " (" << r.scenario_path << ")";
    os << "\n";
    if (with_timestamp) {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        os << "generated: " << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ") << "\n";
    }
    os << "\n";

    if (!r.parameters.empty()) {
        os << "parameters:\n";
        for (const auto& [k, v] : r.parameters)
            os << "  " << k << ": " << v << "\n";
        os << "\n";
    }

    if (!r.items.empty()) {
        os << "evidence items (LR = P(E|H1)/P(E|H0)):\n";
        for (const auto& item : r.items) {
            os << "  " << std::left << std::setw(16) << item.id << std::setw(13) << item.kind
               << "LR = " << lr_text(item.lr);
            if (item.alt_likelihood && item.null_likelihood)
                os << "   [P(E|H1) = " << format_double(*item.alt_likelihood)
                   << ", P(E|H0) = " << format_double(*item.null_likelihood) << "]";
            os << "\n";
        }
        os << "\n";
    }

    if (!r.sweep && !r.pedigrees) {
        os << "overall:\n";
        os << "  LR (H1/H0): " << lr_text(r.overall)
           << "    inverted (H0/H1): " << lr_text(r.overall_inverse) << "\n";
        os << "  posterior odds (H1:H0): " << lr_text(r.posterior_odds) << "\n";
        os << "  posterior P(H1): " << lr_text(r.posterior_prob_alt) << "\n\n";
    }

    if (r.selection) {
        os << "selection effect (best of many trials):\n";
        os << "  per-trial probability p = " << format_double(r.selection->probability) << "\n";
        os << "  trials: " << r.selection->trials << "\n";
        os << "  P(at least one such finding) = " << format_double(r.selection->adjusted)
           << "\n\n";
    }

    if (r.sweep) {
        // Column widths sized to the widest entry per axis.
        std::vector<std::size_t> widths;
        for (std::size_t a = 0; a < r.sweep->axis_paths.size(); ++a) {
            std::size_t w = r.sweep->axis_paths[a].size();
            for (const auto& row : r.sweep->rows) w = std::max(w, row.point[a].size());
            widths.push_back(w + 2);
        }
        std::size_t lr_width = std::string("LR (H1/H0)").size();
        for (const auto& row : r.sweep->rows)
            lr_width = std::max(lr_width, lr_text(row.overall).size());
        lr_width += 2;

        os << "sweep (" << r.sweep->rows.size() << " points):\n  ";
        for (std::size_t a = 0; a < r.sweep->axis_paths.size(); ++a)
            os << std::setw(static_cast<int>(widths[a])) << std::left << r.sweep->axis_paths[a];
        os << std::setw(static_cast<int>(lr_width)) << std::left << "LR (H1/H0)" << "P(H1)\n";
        for (const auto& row : r.sweep->rows) {
            os << "  ";
            for (std::size_t a = 0; a < row.point.size(); ++a)
                os << std::setw(static_cast<int>(widths[a])) << std::left << row.point[a];
            os << std::setw(static_cast<int>(lr_width)) << std::left << lr_text(row.overall)
               << lr_text(row.posterior_prob_alt) << "\n";
        }
        os << "\n";
    }

    if (r.pedigrees) {
        std::size_t label_w = 0, lik_w = 0;
        for (const auto& row : r.pedigrees->rows) {
            label_w = std::max(label_w, row.label.size());
            lik_w = std::max(lik_w, format_double(row.likelihood).size());
        }
        os << "pedigree posterior (sorted):\n";
        for (const auto& row : r.pedigrees->rows) {
            os << "  " << std::left << std::setw(static_cast<int>(label_w + 2)) << row.label
               << "likelihood = " << std::setw(static_cast<int>(lik_w + 2))
               << format_double(row.likelihood) << "posterior = "
               << format_double(row.posterior);
            if (row.argmax) os << "   <-- most probable";
            os << "\n";
        }
        os << "\n";
    }

    if (!r.warnings.empty()) {
        os << "warnings:\n";
        for (const auto& w : r.warnings) os << "  - " << w << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Machine rendering
// ---------------------------------------------------------------------------

namespace {

ojson lr_json(const LrValue& v) {
    switch (v.kind()) {
        case LrValue::Kind::Infinite: return ojson{{"kind", "infinite"}};
        case LrValue::Kind::Undefined: return ojson{{"kind", "undefined"}};
        case LrValue::Kind::Finite: break;
    }
    return ojson{{"kind", "finite"}, {"value", v.value()}};
}

}  // namespace

std::string render_machine(const Report& r) {
    ojson j;
    j["schema"] = "kinship-lr/report-v1";
    j["scenario"] = ojson{{"name", r.scenario_name}, {"path", r.scenario_path}};
    j["hypotheses"] = ojson{{"null_label", r.hypotheses.null_label},
                            {"alt_label", r.hypotheses.alt_label},
                            {"prior_odds", r.hypotheses.prior_odds}};
    ojson params = ojson::array();
    for (const auto& [k, v] : r.parameters) params.push_back(ojson{{"key", k}, {"value", v}});
    j["parameters"] = std::move(params);

    ojson items = ojson::array();
    for (const auto& item : r.items) {
        ojson o;
        o["id"] = item.id;
        o["kind"] = item.kind;
        o["lr"] = lr_json(item.lr);
        o["provenance"] = item.provenance;
        if (item.alt_likelihood) o["alt_likelihood"] = *item.alt_likelihood;
        if (item.null_likelihood) o["null_likelihood"] = *item.null_likelihood;
        items.push_back(std::move(o));
    }
    j["items"] = std::move(items);

    if (r.sweep || r.pedigrees) {
        // Per-point results live in their own sections.
        j["overall"] = nullptr;
    } else {
        j["overall"] = ojson{{"lr", lr_json(r.overall)},
                             {"lr_inverse", lr_json(r.overall_inverse)},
                             {"posterior_odds", lr_json(r.posterior_odds)},
                             {"posterior_prob_alt", lr_json(r.posterior_prob_alt)}};
    }

    if (r.selection) {
        j["selection"] = ojson{{"trials", r.selection->trials},
                               {"probability", r.selection->probability},
                               {"adjusted", r.selection->adjusted}};
    } else {
        j["selection"] = nullptr;
    }

    if (r.sweep) {
        ojson sweep;
        sweep["axes"] = r.sweep->axis_paths;
        ojson rows = ojson::array();
        for (const auto& row : r.sweep->rows) {
            ojson o;
            o["point"] = row.point;
            o["lr"] = lr_json(row.overall);
            o["posterior_prob_alt"] = lr_json(row.posterior_prob_alt);
            rows.push_back(std::move(o));
        }
        sweep["rows"] = std::move(rows);
        j["sweep"] = std::move(sweep);
    } else {
        j["sweep"] = nullptr;
    }

    if (r.pedigrees) {
        ojson rows = ojson::array();
        for (const auto& row : r.pedigrees->rows) {
            rows.push_back(ojson{{"label", row.label},
                                 {"likelihood", row.likelihood},
                                 {"posterior", row.posterior},
                                 {"argmax", row.argmax}});
        }
        j["pedigrees"] = ojson{{"undefined", r.pedigrees->undefined}, {"rows", std::move(rows)}};
    } else {
        j["pedigrees"] = nullptr;
    }

    j["warnings"] = r.warnings;
    return j.dump(2) + "\n";
}

}  // namespace kinship
