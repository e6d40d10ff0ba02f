// kinship-lr: evaluate identification scenarios combining name-frequency and
// DNA-marker evidence into likelihood ratios.
//
//   kinship-lr validate  <scenario.scn>
//   kinship-lr eval      <scenario.scn> [--machine out.json] [--timestamps]
//   kinship-lr sweep     <scenario.scn> [--axis path=v1,v2,...]... [--machine out.json]
//   kinship-lr pedigrees <scenario.scn> [--machine out.json]
//   kinship-lr oracle    [--seed N] [--count N]
//
// Exit codes: 0 success, 1 validation/usage failure, 2 I/O or parse failure.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kinship/oracle.hpp"
#include "kinship/report.hpp"
#include "kinship/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

void print_diagnostics(const std::string& default_file,
                       const std::vector<kinship::Diagnostic>& ds) {
    for (const auto& d : ds) {
        const std::string& file = d.file.empty() ? default_file : d.file;
        std::cerr << file << ":" << kinship::format_diagnostic(d) << "\n";
    }
}

// Loads and semantically validates; returns nullopt after printing
// diagnostics (exit code in *exit_code).
std::optional<kinship::Scenario> load_checked(const std::string& path, int* exit_code) {
    kinship::ScenarioDocument doc = kinship::ScenarioDocument::load(path);
    kinship::Scenario s = doc.build();
    auto ds = kinship::validate_scenario(s);
    print_diagnostics(path, ds);
    if (kinship::has_errors(ds)) {
        *exit_code = kExitValidation;
        return std::nullopt;
    }
    return s;
}

void write_machine(const std::string& path, const kinship::Report& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw kinship::IoError("cannot write machine output: " + path);
    out << kinship::render_machine(report);
}

struct CommonOpts {
    std::string scenario_path;
    std::string machine_path;
    bool timestamps = false;
};

int cmd_validate(const std::string& path) {
    int code = kExitOk;
    auto s = load_checked(path, &code);
    if (!s) return code;
    std::cout << "ok: " << s->name << " validates\n";
    return kExitOk;
}

int cmd_eval(const CommonOpts& opts) {
    int code = kExitOk;
    auto s = load_checked(opts.scenario_path, &code);
    if (!s) return code;
    kinship::EvaluationOutcome outcome = kinship::evaluate(*s);
    kinship::Report report = kinship::make_report(*s, outcome);
    std::cout << kinship::render_human(report, opts.timestamps);
    if (!opts.machine_path.empty()) write_machine(opts.machine_path, report);
    return kExitOk;
}

int cmd_sweep(const CommonOpts& opts, const std::vector<std::string>& axis_flags) {
    int code = kExitOk;
    auto s = load_checked(opts.scenario_path, &code);
    if (!s) return code;

    std::vector<kinship::SweepAxis> axes = s->sweep_axes;
    for (const auto& flag : axis_flags) {
        auto eq = flag.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= flag.size()) {
            std::cerr << "kinship-lr: --axis expects path=v1,v2,...\n";
            return kExitValidation;
        }
        kinship::SweepAxis axis;
        axis.path = flag.substr(0, eq);
        std::string values = flag.substr(eq + 1);
        std::string cur;
        for (char c : values) {
            if (c == ',') {
                axis.value_literals.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        axis.value_literals.push_back(cur);
        // A flag axis for a path already swept in the scenario replaces it.
        std::erase_if(axes, [&](const kinship::SweepAxis& a) { return a.path == axis.path; });
        axes.push_back(std::move(axis));
    }
    if (axes.empty()) {
        std::cerr << "kinship-lr: sweep needs at least one axis (scenario sweep_axes or "
                     "--axis)\n";
        return kExitValidation;
    }

    kinship::ScenarioDocument doc = kinship::ScenarioDocument::load(opts.scenario_path);
    kinship::SweepOutcome sweep = kinship::run_sweep(doc, axes);
    kinship::Report report = kinship::make_sweep_report(*s, sweep);
    std::cout << kinship::render_human(report, opts.timestamps);
    if (!opts.machine_path.empty()) write_machine(opts.machine_path, report);
    return kExitOk;
}

int cmd_pedigrees(const CommonOpts& opts) {
    int code = kExitOk;
    auto s = load_checked(opts.scenario_path, &code);
    if (!s) return code;
    if (!s->dna_evidence || s->dna_evidence->candidates.empty()) {
        std::cerr << "kinship-lr: scenario has no candidate pedigree list\n";
        return kExitValidation;
    }
    kinship::PedigreeComparison cmp = kinship::compare_pedigrees(*s);
    kinship::Report report = kinship::make_pedigree_report(*s, cmp);
    std::cout << kinship::render_human(report, opts.timestamps);
    if (!opts.machine_path.empty()) write_machine(opts.machine_path, report);
    return kExitOk;
}

int cmd_oracle(std::uint64_t seed, int count) {
    kinship::oracle::SuiteResult result = kinship::oracle::run_suite(seed, count);
    if (result.ok) {
        std::cout << "oracle: " << result.cases_run
                  << " cases, elimination matches enumeration (seed " << seed << ")\n";
        return kExitOk;
    }
    std::cerr << "oracle: FAILED after " << result.cases_run << " cases: " << result.failure
              << "\n";
    std::cerr << result.counterexample;
    return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact-inference toolkit for identification evidence"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::vector<std::string> axis_flags;
    std::uint64_t seed = 42;
    int count = 50;

    auto add_common = [&](CLI::App* cmd, bool with_machine = true) {
        // Missing files surface as IoError (exit 2), not as a usage error.
        cmd->add_option("scenario", opts.scenario_path, "scenario file (.scn)")->required();
        if (with_machine) {
            cmd->add_option("--machine", opts.machine_path,
                            "write the machine-readable report to this path");
            cmd->add_flag("--timestamps", opts.timestamps,
                          "embed a timestamp in the human-readable report");
        }
    };

    CLI::App* validate = app.add_subcommand("validate", "check a scenario and its artifacts");
    add_common(validate, false);

    CLI::App* eval = app.add_subcommand("eval", "evaluate a scenario");
    add_common(eval);

    CLI::App* sweep = app.add_subcommand("sweep", "evaluate over a parameter grid");
    add_common(sweep);
    sweep->add_option("--axis", axis_flags,
                      "parameter axis as path=v1,v2,... (repeatable; overrides the "
                      "scenario's own axes for the same path)");

    CLI::App* pedigrees =
        app.add_subcommand("pedigrees", "posterior over candidate pedigrees");
    add_common(pedigrees);

    CLI::App* oracle = app.add_subcommand("oracle", "run the enumeration-vs-elimination suite");
    oracle->add_option("--seed", seed, "random seed");
    oracle->add_option("--count", count, "number of generated cases")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (app.got_subcommand(validate)) return cmd_validate(opts.scenario_path);
        if (app.got_subcommand(eval)) return cmd_eval(opts);
        if (app.got_subcommand(sweep)) return cmd_sweep(opts, axis_flags);
        if (app.got_subcommand(pedigrees)) return cmd_pedigrees(opts);
        if (app.got_subcommand(oracle)) return cmd_oracle(seed, count);
    } catch (const kinship::IoError& e) {
        std::cerr << "kinship-lr: " << e.what() << "\n";
        return kExitIo;
    } catch (const kinship::Error& e) {
        std::cerr << "kinship-lr: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
