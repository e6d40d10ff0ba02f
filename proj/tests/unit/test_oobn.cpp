#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <tuple>

#include "kinship/oobn.hpp"
#include "kinship/oracle.hpp"
#include "kinship/pedigree.hpp"

using namespace kinship;
namespace fs = std::filesystem;

namespace {

const fs::path kModels = fs::path(KINSHIP_REPO_ROOT) / "scenarios" / "models";

oobn::ModelDocument parse_ok(const std::string& source) {
    auto r = oobn::parse(source);
    for (const auto& d : r.diagnostics) INFO(format_diagnostic(d));
    REQUIRE(r.ok());
    return *r.document;
}

oobn::ModelDocument load_model(const std::string& name) {
    auto r = oobn::parse_file((kModels / name).string());
    REQUIRE(r.ok());
    return *r.document;
}

bool has_code(const std::vector<Diagnostic>& ds, const std::string& code) {
    for (const auto& d : ds)
        if (d.code == code) return true;
    return false;
}

}  // namespace

TEST_CASE("parse: minimal class with one binary node") {
    auto doc = parse_ok("class M { node x : [a, b] cpt { 0.5, 0.5; }; }\nnetwork M;");
    REQUIRE(doc.classes.size() == 1);
    CHECK(doc.classes[0].instances.empty());
    REQUIRE(doc.classes[0].nodes.size() == 1);
    CHECK(doc.classes[0].nodes[0].cardinality() == 2);
    CHECK(doc.root == "M");
}

TEST_CASE("parse: undeclared class in an instance") {
    auto r = oobn::parse("class M { instance g : Ghost (); }\nnetwork M;");
    CHECK_FALSE(r.ok());
    CHECK(has_code(r.diagnostics, "E_UNKNOWN_CLASS"));
    for (const auto& d : r.diagnostics)
        if (d.code == "E_UNKNOWN_CLASS") CHECK(d.line == 1);
}

TEST_CASE("parse: the bundled tomb model has 3 classes, root with 2 instances") {
    auto doc = load_model("talpiyot.oobn");
    CHECK(doc.classes.size() == 3);
    const auto* root = doc.find_class(doc.root);
    REQUIRE(root != nullptr);
    CHECK(root->name == "Tomb");
    CHECK(root->instances.size() == 2);
    CHECK(oobn::validate(doc).empty());
}

TEST_CASE("parse: duplicate names and lexical errors carry distinct codes") {
    auto dup = oobn::parse("class M { node x : [a,b] cpt {0.5,0.5;}; node x : [a,b] cpt "
                           "{0.5,0.5;}; }\nnetwork M;");
    CHECK_FALSE(dup.ok());
    CHECK(has_code(dup.diagnostics, "E_DUP_NAME"));

    auto lex = oobn::parse("class M { @ }\nnetwork M;");
    CHECK_FALSE(lex.ok());
    CHECK(has_code(lex.diagnostics, "E_LEX"));

    auto syn = oobn::parse("class M { node : ; }\nnetwork M;");
    CHECK_FALSE(syn.ok());
    CHECK(has_code(syn.diagnostics, "E_SYNTAX"));
}

TEST_CASE("validate: minimal valid document is clean") {
    auto doc = parse_ok("class M { node x : [a, b] cpt { 0.5, 0.5; }; }\nnetwork M;");
    CHECK(oobn::validate(doc).empty());
}

TEST_CASE("validate: CPT row summing to 0.9") {
    auto doc = parse_ok("class M { node x : [a, b] cpt { 0.5, 0.4; }; }\nnetwork M;");
    auto ds = oobn::validate(doc);
    CHECK(has_code(ds, "E_CPT_NOT_NORMALIZED"));
}

TEST_CASE("validate: class cycle") {
    auto doc = parse_ok(
        "class A { node x : [a,b] cpt {0.5,0.5;}; instance o : B (); }\n"
        "class B { node y : [a,b] cpt {0.5,0.5;}; instance o : A (); }\n"
        "network A;");
    CHECK(has_code(oobn::validate(doc), "E_CLASS_CYCLE"));
}

TEST_CASE("validate: binding cardinality mismatch") {
    auto doc = parse_ok(
        "class In { input node s : [a, b, c]; output node o : [a,b,c] parents (s) "
        "cpt {0.8,0.1,0.1; 0.1,0.8,0.1; 0.1,0.1,0.8;}; }\n"
        "class M { node x : [a, b] cpt { 0.5, 0.5; }; instance i : In (s = x); }\n"
        "network M;");
    CHECK(has_code(oobn::validate(doc), "E_CARDINALITY_MISMATCH"));
}

TEST_CASE("validate: every invalid corpus file yields a located diagnostic") {
    int checked = 0;
    for (const auto& entry : fs::directory_iterator(kModels / "invalid")) {
        if (entry.path().extension() != ".oobn") continue;
        ++checked;
        INFO(entry.path().string());
        auto r = oobn::parse_file(entry.path().string());
        std::vector<Diagnostic> ds = r.diagnostics;
        if (r.ok()) {
            auto vs = oobn::validate(*r.document);
            ds.insert(ds.end(), vs.begin(), vs.end());
        }
        REQUIRE(has_errors(ds));
        bool located = false;
        for (const auto& d : ds)
            if (d.is_error() && d.line >= 1) located = true;
        CHECK(located);
    }
    CHECK(checked >= 10);
}

TEST_CASE("flatten: single class keeps bare node names") {
    auto doc = parse_ok("class M { node only : [a, b] cpt { 0.25, 0.75; }; }\nnetwork M;");
    auto flat = oobn::flatten(doc);
    REQUIRE(flat.network.variables().size() == 1);
    CHECK(flat.network.variables()[0].id == "only");
}

TEST_CASE("flatten: instance members get dot-qualified names") {
    auto doc = parse_ok(
        "class Two { node x : [a,b] cpt {0.5,0.5;}; node y : [a,b] parents (x) cpt "
        "{0.9,0.1; 0.2,0.8;}; }\n"
        "class Root { node h : [a,b] cpt {0.5,0.5;}; instance ped : Two (); }\n"
        "network Root;");
    auto flat = oobn::flatten(doc);
    CHECK(flat.network.has_variable("ped.x"));
    CHECK(flat.network.has_variable("ped.y"));
    CHECK(flat.network.has_variable("h"));
}

TEST_CASE("flatten: shared input becomes one variable feeding both instances") {
    auto doc = load_model("shared_input.oobn");
    auto flat = oobn::flatten(doc);
    REQUIRE(flat.network.variables().size() == 3);  // frequency + 2 draws
    CHECK(flat.network.has_variable("frequency"));
    CHECK(flat.network.has_variable("left.draw"));
    CHECK(flat.network.has_variable("right.draw"));
    CHECK(flat.network.parents("left.draw") == std::vector<std::string>{"frequency"});
    CHECK(flat.network.parents("right.draw") == std::vector<std::string>{"frequency"});

    // Hand-built equivalent network.
    std::vector<DiscreteVariable> vars{
        {"frequency", "frequency", 2, {"f1", "f2"}},
        {"left.draw", "left.draw", 2, {"f1", "f2"}},
        {"right.draw", "right.draw", 2, {"f1", "f2"}},
    };
    std::vector<Factor> cpts;
    cpts.emplace_back(std::vector<std::string>{"frequency"}, std::vector<int>{2},
                      std::vector<double>{0.3, 0.7});
    for (const std::string id : {"left.draw", "right.draw"})
        cpts.emplace_back(std::vector<std::string>{id, "frequency"}, std::vector<int>{2, 2},
                          std::vector<double>{0.99, 0.02, 0.01, 0.98});
    Network hand(std::move(vars), std::move(cpts));

    EvidenceAssignment e;
    e.assignments["left.draw"] = 0;
    QueryResult a = query(flat.network, {"right.draw"}, e);
    QueryResult b = query(hand, {"right.draw"}, e);
    REQUIRE_FALSE(a.impossible);
    CHECK(a.evidence_prob == doctest::Approx(b.evidence_prob).epsilon(1e-9));
    CHECK(a.posterior.same_table(b.posterior, 1e-9));
}

TEST_CASE("flatten: aliases resolve through nested instances") {
    auto doc = load_model("nested_chain.oobn");
    auto flat = oobn::flatten(doc);
    CHECK(flat.network.has_variable("b1.inner.out"));
    CHECK(flat.resolve("b1.tip") == "b1.inner.out");
    CHECK(flat.network.parents("sensor1") == std::vector<std::string>{"b1.inner.out"});
}

TEST_CASE("flatten: instance isomorphism on symmetric instances") {
    auto doc = load_model("nested_chain.oobn");
    auto flat = oobn::flatten(doc);
    QueryResult q1 = query(flat.network, {"b1.inner.out"}, {});
    QueryResult q2 = query(flat.network, {"b2.inner.out"}, {});
    EvidenceAssignment hi1, hi2;
    hi1.assignments["b1.inner.out"] = 1;
    hi2.assignments["b2.inner.out"] = 1;
    CHECK(factor_reduce(q1.posterior, hi1).scalar() ==
          doctest::Approx(factor_reduce(q2.posterior, hi2).scalar()).epsilon(1e-9));
}

TEST_CASE("flatten: rows are renormalized exactly") {
    // 1e-6-level slack in literals is legal and must vanish after flattening.
    auto doc = parse_ok(
        "class M { node x : [a, b] cpt { 0.5000002, 0.4999999; }; }\nnetwork M;");
    REQUIRE(oobn::validate(doc).empty());
    auto flat = oobn::flatten(doc);
    const auto& v = flat.network.cpts()[0].values();
    CHECK(v[0] + v[1] == 1.0);
}

TEST_CASE("round-trip: print then parse is structurally identical") {
    for (const auto& name :
         {"talpiyot.oobn", "nested_chain.oobn", "multi_item.oobn", "shared_input.oobn",
          "single_node.oobn", "maternal_line.oobn"}) {
        INFO(name);
        auto doc = load_model(name);
        auto reparsed = oobn::parse(oobn::print(doc));
        REQUIRE(reparsed.ok());
        CHECK(oobn::structurally_equal(doc, *reparsed.document));
        // And printing again is byte-stable.
        CHECK(oobn::print(doc) == oobn::print(*reparsed.document));
    }
}

TEST_CASE("round-trip: generated oracle networks survive print/parse/flatten") {
    Rng rng(2718);
    for (int i = 0; i < 10; ++i) {
        Network net = oracle::random_network(rng);
        auto doc = oracle::document_from_network(net);
        auto reparsed = oobn::parse(oobn::print(doc));
        REQUIRE(reparsed.ok());
        REQUIRE(oobn::validate(*reparsed.document).empty());
        auto flat = oobn::flatten(*reparsed.document);
        CHECK(enumerate_joint(flat.network).same_table(enumerate_joint(net), 1e-9));
    }
}

TEST_CASE("transmit: built-in CPT parses, validates and flattens") {
    auto doc = load_model("maternal_line.oobn");
    REQUIRE(oobn::validate(doc).empty());
    auto flat = oobn::flatten(doc);
    REQUIRE(flat.network.has_variable("g1.child"));
    CHECK(flat.network.parents("g1.child") == std::vector<std::string>{"founder"});

    // The generated table is the uniform-mutation transmission CPT.
    Factor expected = dna::transmit_cpt(0.01, 3, "g1.child", "founder");
    CHECK(flat.network.cpt("g1.child").same_table(expected, 1e-15));
    // Spot-check literal entries: diagonal 0.99, off-diagonal 0.005.
    CHECK(flat.network.cpt("g1.child").values()[0] == doctest::Approx(0.99).epsilon(1e-12));
    CHECK(flat.network.cpt("g1.child").values()[1] == doctest::Approx(0.005).epsilon(1e-12));

    CHECK(flat.network.parents("typed") == std::vector<std::string>{"g2.child"});
    CHECK(flat.network.cpt("typed").same_table(
        dna::transmit_cpt(0.05, 3, "typed", "g2.child"), 1e-15));
}

TEST_CASE("transmit: arity, cardinality and rate violations diagnose") {
    auto r = oobn::parse_file((kModels / "invalid" / "transmit_bad.oobn").string());
    REQUIRE(r.ok());
    auto ds = oobn::validate(*r.document);
    CHECK(has_code(ds, "E_TRANSMIT_ARITY"));
    CHECK(has_code(ds, "E_TRANSMIT_RATE"));
}

TEST_CASE("transmit: survives the print/parse round trip") {
    auto doc = load_model("maternal_line.oobn");
    auto reparsed = oobn::parse(oobn::print(doc));
    REQUIRE(reparsed.ok());
    CHECK(oobn::structurally_equal(doc, *reparsed.document));
}

TEST_CASE("flatten: depth guard rejects pathological nesting") {
    std::string src;
    // K0 is a leaf; K1..K17 each instantiate the previous class.
    src += "class K0 { node x : [a,b] cpt {0.5,0.5;}; }\n";
    for (int i = 1; i <= 17; ++i)
        src += "class K" + std::to_string(i) + " { instance c : K" + std::to_string(i - 1) +
               " (); node x : [a,b] cpt {0.5,0.5;}; }\n";
    src += "network K17;";
    auto doc = parse_ok(src);
    CHECK(has_code(oobn::validate(doc), "E_DEPTH_EXCEEDED"));
}

TEST_CASE("diagnostics: stable ordering by location then code") {
    auto r = oobn::parse("class M {\n  node x : [a b];\n  node x : [c d];\n}\nnetwork M;");
    CHECK_FALSE(r.ok());
    REQUIRE(!r.diagnostics.empty());
    for (std::size_t i = 1; i < r.diagnostics.size(); ++i) {
        const auto& a = r.diagnostics[i - 1];
        const auto& b = r.diagnostics[i];
        CHECK(std::tie(a.line, a.column, a.code) <= std::tie(b.line, b.column, b.code));
    }
}
