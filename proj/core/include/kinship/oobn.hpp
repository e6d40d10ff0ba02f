#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kinship/diagnostics.hpp"
#include "kinship/network.hpp"

namespace kinship::oobn {

// Textual language for reusable network fragments. A document is a list of
// classes plus a root designation; flattening instantiates the root into a
// plain Network with dot-qualified variable names.
//
// Grammar sketch (full EBNF in docs/oobn-grammar.md):
//
//   class Transmit {
//     input node parent : [h1, h2];
//     output node child : [h1, h2] parents (parent) cpt { 0.99, 0.01; 0.01, 0.99; };
//   }
//   class Model {
//     node hap : [h1, h2] cpt { 0.6, 0.4; };
//     instance kid : Transmit (parent = hap);
//     node seen : [no, yes] parents (kid.child) cpt { 0.9, 0.1; 0.2, 0.8; };
//   }
//   network Model;
//
// '#' starts a line comment. CPT rows follow row-major parent order with
// parents as declared; each row lists the child distribution.

struct SourceLocation {
    int line = 0;
    int column = 0;
};

// A reference to a node: either local ("hap") or an instance output
// ("kid.child"). The dot is reserved; node names cannot contain it.
struct NodeRef {
    std::string instance;  // empty for local references
    std::string node;
    SourceLocation loc;

    std::string text() const { return instance.empty() ? node : instance + "." + node; }
    friend bool operator==(const NodeRef& a, const NodeRef& b) {
        return a.instance == b.instance && a.node == b.node;
    }
};

enum class NodeRole { Input, Internal, Output };

struct NodeDecl {
    std::string name;
    NodeRole role = NodeRole::Internal;
    std::vector<std::string> state_labels;     // empty for aliases
    std::vector<NodeRef> parents;
    std::vector<std::vector<double>> cpt_rows; // one row per parent configuration
    // "cpt transmit(mu)": the built-in uniform-mutation transmission table
    // (requires exactly one parent of the same cardinality).
    std::optional<double> transmit_rate;
    std::optional<NodeRef> alias_of;           // "node x = inst.out;"
    SourceLocation loc;

    bool is_alias() const { return alias_of.has_value(); }
    bool is_transmit() const { return transmit_rate.has_value(); }
    int cardinality() const { return static_cast<int>(state_labels.size()); }
};

struct InstanceDecl {
    std::string name;
    std::string class_name;
    std::vector<std::pair<std::string, NodeRef>> bindings;  // input -> outer node
    SourceLocation loc;
};

struct NetworkClass {
    std::string name;
    std::vector<NodeDecl> nodes;        // declaration order, all roles
    std::vector<InstanceDecl> instances;
    SourceLocation loc;

    const NodeDecl* find_node(const std::string& n) const;
    const InstanceDecl* find_instance(const std::string& n) const;
};

struct ModelDocument {
    std::vector<NetworkClass> classes;
    std::string root;
    SourceLocation root_loc;

    const NetworkClass* find_class(const std::string& n) const;
};

// Structural equality, ignoring source locations (for round-trip tests).
bool structurally_equal(const ModelDocument& a, const ModelDocument& b);

struct ParseResult {
    std::optional<ModelDocument> document;  // set iff no error diagnostics
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return document.has_value(); }
};

ParseResult parse(const std::string& source);
ParseResult parse_file(const std::string& path);  // throws IoError when unreadable

// Document-level invariants: names resolve, inputs bound exactly once with
// matching cardinality, CPT shapes right and rows normalized within 1e-6,
// instantiation graph acyclic and no deeper than 16.
std::vector<Diagnostic> validate(const ModelDocument& doc);

inline constexpr double kCptLiteralTolerance = 1e-6;
inline constexpr int kMaxInstanceDepth = 16;

struct FlatNetwork {
    Network network;
    // Alias nodes produce no variable; this maps their qualified names to
    // the variable that backs them.
    std::map<std::string, std::string> alias_targets;

    // Resolves a (possibly aliased) qualified name to a variable id.
    std::string resolve(const std::string& qualified_name) const;
};

// Instantiates the root class into a single Network. Variables are named
// `instancePath.nodeName` (root path empty); bound inputs collapse onto the
// outer variable; CPT rows are renormalized exactly. Requires a document
// that validates without errors.
FlatNetwork flatten(const ModelDocument& doc);

// Canonical re-rendering; parse(print(doc)) is structurally equal to doc.
std::string print(const ModelDocument& doc);

}  // namespace kinship::oobn
