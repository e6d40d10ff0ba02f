#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "kinship/numeric.hpp"
#include "kinship/oobn.hpp"

namespace kinship::oobn {

namespace {

struct Validator {
    const ModelDocument& doc;
    std::vector<Diagnostic> diags;

    void error(SourceLocation loc, const std::string& code, const std::string& msg) {
        diags.push_back({Severity::Error, loc.line, loc.column, code, msg, ""});
    }

    // Cardinality of a node reference inside `cls`, resolving alias chains
    // and instance outputs structurally. Returns -1 and reports when the
    // reference does not resolve.
    int ref_cardinality(const NetworkClass& cls, const NodeRef& ref, int depth = 0) {
        if (depth > kMaxInstanceDepth) return -1;  // cycle elsewhere; stay quiet
        if (ref.instance.empty()) {
            const NodeDecl* n = cls.find_node(ref.node);
            if (!n) {
                error(ref.loc, "E_UNKNOWN_NODE",
                      "reference to unknown node '" + ref.node + "' in class '" + cls.name + "'");
                return -1;
            }
            if (n->is_alias()) return ref_cardinality(cls, *n->alias_of, depth + 1);
            return n->cardinality();
        }
        const InstanceDecl* inst = cls.find_instance(ref.instance);
        if (!inst) {
            error(ref.loc, "E_UNKNOWN_NODE",
                  "reference to unknown instance '" + ref.instance + "' in class '" +
                      cls.name + "'");
            return -1;
        }
        const NetworkClass* target = doc.find_class(inst->class_name);
        if (!target) return -1;  // reported as E_UNKNOWN_CLASS elsewhere
        const NodeDecl* out = target->find_node(ref.node);
        if (!out) {
            error(ref.loc, "E_UNKNOWN_NODE",
                  "class '" + target->name + "' has no node '" + ref.node + "'");
            return -1;
        }
        if (out->role != NodeRole::Output) {
            error(ref.loc, "E_NOT_OUTPUT",
                  "node '" + ref.node + "' of class '" + target->name +
                      "' is not an output and cannot be referenced through an instance");
            return -1;
        }
        if (out->is_alias()) return ref_cardinality(*target, *out->alias_of, depth + 1);
        return out->cardinality();
    }

    void check_class(const NetworkClass& cls) {
        std::set<std::string> names;
        for (const auto& n : cls.nodes) {
            if (!names.insert(n.name).second)
                error(n.loc, "E_DUP_NAME",
                      "duplicate node '" + n.name + "' in class '" + cls.name + "'");
        }
        for (const auto& i : cls.instances) {
            if (!names.insert(i.name).second)
                error(i.loc, "E_DUP_NAME",
                      "duplicate member '" + i.name + "' in class '" + cls.name + "'");
        }

        for (const auto& n : cls.nodes) check_node(cls, n);
        for (const auto& inst : cls.instances) check_instance(cls, inst);

        check_local_acyclicity(cls);
    }

    void check_node(const NetworkClass& cls, const NodeDecl& n) {
        if (n.is_alias()) {
            if (n.role == NodeRole::Input)
                error(n.loc, "E_SYNTAX", "input node cannot be an alias");
            if (n.alias_of->instance.empty())
                error(n.alias_of->loc, "E_SYNTAX",
                      "alias must reference an instance output (inst.node)");
            else
                ref_cardinality(cls, *n.alias_of);
            return;
        }

        if (n.cardinality() < 2)
            error(n.loc, "E_CARDINALITY",
                  "node '" + n.name + "' needs at least 2 state labels");
        std::set<std::string> labels(n.state_labels.begin(), n.state_labels.end());
        if (labels.size() != n.state_labels.size())
            error(n.loc, "E_DUP_LABEL", "node '" + n.name + "' has duplicate state labels");
        for (const auto& l : n.state_labels)
            if (l.empty()) error(n.loc, "E_DUP_LABEL", "node '" + n.name + "' has an empty state label");

        if (n.role == NodeRole::Input) {
            if (!n.cpt_rows.empty() || n.is_transmit())
                error(n.loc, "E_INPUT_HAS_CPT",
                      "input node '" + n.name + "' must not declare a CPT");
            if (!n.parents.empty())
                error(n.loc, "E_INPUT_HAS_CPT",
                      "input node '" + n.name + "' must not declare parents");
            return;
        }

        if (n.cpt_rows.empty() && !n.is_transmit()) {
            error(n.loc, "E_NODE_NO_CPT",
                  "node '" + n.name + "' has neither a CPT nor an alias target");
            return;
        }

        long parent_configs = 1;
        bool parents_ok = true;
        for (const auto& p : n.parents) {
            int c = ref_cardinality(cls, p);
            if (c < 0) {
                parents_ok = false;
                continue;
            }
            parent_configs *= c;
        }
        if (!parents_ok) return;

        if (n.is_transmit()) {
            if (!n.cpt_rows.empty())
                error(n.loc, "E_CPT_SHAPE",
                      "node '" + n.name + "' mixes transmit(...) with literal rows");
            if (n.parents.size() != 1) {
                error(n.loc, "E_TRANSMIT_ARITY",
                      "node '" + n.name + "': transmit(...) requires exactly one parent");
            } else {
                const int pc = ref_cardinality(cls, n.parents[0]);
                if (pc >= 0 && pc != n.cardinality())
                    error(n.loc, "E_TRANSMIT_ARITY",
                          "node '" + n.name + "': transmit(...) needs the parent to share "
                          "the node's cardinality");
            }
            if (*n.transmit_rate < 0.0 || *n.transmit_rate >= 1.0)
                error(n.loc, "E_TRANSMIT_RATE",
                      "node '" + n.name + "': mutation rate must lie in [0, 1)");
            return;
        }

        if (static_cast<long>(n.cpt_rows.size()) != parent_configs) {
            error(n.loc, "E_CPT_SHAPE",
                  "node '" + n.name + "' declares " + std::to_string(n.cpt_rows.size()) +
                      " CPT rows, expected " + std::to_string(parent_configs) +
                      " (one per parent configuration)");
            return;
        }
        for (std::size_t r = 0; r < n.cpt_rows.size(); ++r) {
            const auto& row = n.cpt_rows[r];
            if (static_cast<int>(row.size()) != n.cardinality()) {
                error(n.loc, "E_CPT_SHAPE",
                      "node '" + n.name + "' row " + std::to_string(r + 1) + " has " +
                          std::to_string(row.size()) + " entries, expected " +
                          std::to_string(n.cardinality()));
                continue;
            }
            double sum = 0.0;
            bool negative = false;
            for (double v : row) {
                if (v < 0.0) negative = true;
                sum += v;
            }
            if (negative)
                error(n.loc, "E_CPT_NEGATIVE",
                      "node '" + n.name + "' row " + std::to_string(r + 1) +
                          " contains a negative probability");
            else if (std::abs(sum - 1.0) > kCptLiteralTolerance)
                error(n.loc, "E_CPT_NOT_NORMALIZED",
                      "node '" + n.name + "' row " + std::to_string(r + 1) + " sums to " +
                          format_double(sum));
        }
    }

    void check_instance(const NetworkClass& cls, const InstanceDecl& inst) {
        const NetworkClass* target = doc.find_class(inst.class_name);
        if (!target) {
            error(inst.loc, "E_UNKNOWN_CLASS",
                  "instance '" + inst.name + "' references undeclared class '" +
                      inst.class_name + "'");
            return;
        }

        std::set<std::string> bound;
        for (const auto& [input, outer] : inst.bindings) {
            const NodeDecl* in = target->find_node(input);
            if (!in || in->role != NodeRole::Input) {
                error(inst.loc, "E_UNKNOWN_INPUT",
                      "class '" + target->name + "' has no input '" + input + "'");
                continue;
            }
            if (!bound.insert(input).second) {
                error(inst.loc, "E_INPUT_REBOUND",
                      "input '" + input + "' bound more than once on instance '" +
                          inst.name + "'");
                continue;
            }
            int outer_card = ref_cardinality(cls, outer);
            if (outer_card >= 0 && outer_card != in->cardinality())
                error(outer.loc, "E_CARDINALITY_MISMATCH",
                      "binding of input '" + input + "' on instance '" + inst.name +
                          "': outer node has " + std::to_string(outer_card) +
                          " states, input expects " + std::to_string(in->cardinality()));
        }
        for (const auto& n : target->nodes) {
            if (n.role == NodeRole::Input && !bound.count(n.name))
                error(inst.loc, "E_INPUT_UNBOUND",
                      "input '" + n.name + "' of class '" + target->name +
                          "' is not bound on instance '" + inst.name + "'");
        }
    }

    // Within one class, nodes and instances must form a DAG. Instances are
    // treated as supernodes: binding sources feed them, their outputs feed
    // whatever references them.
    void check_local_acyclicity(const NetworkClass& cls) {
        std::map<std::string, std::set<std::string>> edges;  // from -> to
        auto member_of = [&](const NodeRef& r) -> std::string {
            if (!r.instance.empty()) return r.instance;
            return r.node;
        };
        for (const auto& n : cls.nodes) {
            if (n.is_alias()) {
                edges[member_of(*n.alias_of)].insert(n.name);
                continue;
            }
            for (const auto& p : n.parents) edges[member_of(p)].insert(n.name);
        }
        for (const auto& inst : cls.instances)
            for (const auto& [input, outer] : inst.bindings)
                edges[member_of(outer)].insert(inst.name);

        std::map<std::string, int> state;  // 0 new, 1 visiting, 2 done
        bool cyclic = false;
        std::function<void(const std::string&)> visit = [&](const std::string& v) {
            int& s = state[v];
            if (s == 1) {
                cyclic = true;
                return;
            }
            if (s == 2 || cyclic) return;
            s = 1;
            for (const auto& w : edges[v]) visit(w);
            s = 2;
        };
        for (const auto& n : cls.nodes) visit(n.name);
        for (const auto& i : cls.instances) visit(i.name);
        if (cyclic)
            error(cls.loc, "E_NODE_CYCLE",
                  "class '" + cls.name + "' contains a dependency cycle");
    }

    // The class-instantiation graph must be acyclic and, from the root, no
    // deeper than kMaxInstanceDepth.
    void check_instantiation_graph() {
        std::map<std::string, int> state;
        bool cyclic = false;
        std::function<void(const NetworkClass&)> visit = [&](const NetworkClass& c) {
            int& s = state[c.name];
            if (s == 1) {
                cyclic = true;
                return;
            }
            if (s == 2 || cyclic) return;
            s = 1;
            for (const auto& inst : c.instances)
                if (const NetworkClass* t = doc.find_class(inst.class_name)) visit(*t);
            s = 2;
        };
        for (const auto& c : doc.classes) visit(c);
        if (cyclic) {
            error(doc.classes.empty() ? SourceLocation{1, 1} : doc.classes.front().loc,
                  "E_CLASS_CYCLE", "classes instantiate each other in a cycle");
            return;
        }

        // Depth from the root (root itself is depth 0).
        if (const NetworkClass* root = doc.find_class(doc.root)) {
            std::map<std::string, int> depth_memo;
            std::function<int(const NetworkClass&)> depth = [&](const NetworkClass& c) -> int {
                auto it = depth_memo.find(c.name);
                if (it != depth_memo.end()) return it->second;
                int d = 0;
                for (const auto& inst : c.instances)
                    if (const NetworkClass* t = doc.find_class(inst.class_name))
                        d = std::max(d, 1 + depth(*t));
                depth_memo[c.name] = d;
                return d;
            };
            if (depth(*root) > kMaxInstanceDepth)
                error(root->loc, "E_DEPTH_EXCEEDED",
                      "instantiation nesting exceeds depth " +
                          std::to_string(kMaxInstanceDepth));
        }
    }

    void run() {
        if (doc.root.empty()) {
            error({1, 1}, "E_ROOT_UNKNOWN", "document declares no root network");
        } else if (const NetworkClass* root = doc.find_class(doc.root)) {
            for (const auto& n : root->nodes)
                if (n.role == NodeRole::Input)
                    error(n.loc, "E_ROOT_HAS_INPUT",
                          "root class '" + doc.root + "' has unbound input '" + n.name + "'");
        } else {
            error(doc.root_loc, "E_ROOT_UNKNOWN",
                  "root class '" + doc.root + "' is not declared");
        }

        for (const auto& c : doc.classes) check_class(c);
        check_instantiation_graph();
        sort_diagnostics(diags);
    }
};

}  // namespace

std::vector<Diagnostic> validate(const ModelDocument& doc) {
    Validator v{doc, {}};
    v.run();
    return v.diags;
}

}  // namespace kinship::oobn
