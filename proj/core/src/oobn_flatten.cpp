#include <map>

#include "kinship/oobn.hpp"
#include "kinship/pedigree.hpp"

namespace kinship::oobn {

namespace {

std::string join_path(const std::string& prefix, const std::string& name) {
    return prefix.empty() ? name : prefix + "." + name;
}

struct Flattener {
    const ModelDocument& doc;
    std::vector<DiscreteVariable> variables;
    std::vector<Factor> cpts;
    std::map<std::string, std::string> alias_targets;
    std::map<std::string, int> cardinalities;

    // Pass 1: register every variable of the instantiation tree, depth-first
    // in declaration order. No binding state is needed for this.
    void register_variables(const NetworkClass& cls, const std::string& path) {
        for (const auto& n : cls.nodes) {
            if (n.role == NodeRole::Input || n.is_alias()) continue;
            DiscreteVariable v;
            v.id = join_path(path, n.name);
            v.name = v.id;
            v.cardinality = n.cardinality();
            v.state_labels = n.state_labels;
            cardinalities[v.id] = v.cardinality;
            variables.push_back(std::move(v));
        }
        for (const auto& inst : cls.instances)
            register_variables(*doc.find_class(inst.class_name), join_path(path, inst.name));
    }

    // Structural resolution of a node reference to its backing variable id.
    // Inputs resolve through the instantiation bindings; alias chains follow
    // class definitions.
    std::string resolve(const NetworkClass& cls, const std::string& path, const NodeRef& ref,
                        const std::map<std::string, std::string>& input_map) const {
        if (ref.instance.empty()) {
            const NodeDecl* n = cls.find_node(ref.node);
            if (n->role == NodeRole::Input) return input_map.at(ref.node);
            if (n->is_alias()) return resolve(cls, path, *n->alias_of, input_map);
            return join_path(path, ref.node);
        }
        const InstanceDecl* inst = cls.find_instance(ref.instance);
        const NetworkClass* target = doc.find_class(inst->class_name);
        const NodeDecl* out = target->find_node(ref.node);
        const std::string child_path = join_path(path, inst->name);
        if (out->is_alias()) {
            // Validated aliases point at instance outputs, never at inputs,
            // so no binding state is needed below this point.
            return resolve(*target, child_path, *out->alias_of, {});
        }
        return join_path(child_path, ref.node);
    }

    // Pass 2: aliases, recursion with bound inputs, and CPT factors. By the
    // time any CPT is built, pass 1 has registered every cardinality.
    void build(const NetworkClass& cls, const std::string& path,
               const std::map<std::string, std::string>& input_map) {
        for (const auto& n : cls.nodes) {
            if (!n.is_alias()) continue;
            alias_targets[join_path(path, n.name)] = resolve(cls, path, *n.alias_of, input_map);
        }

        for (const auto& inst : cls.instances) {
            const NetworkClass* target = doc.find_class(inst.class_name);
            std::map<std::string, std::string> child_inputs;
            for (const auto& [input, outer] : inst.bindings)
                child_inputs[input] = resolve(cls, path, outer, input_map);
            build(*target, join_path(path, inst.name), child_inputs);
        }

        for (const auto& n : cls.nodes) {
            if (n.role == NodeRole::Input || n.is_alias()) continue;
            const std::string child_id = join_path(path, n.name);

            if (n.is_transmit()) {
                const std::string pid = resolve(cls, path, n.parents[0], input_map);
                cpts.push_back(
                    dna::transmit_cpt(*n.transmit_rate, n.cardinality(), child_id, pid));
                continue;
            }

            std::vector<std::string> scope{child_id};
            std::vector<int> card{n.cardinality()};
            for (const auto& p : n.parents) {
                std::string pid = resolve(cls, path, p, input_map);
                scope.push_back(pid);
                card.push_back(cardinalities.at(pid));
            }

            // Row-major over parent configurations; each row renormalized
            // exactly (literals may carry typed-decimal slack within 1e-6).
            std::size_t parent_configs = 1;
            for (std::size_t i = 1; i < card.size(); ++i)
                parent_configs *= static_cast<std::size_t>(card[i]);

            std::vector<double> values(parent_configs * n.cardinality());
            for (std::size_t r = 0; r < parent_configs; ++r) {
                const auto& row = n.cpt_rows[r];
                double sum = 0.0;
                for (double v : row) sum += v;
                for (int c = 0; c < n.cardinality(); ++c)
                    values[static_cast<std::size_t>(c) * parent_configs + r] = row[c] / sum;
            }
            cpts.emplace_back(std::move(scope), std::move(card), std::move(values));
        }
    }
};

}  // namespace

std::string FlatNetwork::resolve(const std::string& qualified_name) const {
    std::string cur = qualified_name;
    // Alias chains are collapsed at flatten time, but stay defensive.
    for (int hops = 0; hops <= kMaxInstanceDepth; ++hops) {
        auto it = alias_targets.find(cur);
        if (it == alias_targets.end()) return cur;
        cur = it->second;
    }
    return cur;
}

FlatNetwork flatten(const ModelDocument& doc) {
    auto diags = validate(doc);
    if (has_errors(diags))
        throw Error("flatten: document does not validate: " + diags.front().message);

    const NetworkClass* root = doc.find_class(doc.root);
    Flattener fl{doc, {}, {}, {}, {}};
    fl.register_variables(*root, "");
    fl.build(*root, "", {});

    // build() emits CPTs bottom-up; realign them with the variable order.
    std::map<std::string, Factor> by_child;
    for (auto& f : fl.cpts) by_child.emplace(f.scope()[0], std::move(f));
    std::vector<Factor> ordered;
    ordered.reserve(fl.variables.size());
    for (const auto& v : fl.variables) ordered.push_back(std::move(by_child.at(v.id)));
    fl.cpts = std::move(ordered);

    // Collapse alias-of-alias chains so lookups are single-step.
    for (auto& [name, target] : fl.alias_targets) {
        std::string cur = target;
        for (int hops = 0; hops <= kMaxInstanceDepth; ++hops) {
            auto it = fl.alias_targets.find(cur);
            if (it == fl.alias_targets.end()) break;
            cur = it->second;
        }
        target = cur;
    }

    FlatNetwork out;
    out.network = Network(std::move(fl.variables), std::move(fl.cpts));
    out.alias_targets = std::move(fl.alias_targets);
    return out;
}

}  // namespace kinship::oobn
