#include <cctype>
#include <sstream>

#include "kinship/numeric.hpp"
#include "kinship/oobn.hpp"

namespace kinship::oobn {

namespace {

bool is_bare_ident(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

std::string quote_label(const std::string& s) {
    if (is_bare_ident(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

void print_labels(std::ostringstream& os, const std::vector<std::string>& labels) {
    os << '[';
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) os << ", ";
        os << quote_label(labels[i]);
    }
    os << ']';
}

}  // namespace

std::string print(const ModelDocument& doc) {
    std::ostringstream os;
    for (const auto& cls : doc.classes) {
        os << "class " << cls.name << " {\n";
        for (const auto& n : cls.nodes) {
            os << "  ";
            if (n.role == NodeRole::Input) os << "input ";
            if (n.role == NodeRole::Output) os << "output ";
            os << "node " << n.name;
            if (n.is_alias()) {
                os << " = " << n.alias_of->text() << ";\n";
                continue;
            }
            os << " : ";
            print_labels(os, n.state_labels);
            if (!n.parents.empty()) {
                os << " parents (";
                for (std::size_t i = 0; i < n.parents.size(); ++i) {
                    if (i) os << ", ";
                    os << n.parents[i].text();
                }
                os << ')';
            }
            if (n.is_transmit()) {
                os << " cpt transmit(" << format_double(*n.transmit_rate) << ')';
            } else if (!n.cpt_rows.empty()) {
                os << " cpt { ";
                for (const auto& row : n.cpt_rows) {
                    for (std::size_t i = 0; i < row.size(); ++i) {
                        if (i) os << ", ";
                        os << format_double(row[i]);
                    }
                    os << "; ";
                }
                os << '}';
            }
            os << ";\n";
        }
        for (const auto& inst : cls.instances) {
            os << "  instance " << inst.name << " : " << inst.class_name << " (";
            for (std::size_t i = 0; i < inst.bindings.size(); ++i) {
                if (i) os << ", ";
                os << inst.bindings[i].first << " = " << inst.bindings[i].second.text();
            }
            os << ");\n";
        }
        os << "}\n\n";
    }
    os << "network " << doc.root << ";\n";
    return os.str();
}

}  // namespace kinship::oobn
