#include <cctype>
#include <fstream>
#include <sstream>

#include "kinship/oobn.hpp"

namespace kinship::oobn {

const NodeDecl* NetworkClass::find_node(const std::string& n) const {
    for (const auto& d : nodes)
        if (d.name == n) return &d;
    return nullptr;
}

const InstanceDecl* NetworkClass::find_instance(const std::string& n) const {
    for (const auto& d : instances)
        if (d.name == n) return &d;
    return nullptr;
}

const NetworkClass* ModelDocument::find_class(const std::string& n) const {
    for (const auto& c : classes)
        if (c.name == n) return &c;
    return nullptr;
}

namespace {

enum class TokKind { Ident, Number, String, Punct, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    double number = 0.0;
    SourceLocation loc;
};

class Lexer {
  public:
    Lexer(const std::string& src, std::vector<Diagnostic>& diags)
        : src_(src), diags_(diags) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_ws_and_comments();
            SourceLocation loc{line_, col_};
            if (pos_ >= src_.size()) {
                out.push_back({TokKind::End, "", 0.0, loc});
                break;
            }
            char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                out.push_back(lex_ident(loc));
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
                       (c == '.' && pos_ + 1 < src_.size() &&
                        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
                out.push_back(lex_number(loc));
            } else if (c == '"') {
                out.push_back(lex_string(loc));
            } else if (std::string("{}()[]:;,=.").find(c) != std::string::npos) {
                advance();
                out.push_back({TokKind::Punct, std::string(1, c), 0.0, loc});
            } else {
                diags_.push_back({Severity::Error, loc.line, loc.column, "E_LEX",
                                  std::string("unexpected character '") + c + "'", ""});
                advance();
            }
        }
        return out;
    }

  private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws_and_comments() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    Token lex_ident(SourceLocation loc) {
        std::string s;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            s += src_[pos_];
            advance();
        }
        return {TokKind::Ident, s, 0.0, loc};
    }

    Token lex_number(SourceLocation loc) {
        std::string s;
        auto take = [&] { s += src_[pos_]; advance(); };
        if (src_[pos_] == '-' || src_[pos_] == '+') take();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) take();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            take();
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) take();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            take();
            if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) take();
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) take();
        }
        Token t{TokKind::Number, s, 0.0, loc};
        try {
            t.number = std::stod(s);
        } catch (const std::exception&) {
            diags_.push_back({Severity::Error, loc.line, loc.column, "E_LEX",
                              "malformed number '" + s + "'", ""});
        }
        return t;
    }

    Token lex_string(SourceLocation loc) {
        advance();  // opening quote
        std::string s;
        bool closed = false;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '"') {
                advance();
                closed = true;
                break;
            }
            if (c == '\\' && pos_ + 1 < src_.size()) {
                advance();
                s += src_[pos_];
                advance();
                continue;
            }
            if (c == '\n') break;
            s += c;
            advance();
        }
        if (!closed)
            diags_.push_back({Severity::Error, loc.line, loc.column, "E_LEX",
                              "unterminated string literal", ""});
        return {TokKind::String, s, 0.0, loc};
    }

    const std::string& src_;
    std::vector<Diagnostic>& diags_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
  public:
    Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags)
        : toks_(std::move(toks)), diags_(diags) {}

    std::optional<ModelDocument> run() {
        ModelDocument doc;
        bool saw_network = false;
        while (!at_end()) {
            if (peek_keyword("class")) {
                if (auto c = parse_class()) doc.classes.push_back(std::move(*c));
            } else if (peek_keyword("network")) {
                Token kw = take();
                Token name = expect_ident("network name");
                doc.root = name.text;
                doc.root_loc = kw.loc;
                expect_punct(";");
                saw_network = true;
            } else {
                error(peek().loc, "E_SYNTAX", "expected 'class' or 'network', found " + describe(peek()));
                synchronize_toplevel();
            }
        }
        if (!saw_network && !has_errors(diags_))
            error(last_loc_, "E_SYNTAX", "missing 'network <root>;' declaration");
        if (has_errors(diags_)) return std::nullopt;

        // Duplicate class names are a parse-level fault: the document cannot
        // be represented faithfully.
        for (std::size_t i = 0; i < doc.classes.size(); ++i)
            for (std::size_t j = i + 1; j < doc.classes.size(); ++j)
                if (doc.classes[i].name == doc.classes[j].name)
                    error(doc.classes[j].loc, "E_DUP_NAME",
                          "duplicate class name '" + doc.classes[j].name + "'");

        // Instance class references must resolve (forward references are fine).
        for (const auto& c : doc.classes)
            for (const auto& inst : c.instances)
                if (!doc.find_class(inst.class_name))
                    error(inst.loc, "E_UNKNOWN_CLASS",
                          "instance '" + inst.name + "' references undeclared class '" +
                              inst.class_name + "'");
        if (has_errors(diags_)) return std::nullopt;
        return doc;
    }

  private:
    bool at_end() const { return toks_[pos_].kind == TokKind::End; }
    const Token& peek() const { return toks_[pos_]; }
    Token take() {
        Token t = toks_[pos_];
        if (!at_end()) ++pos_;
        last_loc_ = t.loc;
        return t;
    }

    bool peek_keyword(const std::string& kw) const {
        return peek().kind == TokKind::Ident && peek().text == kw;
    }
    bool peek_punct(const std::string& p) const {
        return peek().kind == TokKind::Punct && peek().text == p;
    }

    bool accept_punct(const std::string& p) {
        if (!peek_punct(p)) return false;
        take();
        return true;
    }

    Token expect_ident(const std::string& what) {
        if (peek().kind == TokKind::Ident) return take();
        error(peek().loc, "E_SYNTAX", "expected " + what + ", found " + describe(peek()));
        return Token{TokKind::Ident, "<error>", 0.0, peek().loc};
    }

    void expect_punct(const std::string& p) {
        if (accept_punct(p)) return;
        error(peek().loc, "E_SYNTAX",
              "expected '" + p + "', found " + describe(peek()));
    }

    static std::string describe(const Token& t) {
        switch (t.kind) {
            case TokKind::End: return "end of input";
            case TokKind::Number: return "number '" + t.text + "'";
            case TokKind::String: return "string \"" + t.text + "\"";
            default: return "'" + t.text + "'";
        }
    }

    void error(SourceLocation loc, const std::string& code, const std::string& msg) {
        diags_.push_back({Severity::Error, loc.line, loc.column, code, msg, ""});
    }

    // Recovery: skip to the next top-level keyword.
    void synchronize_toplevel() {
        while (!at_end() && !peek_keyword("class") && !peek_keyword("network")) take();
    }
    void synchronize_member() {
        while (!at_end() && !peek_punct(";") && !peek_punct("}")) take();
        accept_punct(";");
    }

    std::optional<NetworkClass> parse_class() {
        NetworkClass cls;
        cls.loc = take().loc;  // 'class'
        cls.name = expect_ident("class name").text;
        expect_punct("{");
        while (!at_end() && !peek_punct("}")) {
            if (peek_keyword("input")) {
                parse_input(cls);
            } else if (peek_keyword("output") || peek_keyword("node")) {
                parse_node(cls);
            } else if (peek_keyword("instance")) {
                parse_instance(cls);
            } else {
                error(peek().loc, "E_SYNTAX",
                      "expected node, input, output or instance declaration, found " +
                          describe(peek()));
                synchronize_member();
            }
        }
        expect_punct("}");

        // Duplicate member names within the class.
        std::vector<std::pair<std::string, SourceLocation>> seen;
        auto check = [&](const std::string& n, SourceLocation loc) {
            for (const auto& [name, _] : seen)
                if (name == n) {
                    error(loc, "E_DUP_NAME",
                          "duplicate name '" + n + "' in class '" + cls.name + "'");
                    return;
                }
            seen.emplace_back(n, loc);
        };
        for (const auto& n : cls.nodes) check(n.name, n.loc);
        for (const auto& i : cls.instances) check(i.name, i.loc);
        return cls;
    }

    void parse_input(NetworkClass& cls) {
        NodeDecl d;
        d.loc = take().loc;  // 'input'
        d.role = NodeRole::Input;
        if (!peek_keyword("node")) {
            error(peek().loc, "E_SYNTAX", "expected 'node' after 'input'");
            synchronize_member();
            return;
        }
        take();
        d.name = expect_ident("node name").text;
        expect_punct(":");
        d.state_labels = parse_labels();
        expect_punct(";");
        cls.nodes.push_back(std::move(d));
    }

    void parse_node(NetworkClass& cls) {
        NodeDecl d;
        d.loc = peek().loc;
        if (peek_keyword("output")) {
            d.role = NodeRole::Output;
            take();
        }
        if (!peek_keyword("node")) {
            error(peek().loc, "E_SYNTAX", "expected 'node'");
            synchronize_member();
            return;
        }
        take();
        d.name = expect_ident("node name").text;

        if (accept_punct("=")) {
            // alias: node x = inst.out;
            d.alias_of = parse_node_ref();
            expect_punct(";");
            cls.nodes.push_back(std::move(d));
            return;
        }

        expect_punct(":");
        d.state_labels = parse_labels();
        if (peek_keyword("parents")) {
            take();
            expect_punct("(");
            if (!peek_punct(")")) {
                d.parents.push_back(parse_node_ref());
                while (accept_punct(",")) d.parents.push_back(parse_node_ref());
            }
            expect_punct(")");
        }
        if (peek_keyword("cpt")) {
            take();
            if (peek_keyword("transmit")) {
                take();
                expect_punct("(");
                if (peek().kind == TokKind::Number)
                    d.transmit_rate = take().number;
                else
                    error(peek().loc, "E_SYNTAX", "expected a mutation rate in transmit(...)");
                expect_punct(")");
            } else {
                expect_punct("{");
                while (!at_end() && !peek_punct("}")) {
                    std::vector<double> row;
                    while (peek().kind == TokKind::Number) {
                        row.push_back(take().number);
                        if (!accept_punct(",")) break;
                    }
                    if (row.empty()) {
                        error(peek().loc, "E_SYNTAX", "expected a CPT row of numbers");
                        break;
                    }
                    d.cpt_rows.push_back(std::move(row));
                    if (!accept_punct(";")) break;
                }
                expect_punct("}");
            }
        }
        accept_punct(";");  // trailing semicolon after the cpt block is optional
        cls.nodes.push_back(std::move(d));
    }

    void parse_instance(NetworkClass& cls) {
        InstanceDecl d;
        d.loc = take().loc;  // 'instance'
        d.name = expect_ident("instance name").text;
        expect_punct(":");
        d.class_name = expect_ident("class name").text;
        expect_punct("(");
        if (!peek_punct(")")) {
            do {
                std::string input = expect_ident("input name").text;
                expect_punct("=");
                NodeRef target = parse_node_ref();
                d.bindings.emplace_back(std::move(input), std::move(target));
            } while (accept_punct(","));
        }
        expect_punct(")");
        expect_punct(";");
        cls.instances.push_back(std::move(d));
    }

    NodeRef parse_node_ref() {
        NodeRef r;
        Token first = expect_ident("node reference");
        r.loc = first.loc;
        if (accept_punct(".")) {
            r.instance = first.text;
            r.node = expect_ident("node name after '.'").text;
        } else {
            r.node = first.text;
        }
        return r;
    }

    std::vector<std::string> parse_labels() {
        std::vector<std::string> labels;
        expect_punct("[");
        if (!peek_punct("]")) {
            do {
                if (peek().kind == TokKind::Ident || peek().kind == TokKind::String) {
                    labels.push_back(take().text);
                } else if (peek().kind == TokKind::Number) {
                    labels.push_back(take().text);
                } else {
                    error(peek().loc, "E_SYNTAX", "expected a state label");
                    break;
                }
            } while (accept_punct(","));
        }
        expect_punct("]");
        return labels;
    }

    std::vector<Token> toks_;
    std::vector<Diagnostic>& diags_;
    std::size_t pos_ = 0;
    SourceLocation last_loc_{1, 1};
};

}  // namespace

ParseResult parse(const std::string& source) {
    ParseResult result;
    Lexer lexer(source, result.diagnostics);
    std::vector<Token> toks = lexer.run();
    if (has_errors(result.diagnostics)) {
        sort_diagnostics(result.diagnostics);
        return result;
    }
    Parser parser(std::move(toks), result.diagnostics);
    result.document = parser.run();
    if (has_errors(result.diagnostics)) result.document.reset();
    sort_diagnostics(result.diagnostics);
    return result;
}

ParseResult parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool structurally_equal(const ModelDocument& a, const ModelDocument& b) {
    auto node_eq = [](const NodeDecl& x, const NodeDecl& y) {
        if (x.name != y.name || x.role != y.role || x.state_labels != y.state_labels)
            return false;
        if (x.parents != y.parents || x.cpt_rows != y.cpt_rows) return false;
        if (x.transmit_rate != y.transmit_rate) return false;
        if (x.alias_of.has_value() != y.alias_of.has_value()) return false;
        if (x.alias_of && !(*x.alias_of == *y.alias_of)) return false;
        return true;
    };
    if (a.root != b.root || a.classes.size() != b.classes.size()) return false;
    for (std::size_t i = 0; i < a.classes.size(); ++i) {
        const auto& ca = a.classes[i];
        const auto& cb = b.classes[i];
        if (ca.name != cb.name || ca.nodes.size() != cb.nodes.size() ||
            ca.instances.size() != cb.instances.size())
            return false;
        for (std::size_t j = 0; j < ca.nodes.size(); ++j)
            if (!node_eq(ca.nodes[j], cb.nodes[j])) return false;
        for (std::size_t j = 0; j < ca.instances.size(); ++j) {
            const auto& ia = ca.instances[j];
            const auto& ib = cb.instances[j];
            if (ia.name != ib.name || ia.class_name != ib.class_name ||
                ia.bindings != ib.bindings)
                return false;
        }
    }
    return true;
}

}  // namespace kinship::oobn
