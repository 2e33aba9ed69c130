#include "polysum/parse.hpp"

#include "polysum/error.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>
#include <sstream>

namespace polysum {

namespace {

// ---------------------------------------------------------------------------
// Lexer shared by all text formats.

enum class Tok {
    Ident,
    Number,
    Prime,     // '
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,        // = or ==
    AndAnd,
    OrOr,
    Amp,       // &
    Bar,       // |
    Arrow,     // ->
    Assign,    // :=
    Colon,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

class Lexer {
  public:
    explicit Lexer(const std::string &text) : text_(text) { advance(); }

    const Token &peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }
    bool at(Tok k) const { return tok_.kind == k; }
    bool at_word(const std::string &w) const { return tok_.kind == Tok::Ident && tok_.text == w; }
    Token expect(Tok k, const std::string &what) {
        if (!at(k)) throw parse_error(tok_.line, tok_.column, "expected " + what);
        return take();
    }
    Token expect_word(const std::string &w) {
        if (!at_word(w)) throw parse_error(tok_.line, tok_.column, "expected '" + w + "'");
        return take();
    }
    [[noreturn]] void fail(const std::string &msg) const {
        throw parse_error(tok_.line, tok_.column, msg);
    }

  private:
    void advance() {
        for (;;) {
            while (pos_ < text_.size() &&
                   (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r' ||
                    text_[pos_] == '\n')) {
                bump();
            }
            if (pos_ < text_.size() && text_[pos_] == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') bump();
                continue;
            }
            break;
        }
        tok_.line = line_;
        tok_.column = col_;
        if (pos_ >= text_.size()) {
            tok_ = Token{Tok::End, "", line_, col_};
            return;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
            std::string s;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '_' || text_[pos_] == '$')) {
                s += text_[pos_];
                bump();
            }
            tok_ = Token{Tok::Ident, s, tok_.line, tok_.column};
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string s;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                s += text_[pos_];
                bump();
            }
            tok_ = Token{Tok::Number, s, tok_.line, tok_.column};
            return;
        }
        auto two = [&](char a, char b) {
            return c == a && pos_ + 1 < text_.size() && text_[pos_ + 1] == b;
        };
        if (two('<', '=')) return emit(Tok::Le, 2);
        if (two('>', '=')) return emit(Tok::Ge, 2);
        if (two('=', '=')) return emit(Tok::Eq, 2);
        if (two('&', '&')) return emit(Tok::AndAnd, 2);
        if (two('|', '|')) return emit(Tok::OrOr, 2);
        if (two('-', '>')) return emit(Tok::Arrow, 2);
        if (two(':', '=')) return emit(Tok::Assign, 2);
        switch (c) {
        case '\'': return emit(Tok::Prime, 1);
        case '+': return emit(Tok::Plus, 1);
        case '-': return emit(Tok::Minus, 1);
        case '*': return emit(Tok::Star, 1);
        case '/': return emit(Tok::Slash, 1);
        case '(': return emit(Tok::LParen, 1);
        case ')': return emit(Tok::RParen, 1);
        case '{': return emit(Tok::LBrace, 1);
        case '}': return emit(Tok::RBrace, 1);
        case ';': return emit(Tok::Semi, 1);
        case '<': return emit(Tok::Lt, 1);
        case '>': return emit(Tok::Gt, 1);
        case '=': return emit(Tok::Eq, 1);
        case '&': return emit(Tok::Amp, 1);
        case '|': return emit(Tok::Bar, 1);
        case ':': return emit(Tok::Colon, 1);
        default:
            throw parse_error(line_, col_, std::string("unexpected character '") + c + "'");
        }
    }

    void emit(Tok k, int len) {
        std::string s = text_.substr(pos_, len);
        for (int i = 0; i < len; ++i) bump();
        tok_ = Token{k, s, tok_.line, tok_.column};
    }

    void bump() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string &text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_{Tok::End, "", 1, 1};
};

// ---------------------------------------------------------------------------
// Affine expressions.

class ExprParser {
  public:
    ExprParser(Lexer &lex, const std::set<VarId> &allowed, bool allow_primes)
        : lex_(lex), allowed_(allowed), allow_primes_(allow_primes) {}

    AffineTerm parse() { return sum(); }

  private:
    AffineTerm sum() {
        AffineTerm acc = product();
        while (lex_.at(Tok::Plus) || lex_.at(Tok::Minus)) {
            bool minus = lex_.take().kind == Tok::Minus;
            AffineTerm rhs = product();
            if (minus)
                acc -= rhs;
            else
                acc += rhs;
        }
        return acc;
    }

    AffineTerm product() {
        AffineTerm acc = atom();
        for (;;) {
            if (lex_.at(Tok::Star)) {
                Token star = lex_.take();
                AffineTerm rhs = atom();
                if (!acc.is_constant() && !rhs.is_constant())
                    throw parse_error(star.line, star.column, "nonlinear product of variables");
                if (acc.is_constant())
                    acc = rhs * acc.constant();
                else
                    acc *= rhs.constant();
            } else if (lex_.at(Tok::Slash)) {
                Token slash = lex_.take();
                AffineTerm rhs = atom();
                if (!rhs.is_constant())
                    throw parse_error(slash.line, slash.column, "division by a variable");
                if (!rhs.constant().is_integer() || rhs.constant().is_zero())
                    throw parse_error(slash.line, slash.column,
                                      "division only by nonzero integer constants");
                acc *= rhs.constant().inverse();
            } else {
                return acc;
            }
        }
    }

    AffineTerm atom() {
        if (lex_.at(Tok::Minus)) {
            lex_.take();
            return -atom();
        }
        if (lex_.at(Tok::Number)) {
            Token t = lex_.take();
            return AffineTerm(Rational::from_string(t.text));
        }
        if (lex_.at(Tok::LParen)) {
            lex_.take();
            AffineTerm t = sum();
            lex_.expect(Tok::RParen, "')'");
            return t;
        }
        if (lex_.at(Tok::Ident)) {
            Token t = lex_.take();
            if (t.text[0] == '$')
                throw parse_error(t.line, t.column, "identifiers starting with $ are reserved");
            bool primed = false;
            if (lex_.at(Tok::Prime)) {
                if (!allow_primes_)
                    throw parse_error(t.line, t.column, "primed variable not allowed here");
                lex_.take();
                primed = true;
            }
            VarId v(t.text, primed);
            if (!allowed_.count(v))
                throw parse_error(t.line, t.column, "undeclared variable " + t.text);
            return AffineTerm::variable(v);
        }
        lex_.fail("expected expression");
    }

    Lexer &lex_;
    const std::set<VarId> &allowed_;
    bool allow_primes_;
};

RelOp rel_of(Tok k) {
    switch (k) {
    case Tok::Lt: return RelOp::Lt;
    case Tok::Le: return RelOp::Le;
    case Tok::Eq: return RelOp::Eq;
    case Tok::Ge: return RelOp::Ge;
    case Tok::Gt: return RelOp::Gt;
    default: throw input_error("not a relation");
    }
}

bool at_rel(const Lexer &lex) {
    return lex.at(Tok::Lt) || lex.at(Tok::Le) || lex.at(Tok::Eq) || lex.at(Tok::Ge) ||
           lex.at(Tok::Gt);
}

} // namespace

std::optional<Constraint> tighten_strict_positive(const AffineTerm &t, bool *constant_true) {
    if (t.is_constant()) {
        if (constant_true) *constant_true = t.constant().sign() > 0;
        return std::nullopt;
    }
    // Positive scale making variable coefficients coprime integers.
    mpz_class lcm = 1, gcd = 0;
    for (const auto &[v, c] : t.coefficients()) {
        mpz_class l;
        mpz_lcm(l.get_mpz_t(), lcm.get_mpz_t(), c.denominator().get_mpz_t());
        lcm = l;
    }
    for (const auto &[v, c] : t.coefficients()) {
        mpz_class num = c.numerator() * (lcm / c.denominator());
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), gcd.get_mpz_t(), num.get_mpz_t());
        gcd = g;
    }
    AffineTerm scaled = t * Rational(lcm, gcd);
    // a.x + c > 0 with a.x integer-valued  iff  a.x >= floor(-c) + 1.
    Rational bound = Rational(mpz_class((-scaled.constant()).floor() + 1));
    scaled.set_constant(-bound);
    if (constant_true) *constant_true = true;
    return Constraint{scaled, Relation::GeqZero};
}

namespace {

// Comparison to closed constraints (strict ones integer-tightened).  Returns
// false when the comparison is constantly false; constraints may be empty for
// a constantly true one.
bool comparison_constraints(const Comparison &c, std::vector<Constraint> *out) {
    AffineTerm diff;
    switch (c.op) {
    case RelOp::Le:
    case RelOp::Lt: diff = c.rhs - c.lhs; break;
    case RelOp::Ge:
    case RelOp::Gt: diff = c.lhs - c.rhs; break;
    case RelOp::Eq: diff = c.lhs - c.rhs; break;
    }
    if (c.op == RelOp::Eq) {
        if (diff.is_constant()) return diff.constant().is_zero();
        out->push_back(Constraint{diff, Relation::EqZero});
        return true;
    }
    if (c.op == RelOp::Lt || c.op == RelOp::Gt) {
        bool const_true = false;
        auto tight = tighten_strict_positive(diff, &const_true);
        if (!tight) return const_true;
        out->push_back(*tight);
        return true;
    }
    if (diff.is_constant()) return diff.constant().sign() >= 0;
    out->push_back(Constraint{diff, Relation::GeqZero});
    return true;
}

Comparison negate_comparison(const Comparison &c, std::vector<Comparison> *extra) {
    // Returns the primary negation; equality adds the second branch to extra.
    Comparison n = c;
    switch (c.op) {
    case RelOp::Lt: n.op = RelOp::Ge; return n;
    case RelOp::Le: n.op = RelOp::Gt; return n;
    case RelOp::Ge: n.op = RelOp::Lt; return n;
    case RelOp::Gt: n.op = RelOp::Le; return n;
    case RelOp::Eq: {
        n.op = RelOp::Lt;
        Comparison other = c;
        other.op = RelOp::Gt;
        extra->push_back(other);
        return n;
    }
    }
    return n;
}

Condition negate_condition(const Condition &c) {
    if (c.nondet) return c; // both branches of a coin are unguarded
    // not (or of ands) = and of (or of negations); expand back to DNF.
    Condition out;
    out.dnf.push_back({}); // start with one empty conjunction
    for (const auto &clause : c.dnf) {
        // Negation of one clause: disjunction of negated comparisons.
        std::vector<Comparison> options;
        for (const auto &cmp : clause) {
            std::vector<Comparison> extra;
            options.push_back(negate_comparison(cmp, &extra));
            options.insert(options.end(), extra.begin(), extra.end());
        }
        std::vector<std::vector<Comparison>> next;
        for (const auto &partial : out.dnf)
            for (const auto &opt : options) {
                std::vector<Comparison> ext = partial;
                ext.push_back(opt);
                next.push_back(std::move(ext));
            }
        out.dnf = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Program parser.

class ProgramParser {
  public:
    explicit ProgramParser(const std::string &text) : lex_(text) {}

    Program parse() {
        Program p;
        lex_.expect_word("vars");
        while (lex_.at(Tok::Ident)) {
            Token t = lex_.take();
            if (t.text[0] == '$')
                throw parse_error(t.line, t.column, "identifiers starting with $ are reserved");
            if (is_keyword(t.text))
                throw parse_error(t.line, t.column, "keyword used as variable name");
            VarId v(t.text);
            if (declared_.count(v))
                throw parse_error(t.line, t.column, "duplicate variable " + t.text);
            declared_.insert(v);
            p.vars.push_back(v);
        }
        if (p.vars.empty()) lex_.fail("expected at least one variable");
        lex_.expect(Tok::Semi, "';'");
        p.body = statements();
        if (!lex_.at(Tok::End)) lex_.fail("expected statement");
        return p;
    }

  private:
    static bool is_keyword(const std::string &s) {
        return s == "vars" || s == "assume" || s == "if" || s == "else" || s == "while" ||
               s == "nondet" || s == "true" || s == "false";
    }

    std::vector<StmtPtr> statements() {
        std::vector<StmtPtr> out;
        while (lex_.at(Tok::Ident) &&
               (!is_keyword(lex_.peek().text) || lex_.at_word("assume") || lex_.at_word("if") ||
                lex_.at_word("while"))) {
            out.push_back(statement());
        }
        return out;
    }

    std::vector<StmtPtr> block() {
        lex_.expect(Tok::LBrace, "'{'");
        std::vector<StmtPtr> body = statements();
        lex_.expect(Tok::RBrace, "'}'");
        return body;
    }

    StmtPtr statement() {
        if (lex_.at_word("assume")) {
            lex_.take();
            lex_.expect(Tok::LParen, "'('");
            Condition c = condition();
            lex_.expect(Tok::RParen, "')'");
            lex_.expect(Tok::Semi, "';'");
            return std::make_unique<Stmt>(Stmt{AssumeStmt{std::move(c)}});
        }
        if (lex_.at_word("if")) {
            lex_.take();
            lex_.expect(Tok::LParen, "'('");
            Condition c = condition();
            lex_.expect(Tok::RParen, "')'");
            IfStmt node{std::move(c), block(), {}};
            if (lex_.at_word("else")) {
                lex_.take();
                node.else_branch = block();
            }
            return std::make_unique<Stmt>(Stmt{std::move(node)});
        }
        if (lex_.at_word("while")) {
            lex_.take();
            lex_.expect(Tok::LParen, "'('");
            Condition c = condition();
            lex_.expect(Tok::RParen, "')'");
            WhileStmt node{std::move(c), block()};
            return std::make_unique<Stmt>(Stmt{std::move(node)});
        }
        Token name = lex_.expect(Tok::Ident, "statement");
        VarId v(name.text);
        if (!declared_.count(v))
            throw parse_error(name.line, name.column, "undeclared variable " + name.text);
        lex_.expect(Tok::Eq, "'='");
        if (lex_.at_word("nondet")) {
            lex_.take();
            lex_.expect(Tok::LParen, "'('");
            lex_.expect(Tok::RParen, "')'");
            lex_.expect(Tok::Semi, "';'");
            return std::make_unique<Stmt>(Stmt{NondetAssignStmt{v}});
        }
        ExprParser ep(lex_, declared_, /*allow_primes=*/false);
        AffineTerm e = ep.parse();
        lex_.expect(Tok::Semi, "';'");
        return std::make_unique<Stmt>(Stmt{AssignStmt{v, std::move(e)}});
    }

    Condition condition() {
        if (lex_.at_word("nondet")) {
            Token t = lex_.take();
            lex_.expect(Tok::LParen, "'('");
            lex_.expect(Tok::RParen, "')'");
            if (!lex_.at(Tok::RParen))
                throw parse_error(t.line, t.column,
                                  "nondet() must be the entire condition");
            Condition c;
            c.nondet = true;
            return c;
        }
        Condition c;
        c.dnf = or_clauses();
        return c;
    }

    std::vector<std::vector<Comparison>> or_clauses() {
        std::vector<std::vector<Comparison>> out;
        out.push_back(and_clause());
        while (lex_.at(Tok::OrOr)) {
            lex_.take();
            out.push_back(and_clause());
        }
        return out;
    }

    std::vector<Comparison> and_clause() {
        std::vector<Comparison> out;
        out.push_back(comparison());
        while (lex_.at(Tok::AndAnd)) {
            lex_.take();
            out.push_back(comparison());
        }
        return out;
    }

    Comparison comparison() {
        ExprParser ep(lex_, declared_, /*allow_primes=*/false);
        Comparison c;
        c.lhs = ep.parse();
        if (!at_rel(lex_)) lex_.fail("expected comparison operator");
        c.op = rel_of(lex_.take().kind);
        c.rhs = ep.parse();
        return c;
    }

    Lexer lex_;
    std::set<VarId> declared_;
};

// ---------------------------------------------------------------------------
// Program points to flow graph.

class GraphBuilder {
  public:
    GraphBuilder(const Program &p, std::string name)
        : vars_(p.vars), name_(std::move(name)) {
        env_ = transition_environment(vars_);
        root_ = fresh();
    }

    FlowGraph build(const Program &p) {
        emit_seq(p.body, root_, std::nullopt);
        // Prune program points with no satisfiable incoming path.
        std::set<Vertex> live{root_};
        std::deque<Vertex> work{root_};
        while (!work.empty()) {
            Vertex u = work.front();
            work.pop_front();
            for (const auto &[e, w] : edges_)
                if (e.first == u && !w.is_false() && !live.count(e.second)) {
                    live.insert(e.second);
                    work.push_back(e.second);
                }
        }
        std::vector<Vertex> vertices;
        for (const Vertex &v : order_)
            if (live.count(v)) vertices.push_back(v);
        std::map<Edge, TransitionFormula> edges;
        for (const auto &[e, w] : edges_)
            if (live.count(e.first) && live.count(e.second) && !w.is_false()) edges.emplace(e, w);
        return FlowGraph(name_, vars_, std::move(vertices), root_, std::move(edges));
    }

  private:
    Vertex fresh() {
        Vertex v = std::to_string(next_++);
        order_.push_back(v);
        return v;
    }

    void add_edge(const Vertex &u, const Vertex &v, TransitionFormula w) {
        auto it = edges_.find({u, v});
        if (it == edges_.end())
            edges_.emplace(Edge{u, v}, std::move(w));
        else
            it->second = tf_plus(it->second, w);
    }

    // Guard formula: condition constraints conjoined with the identity.
    TransitionFormula guard(const Condition &c) {
        if (c.nondet) return tf_one(vars_);
        std::vector<Polyhedron> disjuncts;
        for (const auto &clause : c.dnf) {
            std::vector<Constraint> cs;
            bool ok = true;
            for (const auto &cmp : clause)
                if (!comparison_constraints(cmp, &cs)) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            for (const VarId &v : vars_)
                cs.push_back(constraint_eq(AffineTerm::variable(v.prime()),
                                           AffineTerm::variable(v)));
            disjuncts.emplace_back(env_, std::move(cs));
        }
        return TransitionFormula(vars_, std::move(disjuncts));
    }

    TransitionFormula assign_weight(const VarId &var, const AffineTerm *expr) {
        std::vector<Constraint> cs;
        if (expr)
            cs.push_back(constraint_eq(AffineTerm::variable(var.prime()), *expr));
        for (const VarId &v : vars_) {
            if (v == var) continue;
            cs.push_back(constraint_eq(AffineTerm::variable(v.prime()), AffineTerm::variable(v)));
        }
        return TransitionFormula(vars_, {Polyhedron(env_, std::move(cs))});
    }

    Vertex emit_seq(const std::vector<StmtPtr> &stmts, Vertex entry,
                    std::optional<Vertex> target) {
        if (stmts.empty()) {
            if (target && *target != entry) {
                add_edge(entry, *target, tf_one(vars_));
                return *target;
            }
            return entry;
        }
        Vertex at = entry;
        for (std::size_t i = 0; i < stmts.size(); ++i) {
            bool last = i + 1 == stmts.size();
            at = emit_stmt(*stmts[i], at, last ? target : std::nullopt);
        }
        return at;
    }

    Vertex emit_stmt(const Stmt &s, Vertex entry, std::optional<Vertex> target) {
        if (const auto *a = std::get_if<AssignStmt>(&s.node)) {
            Vertex v = target ? *target : fresh();
            add_edge(entry, v, assign_weight(a->var, &a->expr));
            return v;
        }
        if (const auto *a = std::get_if<NondetAssignStmt>(&s.node)) {
            Vertex v = target ? *target : fresh();
            add_edge(entry, v, assign_weight(a->var, nullptr));
            return v;
        }
        if (const auto *a = std::get_if<AssumeStmt>(&s.node)) {
            Vertex v = target ? *target : fresh();
            add_edge(entry, v, guard(a->cond));
            return v;
        }
        if (const auto *a = std::get_if<IfStmt>(&s.node)) {
            Vertex join = target ? *target : fresh();
            TransitionFormula when_true = guard(a->cond);
            TransitionFormula when_false = guard(negate_condition(a->cond));
            if (a->then_branch.empty()) {
                add_edge(entry, join, when_true);
            } else {
                Vertex t0 = fresh();
                add_edge(entry, t0, when_true);
                emit_seq(a->then_branch, t0, join);
            }
            if (a->else_branch.empty()) {
                add_edge(entry, join, when_false);
            } else {
                Vertex e0 = fresh();
                add_edge(entry, e0, when_false);
                emit_seq(a->else_branch, e0, join);
            }
            return join;
        }
        const auto &w = std::get<WhileStmt>(s.node);
        Vertex header = entry;
        TransitionFormula when_true = guard(w.cond);
        TransitionFormula when_false = guard(negate_condition(w.cond));
        if (w.body.empty()) {
            add_edge(header, header, when_true);
        } else {
            Vertex b0 = fresh();
            add_edge(header, b0, when_true);
            emit_seq(w.body, b0, header);
        }
        Vertex exit = target ? *target : fresh();
        add_edge(header, exit, when_false);
        return exit;
    }

    std::vector<VarId> vars_;
    std::vector<VarId> env_;
    std::string name_;
    Vertex root_;
    int next_ = 1;
    std::vector<Vertex> order_;
    std::map<Edge, TransitionFormula> edges_;
};

} // namespace

Program parse_program(const std::string &text) { return ProgramParser(text).parse(); }

FlowGraph program_to_flowgraph(const Program &p, const std::string &name) {
    GraphBuilder b(p, name);
    return b.build(p);
}

TransitionFormula parse_formula(const std::string &text, const std::vector<VarId> &vars) {
    Lexer lex(text);
    std::set<VarId> allowed;
    for (const VarId &v : vars) {
        allowed.insert(v);
        allowed.insert(v.prime());
    }
    std::vector<VarId> env = transition_environment(vars);
    std::vector<Polyhedron> disjuncts;

    auto disjunct = [&]() -> std::optional<Polyhedron> {
        if (lex.at_word("true")) {
            lex.take();
            return Polyhedron::full_space(env);
        }
        if (lex.at_word("false")) {
            lex.take();
            return std::nullopt;
        }
        std::vector<Constraint> cs;
        bool satisfiable = true;
        for (;;) {
            ExprParser ep(lex, allowed, /*allow_primes=*/true);
            Comparison c;
            c.lhs = ep.parse();
            if (!at_rel(lex)) lex.fail("expected comparison operator");
            c.op = rel_of(lex.take().kind);
            ExprParser ep2(lex, allowed, /*allow_primes=*/true);
            c.rhs = ep2.parse();
            if (!comparison_constraints(c, &cs)) satisfiable = false;
            if (!lex.at(Tok::Amp)) break;
            lex.take();
        }
        if (!satisfiable) return std::nullopt;
        return Polyhedron(env, std::move(cs));
    };

    for (;;) {
        auto d = disjunct();
        if (d) disjuncts.push_back(std::move(*d));
        if (!lex.at(Tok::Bar)) break;
        lex.take();
    }
    if (!lex.at(Tok::End)) lex.fail("unexpected trailing input in formula");
    return TransitionFormula(vars, std::move(disjuncts));
}

FormulaFile parse_formula_file(const std::string &text) {
    Lexer lex(text);
    lex.expect_word("vars");
    std::vector<VarId> vars;
    std::set<VarId> seen;
    while (lex.at(Tok::Ident)) {
        Token t = lex.take();
        if (t.text[0] == '$')
            throw parse_error(t.line, t.column, "identifiers starting with $ are reserved");
        VarId v(t.text);
        if (!seen.insert(v).second)
            throw parse_error(t.line, t.column, "duplicate variable " + t.text);
        vars.push_back(v);
    }
    if (vars.empty()) lex.fail("expected at least one variable");
    Token semi = lex.expect(Tok::Semi, "';' after variable list");
    (void)semi;
    // The remaining text is the formula; find the offset of the next token.
    std::size_t off = 0;
    int line = 1;
    int target_line = lex.peek().line, target_col = lex.peek().column;
    int col = 1;
    while (off < text.size() && (line < target_line || col < target_col)) {
        if (text[off] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++off;
    }
    if (lex.at(Tok::End)) lex.fail("expected a formula after the variable list");
    FormulaFile out;
    out.vars = vars;
    out.formula = parse_formula(text.substr(off), vars);
    return out;
}

FlowGraph parse_graph(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::string name;
    std::vector<VarId> vars;
    Vertex root;
    bool have_header = false, have_root = false;
    std::vector<Vertex> vertices;
    std::set<Vertex> seen;
    std::map<Edge, TransitionFormula> edges;

    auto note_vertex = [&](const Vertex &v) {
        if (seen.insert(v).second) vertices.push_back(v);
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = line.substr(0, line.find('#'));
        if (stripped.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(stripped);
        std::string first;
        ls >> first;
        if (first == "graph") {
            std::string kw;
            if (!(ls >> name >> kw) || kw != "vars")
                throw parse_error(lineno, 1, "expected 'graph <name> vars <vars...>'");
            std::string v;
            while (ls >> v) {
                if (v[0] == '$') throw parse_error(lineno, 1, "reserved variable name " + v);
                vars.emplace_back(v);
            }
            if (vars.empty()) throw parse_error(lineno, 1, "graph declares no variables");
            have_header = true;
            continue;
        }
        if (first == "root") {
            if (!have_header) throw parse_error(lineno, 1, "root before graph header");
            if (!(ls >> root)) throw parse_error(lineno, 1, "expected 'root <vertex>'");
            note_vertex(root);
            have_root = true;
            continue;
        }
        // Edge line: u -> v : formula
        if (!have_header || !have_root)
            throw parse_error(lineno, 1, "edge before graph header or root");
        std::string arrow, to;
        if (!(ls >> arrow >> to) || arrow != "->")
            throw parse_error(lineno, 1, "expected '<u> -> <v> : <formula>'");
        std::string rest;
        std::getline(ls, rest);
        std::size_t colon = rest.find(':');
        if (colon == std::string::npos)
            throw parse_error(lineno, 1, "expected ':' before edge formula");
        std::string ftext = rest.substr(colon + 1);
        TransitionFormula w;
        try {
            w = parse_formula(ftext, vars);
        } catch (const parse_error &e) {
            throw parse_error(lineno, e.column, e.message);
        }
        note_vertex(first);
        note_vertex(to);
        Edge e{first, to};
        auto it = edges.find(e);
        if (it == edges.end())
            edges.emplace(e, std::move(w));
        else
            it->second = tf_plus(it->second, w);
    }
    if (!have_header) throw parse_error(lineno, 1, "missing graph header");
    if (!have_root) throw parse_error(lineno, 1, "missing root declaration");
    return FlowGraph(name, vars, std::move(vertices), root, std::move(edges));
}

StutterMap parse_map(const std::string &text, const std::vector<VarId> &g_vars,
                     const std::vector<VarId> &h_vars) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::map<Vertex, Vertex> vmap;
    std::map<VarId, AffineTerm> sub;
    std::set<VarId> g_set(g_vars.begin(), g_vars.end());
    std::set<VarId> h_set(h_vars.begin(), h_vars.end());

    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = line.substr(0, line.find('#'));
        if (stripped.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(stripped);
        std::string first;
        ls >> first;
        if (first == "vmap") {
            std::string from, arrow, to;
            if (!(ls >> from >> arrow >> to) || arrow != "->")
                throw parse_error(lineno, 1, "expected 'vmap <g-vertex> -> <h-vertex>'");
            if (!vmap.emplace(from, to).second)
                throw parse_error(lineno, 1, "duplicate vmap entry for " + from);
            continue;
        }
        if (first == "sub") {
            std::string var, assign;
            if (!(ls >> var >> assign) || assign != ":=")
                throw parse_error(lineno, 1, "expected 'sub <h-var> := <term>'");
            VarId target(var);
            if (!h_set.count(target))
                throw parse_error(lineno, 1, "sub target is not an H variable: " + var);
            std::string rest;
            std::getline(ls, rest);
            Lexer lex(rest);
            ExprParser ep(lex, g_set, /*allow_primes=*/false);
            AffineTerm t;
            try {
                t = ep.parse();
                if (!lex.at(Tok::End)) lex.fail("unexpected trailing input in term");
            } catch (const parse_error &e) {
                throw parse_error(lineno, e.column, e.message);
            }
            if (!sub.emplace(target, std::move(t)).second)
                throw parse_error(lineno, 1, "duplicate sub entry for " + var);
            continue;
        }
        throw parse_error(lineno, 1, "expected 'vmap' or 'sub' line");
    }
    StutterMap m;
    m.vertex_map = std::move(vmap);
    m.f = Substitution(g_vars, h_vars, std::move(sub));
    return m;
}

} // namespace polysum
