#include "hpasp/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>

namespace hpasp {

namespace {

enum class Tok {
  End,
  Ident,
  Variable,
  Integer,
  Real,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semicolon,
  Bar,
  Dot,
  DotDot,
  Colon,
  ColonColon,
  If,
  Plus,
  Minus,
  Star,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Ne,
  Count,
};

struct Token {
  Tok type = Tok::End;
  std::string text;
  Location loc;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    Token t;
    t.loc = {line_, col_};
    if (pos_ >= src_.size()) return t;
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return number(t);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return word(t);
    if (c == '#') {
      advance();
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) advance();
      const auto directive = src_.substr(start, pos_ - start);
      if (directive != "count") {
        throw Error(ErrorKind::Syntax, "unsupported directive #" + std::string(directive), t.loc);
      }
      t.type = Tok::Count;
      t.text = "#count";
      return t;
    }
    advance();
    auto peek_is = [&](char x) { return pos_ < src_.size() && src_[pos_] == x; };
    switch (c) {
    case '(': t.type = Tok::LParen; break;
    case ')': t.type = Tok::RParen; break;
    case '{': t.type = Tok::LBrace; break;
    case '}': t.type = Tok::RBrace; break;
    case ',': t.type = Tok::Comma; break;
    case ';': t.type = Tok::Semicolon; break;
    case '|': t.type = Tok::Bar; break;
    case '+': t.type = Tok::Plus; break;
    case '-': t.type = Tok::Minus; break;
    case '*': t.type = Tok::Star; break;
    case '.':
      if (peek_is('.')) {
        advance();
        t.type = Tok::DotDot;
      } else {
        t.type = Tok::Dot;
      }
      break;
    case ':':
      if (peek_is(':')) {
        advance();
        t.type = Tok::ColonColon;
      } else if (peek_is('-')) {
        advance();
        t.type = Tok::If;
      } else {
        t.type = Tok::Colon;
      }
      break;
    case '<':
      if (peek_is('=')) {
        advance();
        t.type = Tok::Le;
      } else {
        t.type = Tok::Lt;
      }
      break;
    case '>':
      if (peek_is('=')) {
        advance();
        t.type = Tok::Ge;
      } else {
        t.type = Tok::Gt;
      }
      break;
    case '=':
      if (peek_is('=')) advance();
      t.type = Tok::Eq;
      break;
    case '!':
      if (!peek_is('=')) throw Error(ErrorKind::Syntax, "expected '=' after '!'", t.loc);
      advance();
      t.type = Tok::Ne;
      break;
    default:
      throw Error(ErrorKind::Syntax, std::string("unexpected character '") + c + "'", t.loc);
    }
    return t;
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

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool digit_at(std::size_t i) const {
    return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]));
  }

  Token number(Token t) {
    const std::size_t start = pos_;
    bool real = false;
    while (digit_at(pos_)) advance();
    if (pos_ < src_.size() && src_[pos_] == '.' && digit_at(pos_ + 1)) {
      real = true;
      advance();
      while (digit_at(pos_)) advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t k = pos_ + 1;
      if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
      if (digit_at(k)) {
        real = true;
        while (pos_ < k) advance();
        while (digit_at(pos_)) advance();
      }
    }
    t.type = real ? Tok::Real : Tok::Integer;
    t.text = std::string(src_.substr(start, pos_ - start));
    return t;
  }

  Token word(Token t) {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
            src_[pos_] == '\'')) {
      advance();
    }
    t.text = std::string(src_.substr(start, pos_ - start));
    std::size_t first = 0;
    while (first < t.text.size() && t.text[first] == '_') ++first;
    if (first == t.text.size()) {
      throw Error(ErrorKind::Syntax, "anonymous variables are not supported", t.loc);
    }
    t.type = std::isupper(static_cast<unsigned char>(t.text[first])) ? Tok::Variable : Tok::Ident;
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
public:
  Parser(std::string_view src, const ParseOptions& options) : lex_(src), options_(options) {
    tok_ = lex_.next();
    ahead_ = lex_.next();
  }

  HybridProgram program() {
    HybridProgram prog;
    while (tok_.type != Tok::End) statement(prog);
    return prog;
  }

  Atom single_atom() {
    Atom a = atom();
    expect(Tok::End, "end of input");
    return a;
  }

  std::vector<BodyElement> conjunction() {
    std::vector<BodyElement> out;
    if (tok_.type == Tok::End) return out;
    out.push_back(body_element());
    while (accept(Tok::Comma)) out.push_back(body_element());
    expect(Tok::End, "end of input");
    return out;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw Error(ErrorKind::Syntax, msg, tok_.loc); }

  void advance() {
    tok_ = std::move(ahead_);
    ahead_ = lex_.next();
  }

  bool accept(Tok t) {
    if (tok_.type != t) return false;
    advance();
    return true;
  }

  void expect(Tok t, const char* what) {
    if (!accept(t)) {
      fail(std::string("expected ") + what +
           (tok_.text.empty() ? std::string() : ", found '" + tok_.text + "'"));
    }
  }

  void check_reserved(const Token& t) const {
    if (!options_.allow_reserved && t.text.rfind("__", 0) == 0) {
      throw Error(ErrorKind::Syntax, "identifiers starting with '__' are reserved: " + t.text, t.loc);
    }
  }

  static bool is_number(Tok t) { return t == Tok::Integer || t == Tok::Real; }

  Term number_token() {
    const Token t = tok_;
    advance();
    if (t.type == Tok::Integer) {
      std::int64_t v = 0;
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (res.ec != std::errc{}) throw Error(ErrorKind::Syntax, "integer out of range: " + t.text, t.loc);
      return Term::number(v);
    }
    return Term::real_number(std::stod(t.text));
  }

  // term := product (('+'|'-') product)*
  Term term() {
    Term lhs = product();
    while (tok_.type == Tok::Plus || tok_.type == Tok::Minus) {
      const char op = tok_.type == Tok::Plus ? '+' : '-';
      advance();
      lhs = Term::binary(op, std::move(lhs), product());
    }
    return lhs;
  }

  Term product() {
    Term lhs = unary();
    while (accept(Tok::Star)) lhs = Term::binary('*', std::move(lhs), unary());
    return lhs;
  }

  Term unary() {
    if (accept(Tok::Minus)) {
      Term inner = unary();
      if (inner.kind == Term::Kind::Integer) return Term::number(-inner.integer);
      if (inner.kind == Term::Kind::Real) return Term::real_number(-inner.real);
      return Term::binary('-', Term::number(0), std::move(inner));
    }
    return primary();
  }

  Term primary() {
    if (is_number(tok_.type)) return number_token();
    if (tok_.type == Tok::Variable) {
      Term t = Term::variable(tok_.text);
      advance();
      return t;
    }
    if (tok_.type == Tok::Ident) {
      check_reserved(tok_);
      std::string name = tok_.text;
      advance();
      if (accept(Tok::LParen)) {
        std::vector<Term> args = arguments();
        expect(Tok::RParen, "')'");
        return Term::function(std::move(name), std::move(args));
      }
      return Term::symbol(std::move(name));
    }
    if (accept(Tok::LParen)) {
      Term inner = term();
      expect(Tok::RParen, "')'");
      return inner;
    }
    fail("expected a term" + (tok_.text.empty() ? std::string() : ", found '" + tok_.text + "'"));
  }

  std::vector<Term> arguments() {
    std::vector<Term> args;
    do {
      Term t = term();
      if (accept(Tok::DotDot)) t = Term::range(std::move(t), term());
      args.push_back(std::move(t));
    } while (accept(Tok::Comma));
    return args;
  }

  Atom term_to_atom(Term t, Location loc) const {
    if (t.kind == Term::Kind::Symbol) return Atom{std::move(t.name), {}};
    if (t.kind == Term::Kind::Function) return Atom{std::move(t.name), std::move(t.args)};
    throw Error(ErrorKind::Syntax, "expected an atom, found '" + to_string(t) + "'", loc);
  }

  Atom atom() {
    const Location loc = tok_.loc;
    if (tok_.type != Tok::Ident) fail("expected an atom");
    return term_to_atom(primary(), loc);
  }

  Atom head_atom() {
    const Location loc = tok_.loc;
    Atom a = atom();
    if (ComparisonAtom::from_predicate(a.predicate, a.args.size())) {
      throw Error(ErrorKind::Syntax, "comparison predicate '" + a.predicate + "' cannot be a head", loc);
    }
    return a;
  }

  std::optional<CmpOp> comparison_operator() const {
    switch (tok_.type) {
    case Tok::Lt: return CmpOp::Lt;
    case Tok::Le: return CmpOp::Le;
    case Tok::Gt: return CmpOp::Gt;
    case Tok::Ge: return CmpOp::Ge;
    case Tok::Eq: return CmpOp::Eq;
    case Tok::Ne: return CmpOp::Ne;
    default: return std::nullopt;
    }
  }

  Literal literal() {
    const bool negated = tok_.type == Tok::Ident && tok_.text == "not" && ahead_.type == Tok::Ident;
    if (negated) advance();
    return Literal{atom(), negated};
  }

  std::vector<AggregateElement> aggregate_elements() {
    expect(Tok::Count, "#count");
    expect(Tok::LBrace, "'{'");
    std::vector<AggregateElement> elements;
    if (accept(Tok::RBrace)) return elements;
    do {
      AggregateElement e;
      do {
        e.tuple.push_back(term());
      } while (accept(Tok::Comma));
      if (accept(Tok::Colon)) {
        do {
          e.condition.push_back(literal());
        } while (accept(Tok::Comma));
      }
      elements.push_back(std::move(e));
    } while (accept(Tok::Semicolon));
    expect(Tok::RBrace, "'}'");
    return elements;
  }

  BodyElement body_element() {
    const Location loc = tok_.loc;
    if (tok_.type == Tok::Ident && tok_.text == "not" && ahead_.type == Tok::Ident) {
      return literal();
    }
    if (tok_.type == Tok::Count) {
      AggregateAtom agg;
      agg.elements = aggregate_elements();
      auto op = comparison_operator();
      if (!op) fail("expected a comparison after #count{...}");
      advance();
      agg.op = *op;
      agg.bound = term();
      return agg;
    }
    Term lhs = term();
    if (auto op = comparison_operator()) {
      advance();
      if (tok_.type == Tok::Count) {
        AggregateAtom agg;
        agg.elements = aggregate_elements();
        agg.op = flip(*op);
        agg.bound = std::move(lhs);
        return agg;
      }
      return LinearComparison{std::move(lhs), *op, term()};
    }
    Atom a = term_to_atom(std::move(lhs), loc);
    if (auto kind = ComparisonAtom::from_predicate(a.predicate, a.args.size())) {
      ComparisonAtom c;
      c.kind = *kind;
      c.variable = term_to_atom(std::move(a.args[0]), loc);
      c.bounds.assign(std::make_move_iterator(a.args.begin() + 1), std::make_move_iterator(a.args.end()));
      return c;
    }
    return Literal{std::move(a), false};
  }

  std::vector<BodyElement> body() {
    std::vector<BodyElement> out;
    out.push_back(body_element());
    while (accept(Tok::Comma)) out.push_back(body_element());
    return out;
  }

  double probability() {
    const Token t = tok_;
    const double p = number_token().numeric_value();
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorKind::InvalidParameter, "probability " + t.text + " outside [0,1]", t.loc);
    }
    return p;
  }

  DistributionSpec distribution() {
    const Token name = tok_;
    if (name.type != Tok::Ident) fail("expected a distribution name");
    advance();
    expect(Tok::LParen, "'('");
    std::vector<double> params;
    do {
      Term t = unary();
      if (!t.is_numeric()) fail("distribution parameters must be numbers");
      params.push_back(t.numeric_value());
    } while (accept(Tok::Comma));
    expect(Tok::RParen, "')'");
    if (params.size() != 2) {
      throw Error(ErrorKind::Syntax, name.text + " expects 2 parameters", name.loc);
    }
    try {
      if (name.text == "gaussian" || name.text == "normal") {
        double scale = params[1];
        if (options_.gaussian_param == GaussianParam::Variance) scale = std::sqrt(scale);
        return DistributionSpec::gaussian(params[0], scale);
      }
      if (name.text == "gamma") return DistributionSpec::gamma(params[0], params[1]);
    } catch (const Error& e) {
      throw Error(e.kind(), e.what(), name.loc);
    }
    throw Error(ErrorKind::Syntax, "unknown distribution '" + name.text + "'", name.loc);
  }

  void statement(HybridProgram& prog) {
    const Location loc = tok_.loc;
    if (is_number(tok_.type) && ahead_.type == Tok::ColonColon) {
      ProbFactDecl f;
      f.loc = loc;
      f.prob = probability();
      advance();
      f.atom = head_atom();
      expect(Tok::Dot, "'.'");
      add_fact(prog, std::move(f));
      return;
    }
    if (accept(Tok::LBrace)) {
      std::vector<Atom> heads;
      do {
        heads.push_back(head_atom());
      } while (accept(Tok::Semicolon));
      expect(Tok::RBrace, "'}'");
      std::vector<BodyElement> b;
      if (accept(Tok::If)) b = body();
      expect(Tok::Dot, "'.'");
      for (auto& h : heads) prog.rules.push_back(Rule{{std::move(h)}, true, b, loc});
      return;
    }
    Rule r;
    r.loc = loc;
    if (tok_.type != Tok::If) {
      r.head.push_back(head_atom());
      if (tok_.type == Tok::Colon) {
        advance();
        ContinuousDecl c{std::move(r.head.front()), distribution(), loc};
        expect(Tok::Dot, "'.'");
        add_continuous(prog, std::move(c));
        return;
      }
      while (tok_.type == Tok::Semicolon || tok_.type == Tok::Bar) {
        advance();
        r.head.push_back(head_atom());
      }
    }
    if (accept(Tok::If)) {
      if (tok_.type != Tok::Dot) r.body = body();
    }
    expect(Tok::Dot, "'.'");
    prog.rules.push_back(std::move(r));
  }

  static bool has_range(const Atom& a) {
    for (const auto& t : a.args) {
      if (t.kind == Term::Kind::Range) return true;
    }
    return false;
  }

  void add_fact(HybridProgram& prog, ProbFactDecl f) {
    if (!has_range(f.atom) && f.atom.is_ground()) {
      const std::string key = to_string(f.atom);
      if (continuous_.count(key)) {
        throw Error(ErrorKind::DuplicateDeclaration, key + " is already a continuous variable", f.loc);
      }
      auto [it, fresh] = facts_.emplace(key, f.prob);
      if (!fresh) {
        if (it->second != f.prob) {
          throw Error(ErrorKind::DuplicateDeclaration, key + " declared with two probabilities", f.loc);
        }
        return;
      }
    }
    prog.facts.push_back(std::move(f));
  }

  void add_continuous(HybridProgram& prog, ContinuousDecl c) {
    if (!has_range(c.atom) && c.atom.is_ground()) {
      const std::string key = to_string(c.atom);
      if (facts_.count(key)) {
        throw Error(ErrorKind::DuplicateDeclaration, key + " is already a probabilistic fact", c.loc);
      }
      auto [it, fresh] = continuous_.emplace(key, c.dist);
      if (!fresh) {
        if (!(it->second == c.dist)) {
          throw Error(ErrorKind::DuplicateDeclaration, key + " declared with two distributions", c.loc);
        }
        return;
      }
    }
    prog.continuous.push_back(std::move(c));
  }

  Lexer lex_;
  ParseOptions options_;
  Token tok_;
  Token ahead_;
  std::map<std::string, double> facts_;
  std::map<std::string, DistributionSpec> continuous_;
};

} // namespace

HybridProgram parse_program(std::string_view text, const ParseOptions& options) {
  return Parser(text, options).program();
}

Atom parse_atom(std::string_view text, const ParseOptions& options) {
  return Parser(text, options).single_atom();
}

std::vector<BodyElement> parse_conjunction(std::string_view text, const ParseOptions& options) {
  return Parser(text, options).conjunction();
}

} // namespace hpasp
