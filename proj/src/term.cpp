#include <algorithm>
#include <cctype>
#include <sstream>

#include "freemarkov/cli.hpp"
#include "freemarkov/markov.hpp"

namespace freemarkov::cli {

ParseError::ParseError(int line, int column, const std::string& message)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '.';
}

struct Token {
  enum Kind { ident, lparen, rparen, comma, semi, star, end } kind;
  std::string text;
  int line, column;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, column = 1;
  std::size_t i = 0;
  auto advance = [&] {
    if (src[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
    ++i;
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    Token t{Token::end, std::string(1, c), line, column};
    switch (c) {
      case '(': t.kind = Token::lparen; break;
      case ')': t.kind = Token::rparen; break;
      case ',': t.kind = Token::comma; break;
      case ';': t.kind = Token::semi; break;
      case '*': t.kind = Token::star; break;
      default:
        if (!ident_char(c)) throw ParseError(line, column, "unexpected character '" + std::string(1, c) + "'");
        t.kind = Token::ident;
        t.text.clear();
        while (i < src.size() && ident_char(src[i])) {
          t.text += src[i];
          advance();
        }
        out.push_back(std::move(t));
        continue;
    }
    out.push_back(std::move(t));
    advance();
  }
  out.push_back({Token::end, "end of input", line, column});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Term parse() {
    Term t = compose();
    if (peek().kind != Token::end) fail("expected ';', '*' or end of input");
    return t;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    throw ParseError(t.line, t.column, what + ", found '" + t.text + "'");
  }

  const Token& expect(Token::Kind k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    return next();
  }

  Term binary(Term::Kind kind, Term lhs, Term rhs, const Token& op) {
    Term t;
    t.kind = kind;
    t.a = std::make_shared<const Term>(std::move(lhs));
    t.b = std::make_shared<const Term>(std::move(rhs));
    t.line = op.line;
    t.column = op.column;
    return t;
  }

  Term compose() {
    Term t = tensor();
    while (peek().kind == Token::semi) {
      const Token& op = next();
      t = binary(Term::Kind::compose, std::move(t), tensor(), op);
    }
    return t;
  }

  Term tensor() {
    Term t = atom();
    while (peek().kind == Token::star) {
      const Token& op = next();
      t = binary(Term::Kind::tensor, std::move(t), atom(), op);
    }
    return t;
  }

  std::vector<std::string> word() {
    std::vector<std::string> w;
    while (peek().kind == Token::ident) w.push_back(next().text);
    return w;
  }

  Term atom() {
    const Token& head = peek();
    Term t;
    t.line = head.line;
    t.column = head.column;
    if (head.kind == Token::lparen) {
      next();
      Term inner = compose();
      expect(Token::rparen, "')'");
      return inner;
    }
    if (head.kind != Token::ident) fail("expected a term");
    const std::string kw = next().text;
    if (kw == "id") {
      t.kind = Term::Kind::id;
      expect(Token::lparen, "'(' after id");
      t.left = word();
      expect(Token::rparen, "')'");
    } else if (kw == "sym") {
      t.kind = Term::Kind::sym;
      expect(Token::lparen, "'(' after sym");
      t.left = word();
      expect(Token::comma, "','");
      t.right = word();
      expect(Token::rparen, "')'");
    } else if (kw == "gen" || kw == "dup" || kw == "disc") {
      t.kind = kw == "gen" ? Term::Kind::gen : kw == "dup" ? Term::Kind::dup : Term::Kind::disc;
      t.left = {expect(Token::ident, "a name").text};
    } else {
      pos_--;
      fail("expected id, gen, dup, disc, sym or '('");
    }
    return t;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

LetterIds letters_of(const Term& t, const std::vector<std::string>& w, const Signature& sig) {
  LetterIds out;
  for (const auto& a : w) {
    auto id = sig.find_letter(a);
    if (!id) throw ParseError(t.line, t.column, "unknown letter " + a);
    out.push_back(*id);
  }
  return out;
}

std::string show(const Signature& sig, const LetterIds& w) {
  return w.empty() ? std::string("()") : to_string(sig.decode(w));
}

}  // namespace

Term parse_term(std::string_view src) { return Parser(lex(src)).parse(); }

Diagram elaborate(const Term& t, const SignaturePtr& sig) {
  switch (t.kind) {
    case Term::Kind::id: return identity(sig, letters_of(t, t.left, *sig));
    case Term::Kind::sym:
      return symmetry(sig, letters_of(t, t.left, *sig), letters_of(t, t.right, *sig));
    case Term::Kind::dup: return atom(sig, NodeValue::dup(letters_of(t, t.left, *sig)[0]));
    case Term::Kind::disc: return atom(sig, NodeValue::disc(letters_of(t, t.left, *sig)[0]));
    case Term::Kind::gen: {
      auto g = sig->find_generator(t.left[0]);
      if (!g) throw ParseError(t.line, t.column, "unknown generator " + t.left[0]);
      return atom(sig, NodeValue::gen(*g));
    }
    case Term::Kind::tensor: return tensor(elaborate(*t.a, sig), elaborate(*t.b, sig));
    case Term::Kind::compose: {
      Diagram f = elaborate(*t.a, sig);
      Diagram g = elaborate(*t.b, sig);
      if (f.cod() != g.dom()) {
        throw ParseError(t.line, t.column,
                         "type error: cod " + show(*sig, f.cod()) + " ≠ dom " + show(*sig, g.dom()));
      }
      return compose(g, f);
    }
  }
  throw Error("elaborate: bad term");
}

Diagram parse_diagram(std::string_view src, const SignaturePtr& sig) { return elaborate(parse_term(src), sig); }

namespace {

struct Printer {
  const Diagram& d;
  std::vector<Port> front;  // source port of each open wire, left to right
  std::vector<std::string> steps;

  LetterId letter(Port p) const { return p.boundary() ? d.dom()[p.index] : d.out_letter(p.node, p.index); }

  std::string word(std::size_t from, std::size_t to) const {
    std::string out;
    for (std::size_t i = from; i < to; ++i) {
      if (!out.empty()) out += ' ';
      out += d.sig().letter_name(letter(front[i]));
    }
    return out;
  }

  static void factor(std::string& step, const std::string& f) {
    if (!step.empty()) step += " * ";
    step += f;
  }

  void id_factor(std::string& step, std::size_t from, std::size_t to) const {
    if (from < to) factor(step, "id(" + word(from, to) + ")");
  }

  // Selection sort from the left, one sym block per misplaced wire.
  void arrange(const std::vector<Port>& goal) {
    for (std::size_t j = 0; j < goal.size(); ++j) {
      auto p = static_cast<std::size_t>(std::find(front.begin(), front.end(), goal[j]) - front.begin());
      if (p == j) continue;
      std::string step;
      id_factor(step, 0, j);
      factor(step, "sym(" + word(j, p) + ", " + word(p, p + 1) + ")");
      id_factor(step, p + 1, front.size());
      steps.push_back(std::move(step));
      std::rotate(front.begin() + static_cast<long>(j), front.begin() + static_cast<long>(p),
                  front.begin() + static_cast<long>(p) + 1);
    }
  }

  std::string node_term(int x) const {
    NodeValue v = d.value(x);
    const Signature& sig = d.sig();
    switch (v.kind) {
      case NodeKind::gen: return "gen " + sig.generator_name(v.id);
      case NodeKind::dup: return "dup " + sig.letter_name(v.id);
      case NodeKind::disc: return "disc " + sig.letter_name(v.id);
    }
    return {};
  }

  std::string run() {
    for (int i = 0; i < static_cast<int>(d.dom().size()); ++i) front.push_back({kBoundary, i});
    for (int x : topological_order(d)) {
      std::vector<Port> ins;
      for (int k = 0; k < d.in_arity(x); ++k) ins.push_back(d.source_of({x, k}));
      // Gather the inputs where the first of them already sits.
      auto is_input = [&](const Port& p) { return std::find(ins.begin(), ins.end(), p) != ins.end(); };
      std::size_t first = front.size();
      for (std::size_t i = 0; i < front.size() && first == front.size(); ++i)
        if (is_input(front[i])) first = i;
      std::vector<Port> before, after;
      for (std::size_t i = 0; i < front.size(); ++i)
        if (!is_input(front[i])) (i < first ? before : after).push_back(front[i]);
      std::vector<Port> goal = before;
      goal.insert(goal.end(), ins.begin(), ins.end());
      goal.insert(goal.end(), after.begin(), after.end());
      arrange(goal);
      const std::size_t lo = before.size(), hi = lo + ins.size();
      std::string step;
      id_factor(step, 0, lo);
      factor(step, node_term(x));
      id_factor(step, hi, front.size());
      steps.push_back(std::move(step));
      std::vector<Port> next = before;
      for (int k = 0; k < d.out_arity(x); ++k) next.push_back({x, k});
      next.insert(next.end(), after.begin(), after.end());
      front = std::move(next);
    }
    std::vector<Port> goal;
    for (int j = 0; j < static_cast<int>(d.cod().size()); ++j) goal.push_back(d.source_of({kBoundary, j}));
    arrange(goal);
    if (steps.empty()) return "id(" + word(0, front.size()) + ")";
    std::string out;
    for (const auto& s : steps) {
      if (!out.empty()) out += " ; ";
      out += s;
    }
    return out;
  }
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string print_term(const Diagram& d) { return Printer{d, {}, {}}.run(); }

std::string to_dot(const Diagram& d) {
  const Signature& sig = d.sig();
  std::ostringstream out;
  out << "digraph diagram {\n  rankdir=BT;\n";
  for (std::size_t i = 0; i < d.dom().size(); ++i)
    out << "  d" << i << " [shape=point, xlabel=\"d" << i << "\"];\n";
  for (int x = 0; x < d.node_count(); ++x)
    out << "  n" << x << " [label=" << quote(to_string(sig, d.value(x))) << "];\n";
  for (std::size_t j = 0; j < d.cod().size(); ++j)
    out << "  c" << j << " [shape=point, xlabel=\"c" << j << "\"];\n";
  auto wires = d.wires();
  std::sort(wires.begin(), wires.end(), [](const Wire& a, const Wire& b) { return a.src < b.src; });
  for (const Wire& w : wires) {
    out << "  " << (w.src.boundary() ? "d" : "n") << (w.src.boundary() ? w.src.index : w.src.node) << " -> "
        << (w.dst.boundary() ? "c" : "n") << (w.dst.boundary() ? w.dst.index : w.dst.node) << " [label="
        << quote(sig.letter_name(d.wire_letter(d.wire_into(w.dst))));
    if (!w.src.boundary() && d.out_arity(w.src.node) > 1) out << ", taillabel=\"" << w.src.index << "\"";
    if (!w.dst.boundary() && d.in_arity(w.dst.node) > 1) out << ", headlabel=\"" << w.dst.index << "\"";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace freemarkov::cli
