#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "freemarkov/causal.hpp"
#include "freemarkov/diagram.hpp"

namespace freemarkov::cli {

/// A syntax, name or typing error at a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Term syntax:
///   id(a b)  gen f  dup a  disc a  sym(a b, c)  t ; t  t * t  (t)
/// ';' composes in diagrammatic order and binds looser than '*'.
struct Term {
  enum class Kind { id, gen, dup, disc, sym, compose, tensor };
  Kind kind = Kind::id;
  std::vector<std::string> left;   // id word, gen/dup/disc name, sym first word
  std::vector<std::string> right;  // sym second word
  std::shared_ptr<const Term> a, b;
  int line = 1, column = 1;
};

Term parse_term(std::string_view src);
Diagram elaborate(const Term& t, const SignaturePtr& sig);
Diagram parse_diagram(std::string_view src, const SignaturePtr& sig);

/// A term for d: a topological sweep placing one node per step, with sym
/// blocks moving its inputs into place. parse(print(d)) is isomorphic to d.
std::string print_term(const Diagram& d);

/// Graphviz rendering; boundary ports are points labelled d0.., c0...
std::string to_dot(const Diagram& d);

/// Signature file: `letters: a b c` lines and `gen f : a b -> c c` lines;
/// `#` starts a comment.
SignaturePtr parse_signature(std::string_view text);
std::string print_signature(const Signature& sig);
/// DAG file: `vertices: v1 v2 v3` lines (order matters) and `arrow v1 v2`.
OrderedDag parse_dag(std::string_view text);
std::string print_dag(const OrderedDag& dag);
/// Hom file: one `map u v` line per source vertex.
DagHom parse_hom(std::string_view text, const DagPtr& source, const DagPtr& target);

/// Runs the fmc command line; returns the exit code (0 ok, 1 property
/// false, 2 input error).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace freemarkov::cli
