#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace freemarkov {

/// Raised on malformed input handed to a constructing operation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Result of a validating operation: empty means ok, otherwise one line per
/// violation.
struct Report {
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
  explicit operator bool() const { return ok(); }
  void add(std::string message) { errors.push_back(std::move(message)); }
  std::string str() const;
};

using Letter = std::string;

/// An element of the free monoid over the alphabet. The empty word is the
/// monoidal unit.
using Word = std::vector<Letter>;

Word word_concat(const Word& u, const Word& v);
bool is_singular(const Word& w);
std::string to_string(const Word& w);

using LetterId = std::int32_t;
using GenId = std::int32_t;
using LetterIds = std::vector<LetterId>;

struct GeneratorDecl {
  std::string name;
  Word dom;
  Word cod;
};

/// A free DD-graph monoid: an alphabet plus typed generator arrows. The
/// duplicate and discard on each letter are implicit.
///
/// Letters and generators are addressed by their declaration index. A
/// Signature may be constructed in an invalid state so that
/// validate_signature() can report on it; every other consumer expects a
/// validated one (see make_signature()).
class Signature {
 public:
  Signature() = default;
  Signature(std::vector<Letter> letters, std::vector<GeneratorDecl> generators);

  const std::vector<Letter>& letters() const { return letters_; }
  const std::vector<GeneratorDecl>& generators() const { return generators_; }

  std::size_t letter_count() const { return letters_.size(); }
  std::size_t generator_count() const { return generators_.size(); }

  std::optional<LetterId> find_letter(std::string_view name) const;
  std::optional<GenId> find_generator(std::string_view name) const;
  LetterId letter(std::string_view name) const;  // throws Error
  GenId generator(std::string_view name) const;  // throws Error

  const std::string& letter_name(LetterId id) const { return letters_.at(id); }
  const std::string& generator_name(GenId id) const { return generators_.at(id).name; }

  const LetterIds& gen_dom(GenId id) const { return gen_dom_[id]; }
  const LetterIds& gen_cod(GenId id) const { return gen_cod_[id]; }

  LetterIds encode(const Word& w) const;  // throws Error on undeclared letters
  Word decode(std::span<const LetterId> ids) const;

  friend bool operator==(const Signature& a, const Signature& b);

 private:
  std::vector<Letter> letters_;
  std::vector<GeneratorDecl> generators_;
  std::map<std::string, LetterId, std::less<>> letter_index_;
  std::map<std::string, GenId, std::less<>> generator_index_;
  std::vector<LetterIds> gen_dom_;
  std::vector<LetterIds> gen_cod_;
};

using SignaturePtr = std::shared_ptr<const Signature>;

Report validate_signature(const Signature& sig);

/// Builds and validates; throws Error listing every violation.
SignaturePtr make_signature(std::vector<Letter> letters, std::vector<GeneratorDecl> generators);

/// A finite DAG whose vertex storage order is a total order extending the
/// arrow relation. Identity loops are implicit.
class OrderedDag {
 public:
  OrderedDag() = default;
  /// Throws Error if validate_dag() rejects the data.
  OrderedDag(std::vector<std::string> vertices,
             std::vector<std::pair<std::string, std::string>> arrows);

  std::size_t size() const { return vertices_.size(); }
  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::string& name(int v) const { return vertices_.at(v); }
  std::optional<int> find(std::string_view name) const;
  int index(std::string_view name) const;  // throws Error

  /// Arrows as (src, dst) vertex indices, sorted.
  const std::vector<std::pair<int, int>>& arrows() const { return arrows_; }
  bool has_arrow(int src, int dst) const;
  /// Parents and children in vertex order.
  const std::vector<int>& parents(int v) const { return parents_[v]; }
  const std::vector<int>& children(int v) const { return children_[v]; }

  friend bool operator==(const OrderedDag& a, const OrderedDag& b) {
    return a.vertices_ == b.vertices_ && a.arrows_ == b.arrows_;
  }

 private:
  std::vector<std::string> vertices_;
  std::vector<std::pair<int, int>> arrows_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
};

using DagPtr = std::shared_ptr<const OrderedDag>;

Report validate_dag(const std::vector<std::string>& vertices,
                    const std::vector<std::pair<std::string, std::string>>& arrows);

/// Builds an OrderedDag from index arrows (src < dst required).
OrderedDag dag_from_indices(std::vector<std::string> vertices,
                            const std::vector<std::pair<int, int>>& arrows);

/// An order-preserving graph homomorphism that may collapse arrows onto
/// identity loops. vmap[i] is the image of source vertex i.
struct DagHom {
  DagPtr source;
  DagPtr target;
  std::vector<int> vmap;
};

Report validate_hom(const DagHom& h);

/// g after f. Throws Error when target(f) differs from source(g).
DagHom compose_homs(const DagHom& g, const DagHom& f);

DagHom identity_hom(const DagPtr& dag);

}  // namespace freemarkov
