#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freemarkov/signature.hpp"

namespace freemarkov {

enum class NodeKind : std::uint8_t { gen, dup, disc };

/// Valuation of a node: a generator, or the duplicate/discard on a letter.
struct NodeValue {
  NodeKind kind = NodeKind::gen;
  std::int32_t id = 0;  // GenId for gen, LetterId otherwise

  static NodeValue gen(GenId g) { return {NodeKind::gen, g}; }
  static NodeValue dup(LetterId a) { return {NodeKind::dup, a}; }
  static NodeValue disc(LetterId a) { return {NodeKind::disc, a}; }

  friend auto operator<=>(const NodeValue&, const NodeValue&) = default;
};

int input_arity(const Signature& sig, NodeValue v);
int output_arity(const Signature& sig, NodeValue v);
LetterId input_letter(const Signature& sig, NodeValue v, int port);
LetterId output_letter(const Signature& sig, NodeValue v, int port);
std::string to_string(const Signature& sig, NodeValue v);  // "gen:f", "dup:a", "disc:a"

inline constexpr int kBoundary = -1;
inline constexpr int kUnset = -2;

/// A wire endpoint. As a source, node == kBoundary means dom port `index`;
/// as a target it means cod port `index`.
struct Port {
  int node = kUnset;
  int index = 0;

  bool boundary() const { return node == kBoundary; }
  friend auto operator<=>(const Port&, const Port&) = default;
};

struct Wire {
  Port src;
  Port dst;
  friend bool operator==(const Wire&, const Wire&) = default;
};

/// Anchored, polarized, acyclic string diagram valued in a Signature.
///
/// Node ids are positions in the node list and carry no meaning; equality
/// of morphisms is isomorphic() (free SMC) or equivalent() (free Markov
/// category). Instances may be ill-formed; use well_formed() before relying
/// on the invariants. The port lookup tables answer -1 for unwired ports.
class Diagram {
 public:
  Diagram() = default;
  Diagram(SignaturePtr sig, std::vector<NodeValue> nodes, LetterIds dom, LetterIds cod,
          std::vector<Wire> wires);

  const SignaturePtr& sig_ptr() const { return sig_; }
  const Signature& sig() const { return *sig_; }

  int node_count() const { return static_cast<int>(nodes_.size()); }
  NodeValue value(int n) const { return nodes_[n]; }
  const std::vector<NodeValue>& values() const { return nodes_; }
  int in_arity(int n) const { return in_off_[n + 1] - in_off_[n]; }
  int out_arity(int n) const { return out_off_[n + 1] - out_off_[n]; }
  LetterId in_letter(int n, int k) const { return input_letter(*sig_, nodes_[n], k); }
  LetterId out_letter(int n, int k) const { return output_letter(*sig_, nodes_[n], k); }

  const LetterIds& dom() const { return dom_; }
  const LetterIds& cod() const { return cod_; }
  Word dom_word() const { return sig_->decode(dom_); }
  Word cod_word() const { return sig_->decode(cod_); }

  const std::vector<Wire>& wires() const { return wires_; }
  int wire_count() const { return static_cast<int>(wires_.size()); }

  /// Wire ending at a target port / starting at a source port, or -1.
  int wire_into(Port dst) const;
  int wire_from(Port src) const;
  Port source_of(Port dst) const;  // {kUnset} if unwired
  Port target_of(Port src) const;
  LetterId wire_letter(int w) const;

 private:
  SignaturePtr sig_;
  std::vector<NodeValue> nodes_;
  LetterIds dom_;
  LetterIds cod_;
  std::vector<Wire> wires_;
  std::vector<int> in_off_{0};
  std::vector<int> out_off_{0};
  std::vector<int> in_wire_;
  std::vector<int> out_wire_;
  std::vector<int> dom_wire_;
  std::vector<int> cod_wire_;
};

/// Mutable wiring workspace used to assemble diagrams. Nodes are only ever
/// appended; removal marks them dead and build() compacts.
class DiagramBuilder {
 public:
  explicit DiagramBuilder(SignaturePtr sig);
  explicit DiagramBuilder(const Diagram& d);

  const Signature& sig() const { return *sig_; }

  int add_node(NodeValue v);
  int add_dom(LetterId a);
  int add_cod(LetterId a);
  void remove_node(int n) { alive_[n] = 0; }

  /// Wires src to dst, overwriting whatever both ports were attached to.
  void connect(Port src, Port dst);

  Port source_of(Port dst) const;
  Port target_of(Port src) const;

  int node_capacity() const { return static_cast<int>(values_.size()); }
  bool alive(int n) const { return alive_[n] != 0; }
  NodeValue value(int n) const { return values_[n]; }
  int in_arity(int n) const { return in_off_[n + 1] - in_off_[n]; }
  int out_arity(int n) const { return out_off_[n + 1] - out_off_[n]; }
  const LetterIds& dom() const { return dom_; }
  const LetterIds& cod() const { return cod_; }

  /// Compacts live nodes in id order. Throws Error if a live port is
  /// unwired. old_to_new (optional) receives the id translation (-1 for
  /// removed nodes).
  Diagram build(std::vector<int>* old_to_new = nullptr) const;

 private:
  SignaturePtr sig_;
  std::vector<NodeValue> values_;
  std::vector<std::uint8_t> alive_;
  std::vector<int> in_off_{0};
  std::vector<int> out_off_{0};
  std::vector<Port> in_src_;
  std::vector<Port> out_dst_;
  LetterIds dom_;
  LetterIds cod_;
  std::vector<Port> dom_dst_;
  std::vector<Port> cod_src_;
};

Report well_formed(const Diagram& d);

// --- free symmetric monoidal structure ------------------------------------

Diagram identity(const SignaturePtr& sig, const LetterIds& w);
Diagram identity(const SignaturePtr& sig, const Word& w);
Diagram atom(const SignaturePtr& sig, NodeValue v);
/// g after f: cod(f) is spliced onto dom(g). Throws Error on a boundary
/// mismatch or different signatures.
Diagram compose(const Diagram& g, const Diagram& f);
/// Several steps in diagrammatic order: seq({f, g, h}) = h after g after f.
Diagram seq(std::span<const Diagram> steps);
Diagram tensor(const Diagram& f, const Diagram& g);
Diagram symmetry(const SignaturePtr& sig, const LetterIds& u, const LetterIds& v);
Diagram symmetry(const SignaturePtr& sig, const Word& u, const Word& v);
/// Node-free wiring with cod[j] = w[source[j]]; `source` is a permutation.
Diagram permutation(const SignaturePtr& sig, const LetterIds& w, const std::vector<int>& source);

// --- isomorphism -------------------------------------------------------------

/// Canonical code of the isomorphism class (anchoring preserved).
std::vector<std::int32_t> iso_code(const Diagram& d);
/// Stable, human-readable rendering of iso_code.
std::string certificate(const Diagram& d);
bool isomorphic(const Diagram& a, const Diagram& b);
/// A node bijection a -> b witnessing isomorphism, if one exists.
std::optional<std::vector<int>> find_isomorphism(const Diagram& a, const Diagram& b);

// --- node order, levels, layers ---------------------------------------------

/// Reflexive-transitive closure of the wire relation on nodes.
class NodeOrder {
 public:
  explicit NodeOrder(const Diagram& d);
  bool leq(int x, int y) const { return (rows_[x * stride_ + (y >> 6)] >> (y & 63)) & 1u; }
  bool less(int x, int y) const { return x != y && leq(x, y); }
  int size() const { return n_; }

 private:
  int n_ = 0;
  int stride_ = 0;
  std::vector<std::uint64_t> rows_;
};

NodeOrder node_poset(const Diagram& d);

/// Deterministic topological order (Kahn, smallest id first).
std::vector<int> topological_order(const Diagram& d);

/// A downward-closed set of nodes.
struct Level {
  std::vector<int> nodes;  // sorted, unique

  bool contains(int n) const;
  friend bool operator==(const Level&, const Level&) = default;
};

Report validate_level(const Diagram& d, const Level& level);
Level down_closure(const Diagram& d, std::span<const int> nodes);
Level all_nodes(const Diagram& d);

/// Wires cut by a level, in the deterministic cut order: dom-sourced wires
/// by dom index, then node-sourced wires by (topological rank, port).
/// Throws Error if `level` is not downward closed.
std::vector<int> cut(const Diagram& d, const Level& level);

/// The layer between two nested levels. Ids refer to the parent diagram.
struct Layer {
  Level lower;
  Level upper;
  std::vector<int> nodes;      // upper minus lower
  std::vector<int> pinned;     // wires with both ends in `nodes`
  std::vector<int> dom_wires;  // cut(lower), cut order
  std::vector<int> cod_wires;  // cut(upper), cut order
  std::vector<int> loose;      // cut(lower) and cut(upper)
};

Layer layer(const Diagram& d, const Level& lower, const Level& upper);

/// Anchored sub-diagram on `nodes`, with dom/cod given by the listed parent
/// wires in order. Every wire touching `nodes` must be pinned or listed.
Diagram extract(const Diagram& d, std::span<const int> nodes, std::span<const int> dom_wires,
                std::span<const int> cod_wires);

struct Factorization {
  Diagram bottom;  // layer [empty, lower]
  Diagram middle;  // layer [lower, upper]
  Diagram top;     // layer [upper, all]
  std::vector<int> lower_cut;  // parent wire ids anchoring bottom/middle
  std::vector<int> upper_cut;  // parent wire ids anchoring middle/top
};

/// compose(top, compose(middle, bottom)) is isomorphic to d.
Factorization factor_through_layers(const Diagram& d, const Level& lower, const Level& upper);

}  // namespace freemarkov
