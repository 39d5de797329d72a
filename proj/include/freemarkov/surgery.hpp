#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "freemarkov/diagram.hpp"

namespace freemarkov {

/// A subgraph of a parent diagram: chosen nodes plus chosen wires. Wires of
/// the parent whose endpoints both lie outside `nodes` are loose in it.
struct SubDiagram {
  std::vector<int> nodes;  // sorted
  std::vector<int> wires;  // sorted parent wire ids
};

/// Surgery template Ω/Λ. alpha[p] is the dom port of omega matched with dom
/// port p of lambda; beta likewise for cod ports.
struct Template {
  Diagram omega;
  Diagram lambda;
  std::vector<int> alpha;
  std::vector<int> beta;
  std::string name;

  Template reversed() const;
};

Report validate_template(const Template& t);

/// An embedding of a template's omega onto a normal subdiagram of a target.
struct Match {
  std::vector<int> node_map;   // omega node -> target node
  std::vector<int> dom_wires;  // omega dom port -> target wire
  std::vector<int> cod_wires;  // omega cod port -> target wire
  SubDiagram image;
};

bool is_normal(const Diagram& d, const SubDiagram& s);
bool is_normal(const Diagram& d, const NodeOrder& order, const SubDiagram& s);

/// The levels (L, M) of the layer construction: M \ L = s.nodes and s sits
/// inside layer(d, L, M) with the same unloose part. Throws Error if s is
/// not normal.
std::pair<Level, Level> sharp_layer(const Diagram& d, const SubDiagram& s);

/// All matches of t.omega in d, one per (image, boundary assignment); the
/// order is deterministic.
std::vector<Match> find_matches(const Diagram& d, const Template& t);
std::vector<Match> find_matches(const Diagram& d, const NodeOrder& order, const Template& t);

/// Grafts t.lambda over the matched image.
Diagram apply_surgery(const Diagram& d, const Match& m, const Template& t);

/// As apply_surgery, also returning the match of t.reversed() at the graft
/// site, so that the surgery can be undone.
std::pair<Diagram, Match> apply_surgery_tracked(const Diagram& d, const Match& m, const Template& t);

enum class Verdict { no, yes, inconclusive };
std::string to_string(Verdict v);

/// Throws Error unless the set contains the empty template and the reversal
/// of each member.
void require_symmetric(const std::vector<Template>& templates);

/// All diagrams reachable from d in at most `radius` surgeries, as canonical
/// iso codes; each level is truncated to `width` members (smallest first).
struct Ball {
  std::vector<std::vector<std::int32_t>> codes;  // sorted
  bool truncated = false;
  bool closed = false;  // no new class appeared at the last level
};

Ball explore(const Diagram& d, const std::vector<Template>& templates, int radius, int width);

/// Bounded T-equivalence search: yes iff a chain of at most `depth`
/// surgeries connects the iso classes of d1 and d2 (searched from both ends,
/// frontier capped at `width`); no only when that is certain.
Verdict equivalent_bfs(const Diagram& d1, const Diagram& d2, const std::vector<Template>& templates,
                       int depth, int width);

}  // namespace freemarkov
