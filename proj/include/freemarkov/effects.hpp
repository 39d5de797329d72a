#pragma once

#include <vector>

#include "freemarkov/diagram.hpp"
#include "freemarkov/markov.hpp"

namespace freemarkov {

/// Data of a (W, K)-effect [w_T || w_S]: one letter per vertex of an ordered
/// DAG and one mechanism per vertex, typed parents -> vertex. Vertex sets are
/// sorted vertex indices; S and T may overlap.
struct EffectSpec {
  SignaturePtr sig;
  DagPtr dag;
  LetterIds values;                 // per vertex
  std::vector<Diagram> mechanisms;  // per vertex: values of parents (vertex order) -> value
  std::vector<int> sources;         // S
  std::vector<int> targets;         // T
};

Report validate(const EffectSpec& spec);

/// Spec whose mechanisms are the given generators.
EffectSpec make_effect_spec(const SignaturePtr& sig, const DagPtr& dag, LetterIds values,
                            const std::vector<GenId>& mechanisms, std::vector<int> sources,
                            std::vector<int> targets);

/// The unique multiplier a -> a^m: a discard for m = 0, the identity for
/// m = 1, otherwise a left comb of m - 1 duplicates.
Diagram multiplier_power(const SignaturePtr& sig, LetterId a, int m);

/// The unique multiplier w -> v for singular w whose letters cover v.
Diagram multiplier_singular(const SignaturePtr& sig, const LetterIds& w, const LetterIds& v);
Diagram multiplier_singular(const SignaturePtr& sig, const Word& w, const Word& v);

/// G_{S->T} in terms of the original vertex ids: S, T and every vertex on a
/// directed path that ends in T without passing through or ending in S.
struct Restriction {
  std::vector<int> vertices;                // sorted
  std::vector<std::pair<int, int>> arrows;  // sorted
  std::vector<std::vector<int>> children;   // indexed by vertex, vertex order
  bool contains(int v) const;
};

Restriction restriction(const OrderedDag& dag, const std::vector<int>& sources, const std::vector<int>& targets);
/// The restricted graph on its own, vertex names kept.
OrderedDag restrict_dag(const EffectSpec& spec);

/// The fused effect diagram together with its component structure.
struct EffectDiagram {
  Diagram diagram;
  std::vector<int> component;           // node -> vertex whose component holds it
  std::vector<char> mechanism;          // node belongs to a mechanism (not a multiplier)
  std::vector<int> carries;             // wire -> vertex whose value it carries, -1 inside mechanisms
};

EffectDiagram build_effect(const EffectSpec& spec);
/// [w_T || w_S]: dom w_S and cod w_T in vertex order. Markov minimal.
Diagram effect(const EffectSpec& spec);

/// [tau(T) || sigma(S)] from e = effect(spec): sigma and tau list the
/// vertices of S and T in the new order.
Diagram twist(const EffectSpec& spec, const Diagram& e, const std::vector<int>& sigma, const std::vector<int>& tau);

struct SplitPoint {
  std::vector<int> cut_targets;  // T_i
  EffectSpec lower;              // [T_i || S]
  EffectSpec upper;              // [T || T_i]
};

/// Splits [T || S] below the mechanism of i: T_i holds the vertices carried
/// by the cut of the level generated by that mechanism. Requires i in
/// G_{S->T} but not in S.
SplitPoint split_point(const EffectSpec& spec, int i);

/// The spec with letters renamed and mechanisms pushed through f. Every
/// letter must map to a single letter.
EffectSpec map_spec(const EffectSpec& spec, const MarkovFunctor& f);
/// f applied node by node to effect(spec).
Diagram map_effect(const EffectSpec& spec, const MarkovFunctor& f);

}  // namespace freemarkov
