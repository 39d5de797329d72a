#pragma once

#include <vector>

#include "freemarkov/effects.hpp"
#include "freemarkov/markov.hpp"

namespace freemarkov {

/// Cau(G): one letter per vertex (same name, same index) and one mechanism
/// generator k_<v> : pa(v) -> v per vertex (same index).
struct CausalModel {
  DagPtr dag;
  SignaturePtr sig;
};

CausalModel cau(const DagPtr& dag);
CausalModel cau(const OrderedDag& dag);

std::string mechanism_name(const std::string& vertex);

/// Vertex ids of a singular variable; throws Error otherwise.
std::vector<int> variable_vertices(const CausalModel& model, const Word& v);

EffectSpec causal_spec(const CausalModel& model, std::vector<int> sources, std::vector<int> targets);

/// [w || v], with dom v and cod w in the given orders.
Diagram causal_effect(const CausalModel& model, const Word& v, const Word& w);

/// The phi-refinement phi*: Cau(G) -> Cau(H) for phi: H -> G.
struct Refinement {
  DagHom hom;
  CausalModel source_model;  // over G = hom.target
  CausalModel target_model;  // over H = hom.source
  MarkovFunctor functor;
};

Refinement make_refinement(const DagHom& phi);

/// phi^-1(v): preimages of each occurrence, each in vertex order of H.
Word preimage_word(const Refinement& r, const Word& v);

Diagram refine(const Refinement& r, const Diagram& d);

/// The i_v-intervention: G with the arrows into v removed, and the
/// refinement along the embedding into G.
struct Intervention {
  CausalModel model;  // over G_v-bar
  Refinement refinement;
};

Intervention intervene(const CausalModel& model, const Word& v);

/// The expected image of k_u under the intervention at a variable holding
/// u: the new exogenous mechanism tensored with discards on the old parents.
Diagram intervened_mechanism(const Intervention& iv, int u);

bool check_cond_preserve(const Refinement& r, const Word& v, const Word& w);

/// psi: G'' -> G', phi: G' -> G. Compares psi*(phi*(g)) with the
/// refinement along the composite G'' -> G on every generator g of Cau(G).
bool check_functoriality(const DagHom& psi, const DagHom& phi);

/// The generators of Cau(G): per vertex its identity, discard, duplicate and
/// mechanism, as one-node (or no-node) diagrams.
std::vector<Diagram> causal_generators(const CausalModel& model);

}  // namespace freemarkov
