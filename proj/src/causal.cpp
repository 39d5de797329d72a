#include "freemarkov/causal.hpp"

#include <algorithm>

namespace freemarkov {

std::string mechanism_name(const std::string& vertex) { return "k_" + vertex; }

CausalModel cau(const DagPtr& dag) {
  std::vector<Letter> letters = dag->vertices();
  std::vector<GeneratorDecl> gens;
  for (int v = 0; v < static_cast<int>(dag->size()); ++v) {
    Word parents;
    for (int p : dag->parents(v)) parents.push_back(dag->name(p));
    gens.push_back({mechanism_name(dag->name(v)), parents, {dag->name(v)}});
  }
  return {dag, make_signature(std::move(letters), std::move(gens))};
}

CausalModel cau(const OrderedDag& dag) { return cau(std::make_shared<const OrderedDag>(dag)); }

std::vector<int> variable_vertices(const CausalModel& model, const Word& v) {
  if (!is_singular(v)) throw Error("variable " + to_string(v) + " is not singular");
  std::vector<int> out;
  for (const auto& name : v) out.push_back(model.dag->index(name));
  return out;
}

EffectSpec causal_spec(const CausalModel& model, std::vector<int> sources, std::vector<int> targets) {
  std::sort(sources.begin(), sources.end());
  std::sort(targets.begin(), targets.end());
  const int n = static_cast<int>(model.dag->size());
  LetterIds values(n);
  std::vector<GenId> gens(n);
  for (int v = 0; v < n; ++v) values[v] = gens[v] = v;
  return make_effect_spec(model.sig, model.dag, std::move(values), gens, std::move(sources), std::move(targets));
}

Diagram causal_effect(const CausalModel& model, const Word& v, const Word& w) {
  auto s = variable_vertices(model, v);
  auto t = variable_vertices(model, w);
  auto spec = causal_spec(model, s, t);
  return twist(spec, effect(spec), s, t);
}

Refinement make_refinement(const DagHom& phi) {
  auto report = validate_hom(phi);
  if (!report.ok()) throw Error("refinement: " + report.str());
  Refinement r{phi, cau(phi.target), cau(phi.source), {}};
  const OrderedDag& g = *phi.target;
  const int n = static_cast<int>(g.size());
  std::vector<std::vector<int>> fibre(n);
  for (int u = 0; u < static_cast<int>(phi.vmap.size()); ++u) fibre[phi.vmap[u]].push_back(u);
  r.functor.source = r.source_model.sig;
  r.functor.target = r.target_model.sig;
  for (int v = 0; v < n; ++v) r.functor.letters.push_back(fibre[v]);
  for (int v = 0; v < n; ++v) {
    std::vector<int> pre_parents;
    for (int p : g.parents(v)) pre_parents.insert(pre_parents.end(), fibre[p].begin(), fibre[p].end());
    r.functor.generators.push_back(effect(causal_spec(r.target_model, pre_parents, fibre[v])));
  }
  return r;
}

Word preimage_word(const Refinement& r, const Word& v) {
  Word out;
  for (const auto& name : v) {
    int x = r.source_model.dag->index(name);
    for (LetterId u : r.functor.letters[x]) out.push_back(r.target_model.dag->name(u));
  }
  return out;
}

Diagram refine(const Refinement& r, const Diagram& d) {
  if (d.sig_ptr() != r.source_model.sig && !(d.sig() == *r.source_model.sig)) {
    throw Error("refine: diagram is not valued in the source model");
  }
  return apply_functor(r.functor, d);
}

Intervention intervene(const CausalModel& model, const Word& v) {
  auto cut_at = variable_vertices(model, v);
  std::sort(cut_at.begin(), cut_at.end());
  const OrderedDag& g = *model.dag;
  std::vector<std::pair<int, int>> kept;
  for (const auto& [p, c] : g.arrows())
    if (!std::binary_search(cut_at.begin(), cut_at.end(), c)) kept.push_back({p, c});
  auto bar = std::make_shared<const OrderedDag>(dag_from_indices(g.vertices(), kept));
  DagHom embedding{bar, model.dag, {}};
  for (int x = 0; x < static_cast<int>(g.size()); ++x) embedding.vmap.push_back(x);
  Intervention iv{cau(bar), make_refinement(embedding)};
  return iv;
}

Diagram intervened_mechanism(const Intervention& iv, int u) {
  const auto& sig = iv.model.sig;
  LetterIds old_parents(iv.refinement.source_model.dag->parents(u).begin(),
                        iv.refinement.source_model.dag->parents(u).end());
  if (!iv.model.dag->parents(u).empty()) throw Error("intervened_mechanism: vertex was not intervened on");
  return tensor(atom(sig, NodeValue::gen(u)), disc_word(sig, old_parents));
}

bool check_cond_preserve(const Refinement& r, const Word& v, const Word& w) {
  auto lhs = refine(r, causal_effect(r.source_model, v, w));
  auto rhs = causal_effect(r.target_model, preimage_word(r, v), preimage_word(r, w));
  return equivalent(lhs, rhs);
}

std::vector<Diagram> causal_generators(const CausalModel& model) {
  std::vector<Diagram> out;
  for (int v = 0; v < static_cast<int>(model.dag->size()); ++v) {
    out.push_back(identity(model.sig, LetterIds{v}));
    out.push_back(atom(model.sig, NodeValue::disc(v)));
    out.push_back(atom(model.sig, NodeValue::dup(v)));
    out.push_back(atom(model.sig, NodeValue::gen(v)));
  }
  return out;
}

bool check_functoriality(const DagHom& psi, const DagHom& phi) {
  if (!psi.target || !phi.source || !(*psi.target == *phi.source)) {
    throw Error("check_functoriality: homs are not composable");
  }
  auto rphi = make_refinement(phi);
  auto rpsi = make_refinement(psi);
  auto rcomp = make_refinement(compose_homs(phi, psi));
  for (const auto& g : causal_generators(rphi.source_model)) {
    if (!equivalent(refine(rpsi, refine(rphi, g)), refine(rcomp, g))) return false;
  }
  return true;
}

}  // namespace freemarkov
