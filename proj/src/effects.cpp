#include "freemarkov/effects.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

namespace freemarkov {

namespace {

bool sorted_unique(const std::vector<int>& xs, int n) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < 0 || xs[i] >= n) return false;
    if (i > 0 && xs[i - 1] >= xs[i]) return false;
  }
  return true;
}

bool member(const std::vector<int>& sorted, int v) { return std::binary_search(sorted.begin(), sorted.end(), v); }

LetterIds parent_word(const EffectSpec& spec, int v) {
  LetterIds out;
  for (int p : spec.dag->parents(v)) out.push_back(spec.values[p]);
  return out;
}

void require_valid(const EffectSpec& spec, const char* op) {
  auto r = validate(spec);
  if (!r.ok()) throw Error(std::string(op) + ": " + r.str());
}

// Copies m into b, its dom fed by `ins`; returns the sources of its cod.
std::vector<Port> embed(DiagramBuilder& b, const Diagram& m, const std::vector<Port>& ins, std::vector<int>& nodes) {
  std::vector<int> ids(m.node_count());
  for (int x = 0; x < m.node_count(); ++x) {
    ids[x] = b.add_node(m.value(x));
    nodes.push_back(ids[x]);
  }
  std::vector<Port> outs(m.cod().size());
  for (const Wire& w : m.wires()) {
    Port src = w.src.boundary() ? ins[w.src.index] : Port{ids[w.src.node], w.src.index};
    if (w.dst.boundary()) {
      outs[w.dst.index] = src;
    } else {
      b.connect(src, {ids[w.dst.node], w.dst.index});
    }
  }
  return outs;
}

// Left comb of duplicates fed by src; returns the m copies in cod order.
std::vector<Port> comb(DiagramBuilder& b, LetterId a, Port src, int m, std::vector<int>& nodes) {
  if (m == 0) {
    int x = b.add_node(NodeValue::disc(a));
    nodes.push_back(x);
    b.connect(src, {x, 0});
    return {};
  }
  std::vector<Port> right;
  Port cur = src;
  for (int k = 0; k < m - 1; ++k) {
    int x = b.add_node(NodeValue::dup(a));
    nodes.push_back(x);
    b.connect(cur, {x, 0});
    cur = {x, 0};
    right.push_back({x, 1});
  }
  std::vector<Port> outs{cur};
  outs.insert(outs.end(), right.rbegin(), right.rend());
  return outs;
}

}  // namespace

Report validate(const EffectSpec& spec) {
  Report r;
  if (!spec.sig || !spec.dag) {
    r.add("effect spec without signature or graph");
    return r;
  }
  const int n = static_cast<int>(spec.dag->size());
  if (static_cast<int>(spec.values.size()) != n) r.add("values do not cover the vertices");
  if (static_cast<int>(spec.mechanisms.size()) != n) r.add("mechanisms do not cover the vertices");
  if (!sorted_unique(spec.sources, n)) r.add("sources are not a sorted set of vertices");
  if (!sorted_unique(spec.targets, n)) r.add("targets are not a sorted set of vertices");
  if (!r.ok()) return r;
  for (int v = 0; v < n; ++v) {
    LetterId a = spec.values[v];
    if (a < 0 || a >= static_cast<LetterId>(spec.sig->letter_count())) {
      r.add("vertex " + spec.dag->name(v) + " has an undeclared value");
      continue;
    }
    const Diagram& k = spec.mechanisms[v];
    if (k.sig_ptr() != spec.sig && !(k.sig() == *spec.sig)) {
      r.add("mechanism of " + spec.dag->name(v) + " is over another signature");
      continue;
    }
    bool parents_ok = std::all_of(spec.dag->parents(v).begin(), spec.dag->parents(v).end(), [&](int p) {
      return spec.values[p] >= 0 && spec.values[p] < static_cast<LetterId>(spec.sig->letter_count());
    });
    if (parents_ok && (k.dom() != parent_word(spec, v) || k.cod() != LetterIds{a})) {
      r.add("mechanism of " + spec.dag->name(v) + " is not typed parents -> vertex");
    }
    auto wf = well_formed(k);
    if (!wf.ok()) r.add("mechanism of " + spec.dag->name(v) + " is ill-formed: " + wf.str());
  }
  return r;
}

EffectSpec make_effect_spec(const SignaturePtr& sig, const DagPtr& dag, LetterIds values,
                            const std::vector<GenId>& mechanisms, std::vector<int> sources,
                            std::vector<int> targets) {
  EffectSpec spec{sig, dag, std::move(values), {}, std::move(sources), std::move(targets)};
  for (GenId g : mechanisms) spec.mechanisms.push_back(atom(sig, NodeValue::gen(g)));
  return spec;
}

Diagram multiplier_power(const SignaturePtr& sig, LetterId a, int m) {
  if (m < 0) throw Error("multiplier_power: negative power");
  DiagramBuilder b(sig);
  Port src{kBoundary, b.add_dom(a)};
  std::vector<int> nodes;
  for (const Port& p : comb(b, a, src, m, nodes)) b.connect(p, {kBoundary, b.add_cod(a)});
  return b.build();
}

Diagram multiplier_singular(const SignaturePtr& sig, const LetterIds& w, const LetterIds& v) {
  std::map<LetterId, int> position;
  for (int i = 0; i < static_cast<int>(w.size()); ++i) {
    if (!position.emplace(w[i], i).second) throw Error("multiplier_singular: source word is not singular");
  }
  std::vector<int> count(w.size(), 0);
  for (LetterId a : v) {
    auto it = position.find(a);
    if (it == position.end()) throw Error("multiplier_singular: letter missing from the source word");
    ++count[it->second];
  }
  Diagram out = identity(sig, LetterIds{});
  std::vector<int> first(w.size());
  LetterIds grouped;
  for (std::size_t i = 0; i < w.size(); ++i) {
    first[i] = static_cast<int>(grouped.size());
    grouped.insert(grouped.end(), count[i], w[i]);
    out = tensor(out, multiplier_power(sig, w[i], count[i]));
  }
  // Route the k-th copy of each letter to its k-th occurrence in v.
  std::vector<int> used(w.size(), 0), source;
  for (LetterId a : v) {
    int i = position[a];
    source.push_back(first[i] + used[i]++);
  }
  return compose(permutation(sig, grouped, source), out);
}

Diagram multiplier_singular(const SignaturePtr& sig, const Word& w, const Word& v) {
  return multiplier_singular(sig, sig->encode(w), sig->encode(v));
}

bool Restriction::contains(int v) const { return member(vertices, v); }

Restriction restriction(const OrderedDag& dag, const std::vector<int>& sources, const std::vector<int>& targets) {
  const int n = static_cast<int>(dag.size());
  // on_path[v]: v is not in S and a path from v into T avoids S.
  std::vector<char> on_path(n, 0);
  for (int v = n - 1; v >= 0; --v) {
    if (member(sources, v)) continue;
    if (member(targets, v)) {
      on_path[v] = 1;
      continue;
    }
    for (int c : dag.children(v)) on_path[v] = on_path[v] || on_path[c];
  }
  Restriction r;
  r.children.resize(n);
  for (int v = 0; v < n; ++v) {
    if (on_path[v] || member(sources, v) || member(targets, v)) r.vertices.push_back(v);
  }
  for (const auto& [p, c] : dag.arrows()) {
    if (on_path[c]) {
      r.arrows.push_back({p, c});
      r.children[p].push_back(c);
    }
  }
  for (auto& cs : r.children) std::sort(cs.begin(), cs.end());
  return r;
}

OrderedDag restrict_dag(const EffectSpec& spec) {
  require_valid(spec, "restrict_dag");
  auto r = restriction(*spec.dag, spec.sources, spec.targets);
  std::vector<std::string> names;
  std::vector<int> index(spec.dag->size(), -1);
  for (int v : r.vertices) {
    index[v] = static_cast<int>(names.size());
    names.push_back(spec.dag->name(v));
  }
  std::vector<std::pair<int, int>> arrows;
  for (const auto& [p, c] : r.arrows) arrows.push_back({index[p], index[c]});
  return dag_from_indices(std::move(names), arrows);
}

EffectDiagram build_effect(const EffectSpec& spec) {
  require_valid(spec, "effect");
  const OrderedDag& dag = *spec.dag;
  auto r = restriction(dag, spec.sources, spec.targets);
  DiagramBuilder b(spec.sig);
  std::vector<std::deque<Port>> copies(dag.size());
  std::map<Port, int> carries;  // builder source port -> vertex
  std::vector<int> component;
  std::vector<char> in_mechanism;
  auto note = [&](const std::vector<int>& nodes, int v, bool mech) {
    for (int x : nodes) {
      if (static_cast<int>(component.size()) <= x) {
        component.resize(x + 1, -1);
        in_mechanism.resize(x + 1, 0);
      }
      component[x] = v;
      in_mechanism[x] = mech;
    }
  };

  for (int v : r.vertices) {
    const LetterId a = spec.values[v];
    const bool in_s = member(spec.sources, v);
    const bool in_t = member(spec.targets, v);
    Port src;
    if (in_s) {
      src = {kBoundary, b.add_dom(a)};
    } else {
      std::vector<Port> ins;
      for (int p : dag.parents(v)) {
        if (copies[p].empty()) throw Error("effect: parent copies exhausted");
        ins.push_back(copies[p].front());
        copies[p].pop_front();
      }
      std::vector<int> nodes;
      src = embed(b, spec.mechanisms[v], ins, nodes).at(0);
      note(nodes, v, true);
    }
    carries[src] = v;
    const int o = static_cast<int>(r.children[v].size()) + (in_t ? 1 : 0);
    std::vector<int> nodes;
    auto outs = comb(b, a, src, o, nodes);
    note(nodes, v, false);
    for (int x : nodes)
      for (int k = 0; k < b.out_arity(x); ++k) carries[{x, k}] = v;
    for (const Port& p : outs) {
      carries[p] = v;
      copies[v].push_back(p);
    }
  }
  for (int t : spec.targets) {
    if (copies[t].size() != 1) throw Error("effect: port accounting failed at " + dag.name(t));
    b.connect(copies[t].front(), {kBoundary, b.add_cod(spec.values[t])});
    copies[t].clear();
  }
  for (int v : r.vertices) {
    if (!copies[v].empty()) throw Error("effect: port accounting failed at " + dag.name(v));
  }

  EffectDiagram out{b.build(), {}, {}, {}};
  component.resize(out.diagram.node_count(), -1);
  in_mechanism.resize(out.diagram.node_count(), 0);
  out.component = std::move(component);
  out.mechanism = std::move(in_mechanism);
  for (const Wire& w : out.diagram.wires()) {
    auto it = carries.find(w.src);
    out.carries.push_back(it == carries.end() ? -1 : it->second);
  }
  return out;
}

Diagram effect(const EffectSpec& spec) { return build_effect(spec).diagram; }

Diagram twist(const EffectSpec& spec, const Diagram& e, const std::vector<int>& sigma, const std::vector<int>& tau) {
  auto reorder = [&](const std::vector<int>& set, const std::vector<int>& perm, const char* what) {
    std::vector<int> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != set) throw Error(std::string("twist: ") + what + " is not a permutation of its vertex set");
  };
  reorder(spec.sources, sigma, "sigma");
  reorder(spec.targets, tau, "tau");
  auto position = [](const std::vector<int>& xs, int v) {
    return static_cast<int>(std::find(xs.begin(), xs.end(), v) - xs.begin());
  };
  LetterIds sigma_word, t_word;
  for (int v : sigma) sigma_word.push_back(spec.values[v]);
  for (int v : spec.targets) t_word.push_back(spec.values[v]);
  std::vector<int> pre, post;
  for (int v : spec.sources) pre.push_back(position(sigma, v));
  for (int v : tau) post.push_back(position(spec.targets, v));
  return compose(permutation(spec.sig, t_word, post), compose(e, permutation(spec.sig, sigma_word, pre)));
}

SplitPoint split_point(const EffectSpec& spec, int i) {
  require_valid(spec, "split_point");
  auto r = restriction(*spec.dag, spec.sources, spec.targets);
  if (i < 0 || i >= static_cast<int>(spec.dag->size()) || !r.contains(i)) {
    throw Error("split_point: vertex outside the restricted graph");
  }
  if (member(spec.sources, i)) throw Error("split_point: vertex is a source");
  auto e = build_effect(spec);
  const Diagram& d = e.diagram;
  std::vector<int> mech;
  for (int x = 0; x < d.node_count(); ++x)
    if (e.component[x] == i && e.mechanism[x]) mech.push_back(x);
  if (mech.empty()) throw Error("split_point: mechanism of the vertex has no nodes");
  Level level = down_closure(d, mech);
  std::vector<int> ti;
  for (int w : cut(d, level)) {
    if (e.carries[w] < 0) throw Error("split_point: the level cuts through a mechanism");
    ti.push_back(e.carries[w]);
  }
  std::sort(ti.begin(), ti.end());
  ti.erase(std::unique(ti.begin(), ti.end()), ti.end());
  SplitPoint out{ti, spec, spec};
  out.lower.targets = ti;
  out.upper.sources = ti;
  return out;
}

EffectSpec map_spec(const EffectSpec& spec, const MarkovFunctor& f) {
  require_valid(spec, "map_spec");
  auto r = validate_functor(f);
  if (!r.ok()) throw Error("map_spec: " + r.str());
  EffectSpec out{f.target, spec.dag, {}, {}, spec.sources, spec.targets};
  for (LetterId a : spec.values) {
    if (f.letters[a].size() != 1) throw Error("map_spec: letter image is not a single letter");
    out.values.push_back(f.letters[a][0]);
  }
  for (const Diagram& k : spec.mechanisms) out.mechanisms.push_back(apply_functor(f, k));
  return out;
}

Diagram map_effect(const EffectSpec& spec, const MarkovFunctor& f) {
  map_spec(spec, f);  // shape checks
  return apply_functor(f, effect(spec));
}

}  // namespace freemarkov
