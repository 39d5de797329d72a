#include "freemarkov/markov.hpp"

#include <algorithm>
#include <functional>

#include "canonical.hpp"

namespace freemarkov {

// --- structural multipliers ------------------------------------------------------

Diagram dup_word(const SignaturePtr& sig, const LetterIds& w) {
  if (w.empty()) return identity(sig, w);
  LetterIds a{w.front()};
  if (w.size() == 1) return atom(sig, NodeValue::dup(w.front()));
  LetterIds rest(w.begin() + 1, w.end());
  // δ_{a·B} = (1_a ⊗ σ_{a,B} ⊗ 1_B) ∘ (δ_a ⊗ δ_B)
  auto split = tensor(atom(sig, NodeValue::dup(w.front())), dup_word(sig, rest));
  auto shuffle = tensor(identity(sig, a), tensor(symmetry(sig, a, rest), identity(sig, rest)));
  return compose(shuffle, split);
}

Diagram dup_word(const SignaturePtr& sig, const Word& w) { return dup_word(sig, sig->encode(w)); }

Diagram disc_word(const SignaturePtr& sig, const LetterIds& w) {
  Diagram out = identity(sig, LetterIds{});
  for (LetterId a : w) out = tensor(out, atom(sig, NodeValue::disc(a)));
  return out;
}

Diagram disc_word(const SignaturePtr& sig, const Word& w) { return disc_word(sig, sig->encode(w)); }

std::vector<Template> markov_templates(const SignaturePtr& sig) {
  std::vector<Template> out;
  auto both = [&](Template t) {
    Template r = t.reversed();
    out.push_back(std::move(t));
    out.push_back(std::move(r));
  };
  auto empty = identity(sig, LetterIds{});
  out.push_back({empty, empty, {}, {}, "empty"});
  for (LetterId a = 0; a < static_cast<LetterId>(sig->letter_count()); ++a) {
    const std::string& name = sig->letter_name(a);
    LetterIds w{a};
    auto dup = atom(sig, NodeValue::dup(a));
    auto disc = atom(sig, NodeValue::disc(a));
    auto id = identity(sig, w);
    both({compose(tensor(dup, id), dup), compose(tensor(id, dup), dup), {0}, {0, 1, 2}, "coassoc(" + name + ")"});
    both({compose(tensor(disc, id), dup), id, {0}, {0}, "counit-left(" + name + ")"});
    both({compose(tensor(id, disc), dup), id, {0}, {0}, "counit-right(" + name + ")"});
    both({dup, dup, {0}, {1, 0}, "cocomm(" + name + ")"});
  }
  for (GenId f = 0; f < static_cast<GenId>(sig->generator_count()); ++f) {
    const auto& dom = sig->gen_dom(f);
    std::vector<int> alpha(dom.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) alpha[i] = static_cast<int>(i);
    both({compose(disc_word(sig, sig->gen_cod(f)), atom(sig, NodeValue::gen(f))), disc_word(sig, dom), alpha, {},
          "discard-nat(" + sig->generator_name(f) + ")"});
  }
  return out;
}

// --- quasi-terminal analysis -----------------------------------------------------

namespace {

std::vector<char> quasi_terminal_mask(const Diagram& d) {
  auto order = topological_order(d);
  std::vector<char> in(d.node_count(), 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int x = *it;
    const int outs = d.out_arity(x);
    if (outs == 0) {
      in[x] = 1;
      continue;
    }
    auto dies = [&](int k) {
      Port t = d.target_of({x, k});
      return !t.boundary() && in[t.node];
    };
    if (d.value(x).kind == NodeKind::dup) {
      in[x] = dies(0) || dies(1);
    } else {
      bool all = true;
      for (int k = 0; k < outs && all; ++k) all = dies(k);
      in[x] = all;
    }
  }
  return in;
}

}  // namespace

std::vector<int> quasi_terminal_set(const Diagram& d) {
  auto mask = quasi_terminal_mask(d);
  std::vector<int> out;
  for (int x = 0; x < d.node_count(); ++x) {
    if (mask[x]) out.push_back(x);
  }
  return out;
}

bool is_markov_minimal(const Diagram& d) {
  auto mask = quasi_terminal_mask(d);
  for (int x = 0; x < d.node_count(); ++x) {
    if (mask[x] && d.out_arity(x) > 0) return false;
  }
  return true;
}

// --- normalization ---------------------------------------------------------------

namespace {

struct Redex {
  int node;
  int prong;  // -1 for a discard redex
};

bool feeds_disc(const DiagramBuilder& b, Port out) {
  Port t = b.target_of(out);
  return !t.boundary() && b.value(t.node).kind == NodeKind::disc;
}

void find_redexes(const DiagramBuilder& b, std::vector<Redex>& out, bool first_only) {
  out.clear();
  for (int x = 0; x < b.node_capacity(); ++x) {
    if (!b.alive(x)) continue;
    NodeValue v = b.value(x);
    if (v.kind == NodeKind::dup) {
      for (int p = 0; p < 2; ++p) {
        if (feeds_disc(b, {x, p})) {
          out.push_back({x, p});
          if (first_only) return;
        }
      }
    } else if (v.kind == NodeKind::gen) {
      bool all = true;
      for (int k = 0; k < b.out_arity(x) && all; ++k) all = feeds_disc(b, {x, k});
      if (all) {
        out.push_back({x, -1});
        if (first_only) return;
      }
    }
  }
}

void contract(DiagramBuilder& b, Redex r) {
  const int x = r.node;
  if (r.prong >= 0) {
    Port disc = b.target_of({x, r.prong});
    Port src = b.source_of({x, 0});
    Port other = b.target_of({x, 1 - r.prong});
    b.remove_node(disc.node);
    b.remove_node(x);
    b.connect(src, other);
    return;
  }
  for (int k = 0; k < b.out_arity(x); ++k) b.remove_node(b.target_of({x, k}).node);
  std::vector<Port> srcs;
  for (int k = 0; k < b.in_arity(x); ++k) srcs.push_back(b.source_of({x, k}));
  const auto& dom = b.sig().gen_dom(b.value(x).id);
  b.remove_node(x);
  for (std::size_t k = 0; k < srcs.size(); ++k) {
    int y = b.add_node(NodeValue::disc(dom[k]));
    b.connect(srcs[k], {y, 0});
  }
}

Diagram run_normalize(const Diagram& d, std::mt19937_64* rng, std::vector<Diagram>* trace) {
  DiagramBuilder b(d);
  std::vector<Redex> redexes;
  if (trace) trace->push_back(d);
  for (;;) {
    find_redexes(b, redexes, rng == nullptr);
    if (redexes.empty()) break;
    Redex r = redexes.front();
    if (rng) r = redexes[std::uniform_int_distribution<std::size_t>(0, redexes.size() - 1)(*rng)];
    contract(b, r);
    if (trace) trace->push_back(b.build());
  }
  return b.build();
}

}  // namespace

Diagram normalize(const Diagram& d) { return run_normalize(d, nullptr, nullptr); }

Diagram normalize(const Diagram& d, std::mt19937_64& rng) { return run_normalize(d, &rng, nullptr); }

std::vector<Diagram> normalize_trace(const Diagram& d, std::mt19937_64* rng) {
  std::vector<Diagram> trace;
  run_normalize(d, rng, &trace);
  return trace;
}

// --- copy bundles ----------------------------------------------------------------

namespace {

constexpr std::int32_t kBundleKind = 3;

struct Contracted {
  detail::PortGraph graph;
  std::vector<int> node_of;  // original node -> contracted node
  std::vector<CongruenceForm::Node> nodes;
};

// Contracts maximal duplicate trees. A duplicate belongs to the tree of the
// nearest ancestor duplicate whose input is not fed by a duplicate.
Contracted contract_bundles(const Diagram& d) {
  const int n = d.node_count();
  auto is_dup = [&](int x) { return d.value(x).kind == NodeKind::dup; };
  std::vector<int> root(n, -1);
  std::function<int(int)> find_root = [&](int x) {
    if (root[x] >= 0) return root[x];
    Port s = d.source_of({x, 0});
    root[x] = (!s.boundary() && is_dup(s.node)) ? find_root(s.node) : x;
    return root[x];
  };
  Contracted c;
  c.node_of.assign(n, -1);
  std::vector<int> tree_size(n, 0);
  for (int x = 0; x < n; ++x) {
    if (is_dup(x)) ++tree_size[find_root(x)];
  }
  for (int x = 0; x < n; ++x) {
    if (is_dup(x) && root[x] != x) continue;
    CongruenceForm::Node node;
    node.value = d.value(x);
    node.bundle = is_dup(x);
    node.outputs = is_dup(x) ? tree_size[x] + 1 : d.out_arity(x);
    std::int32_t label = is_dup(x) ? (kBundleKind << 24) | d.value(x).id : detail::node_label(d.value(x));
    c.node_of[x] = c.graph.add_node(label, d.in_arity(x), node.outputs, node.bundle);
    c.nodes.push_back(std::move(node));
  }
  for (int x = 0; x < n; ++x) {
    if (is_dup(x) && root[x] != x) {
      c.node_of[x] = c.node_of[root[x]];
    }
    c.nodes[c.node_of[x]].merged.push_back(x);
  }
  auto& g = c.graph;
  g.dom = d.dom();
  g.cod = d.cod();
  g.dom_dst.resize(g.dom.size());
  g.cod_src.resize(g.cod.size());
  std::vector<int> next_port(c.nodes.size(), 0);
  for (const auto& [src, dst] : d.wires()) {
    bool src_dup = !src.boundary() && is_dup(src.node);
    bool dst_dup = !dst.boundary() && is_dup(dst.node);
    if (src_dup && dst_dup) continue;  // inside a tree
    detail::End s;
    if (src.boundary()) {
      s = {kBoundary, src.index};
    } else if (src_dup) {
      int b = c.node_of[src.node];
      s = {b, next_port[b]++};
    } else {
      s = {c.node_of[src.node], src.index};
    }
    detail::End t = dst.boundary() ? detail::End{kBoundary, dst.index} : detail::End{c.node_of[dst.node], dst.index};
    if (dst_dup) t.port = 0;
    if (s.node == kBoundary) g.dom_dst[s.port] = t;
    else g.out_dst[g.out_off[s.node] + s.port] = t;
    if (t.node == kBoundary) g.cod_src[t.port] = s;
    else g.in_src[g.in_off[t.node] + t.port] = s;
  }
  return c;
}

}  // namespace

CongruenceForm congruence_form(const Diagram& d) {
  if (!is_markov_minimal(d)) throw Error("congruence_form: diagram is not Markov minimal");
  auto c = contract_bundles(d);
  CongruenceForm out;
  out.nodes = std::move(c.nodes);
  out.code = detail::canonicalize(c.graph).code;
  out.certificate = detail::render_code(out.code);
  return out;
}

bool markov_congruent(const Diagram& a, const Diagram& b) {
  if (a.dom() != b.dom() || a.cod() != b.cod()) {
    // Still reject non-minimal inputs, as documented.
    congruence_form(a);
    congruence_form(b);
    return false;
  }
  return congruence_form(a).code == congruence_form(b).code;
}

std::vector<std::int32_t> equivalence_code(const Diagram& d) {
  return detail::canonicalize(contract_bundles(normalize(d)).graph).code;
}

bool equivalent(const Diagram& a, const Diagram& b) {
  if (a.dom() != b.dom() || a.cod() != b.cod()) return false;
  return equivalence_code(a) == equivalence_code(b);
}

// --- invariants ------------------------------------------------------------------

CongruenceInvariants congruence_invariants(const Diagram& d) {
  auto mask = quasi_terminal_mask(d);
  CongruenceInvariants out;
  for (int x = 0; x < d.node_count(); ++x) {
    if (!mask[x]) out.values.push_back(d.value(x));
  }
  std::sort(out.values.begin(), out.values.end());

  auto c = contract_bundles(d);
  const auto& g = c.graph;
  std::vector<char> alive(g.size(), 0);
  for (int y = 0; y < g.size(); ++y) {
    for (int x : c.nodes[y].merged) alive[y] = alive[y] || !mask[x];
  }
  // Value sequences of every directed path from an output port into cod,
  // keyed by the cod port reached.
  std::function<void(detail::End, std::vector<std::int32_t>&, std::vector<std::vector<std::int32_t>>&)> walk =
      [&](detail::End t, std::vector<std::int32_t>& seq, std::vector<std::vector<std::int32_t>>& acc) {
        if (t.node == kBoundary) {
          auto full = seq;
          full.push_back(-1 - t.port);
          acc.push_back(std::move(full));
          return;
        }
        if (alive[t.node]) seq.push_back(g.label[t.node]);
        for (int p = 0; p < g.out_arity(t.node); ++p) walk(g.out_dst[g.out_off[t.node] + p], seq, acc);
        if (alive[t.node]) seq.pop_back();
      };
  std::vector<std::int32_t> seq;
  for (int i = 0; i < static_cast<int>(g.dom.size()); ++i) {
    std::vector<std::vector<std::int32_t>> acc;
    walk(g.dom_dst[i], seq, acc);
    for (auto& p : acc) {
      p.insert(p.begin(), -1000 - i);
      out.paths.push_back(std::move(p));
    }
  }
  for (int y = 0; y < g.size(); ++y) {
    if (g.in_arity(y) != 0) continue;
    std::vector<std::vector<std::int32_t>> acc;
    walk({y, 0}, seq, acc);
    for (auto& p : acc) out.paths.push_back(std::move(p));
  }
  std::sort(out.paths.begin(), out.paths.end());

  for (int y = 0; y < g.size(); ++y) {
    if (!alive[y] || g.out_arity(y) < 2) continue;
    std::vector<std::vector<std::vector<std::int32_t>>> per_port(g.out_arity(y));
    for (int p = 0; p < g.out_arity(y); ++p) walk(g.out_dst[g.out_off[y] + p], seq, per_port[p]);
    for (int p = 0; p < g.out_arity(y); ++p) {
      for (int q = p + 1; q < g.out_arity(y); ++q) {
        for (const auto& u : per_port[p]) {
          for (const auto& v : per_port[q]) {
            const auto& lo = std::min(u, v);
            const auto& hi = std::max(u, v);
            std::vector<std::int32_t> s{g.label[y]};
            s.insert(s.end(), lo.begin(), lo.end());
            s.push_back(INT32_MIN);
            s.insert(s.end(), hi.begin(), hi.end());
            out.splits.push_back(std::move(s));
          }
        }
      }
    }
  }
  std::sort(out.splits.begin(), out.splits.end());
  return out;
}

// --- strict functors ---------------------------------------------------------------

Report validate_functor(const MarkovFunctor& f) {
  Report report;
  if (!f.source || !f.target) {
    report.add("functor without source or target signature");
    return report;
  }
  if (f.letters.size() != f.source->letter_count()) report.add("letter images do not cover the source alphabet");
  if (f.generators.size() != f.source->generator_count()) report.add("generator images do not cover the source");
  if (!report.ok()) return report;
  auto image = [&](const LetterIds& w) {
    LetterIds out;
    for (LetterId a : w) out.insert(out.end(), f.letters[a].begin(), f.letters[a].end());
    return out;
  };
  for (GenId g = 0; g < static_cast<GenId>(f.generators.size()); ++g) {
    const auto& d = f.generators[g];
    const auto& name = f.source->generator_name(g);
    if (d.sig_ptr() != f.target && !(d.sig() == *f.target)) {
      report.add("image of " + name + " is over another signature");
      continue;
    }
    if (d.dom() != image(f.source->gen_dom(g)) || d.cod() != image(f.source->gen_cod(g))) {
      report.add("shape mismatch for generator " + name);
    }
  }
  return report;
}

Diagram apply_functor(const MarkovFunctor& f, const Diagram& d) {
  const auto& tsig = f.target;
  const int n = d.node_count();
  // Image diagram per node and strand offsets of its ports.
  std::vector<Diagram> image(n);
  std::vector<std::vector<int>> in_off(n), out_off(n);
  auto width = [&](LetterId a) { return static_cast<int>(f.letters[a].size()); };
  auto word = [&](const std::vector<LetterId>& w) {
    LetterIds out;
    for (LetterId a : w) out.insert(out.end(), f.letters[a].begin(), f.letters[a].end());
    return out;
  };
  for (int x = 0; x < n; ++x) {
    NodeValue v = d.value(x);
    switch (v.kind) {
      case NodeKind::dup: image[x] = dup_word(tsig, f.letters[v.id]); break;
      case NodeKind::disc: image[x] = disc_word(tsig, f.letters[v.id]); break;
      case NodeKind::gen: image[x] = f.generators[v.id]; break;
    }
    in_off[x].push_back(0);
    for (int k = 0; k < d.in_arity(x); ++k) in_off[x].push_back(in_off[x].back() + width(d.in_letter(x, k)));
    out_off[x].push_back(0);
    for (int k = 0; k < d.out_arity(x); ++k) out_off[x].push_back(out_off[x].back() + width(d.out_letter(x, k)));
    if (static_cast<int>(image[x].dom().size()) != in_off[x].back() ||
        static_cast<int>(image[x].cod().size()) != out_off[x].back()) {
      throw Error("apply_functor: image of " + to_string(d.sig(), v) + " has the wrong shape");
    }
  }
  std::vector<int> dom_off{0};
  for (LetterId a : d.dom()) dom_off.push_back(dom_off.back() + width(a));

  DiagramBuilder b(tsig);
  for (LetterId a : word(d.dom())) b.add_dom(a);
  for (LetterId a : word(d.cod())) b.add_cod(a);
  std::vector<int> base(n);
  for (int x = 0; x < n; ++x) {
    base[x] = b.node_capacity();
    for (NodeValue v : image[x].values()) b.add_node(v);
  }
  // Target-side source of strand s of the wire starting at `src` in d.
  std::function<Port(Port, int)> resolve = [&](Port src, int s) -> Port {
    if (src.boundary()) return {kBoundary, dom_off[src.index] + s};
    const int x = src.node;
    Port p = image[x].source_of({kBoundary, out_off[x][src.index] + s});
    if (!p.boundary()) return {base[x] + p.node, p.index};
    // Loose strand inside the image: follow it back through x's inputs.
    int k = static_cast<int>(std::upper_bound(in_off[x].begin(), in_off[x].end(), p.index) - in_off[x].begin()) - 1;
    return resolve(d.source_of({x, k}), p.index - in_off[x][k]);
  };
  for (int x = 0; x < n; ++x) {
    const Diagram& img = image[x];
    for (const auto& w : img.wires()) {
      if (w.dst.boundary()) continue;  // resolved from the consumer side
      Port s;
      if (w.src.boundary()) {
        int k = static_cast<int>(std::upper_bound(in_off[x].begin(), in_off[x].end(), w.src.index) - in_off[x].begin()) - 1;
        s = resolve(d.source_of({x, k}), w.src.index - in_off[x][k]);
      } else {
        s = {base[x] + w.src.node, w.src.index};
      }
      b.connect(s, {base[x] + w.dst.node, w.dst.index});
    }
  }
  int cod_pos = 0;
  for (int j = 0; j < static_cast<int>(d.cod().size()); ++j) {
    Port src = d.source_of({kBoundary, j});
    for (int s = 0; s < width(d.cod()[j]); ++s) b.connect(resolve(src, s), {kBoundary, cod_pos++});
  }
  return b.build();
}

}  // namespace freemarkov
