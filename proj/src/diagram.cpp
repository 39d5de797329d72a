#include "freemarkov/diagram.hpp"

#include <algorithm>
#include <queue>

#include "canonical.hpp"

namespace freemarkov {

int input_arity(const Signature& sig, NodeValue v) {
  return v.kind == NodeKind::gen ? static_cast<int>(sig.gen_dom(v.id).size()) : 1;
}

int output_arity(const Signature& sig, NodeValue v) {
  switch (v.kind) {
    case NodeKind::gen: return static_cast<int>(sig.gen_cod(v.id).size());
    case NodeKind::dup: return 2;
    case NodeKind::disc: return 0;
  }
  return 0;
}

LetterId input_letter(const Signature& sig, NodeValue v, int port) {
  return v.kind == NodeKind::gen ? sig.gen_dom(v.id)[port] : v.id;
}

LetterId output_letter(const Signature& sig, NodeValue v, int port) {
  return v.kind == NodeKind::gen ? sig.gen_cod(v.id)[port] : v.id;
}

std::string to_string(const Signature& sig, NodeValue v) {
  switch (v.kind) {
    case NodeKind::gen: return "gen:" + sig.generator_name(v.id);
    case NodeKind::dup: return "dup:" + sig.letter_name(v.id);
    case NodeKind::disc: return "disc:" + sig.letter_name(v.id);
  }
  return {};
}

namespace {

void check_value(const Signature& sig, NodeValue v) {
  if (v.kind == NodeKind::gen) {
    if (v.id < 0 || v.id >= static_cast<int>(sig.generator_count())) {
      throw Error("unknown generator id " + std::to_string(v.id));
    }
  } else if (v.id < 0 || v.id >= static_cast<int>(sig.letter_count())) {
    throw Error("unknown letter id " + std::to_string(v.id));
  }
}

void check_letters(const Signature& sig, const LetterIds& w) {
  for (LetterId a : w) {
    if (a < 0 || a >= static_cast<int>(sig.letter_count())) {
      throw Error("unknown letter id " + std::to_string(a));
    }
  }
}

void check_same_sig(const Diagram& a, const Diagram& b, const char* op) {
  if (a.sig_ptr() != b.sig_ptr() && !(a.sig() == b.sig())) {
    throw Error(std::string(op) + ": diagrams over different signatures");
  }
}

}  // namespace

// --- Diagram ------------------------------------------------------------------

Diagram::Diagram(SignaturePtr sig, std::vector<NodeValue> nodes, LetterIds dom, LetterIds cod,
                 std::vector<Wire> wires)
    : sig_(std::move(sig)),
      nodes_(std::move(nodes)),
      dom_(std::move(dom)),
      cod_(std::move(cod)),
      wires_(std::move(wires)) {
  if (!sig_) throw Error("diagram without signature");
  check_letters(*sig_, dom_);
  check_letters(*sig_, cod_);
  in_off_.reserve(nodes_.size() + 1);
  out_off_.reserve(nodes_.size() + 1);
  for (NodeValue v : nodes_) {
    check_value(*sig_, v);
    in_off_.push_back(in_off_.back() + input_arity(*sig_, v));
    out_off_.push_back(out_off_.back() + output_arity(*sig_, v));
  }
  in_wire_.assign(in_off_.back(), -1);
  out_wire_.assign(out_off_.back(), -1);
  dom_wire_.assign(dom_.size(), -1);
  cod_wire_.assign(cod_.size(), -1);
  // Out-of-range endpoints are left for well_formed() to report.
  for (int w = 0; w < static_cast<int>(wires_.size()); ++w) {
    const auto& [src, dst] = wires_[w];
    if (src.boundary()) {
      if (src.index >= 0 && src.index < static_cast<int>(dom_.size())) dom_wire_[src.index] = w;
    } else if (src.node >= 0 && src.node < node_count() && src.index >= 0 &&
               src.index < out_arity(src.node)) {
      out_wire_[out_off_[src.node] + src.index] = w;
    }
    if (dst.boundary()) {
      if (dst.index >= 0 && dst.index < static_cast<int>(cod_.size())) cod_wire_[dst.index] = w;
    } else if (dst.node >= 0 && dst.node < node_count() && dst.index >= 0 &&
               dst.index < in_arity(dst.node)) {
      in_wire_[in_off_[dst.node] + dst.index] = w;
    }
  }
}

int Diagram::wire_into(Port dst) const {
  return dst.boundary() ? cod_wire_[dst.index] : in_wire_[in_off_[dst.node] + dst.index];
}

int Diagram::wire_from(Port src) const {
  return src.boundary() ? dom_wire_[src.index] : out_wire_[out_off_[src.node] + src.index];
}

Port Diagram::source_of(Port dst) const {
  int w = wire_into(dst);
  return w < 0 ? Port{} : wires_[w].src;
}

Port Diagram::target_of(Port src) const {
  int w = wire_from(src);
  return w < 0 ? Port{} : wires_[w].dst;
}

LetterId Diagram::wire_letter(int w) const {
  const Port& src = wires_[w].src;
  return src.boundary() ? dom_[src.index] : out_letter(src.node, src.index);
}

// --- DiagramBuilder -------------------------------------------------------------

DiagramBuilder::DiagramBuilder(SignaturePtr sig) : sig_(std::move(sig)) {}

DiagramBuilder::DiagramBuilder(const Diagram& d) : sig_(d.sig_ptr()) {
  for (LetterId a : d.dom()) add_dom(a);
  for (LetterId a : d.cod()) add_cod(a);
  for (int n = 0; n < d.node_count(); ++n) add_node(d.value(n));
  for (const auto& w : d.wires()) connect(w.src, w.dst);
}

int DiagramBuilder::add_node(NodeValue v) {
  check_value(*sig_, v);
  int id = static_cast<int>(values_.size());
  values_.push_back(v);
  alive_.push_back(1);
  int in = input_arity(*sig_, v);
  int out = output_arity(*sig_, v);
  in_off_.push_back(in_off_.back() + in);
  out_off_.push_back(out_off_.back() + out);
  in_src_.resize(in_src_.size() + in);
  out_dst_.resize(out_dst_.size() + out);
  return id;
}

int DiagramBuilder::add_dom(LetterId a) {
  dom_.push_back(a);
  dom_dst_.emplace_back();
  return static_cast<int>(dom_.size()) - 1;
}

int DiagramBuilder::add_cod(LetterId a) {
  cod_.push_back(a);
  cod_src_.emplace_back();
  return static_cast<int>(cod_.size()) - 1;
}

void DiagramBuilder::connect(Port src, Port dst) {
  if (src.boundary()) {
    dom_dst_[src.index] = dst;
  } else {
    out_dst_[out_off_[src.node] + src.index] = dst;
  }
  if (dst.boundary()) {
    cod_src_[dst.index] = src;
  } else {
    in_src_[in_off_[dst.node] + dst.index] = src;
  }
}

Port DiagramBuilder::source_of(Port dst) const {
  return dst.boundary() ? cod_src_[dst.index] : in_src_[in_off_[dst.node] + dst.index];
}

Port DiagramBuilder::target_of(Port src) const {
  return src.boundary() ? dom_dst_[src.index] : out_dst_[out_off_[src.node] + src.index];
}

Diagram DiagramBuilder::build(std::vector<int>* old_to_new) const {
  std::vector<int> remap(values_.size(), -1);
  std::vector<NodeValue> nodes;
  for (std::size_t n = 0; n < values_.size(); ++n) {
    if (alive_[n]) {
      remap[n] = static_cast<int>(nodes.size());
      nodes.push_back(values_[n]);
    }
  }
  auto map_src = [&](Port p) {
    if (p.boundary()) return p;
    if (p.node < 0 || remap[p.node] < 0) throw Error("dangling port while building diagram");
    return Port{remap[p.node], p.index};
  };
  std::vector<Wire> wires;
  wires.reserve(in_src_.size() + cod_.size());
  for (std::size_t n = 0; n < values_.size(); ++n) {
    if (!alive_[n]) continue;
    for (int k = 0; k < in_off_[n + 1] - in_off_[n]; ++k) {
      wires.push_back({map_src(in_src_[in_off_[n] + k]), Port{remap[n], k}});
    }
  }
  for (std::size_t j = 0; j < cod_.size(); ++j) {
    wires.push_back({map_src(cod_src_[j]), Port{kBoundary, static_cast<int>(j)}});
  }
  if (old_to_new) *old_to_new = remap;
  return Diagram(sig_, std::move(nodes), dom_, cod_, std::move(wires));
}

// --- well-formedness ------------------------------------------------------------

Report well_formed(const Diagram& d) {
  Report report;
  const int n = d.node_count();
  std::vector<int> in_use, out_use;
  std::vector<int> in_off{0}, out_off{0};
  for (int x = 0; x < n; ++x) {
    in_off.push_back(in_off.back() + d.in_arity(x));
    out_off.push_back(out_off.back() + d.out_arity(x));
  }
  in_use.assign(in_off.back(), 0);
  out_use.assign(out_off.back(), 0);
  std::vector<int> dom_use(d.dom().size(), 0), cod_use(d.cod().size(), 0);

  auto describe = [&](Port p, bool as_src) {
    if (p.boundary()) return std::string(as_src ? "dom " : "cod ") + std::to_string(p.index);
    return "node " + std::to_string(p.node) + (as_src ? " output " : " input ") +
           std::to_string(p.index);
  };
  std::vector<std::vector<int>> succ(n);
  std::vector<int> indeg(n, 0);
  for (const auto& [src, dst] : d.wires()) {
    bool ok = true;
    LetterId a = -1, b = -1;
    if (src.boundary()) {
      if (src.index < 0 || src.index >= static_cast<int>(d.dom().size())) ok = false;
      else { ++dom_use[src.index]; a = d.dom()[src.index]; }
    } else if (src.node < 0 || src.node >= n || src.index < 0 || src.index >= d.out_arity(src.node)) {
      ok = false;
    } else {
      ++out_use[out_off[src.node] + src.index];
      a = d.out_letter(src.node, src.index);
    }
    if (dst.boundary()) {
      if (dst.index < 0 || dst.index >= static_cast<int>(d.cod().size())) ok = false;
      else { ++cod_use[dst.index]; b = d.cod()[dst.index]; }
    } else if (dst.node < 0 || dst.node >= n || dst.index < 0 || dst.index >= d.in_arity(dst.node)) {
      ok = false;
    } else {
      ++in_use[in_off[dst.node] + dst.index];
      b = d.in_letter(dst.node, dst.index);
    }
    if (!ok) {
      report.add("wire with nonexistent endpoint");
      continue;
    }
    if (a != b) {
      report.add("letter mismatch on wire " + describe(src, true) + " -> " + describe(dst, false) +
                 " (" + d.sig().letter_name(a) + " vs " + d.sig().letter_name(b) + ")");
    }
    if (!src.boundary() && !dst.boundary()) {
      succ[src.node].push_back(dst.node);
      ++indeg[dst.node];
    }
  }
  auto count_check = [&](int uses, Port p, bool as_src) {
    if (uses == 0) report.add("dangling port at " + describe(p, as_src));
    if (uses > 1) report.add("doubly-used port at " + describe(p, as_src));
  };
  for (int i = 0; i < static_cast<int>(dom_use.size()); ++i) count_check(dom_use[i], {kBoundary, i}, true);
  for (int j = 0; j < static_cast<int>(cod_use.size()); ++j) count_check(cod_use[j], {kBoundary, j}, false);
  for (int x = 0; x < n; ++x) {
    for (int k = 0; k < d.in_arity(x); ++k) count_check(in_use[in_off[x] + k], {x, k}, false);
    for (int k = 0; k < d.out_arity(x); ++k) count_check(out_use[out_off[x] + k], {x, k}, true);
  }
  std::vector<int> stack;
  for (int x = 0; x < n; ++x) {
    if (indeg[x] == 0) stack.push_back(x);
  }
  int seen = 0;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    ++seen;
    for (int y : succ[x]) {
      if (--indeg[y] == 0) stack.push_back(y);
    }
  }
  if (seen != n) report.add("cycle among nodes");
  return report;
}

// --- SMC structure --------------------------------------------------------------

Diagram identity(const SignaturePtr& sig, const LetterIds& w) {
  std::vector<Wire> wires;
  for (int i = 0; i < static_cast<int>(w.size()); ++i) wires.push_back({{kBoundary, i}, {kBoundary, i}});
  return Diagram(sig, {}, w, w, std::move(wires));
}

Diagram identity(const SignaturePtr& sig, const Word& w) { return identity(sig, sig->encode(w)); }

Diagram atom(const SignaturePtr& sig, NodeValue v) {
  check_value(*sig, v);
  LetterIds dom, cod;
  std::vector<Wire> wires;
  for (int k = 0; k < input_arity(*sig, v); ++k) {
    dom.push_back(input_letter(*sig, v, k));
    wires.push_back({{kBoundary, k}, {0, k}});
  }
  for (int k = 0; k < output_arity(*sig, v); ++k) {
    cod.push_back(output_letter(*sig, v, k));
    wires.push_back({{0, k}, {kBoundary, k}});
  }
  return Diagram(sig, {v}, std::move(dom), std::move(cod), std::move(wires));
}

Diagram compose(const Diagram& g, const Diagram& f) {
  check_same_sig(g, f, "compose");
  if (f.cod() != g.dom()) {
    throw Error("compose: cod " + to_string(f.cod_word()) + " does not match dom " +
                to_string(g.dom_word()));
  }
  const int off = f.node_count();
  std::vector<NodeValue> nodes = f.values();
  nodes.insert(nodes.end(), g.values().begin(), g.values().end());
  std::vector<Wire> wires;
  wires.reserve(f.wires().size() + g.wires().size());
  for (const auto& w : f.wires()) {
    if (!w.dst.boundary()) wires.push_back(w);
  }
  for (const auto& w : g.wires()) {
    Port src = w.src.boundary() ? f.source_of({kBoundary, w.src.index}) : Port{w.src.node + off, w.src.index};
    Port dst = w.dst.boundary() ? w.dst : Port{w.dst.node + off, w.dst.index};
    wires.push_back({src, dst});
  }
  return Diagram(f.sig_ptr(), std::move(nodes), f.dom(), g.cod(), std::move(wires));
}

Diagram seq(std::span<const Diagram> steps) {
  if (steps.empty()) throw Error("seq: no steps");
  Diagram out = steps.front();
  for (std::size_t i = 1; i < steps.size(); ++i) out = compose(steps[i], out);
  return out;
}

Diagram tensor(const Diagram& f, const Diagram& g) {
  check_same_sig(f, g, "tensor");
  const int off = f.node_count();
  const int doff = static_cast<int>(f.dom().size());
  const int coff = static_cast<int>(f.cod().size());
  std::vector<NodeValue> nodes = f.values();
  nodes.insert(nodes.end(), g.values().begin(), g.values().end());
  std::vector<Wire> wires = f.wires();
  for (const auto& w : g.wires()) {
    Port src = w.src.boundary() ? Port{kBoundary, w.src.index + doff} : Port{w.src.node + off, w.src.index};
    Port dst = w.dst.boundary() ? Port{kBoundary, w.dst.index + coff} : Port{w.dst.node + off, w.dst.index};
    wires.push_back({src, dst});
  }
  LetterIds dom = f.dom(), cod = f.cod();
  dom.insert(dom.end(), g.dom().begin(), g.dom().end());
  cod.insert(cod.end(), g.cod().begin(), g.cod().end());
  return Diagram(f.sig_ptr(), std::move(nodes), std::move(dom), std::move(cod), std::move(wires));
}

Diagram symmetry(const SignaturePtr& sig, const LetterIds& u, const LetterIds& v) {
  const int nu = static_cast<int>(u.size());
  const int nv = static_cast<int>(v.size());
  LetterIds dom = u, cod = v;
  dom.insert(dom.end(), v.begin(), v.end());
  cod.insert(cod.end(), u.begin(), u.end());
  std::vector<Wire> wires;
  for (int i = 0; i < nu; ++i) wires.push_back({{kBoundary, i}, {kBoundary, nv + i}});
  for (int j = 0; j < nv; ++j) wires.push_back({{kBoundary, nu + j}, {kBoundary, j}});
  return Diagram(sig, {}, std::move(dom), std::move(cod), std::move(wires));
}

Diagram symmetry(const SignaturePtr& sig, const Word& u, const Word& v) {
  return symmetry(sig, sig->encode(u), sig->encode(v));
}

Diagram permutation(const SignaturePtr& sig, const LetterIds& w, const std::vector<int>& source) {
  if (source.size() != w.size()) throw Error("permutation: length mismatch");
  std::vector<char> hit(w.size(), 0);
  LetterIds cod;
  std::vector<Wire> wires;
  for (int j = 0; j < static_cast<int>(source.size()); ++j) {
    int i = source[j];
    if (i < 0 || i >= static_cast<int>(w.size()) || hit[i]) throw Error("permutation: not a bijection");
    hit[i] = 1;
    cod.push_back(w[i]);
    wires.push_back({{kBoundary, i}, {kBoundary, j}});
  }
  return Diagram(sig, {}, w, std::move(cod), std::move(wires));
}

// --- isomorphism ----------------------------------------------------------------

std::vector<std::int32_t> iso_code(const Diagram& d) {
  return detail::canonicalize(detail::port_graph(d)).code;
}

std::string certificate(const Diagram& d) { return detail::render_code(iso_code(d)); }

bool isomorphic(const Diagram& a, const Diagram& b) {
  if (a.node_count() != b.node_count() || a.dom() != b.dom() || a.cod() != b.cod()) return false;
  return iso_code(a) == iso_code(b);
}

std::optional<std::vector<int>> find_isomorphism(const Diagram& a, const Diagram& b) {
  if (a.node_count() != b.node_count() || a.dom() != b.dom() || a.cod() != b.cod()) return std::nullopt;
  auto ca = detail::canonicalize(detail::port_graph(a));
  auto cb = detail::canonicalize(detail::port_graph(b));
  if (ca.code != cb.code) return std::nullopt;
  std::vector<int> map(a.node_count());
  for (std::size_t i = 0; i < ca.order.size(); ++i) map[ca.order[i]] = cb.order[i];
  return map;
}

// --- order, levels, layers --------------------------------------------------------

std::vector<int> topological_order(const Diagram& d) {
  const int n = d.node_count();
  std::vector<int> indeg(n, 0);
  for (const auto& w : d.wires()) {
    if (!w.src.boundary() && !w.dst.boundary()) ++indeg[w.dst.node];
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int x = 0; x < n; ++x) {
    if (indeg[x] == 0) ready.push(x);
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    int x = ready.top();
    ready.pop();
    order.push_back(x);
    for (int k = 0; k < d.out_arity(x); ++k) {
      Port t = d.target_of({x, k});
      if (t.node >= 0 && --indeg[t.node] == 0) ready.push(t.node);
    }
  }
  if (static_cast<int>(order.size()) != n) throw Error("topological_order: diagram has a cycle");
  return order;
}

NodeOrder::NodeOrder(const Diagram& d) : n_(d.node_count()), stride_((d.node_count() + 63) / 64) {
  rows_.assign(static_cast<std::size_t>(n_) * stride_, 0);
  auto order = topological_order(d);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int x = *it;
    std::uint64_t* row = &rows_[static_cast<std::size_t>(x) * stride_];
    row[x >> 6] |= std::uint64_t{1} << (x & 63);
    for (int k = 0; k < d.out_arity(x); ++k) {
      Port t = d.target_of({x, k});
      if (t.node < 0) continue;
      const std::uint64_t* other = &rows_[static_cast<std::size_t>(t.node) * stride_];
      for (int s = 0; s < stride_; ++s) row[s] |= other[s];
    }
  }
}

NodeOrder node_poset(const Diagram& d) { return NodeOrder(d); }

bool Level::contains(int n) const { return std::binary_search(nodes.begin(), nodes.end(), n); }

Report validate_level(const Diagram& d, const Level& level) {
  Report report;
  if (!std::is_sorted(level.nodes.begin(), level.nodes.end()) ||
      std::adjacent_find(level.nodes.begin(), level.nodes.end()) != level.nodes.end()) {
    report.add("level node list must be sorted and unique");
    return report;
  }
  for (int y : level.nodes) {
    if (y < 0 || y >= d.node_count()) {
      report.add("level mentions unknown node " + std::to_string(y));
      continue;
    }
    for (int k = 0; k < d.in_arity(y); ++k) {
      Port s = d.source_of({y, k});
      if (s.node >= 0 && !level.contains(s.node)) {
        report.add("level not downward closed: node " + std::to_string(s.node) + " precedes " +
                   std::to_string(y));
      }
    }
  }
  return report;
}

Level down_closure(const Diagram& d, std::span<const int> nodes) {
  std::vector<char> in(d.node_count(), 0);
  std::vector<int> stack(nodes.begin(), nodes.end());
  while (!stack.empty()) {
    int y = stack.back();
    stack.pop_back();
    if (in[y]) continue;
    in[y] = 1;
    for (int k = 0; k < d.in_arity(y); ++k) {
      Port s = d.source_of({y, k});
      if (s.node >= 0 && !in[s.node]) stack.push_back(s.node);
    }
  }
  Level out;
  for (int x = 0; x < d.node_count(); ++x) {
    if (in[x]) out.nodes.push_back(x);
  }
  return out;
}

Level all_nodes(const Diagram& d) {
  Level out;
  out.nodes.resize(d.node_count());
  for (int x = 0; x < d.node_count(); ++x) out.nodes[x] = x;
  return out;
}

namespace {

void require_level(const Diagram& d, const Level& level) {
  if (auto report = validate_level(d, level); !report) throw Error(report.str());
}

std::vector<int> cut_unchecked(const Diagram& d, const std::vector<char>& member,
                               const std::vector<int>& rank) {
  std::vector<int> out;
  for (int w = 0; w < d.wire_count(); ++w) {
    const auto& [src, dst] = d.wires()[w];
    bool src_in = src.boundary() || member[src.node];
    bool dst_out = dst.boundary() || !member[dst.node];
    if (src_in && dst_out) out.push_back(w);
  }
  auto key = [&](int w) {
    const Port& s = d.wires()[w].src;
    return s.boundary() ? std::make_tuple(0, s.index, 0) : std::make_tuple(1, rank[s.node], s.index);
  };
  std::sort(out.begin(), out.end(), [&](int a, int b) { return key(a) < key(b); });
  return out;
}

std::vector<char> membership(const Diagram& d, const Level& level) {
  std::vector<char> member(d.node_count(), 0);
  for (int x : level.nodes) member[x] = 1;
  return member;
}

std::vector<int> topo_rank(const Diagram& d) {
  auto order = topological_order(d);
  std::vector<int> rank(d.node_count());
  for (int i = 0; i < static_cast<int>(order.size()); ++i) rank[order[i]] = i;
  return rank;
}

}  // namespace

std::vector<int> cut(const Diagram& d, const Level& level) {
  require_level(d, level);
  return cut_unchecked(d, membership(d, level), topo_rank(d));
}

Layer layer(const Diagram& d, const Level& lower, const Level& upper) {
  require_level(d, lower);
  require_level(d, upper);
  if (!std::includes(upper.nodes.begin(), upper.nodes.end(), lower.nodes.begin(), lower.nodes.end())) {
    throw Error("layer: lower level is not contained in upper level");
  }
  auto rank = topo_rank(d);
  auto lo = membership(d, lower);
  auto hi = membership(d, upper);
  Layer out;
  out.lower = lower;
  out.upper = upper;
  for (int x : upper.nodes) {
    if (!lo[x]) out.nodes.push_back(x);
  }
  for (int w = 0; w < d.wire_count(); ++w) {
    const auto& [src, dst] = d.wires()[w];
    if (!src.boundary() && !dst.boundary() && hi[src.node] && !lo[src.node] && hi[dst.node] &&
        !lo[dst.node]) {
      out.pinned.push_back(w);
    }
  }
  out.dom_wires = cut_unchecked(d, lo, rank);
  out.cod_wires = cut_unchecked(d, hi, rank);
  for (int w : out.dom_wires) {
    if (std::find(out.cod_wires.begin(), out.cod_wires.end(), w) != out.cod_wires.end()) {
      out.loose.push_back(w);
    }
  }
  return out;
}

Diagram extract(const Diagram& d, std::span<const int> nodes, std::span<const int> dom_wires,
                std::span<const int> cod_wires) {
  std::vector<int> local(d.node_count(), -1);
  std::vector<NodeValue> values;
  for (int x : nodes) {
    local[x] = static_cast<int>(values.size());
    values.push_back(d.value(x));
  }
  std::vector<int> dom_pos(d.wire_count(), -1), cod_pos(d.wire_count(), -1);
  LetterIds dom, cod;
  for (int i = 0; i < static_cast<int>(dom_wires.size()); ++i) {
    dom_pos[dom_wires[i]] = i;
    dom.push_back(d.wire_letter(dom_wires[i]));
  }
  for (int j = 0; j < static_cast<int>(cod_wires.size()); ++j) {
    cod_pos[cod_wires[j]] = j;
    cod.push_back(d.wire_letter(cod_wires[j]));
  }
  auto local_src = [&](int w) {
    if (dom_pos[w] >= 0) return Port{kBoundary, dom_pos[w]};
    const Port& s = d.wires()[w].src;
    if (s.boundary() || local[s.node] < 0) throw Error("extract: wire source outside the sub-diagram");
    return Port{local[s.node], s.index};
  };
  std::vector<Wire> wires;
  for (int x : nodes) {
    for (int k = 0; k < d.in_arity(x); ++k) {
      wires.push_back({local_src(d.wire_into({x, k})), Port{local[x], k}});
    }
    for (int k = 0; k < d.out_arity(x); ++k) {
      int w = d.wire_from({x, k});
      const Port& t = d.wires()[w].dst;
      bool pinned = !t.boundary() && local[t.node] >= 0;
      if (!pinned && cod_pos[w] < 0) throw Error("extract: output port left uncovered");
    }
  }
  for (int j = 0; j < static_cast<int>(cod_wires.size()); ++j) {
    wires.push_back({local_src(cod_wires[j]), Port{kBoundary, j}});
  }
  return Diagram(d.sig_ptr(), std::move(values), std::move(dom), std::move(cod), std::move(wires));
}

Factorization factor_through_layers(const Diagram& d, const Level& lower, const Level& upper) {
  Layer mid = layer(d, lower, upper);
  Factorization out;
  out.lower_cut = mid.dom_wires;
  out.upper_cut = mid.cod_wires;
  std::vector<int> dom_wires, cod_wires, top_nodes;
  for (int i = 0; i < static_cast<int>(d.dom().size()); ++i) dom_wires.push_back(d.wire_from({kBoundary, i}));
  for (int j = 0; j < static_cast<int>(d.cod().size()); ++j) cod_wires.push_back(d.wire_into({kBoundary, j}));
  for (int x = 0; x < d.node_count(); ++x) {
    if (!upper.contains(x)) top_nodes.push_back(x);
  }
  out.bottom = extract(d, lower.nodes, dom_wires, out.lower_cut);
  out.middle = extract(d, mid.nodes, out.lower_cut, out.upper_cut);
  out.top = extract(d, top_nodes, out.upper_cut, cod_wires);
  return out;
}

}  // namespace freemarkov
