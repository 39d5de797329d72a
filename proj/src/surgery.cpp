#include "freemarkov/surgery.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "canonical.hpp"

namespace freemarkov {

Template Template::reversed() const {
  Template r{lambda, omega, std::vector<int>(alpha.size()), std::vector<int>(beta.size()), {}};
  for (int p = 0; p < static_cast<int>(alpha.size()); ++p) r.alpha[alpha[p]] = p;
  for (int q = 0; q < static_cast<int>(beta.size()); ++q) r.beta[beta[q]] = q;
  constexpr std::string_view suffix = "^-1";
  if (name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
    r.name = name.substr(0, name.size() - suffix.size());
  } else {
    r.name = name + std::string(suffix);
  }
  return r;
}

namespace {

bool is_bijection(const std::vector<int>& f, std::size_t n) {
  if (f.size() != n) return false;
  std::vector<char> hit(n, 0);
  for (int i : f) {
    if (i < 0 || i >= static_cast<int>(n) || hit[i]) return false;
    hit[i] = 1;
  }
  return true;
}

}  // namespace

Report validate_template(const Template& t) {
  Report report;
  for (const Diagram* d : {&t.omega, &t.lambda}) {
    if (auto r = well_formed(*d); !r) report.add("template diagram ill-formed: " + r.str());
  }
  if (!is_bijection(t.alpha, t.lambda.dom().size()) || t.lambda.dom().size() != t.omega.dom().size()) {
    report.add("alpha is not a bijection dom(lambda) -> dom(omega)");
  } else {
    for (std::size_t p = 0; p < t.alpha.size(); ++p) {
      if (t.lambda.dom()[p] != t.omega.dom()[t.alpha[p]]) report.add("alpha does not preserve letters");
    }
  }
  if (!is_bijection(t.beta, t.lambda.cod().size()) || t.lambda.cod().size() != t.omega.cod().size()) {
    report.add("beta is not a bijection cod(lambda) -> cod(omega)");
  } else {
    for (std::size_t q = 0; q < t.beta.size(); ++q) {
      if (t.lambda.cod()[q] != t.omega.cod()[t.beta[q]]) report.add("beta does not preserve letters");
    }
  }
  return report;
}

// --- normality --------------------------------------------------------------------

bool is_normal(const Diagram& d, const SubDiagram& s) { return is_normal(d, NodeOrder(d), s); }

bool is_normal(const Diagram& d, const NodeOrder& order, const SubDiagram& s) {
  const int n = d.node_count();
  std::vector<char> in(n, 0);
  for (int x : s.nodes) in[x] = 1;
  std::vector<char> chosen(d.wire_count(), 0);
  for (int w : s.wires) chosen[w] = 1;

  // Full degree.
  for (int x : s.nodes) {
    for (int k = 0; k < d.in_arity(x); ++k) {
      if (!chosen[d.wire_into({x, k})]) return false;
    }
    for (int k = 0; k < d.out_arity(x); ++k) {
      if (!chosen[d.wire_from({x, k})]) return false;
    }
  }
  // Convexity: nothing outside lies strictly between two chosen nodes.
  for (int z = 0; z < n; ++z) {
    if (in[z]) continue;
    bool below = false, above = false;
    for (int x : s.nodes) {
      below = below || order.leq(x, z);
      above = above || order.leq(z, x);
    }
    if (below && above) return false;
  }
  // A loose wire shares no directed path with another chosen wire.
  auto loose = [&](int w) {
    const auto& wire = d.wires()[w];
    return (wire.src.boundary() || !in[wire.src.node]) && (wire.dst.boundary() || !in[wire.dst.node]);
  };
  auto before = [&](int e, int f) {
    const Port& t = d.wires()[e].dst;
    const Port& s2 = d.wires()[f].src;
    return !t.boundary() && !s2.boundary() && order.leq(t.node, s2.node);
  };
  for (int e : s.wires) {
    if (!loose(e)) continue;
    for (int f : s.wires) {
      if (f != e && (before(e, f) || before(f, e))) return false;
    }
  }
  return true;
}

std::pair<Level, Level> sharp_layer(const Diagram& d, const SubDiagram& s) {
  NodeOrder order(d);
  if (!is_normal(d, order, s)) throw Error("sharp_layer: subdiagram is not normal");
  const int n = d.node_count();
  std::vector<char> in(n, 0);
  for (int x : s.nodes) in[x] = 1;
  std::vector<int> loose_src;
  for (int w : s.wires) {
    const auto& wire = d.wires()[w];
    bool is_loose = (wire.src.boundary() || !in[wire.src.node]) && (wire.dst.boundary() || !in[wire.dst.node]);
    if (is_loose && !wire.src.boundary()) loose_src.push_back(wire.src.node);
  }
  Level lower, upper;
  for (int x = 0; x < n; ++x) {
    bool under_loose = std::any_of(loose_src.begin(), loose_src.end(), [&](int y) { return order.leq(x, y); });
    bool under_node = std::any_of(s.nodes.begin(), s.nodes.end(), [&](int y) { return order.leq(x, y); });
    if (under_loose || under_node) upper.nodes.push_back(x);
    if (under_loose || (!in[x] && under_node)) lower.nodes.push_back(x);
  }
  return {lower, upper};
}

// --- matching ---------------------------------------------------------------------

namespace {

struct Matcher {
  const Diagram& d;
  const NodeOrder& order;
  const Diagram& omega;
  std::vector<int> sequence;  // omega nodes in search order
  std::vector<Wire> link;     // omega wire tying sequence[i] to an earlier node (src.node = kUnset if none)
  std::vector<int> node_map;
  std::vector<char> used;
  std::vector<int> loose;  // omega wires dom -> cod
  std::set<std::tuple<std::vector<int>, std::vector<int>, std::vector<int>>> seen;
  std::vector<Match> out;

  Matcher(const Diagram& target, const NodeOrder& ord, const Diagram& om)
      : d(target), order(ord), omega(om), node_map(om.node_count(), -1), used(target.node_count(), 0) {
    plan();
  }

  void plan() {
    const int m = omega.node_count();
    std::map<NodeValue, int> freq;
    for (NodeValue v : d.values()) ++freq[v];
    std::vector<char> placed(m, 0);
    for (int w = 0; w < omega.wire_count(); ++w) {
      const auto& wire = omega.wires()[w];
      if (wire.src.boundary() && wire.dst.boundary()) loose.push_back(w);
    }
    while (static_cast<int>(sequence.size()) < m) {
      // Anchor each component at its scarcest value in the target.
      int anchor = -1;
      for (int x = 0; x < m; ++x) {
        if (placed[x]) continue;
        if (anchor < 0 || freq[omega.value(x)] < freq[omega.value(anchor)]) anchor = x;
      }
      std::size_t head = sequence.size();
      sequence.push_back(anchor);
      link.push_back({Port{}, Port{}});
      placed[anchor] = 1;
      for (; head < sequence.size(); ++head) {
        int x = sequence[head];
        auto reach = [&](Port self, Port other, bool outgoing) {
          if (other.boundary() || placed[other.node]) return;
          placed[other.node] = 1;
          sequence.push_back(other.node);
          link.push_back(outgoing ? Wire{self, other} : Wire{other, self});
        };
        for (int k = 0; k < omega.in_arity(x); ++k) reach({x, k}, omega.source_of({x, k}), false);
        for (int k = 0; k < omega.out_arity(x); ++k) reach({x, k}, omega.target_of({x, k}), true);
      }
    }
  }

  bool consistent(int x) const {
    // Every omega wire between x and an already mapped node must be present.
    int img = node_map[x];
    for (int k = 0; k < omega.in_arity(x); ++k) {
      Port s = omega.source_of({x, k});
      if (s.boundary() || node_map[s.node] < 0) continue;
      if (d.source_of({img, k}) != Port{node_map[s.node], s.index}) return false;
    }
    for (int k = 0; k < omega.out_arity(x); ++k) {
      Port t = omega.target_of({x, k});
      if (t.boundary() || node_map[t.node] < 0) continue;
      if (d.target_of({img, k}) != Port{node_map[t.node], t.index}) return false;
    }
    return true;
  }

  void search(std::size_t i) {
    if (i == sequence.size()) {
      finish();
      return;
    }
    int x = sequence[i];
    auto attempt = [&](int cand) {
      if (cand < 0 || used[cand] || d.value(cand) != omega.value(x)) return;
      node_map[x] = cand;
      used[cand] = 1;
      if (consistent(x)) search(i + 1);
      used[cand] = 0;
      node_map[x] = -1;
    };
    const Wire& l = link[i];
    if (l.src.node == kUnset) {
      for (int cand = 0; cand < d.node_count(); ++cand) attempt(cand);
    } else if (l.dst.node == x) {
      Port t = d.target_of({node_map[l.src.node], l.src.index});
      if (!t.boundary() && t.index == l.dst.index) attempt(t.node);
    } else {
      Port s = d.source_of({node_map[l.dst.node], l.dst.index});
      if (!s.boundary() && s.index == l.src.index) attempt(s.node);
    }
  }

  void finish() {
    const int ndom = static_cast<int>(omega.dom().size());
    const int ncod = static_cast<int>(omega.cod().size());
    Match m;
    m.node_map = node_map;
    m.dom_wires.assign(ndom, -1);
    m.cod_wires.assign(ncod, -1);
    std::vector<char> taken(d.wire_count(), 0);
    bool ok = true;
    auto claim = [&](int w) {
      if (taken[w]) ok = false;
      taken[w] = 1;
    };
    for (int x = 0; x < omega.node_count(); ++x) {
      int img = node_map[x];
      for (int k = 0; k < omega.in_arity(x); ++k) {
        Port s = omega.source_of({x, k});
        int w = d.wire_into({img, k});
        if (s.boundary()) {
          m.dom_wires[s.index] = w;
          claim(w);
        } else if (s.node == x || node_map[s.node] >= 0) {
          claim(w);
        }
      }
      for (int k = 0; k < omega.out_arity(x); ++k) {
        Port t = omega.target_of({x, k});
        if (t.boundary()) {
          int w = d.wire_from({img, k});
          m.cod_wires[t.index] = w;
          claim(w);
        }
      }
    }
    if (!ok) return;
    assign_loose(m, taken, 0);
  }

  void assign_loose(Match& m, std::vector<char>& taken, std::size_t i) {
    if (i == loose.size()) {
      record(m);
      return;
    }
    const auto& wire = omega.wires()[loose[i]];
    LetterId a = omega.dom()[wire.src.index];
    for (int w = 0; w < d.wire_count(); ++w) {
      if (taken[w] || d.wire_letter(w) != a) continue;
      taken[w] = 1;
      m.dom_wires[wire.src.index] = w;
      m.cod_wires[wire.dst.index] = w;
      assign_loose(m, taken, i + 1);
      taken[w] = 0;
    }
  }

  void record(const Match& m) {
    Match r = m;
    r.image.nodes = node_map;
    std::sort(r.image.nodes.begin(), r.image.nodes.end());
    std::vector<char> in(d.node_count(), 0);
    for (int x : r.image.nodes) in[x] = 1;
    std::set<int> wires(r.dom_wires.begin(), r.dom_wires.end());
    wires.insert(r.cod_wires.begin(), r.cod_wires.end());
    for (int x : r.image.nodes) {
      for (int k = 0; k < d.in_arity(x); ++k) wires.insert(d.wire_into({x, k}));
    }
    r.image.wires.assign(wires.begin(), wires.end());
    if (!seen.emplace(r.dom_wires, r.cod_wires, r.image.nodes).second) return;
    if (!is_normal(d, order, r.image)) return;
    out.push_back(std::move(r));
  }
};

}  // namespace

std::vector<Match> find_matches(const Diagram& d, const Template& t) {
  return find_matches(d, NodeOrder(d), t);
}

std::vector<Match> find_matches(const Diagram& d, const NodeOrder& order, const Template& t) {
  if (d.sig_ptr() != t.omega.sig_ptr() && !(d.sig() == t.omega.sig())) {
    throw Error("find_matches: template over a different signature");
  }
  Matcher matcher(d, order, t.omega);
  matcher.search(0);
  auto out = std::move(matcher.out);
  std::sort(out.begin(), out.end(), [](const Match& a, const Match& b) {
    return std::tie(a.image.nodes, a.dom_wires, a.cod_wires) < std::tie(b.image.nodes, b.dom_wires, b.cod_wires);
  });
  return out;
}

// --- grafting -----------------------------------------------------------------------

std::pair<Diagram, Match> apply_surgery_tracked(const Diagram& d, const Match& m, const Template& t) {
  const Diagram& om = t.omega;
  const Diagram& la = t.lambda;
  if (m.dom_wires.size() != om.dom().size() || m.cod_wires.size() != om.cod().size() ||
      m.node_map.size() != static_cast<std::size_t>(om.node_count())) {
    throw Error("apply_surgery: match does not fit the template");
  }
  for (int x = 0; x < om.node_count(); ++x) {
    if (d.value(m.node_map[x]) != om.value(x)) throw Error("apply_surgery: inconsistent match");
  }
  std::vector<Port> src(m.dom_wires.size()), tgt(m.cod_wires.size());
  for (std::size_t i = 0; i < src.size(); ++i) src[i] = d.wires()[m.dom_wires[i]].src;
  for (std::size_t j = 0; j < tgt.size(); ++j) tgt[j] = d.wires()[m.cod_wires[j]].dst;

  DiagramBuilder b(d);
  for (int x : m.node_map) b.remove_node(x);
  std::vector<int> lam(la.node_count());
  for (int x = 0; x < la.node_count(); ++x) lam[x] = b.add_node(la.value(x));
  auto lsrc = [&](Port p) { return p.boundary() ? src[t.alpha[p.index]] : Port{lam[p.node], p.index}; };
  auto ldst = [&](Port p) { return p.boundary() ? tgt[t.beta[p.index]] : Port{lam[p.node], p.index}; };
  for (const auto& w : la.wires()) b.connect(lsrc(w.src), ldst(w.dst));

  std::vector<int> remap;
  Diagram out = b.build(&remap);
  auto mapped = [&](Port p) { return p.boundary() ? p : Port{remap[p.node], p.index}; };

  Match back;
  for (int x = 0; x < la.node_count(); ++x) back.node_map.push_back(remap[lam[x]]);
  back.dom_wires.assign(la.dom().size(), -1);
  back.cod_wires.assign(la.cod().size(), -1);
  for (const auto& w : la.wires()) {
    int nw = out.wire_into(mapped(ldst(w.dst)));
    if (w.src.boundary()) back.dom_wires[w.src.index] = nw;
    if (w.dst.boundary()) back.cod_wires[w.dst.index] = nw;
  }
  back.image.nodes = back.node_map;
  std::sort(back.image.nodes.begin(), back.image.nodes.end());
  std::set<int> wires(back.dom_wires.begin(), back.dom_wires.end());
  wires.insert(back.cod_wires.begin(), back.cod_wires.end());
  for (int x : back.image.nodes) {
    for (int k = 0; k < out.in_arity(x); ++k) wires.insert(out.wire_into({x, k}));
  }
  back.image.wires.assign(wires.begin(), wires.end());
  return {std::move(out), std::move(back)};
}

Diagram apply_surgery(const Diagram& d, const Match& m, const Template& t) {
  return apply_surgery_tracked(d, m, t).first;
}

// --- bounded search -----------------------------------------------------------------

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::no: return "false";
    case Verdict::yes: return "true";
    case Verdict::inconclusive: return "inconclusive";
  }
  return {};
}

namespace {

std::vector<std::int32_t> template_key(const Template& t) {
  auto key = iso_code(t.omega);
  key.push_back(INT32_MIN);
  auto lam = iso_code(t.lambda);
  key.insert(key.end(), lam.begin(), lam.end());
  key.push_back(INT32_MIN);
  key.insert(key.end(), t.alpha.begin(), t.alpha.end());
  key.push_back(INT32_MIN);
  key.insert(key.end(), t.beta.begin(), t.beta.end());
  return key;
}

struct CodeHash {
  std::size_t operator()(const std::vector<std::int32_t>& v) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int32_t x : v) {
      h ^= static_cast<std::uint32_t>(x);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

void require_symmetric(const std::vector<Template>& templates) {
  std::set<std::vector<std::int32_t>> keys;
  bool has_empty = false;
  for (const auto& t : templates) {
    keys.insert(template_key(t));
    has_empty = has_empty || (t.omega.node_count() == 0 && t.lambda.node_count() == 0 && t.omega.dom().empty() &&
                              t.omega.cod().empty());
  }
  if (!has_empty) throw Error("template set lacks the empty template");
  for (const auto& t : templates) {
    if (!keys.count(template_key(t.reversed()))) throw Error("template set is not symmetric: " + t.name);
  }
}

Ball explore(const Diagram& d, const std::vector<Template>& templates, int radius, int width) {
  std::unordered_set<std::vector<std::int32_t>, CodeHash> seen;
  seen.insert(iso_code(d));
  std::vector<Diagram> frontier{d};
  Ball ball;
  for (int level = 0; level < radius && !frontier.empty(); ++level) {
    std::vector<std::pair<std::vector<std::int32_t>, Diagram>> fresh;
    std::unordered_set<std::vector<std::int32_t>, CodeHash> fresh_codes;
    for (const auto& g : frontier) {
      NodeOrder order(g);
      for (const auto& t : templates) {
        for (const auto& m : find_matches(g, order, t)) {
          Diagram h = apply_surgery(g, m, t);
          auto code = iso_code(h);
          if (seen.count(code) || !fresh_codes.insert(code).second) continue;
          fresh.emplace_back(std::move(code), std::move(h));
        }
      }
    }
    if (static_cast<int>(fresh.size()) > width) {
      std::sort(fresh.begin(), fresh.end(), [](const auto& a, const auto& b) {
        if (a.second.node_count() != b.second.node_count()) return a.second.node_count() < b.second.node_count();
        return a.first < b.first;
      });
      fresh.resize(width);
      ball.truncated = true;
    }
    frontier.clear();
    for (auto& [code, h] : fresh) {
      seen.insert(std::move(code));
      frontier.push_back(std::move(h));
    }
  }
  ball.closed = frontier.empty();
  ball.codes.assign(seen.begin(), seen.end());
  std::sort(ball.codes.begin(), ball.codes.end());
  return ball;
}

Verdict equivalent_bfs(const Diagram& d1, const Diagram& d2, const std::vector<Template>& templates, int depth,
                       int width) {
  require_symmetric(templates);
  if (d1.dom() != d2.dom() || d1.cod() != d2.cod()) return Verdict::no;
  auto c1 = iso_code(d1);
  auto c2 = iso_code(d2);
  if (c1 == c2) return Verdict::yes;
  auto contains = [](const Ball& b, const std::vector<std::int32_t>& c) {
    return std::binary_search(b.codes.begin(), b.codes.end(), c);
  };
  Ball b1 = explore(d1, templates, (depth + 1) / 2, width);
  if (contains(b1, c2)) return Verdict::yes;
  if (b1.closed && !b1.truncated) return Verdict::no;
  Ball b2 = explore(d2, templates, depth / 2, width);
  if (b2.closed && !b2.truncated) return contains(b2, c1) ? Verdict::yes : Verdict::no;
  std::vector<std::vector<std::int32_t>> common;
  std::set_intersection(b1.codes.begin(), b1.codes.end(), b2.codes.begin(), b2.codes.end(),
                        std::back_inserter(common));
  return common.empty() ? Verdict::inconclusive : Verdict::yes;
}

}  // namespace freemarkov
