#include "canonical.hpp"

#include <algorithm>
#include <numeric>

namespace freemarkov::detail {

int PortGraph::add_node(std::int32_t lab, int in, int out, bool unord) {
  label.push_back(lab);
  unordered.push_back(unord ? 1 : 0);
  in_off.push_back(in_off.back() + in);
  out_off.push_back(out_off.back() + out);
  in_src.resize(in_src.size() + in);
  out_dst.resize(out_dst.size() + out);
  return size() - 1;
}

PortGraph port_graph(const Diagram& d) {
  PortGraph g;
  for (int x = 0; x < d.node_count(); ++x) {
    g.add_node(node_label(d.value(x)), d.in_arity(x), d.out_arity(x), false);
  }
  g.dom = d.dom();
  g.cod = d.cod();
  g.dom_dst.resize(g.dom.size());
  g.cod_src.resize(g.cod.size());
  for (const auto& [src, dst] : d.wires()) {
    End s{src.node, src.index};
    End t{dst.node, dst.index};
    if (src.boundary()) g.dom_dst[src.index] = t;
    else g.out_dst[g.out_off[src.node] + src.index] = t;
    if (dst.boundary()) g.cod_src[dst.index] = s;
    else g.in_src[g.in_off[dst.node] + dst.index] = s;
  }
  return g;
}

namespace {

using Key = std::vector<std::int64_t>;

// Ranks keys: equal keys share a rank, ranks are dense and ordered.
std::vector<int> rank_keys(const std::vector<Key>& keys) {
  std::vector<int> idx(keys.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<int> rank(keys.size());
  int r = -1;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i == 0 || keys[idx[i]] != keys[idx[i - 1]]) ++r;
    rank[idx[i]] = r;
  }
  return rank;
}

int count_classes(const std::vector<int>& color) {
  return color.empty() ? 0 : *std::max_element(color.begin(), color.end()) + 1;
}

// Isomorphism-invariant colour refinement over both wire directions.
std::vector<int> refine_colors(const PortGraph& g) {
  const int n = g.size();
  std::vector<Key> keys(n);
  for (int x = 0; x < n; ++x) keys[x] = {g.label[x], g.in_arity(x), g.out_arity(x), g.unordered[x]};
  std::vector<int> color = rank_keys(keys);
  int classes = count_classes(color);
  for (;;) {
    for (int x = 0; x < n; ++x) {
      Key& k = keys[x];
      k.assign(1, color[x]);
      for (int p = 0; p < g.in_arity(x); ++p) {
        const End& s = g.in_src[g.in_off[x] + p];
        if (s.node == kBoundary) {
          k.push_back(-1);
          k.push_back(s.port);
        } else {
          k.push_back(color[s.node]);
          k.push_back(g.unordered[s.node] ? -1 : s.port);
        }
      }
      std::vector<std::pair<std::int64_t, std::int64_t>> outs;
      for (int p = 0; p < g.out_arity(x); ++p) {
        const End& t = g.out_dst[g.out_off[x] + p];
        outs.emplace_back(t.node == kBoundary ? -1 - t.port : color[t.node], t.node == kBoundary ? 0 : t.port);
      }
      if (g.unordered[x]) std::sort(outs.begin(), outs.end());
      for (auto [a, b] : outs) {
        k.push_back(a);
        k.push_back(b);
      }
    }
    auto next = rank_keys(keys);
    int next_classes = count_classes(next);
    color = std::move(next);
    if (next_classes == classes) break;
    classes = next_classes;
  }
  return color;
}

struct Labeller {
  const PortGraph& g;
  const std::vector<std::vector<int>>& out_order;  // per unordered node
  std::vector<int> label;
  std::vector<int> order;

  void visit(int x) {
    if (label[x] < 0) {
      label[x] = static_cast<int>(order.size());
      order.push_back(x);
    }
  }

  void sweep(std::size_t head) {
    for (; head < order.size(); ++head) {
      int x = order[head];
      for (int p = 0; p < g.in_arity(x); ++p) {
        const End& s = g.in_src[g.in_off[x] + p];
        if (s.node != kBoundary) visit(s.node);
      }
      for (int p = 0; p < g.out_arity(x); ++p) {
        int q = g.unordered[x] ? out_order[x][p] : p;
        const End& t = g.out_dst[g.out_off[x] + q];
        if (t.node != kBoundary) visit(t.node);
      }
    }
  }

  // Encodes the nodes order[from..] with labels relative to `base`.
  void encode(std::size_t from, int base, std::vector<std::int32_t>& out) const {
    auto src = [&](const End& s) {
      if (s.node == kBoundary) {
        out.push_back(-1);
        out.push_back(s.port);
      } else {
        out.push_back(label[s.node] - base);
        out.push_back(g.unordered[s.node] ? -1 : s.port);
      }
    };
    for (std::size_t i = from; i < order.size(); ++i) {
      int x = order[i];
      out.push_back(g.label[x]);
      out.push_back(g.in_arity(x));
      out.push_back(g.out_arity(x));
      for (int p = 0; p < g.in_arity(x); ++p) src(g.in_src[g.in_off[x] + p]);
    }
  }
};

struct Attempt {
  std::vector<std::int32_t> code;
  std::vector<int> order;
};

Attempt label_once(const PortGraph& g, const std::vector<std::vector<int>>& out_order,
                   const std::vector<int>* color) {
  const int n = g.size();
  Labeller lab{g, out_order, std::vector<int>(n, -1), {}};
  for (const End& t : g.dom_dst) {
    if (t.node != kBoundary) lab.visit(t.node);
  }
  for (const End& s : g.cod_src) {
    if (s.node != kBoundary) lab.visit(s.node);
  }
  lab.sweep(0);

  Attempt out;
  out.code.push_back(n);
  out.code.push_back(static_cast<std::int32_t>(g.dom.size()));
  out.code.insert(out.code.end(), g.dom.begin(), g.dom.end());
  out.code.push_back(static_cast<std::int32_t>(g.cod.size()));
  out.code.insert(out.code.end(), g.cod.begin(), g.cod.end());
  lab.encode(0, 0, out.code);
  for (const End& s : g.cod_src) {
    if (s.node == kBoundary) {
      out.code.push_back(-1);
      out.code.push_back(s.port);
    } else {
      out.code.push_back(lab.label[s.node]);
      out.code.push_back(g.unordered[s.node] ? -1 : s.port);
    }
  }
  if (static_cast<int>(lab.order.size()) == n) {
    out.order = std::move(lab.order);
    return out;
  }

  // Boundary-free components: each is labelled from its best start node and
  // the components are concatenated in order of their codes.
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> comps;
  for (int x = 0; x < n; ++x) {
    if (lab.label[x] >= 0 || comp[x] >= 0) continue;
    int c = static_cast<int>(comps.size());
    comps.emplace_back();
    std::vector<int> stack{x};
    comp[x] = c;
    while (!stack.empty()) {
      int y = stack.back();
      stack.pop_back();
      comps[c].push_back(y);
      auto push = [&](const End& e) {
        if (e.node != kBoundary && comp[e.node] < 0) {
          comp[e.node] = c;
          stack.push_back(e.node);
        }
      };
      for (int p = 0; p < g.in_arity(y); ++p) push(g.in_src[g.in_off[y] + p]);
      for (int p = 0; p < g.out_arity(y); ++p) push(g.out_dst[g.out_off[y] + p]);
    }
  }
  struct Piece {
    std::vector<std::int32_t> code;
    std::vector<int> order;
  };
  std::vector<Piece> pieces;
  for (const auto& members : comps) {
    std::int64_t best_key = INT64_MAX;
    for (int y : members) {
      std::int64_t k = color ? (*color)[y] : g.label[y];
      best_key = std::min(best_key, k);
    }
    Piece best;
    bool have = false;
    for (int y : members) {
      std::int64_t k = color ? (*color)[y] : g.label[y];
      if (k != best_key) continue;
      Labeller local{g, out_order, std::vector<int>(n, -1), {}};
      local.visit(y);
      local.sweep(0);
      Piece p;
      local.encode(0, 0, p.code);
      if (!have || p.code < best.code) {
        p.order = std::move(local.order);
        best = std::move(p);
        have = true;
      }
    }
    pieces.push_back(std::move(best));
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.code < b.code; });
  out.order = std::move(lab.order);
  out.order.reserve(n);
  for (auto& p : pieces) {
    out.code.push_back(static_cast<std::int32_t>(p.order.size()));
    out.code.insert(out.code.end(), p.code.begin(), p.code.end());
    out.order.insert(out.order.end(), p.order.begin(), p.order.end());
  }
  return out;
}

}  // namespace

Canon canonicalize(const PortGraph& g) {
  const int n = g.size();
  bool any_unordered = std::any_of(g.unordered.begin(), g.unordered.end(), [](auto u) { return u != 0; });
  std::vector<std::vector<int>> out_order(n);

  if (!any_unordered) {
    // Colours only sharpen the choice of start nodes on free components;
    // labels alone are enough there and much cheaper.
    auto a = label_once(g, out_order, nullptr);
    return {std::move(a.code), std::move(a.order)};
  }

  auto color = refine_colors(g);
  // Order each unordered node's outputs by an invariant key; remember the
  // runs of equal keys, whose internal order must be tried exhaustively.
  struct Tie {
    int node;
    int begin;
    int end;
  };
  std::vector<Tie> ties;
  for (int x = 0; x < n; ++x) {
    if (!g.unordered[x]) continue;
    auto key = [&](int p) {
      const End& t = g.out_dst[g.out_off[x] + p];
      return t.node == kBoundary ? std::make_tuple(0, t.port, 0) : std::make_tuple(1, color[t.node], t.port);
    };
    auto& ord = out_order[x];
    ord.resize(g.out_arity(x));
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return key(a) < key(b); });
    for (int i = 0; i < static_cast<int>(ord.size());) {
      int j = i + 1;
      while (j < static_cast<int>(ord.size()) && key(ord[j]) == key(ord[i])) ++j;
      if (j - i > 1) ties.push_back({x, i, j});
      i = j;
    }
  }

  Attempt best = label_once(g, out_order, &color);
  // Odometer over the permutations of every tie run.
  for (;;) {
    std::size_t t = 0;
    for (; t < ties.size(); ++t) {
      auto& ord = out_order[ties[t].node];
      if (std::next_permutation(ord.begin() + ties[t].begin, ord.begin() + ties[t].end)) break;
    }
    if (t == ties.size()) break;
    Attempt a = label_once(g, out_order, &color);
    if (a.code < best.code) best = std::move(a);
  }
  return {std::move(best.code), std::move(best.order)};
}

std::string render_code(const std::vector<std::int32_t>& code) {
  std::string out;
  out.reserve(code.size() * 3);
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(code[i]);
  }
  return out;
}

}  // namespace freemarkov::detail
