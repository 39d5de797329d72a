#pragma once

// Canonical labelling of anchored port graphs. Shared by plain diagram
// isomorphism and the copy-bundle congruence form, whose bundle nodes have
// unordered outputs.

#include <cstdint>
#include <string>
#include <vector>

#include "freemarkov/diagram.hpp"

namespace freemarkov::detail {

struct End {
  int node = kBoundary;  // kBoundary: dom port (as source) or cod port (as target)
  int port = 0;
};

struct PortGraph {
  std::vector<std::int32_t> label;
  std::vector<std::uint8_t> unordered;  // outputs are interchangeable
  std::vector<int> in_off{0};
  std::vector<int> out_off{0};
  std::vector<End> in_src;
  std::vector<End> out_dst;
  std::vector<std::int32_t> dom;
  std::vector<std::int32_t> cod;
  std::vector<End> dom_dst;
  std::vector<End> cod_src;

  int size() const { return static_cast<int>(label.size()); }
  int in_arity(int x) const { return in_off[x + 1] - in_off[x]; }
  int out_arity(int x) const { return out_off[x + 1] - out_off[x]; }
  int add_node(std::int32_t lab, int in, int out, bool unord);
};

inline std::int32_t node_label(NodeValue v) {
  return (static_cast<std::int32_t>(v.kind) << 24) | v.id;
}

PortGraph port_graph(const Diagram& d);

struct Canon {
  std::vector<std::int32_t> code;
  std::vector<int> order;  // order[label] = node
};

Canon canonicalize(const PortGraph& g);

std::string render_code(const std::vector<std::int32_t>& code);

}  // namespace freemarkov::detail
