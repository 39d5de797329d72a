#include "freemarkov/signature.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace freemarkov {

std::string Report::str() const {
  std::string out;
  for (const auto& e : errors) {
    if (!out.empty()) out += '\n';
    out += e;
  }
  return out;
}

Word word_concat(const Word& u, const Word& v) {
  Word out;
  out.reserve(u.size() + v.size());
  out.insert(out.end(), u.begin(), u.end());
  out.insert(out.end(), v.begin(), v.end());
  return out;
}

bool is_singular(const Word& w) {
  std::set<std::string_view> seen;
  for (const auto& a : w) {
    if (!seen.insert(a).second) return false;
  }
  return true;
}

std::string to_string(const Word& w) {
  std::string out;
  for (const auto& a : w) {
    if (!out.empty()) out += ' ';
    out += a;
  }
  return out;
}

Signature::Signature(std::vector<Letter> letters, std::vector<GeneratorDecl> generators)
    : letters_(std::move(letters)), generators_(std::move(generators)) {
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    letter_index_.emplace(letters_[i], static_cast<LetterId>(i));
  }
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    generator_index_.emplace(generators_[i].name, static_cast<GenId>(i));
  }
  // Undeclared letters encode as -1 here; validate_signature() reports them.
  auto lenient = [this](const Word& w) {
    LetterIds ids;
    ids.reserve(w.size());
    for (const auto& a : w) {
      auto it = letter_index_.find(a);
      ids.push_back(it == letter_index_.end() ? -1 : it->second);
    }
    return ids;
  };
  for (const auto& g : generators_) {
    gen_dom_.push_back(lenient(g.dom));
    gen_cod_.push_back(lenient(g.cod));
  }
}

std::optional<LetterId> Signature::find_letter(std::string_view name) const {
  auto it = letter_index_.find(name);
  if (it == letter_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<GenId> Signature::find_generator(std::string_view name) const {
  auto it = generator_index_.find(name);
  if (it == generator_index_.end()) return std::nullopt;
  return it->second;
}

LetterId Signature::letter(std::string_view name) const {
  if (auto id = find_letter(name)) return *id;
  throw Error("undeclared letter " + std::string(name));
}

GenId Signature::generator(std::string_view name) const {
  if (auto id = find_generator(name)) return *id;
  throw Error("unknown generator " + std::string(name));
}

LetterIds Signature::encode(const Word& w) const {
  LetterIds ids;
  ids.reserve(w.size());
  for (const auto& a : w) ids.push_back(letter(a));
  return ids;
}

Word Signature::decode(std::span<const LetterId> ids) const {
  Word w;
  w.reserve(ids.size());
  for (LetterId id : ids) w.push_back(letter_name(id));
  return w;
}

bool operator==(const Signature& a, const Signature& b) {
  if (a.letters_ != b.letters_ || a.generators_.size() != b.generators_.size()) return false;
  for (std::size_t i = 0; i < a.generators_.size(); ++i) {
    const auto& x = a.generators_[i];
    const auto& y = b.generators_[i];
    if (x.name != y.name || x.dom != y.dom || x.cod != y.cod) return false;
  }
  return true;
}

Report validate_signature(const Signature& sig) {
  Report report;
  std::set<std::string> letters;
  for (const auto& a : sig.letters()) {
    if (a.empty()) report.add("empty letter identifier");
    if (!letters.insert(a).second) report.add("duplicate letter " + a);
  }
  std::set<std::string> gens;
  for (const auto& g : sig.generators()) {
    if (g.name.empty()) report.add("empty generator identifier");
    if (g.name == "dup" || g.name == "disc") report.add("reserved generator name " + g.name);
    if (!gens.insert(g.name).second) report.add("duplicate generator " + g.name);
    for (const Word* w : {&g.dom, &g.cod}) {
      for (const auto& a : *w) {
        if (!letters.count(a)) report.add("undeclared letter " + a + " in generator " + g.name);
      }
    }
  }
  return report;
}

SignaturePtr make_signature(std::vector<Letter> letters, std::vector<GeneratorDecl> generators) {
  auto sig = std::make_shared<Signature>(std::move(letters), std::move(generators));
  if (auto report = validate_signature(*sig); !report) throw Error(report.str());
  return sig;
}

// --- ordered DAGs ---------------------------------------------------------

Report validate_dag(const std::vector<std::string>& vertices,
                    const std::vector<std::pair<std::string, std::string>>& arrows) {
  Report report;
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!index.emplace(vertices[i], static_cast<int>(i)).second) {
      report.add("duplicate vertex " + vertices[i]);
    }
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& [s, t] : arrows) {
    auto si = index.find(s);
    auto ti = index.find(t);
    if (si == index.end()) report.add("unknown vertex " + s);
    if (ti == index.end()) report.add("unknown vertex " + t);
    if (si == index.end() || ti == index.end()) continue;
    if (s == t) {
      report.add("explicit loop at " + s + " (identity loops are implicit)");
    } else if (si->second > ti->second) {
      report.add("arrow " + s + " -> " + t + " goes against the vertex order");
    }
    if (!seen.insert({s, t}).second) report.add("duplicate arrow " + s + " -> " + t);
  }
  return report;
}

OrderedDag::OrderedDag(std::vector<std::string> vertices,
                       std::vector<std::pair<std::string, std::string>> arrows) {
  if (auto report = validate_dag(vertices, arrows); !report) throw Error(report.str());
  vertices_ = std::move(vertices);
  for (const auto& [s, t] : arrows) arrows_.emplace_back(index(s), index(t));
  std::sort(arrows_.begin(), arrows_.end());
  parents_.assign(vertices_.size(), {});
  children_.assign(vertices_.size(), {});
  for (const auto& [s, t] : arrows_) {
    parents_[t].push_back(s);
    children_[s].push_back(t);
  }
  for (auto& p : parents_) std::sort(p.begin(), p.end());
  for (auto& c : children_) std::sort(c.begin(), c.end());
}

OrderedDag dag_from_indices(std::vector<std::string> vertices,
                            const std::vector<std::pair<int, int>>& arrows) {
  std::vector<std::pair<std::string, std::string>> named;
  named.reserve(arrows.size());
  for (const auto& [s, t] : arrows) named.emplace_back(vertices.at(s), vertices.at(t));
  return OrderedDag(std::move(vertices), std::move(named));
}

std::optional<int> OrderedDag::find(std::string_view name) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i] == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

int OrderedDag::index(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw Error("unknown vertex " + std::string(name));
}

bool OrderedDag::has_arrow(int src, int dst) const {
  return std::binary_search(arrows_.begin(), arrows_.end(), std::make_pair(src, dst));
}

// --- homomorphisms ---------------------------------------------------------

Report validate_hom(const DagHom& h) {
  Report report;
  if (!h.source || !h.target) {
    report.add("hom without source or target graph");
    return report;
  }
  const auto& src = *h.source;
  const auto& dst = *h.target;
  if (h.vmap.size() != src.size()) {
    report.add("vertex map covers " + std::to_string(h.vmap.size()) + " of " +
               std::to_string(src.size()) + " source vertices");
    return report;
  }
  for (std::size_t i = 0; i < h.vmap.size(); ++i) {
    if (h.vmap[i] < 0 || h.vmap[i] >= static_cast<int>(dst.size())) {
      report.add("vertex " + src.name(static_cast<int>(i)) + " mapped outside the target");
      return report;
    }
  }
  for (std::size_t i = 1; i < h.vmap.size(); ++i) {
    if (h.vmap[i - 1] > h.vmap[i]) {
      report.add("order violation: " + src.name(static_cast<int>(i - 1)) + " < " +
                 src.name(static_cast<int>(i)) + " but images are reversed");
    }
  }
  for (const auto& [u, v] : src.arrows()) {
    int fu = h.vmap[u];
    int fv = h.vmap[v];
    if (fu != fv && !dst.has_arrow(fu, fv)) {
      report.add("arrow " + src.name(u) + " -> " + src.name(v) + " maps to non-arrow " +
                 dst.name(fu) + " -> " + dst.name(fv));
    }
  }
  return report;
}

DagHom compose_homs(const DagHom& g, const DagHom& f) {
  if (!f.target || !g.source || !(*f.target == *g.source)) {
    throw Error("compose_homs: target of the first hom differs from source of the second");
  }
  DagHom out{f.source, g.target, {}};
  out.vmap.reserve(f.vmap.size());
  for (int v : f.vmap) out.vmap.push_back(g.vmap.at(v));
  return out;
}

DagHom identity_hom(const DagPtr& dag) {
  DagHom h{dag, dag, {}};
  h.vmap.resize(dag->size());
  for (std::size_t i = 0; i < dag->size(); ++i) h.vmap[i] = static_cast<int>(i);
  return h;
}

}  // namespace freemarkov
