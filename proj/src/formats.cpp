#include <cctype>
#include <sstream>

#include "freemarkov/cli.hpp"

namespace freemarkov::cli {

namespace {

struct Field {
  std::string text;
  int column;
};

struct Line {
  int number;
  std::vector<Field> fields;
};

// Whitespace-separated fields per non-blank line, comments stripped.
std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    ++number;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      if (std::isspace(static_cast<unsigned char>(raw[i]))) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j]))) ++j;
      line.fields.push_back({std::string(raw.substr(i, j - i)), static_cast<int>(i) + 1});
      i = j;
    }
    if (!line.fields.empty()) out.push_back(std::move(line));
    start = end + 1;
  }
  return out;
}

[[noreturn]] void fail(const Line& line, std::size_t field, const std::string& what) {
  int column = field < line.fields.size() ? line.fields[field].column : 1;
  throw ParseError(line.number, column, what);
}

}  // namespace

SignaturePtr parse_signature(std::string_view text) {
  std::vector<Letter> letters;
  std::vector<GeneratorDecl> gens;
  for (const Line& line : split_lines(text)) {
    const auto& f = line.fields;
    if (f[0].text == "letters:") {
      for (std::size_t i = 1; i < f.size(); ++i) letters.push_back(f[i].text);
    } else if (f[0].text == "gen") {
      if (f.size() < 4 || f[2].text != ":") fail(line, 0, "expected 'gen NAME : DOM -> COD'");
      GeneratorDecl g{f[1].text, {}, {}};
      std::size_t i = 3;
      for (; i < f.size() && f[i].text != "->"; ++i) g.dom.push_back(f[i].text);
      if (i == f.size()) fail(line, f.size() - 1, "expected '->'");
      for (++i; i < f.size(); ++i) g.cod.push_back(f[i].text);
      gens.push_back(std::move(g));
    } else {
      fail(line, 0, "expected 'letters:' or 'gen', found '" + f[0].text + "'");
    }
  }
  return make_signature(std::move(letters), std::move(gens));
}

std::string print_signature(const Signature& sig) {
  std::ostringstream out;
  out << "letters:";
  for (const auto& a : sig.letters()) out << ' ' << a;
  out << '\n';
  for (const auto& g : sig.generators()) {
    out << "gen " << g.name << " :";
    for (const auto& a : g.dom) out << ' ' << a;
    out << " ->";
    for (const auto& a : g.cod) out << ' ' << a;
    out << '\n';
  }
  return out.str();
}

OrderedDag parse_dag(std::string_view text) {
  std::vector<std::string> vertices;
  std::vector<std::pair<std::string, std::string>> arrows;
  for (const Line& line : split_lines(text)) {
    const auto& f = line.fields;
    if (f[0].text == "vertices:") {
      for (std::size_t i = 1; i < f.size(); ++i) vertices.push_back(f[i].text);
    } else if (f[0].text == "arrow") {
      if (f.size() != 3) fail(line, 0, "expected 'arrow SRC DST'");
      arrows.emplace_back(f[1].text, f[2].text);
    } else {
      fail(line, 0, "expected 'vertices:' or 'arrow', found '" + f[0].text + "'");
    }
  }
  return OrderedDag(std::move(vertices), std::move(arrows));
}

std::string print_dag(const OrderedDag& dag) {
  std::ostringstream out;
  out << "vertices:";
  for (const auto& v : dag.vertices()) out << ' ' << v;
  out << '\n';
  for (const auto& [p, c] : dag.arrows()) out << "arrow " << dag.name(p) << ' ' << dag.name(c) << '\n';
  return out.str();
}

DagHom parse_hom(std::string_view text, const DagPtr& source, const DagPtr& target) {
  DagHom h{source, target, std::vector<int>(source->size(), -1)};
  for (const Line& line : split_lines(text)) {
    const auto& f = line.fields;
    if (f[0].text != "map" || f.size() != 3) fail(line, 0, "expected 'map SRC DST'");
    auto u = source->find(f[1].text);
    if (!u) fail(line, 1, "unknown source vertex " + f[1].text);
    auto v = target->find(f[2].text);
    if (!v) fail(line, 2, "unknown target vertex " + f[2].text);
    if (h.vmap[*u] != -1) fail(line, 1, "vertex " + f[1].text + " mapped twice");
    h.vmap[*u] = *v;
  }
  for (std::size_t u = 0; u < source->size(); ++u)
    if (h.vmap[u] == -1) throw Error("hom: vertex " + source->name(static_cast<int>(u)) + " is not mapped");
  auto report = validate_hom(h);
  if (!report.ok()) throw Error("hom: " + report.str());
  return h;
}

}  // namespace freemarkov::cli
