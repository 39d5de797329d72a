#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include "freemarkov/cli.hpp"
#include "freemarkov/markov.hpp"

namespace freemarkov::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Errors raised while reading one named input.
struct InputError : Error {
  InputError(const std::string& where, const std::string& what) : Error(where + ":" + what) {}
};

template <typename F>
auto from_input(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw InputError(where, e.what());
  } catch (const Error& e) {
    throw InputError(where, std::string(" ") + e.what());
  }
}

// "chainN" names the path v1 -> ... -> vN when no such file exists.
OrderedDag load_dag(const std::string& arg) {
  std::ifstream probe(arg);
  if (!probe && arg.rfind("chain", 0) == 0 && arg.size() > 5 &&
      arg.find_first_not_of("0123456789", 5) == std::string::npos) {
    int n = std::stoi(arg.substr(5));
    std::vector<std::string> names;
    std::vector<std::pair<int, int>> arrows;
    for (int i = 0; i < n; ++i) {
      names.push_back("v" + std::to_string(i + 1));
      if (i > 0) arrows.push_back({i - 1, i});
    }
    return dag_from_indices(std::move(names), arrows);
  }
  std::string text = read_file(arg);
  return from_input(arg, [&] { return parse_dag(text); });
}

Word split_word(const std::string& s) {
  Word w;
  std::string cur;
  for (char c : s + " ") {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!cur.empty()) w.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return w;
}

struct Config {
  std::optional<std::uint64_t> seed;
  int max_nodes = 100000;
};

// A term argument is literal source, or @path to read it from a file.
Diagram load_term(const std::string& arg, const SignaturePtr& sig, const Config& cfg, const std::string& name) {
  std::string where = name;
  std::string src = arg;
  if (!arg.empty() && arg[0] == '@') {
    where = arg.substr(1);
    src = read_file(where);
  }
  Diagram d = from_input(where, [&] { return parse_diagram(src, sig); });
  if (d.node_count() > cfg.max_nodes) {
    throw InputError(where, " " + std::to_string(d.node_count()) + " nodes exceed --max-nodes " +
                                std::to_string(cfg.max_nodes));
  }
  return d;
}

SignaturePtr load_signature(const std::string& path) {
  std::string text = read_file(path);
  return from_input(path, [&] { return parse_signature(text); });
}

void emit(std::ostream& out, const Diagram& d, bool dot) {
  if (dot)
    out << to_dot(d);
  else
    out << print_term(d) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Free Markov category diagrams: check, normalize, compare, and causal effects", "fmc"};
  app.require_subcommand(1);
  app.fallthrough();
  Config cfg;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "randomize the reduction order of normalize");
  app.add_option("--max-nodes", cfg.max_nodes, "reject input terms with more nodes")->check(CLI::NonNegativeNumber);

  std::string sig_path, term, term2, dag_path, on, given, at, dag_src, dag_dst, hom_path;
  bool dot = false;

  auto* check = app.add_subcommand("check", "elaborate a term and print its type");
  auto* normalize_cmd = app.add_subcommand("normalize", "print a Markov-minimal form of a term");
  auto* eq = app.add_subcommand("eq", "exit 0 iff two terms are equal in the free Markov category");
  auto* dot_cmd = app.add_subcommand("dot", "print a term as Graphviz");
  for (auto* sub : {check, normalize_cmd, eq, dot_cmd}) {
    sub->add_option("--sig", sig_path, "signature file")->required();
    sub->add_option("term", term, "term, or @file")->required();
  }
  eq->add_option("term2", term2, "second term, or @file")->required();
  normalize_cmd->add_flag("--dot", dot, "emit Graphviz instead of a term");

  auto* effect_cmd = app.add_subcommand("effect", "print the causal effect [on || given]");
  effect_cmd->add_option("--dag", dag_path, "DAG file, or chainN")->required();
  effect_cmd->add_option("--on", on, "target variable")->required();
  effect_cmd->add_option("--given", given, "source variable");
  effect_cmd->add_flag("--dot", dot, "emit Graphviz instead of a term");

  auto* intervene_cmd = app.add_subcommand("intervene", "print the intervened DAG and mechanism images");
  intervene_cmd->add_option("--dag", dag_path, "DAG file, or chainN")->required();
  intervene_cmd->add_option("--at", at, "intervened variable")->required();
  intervene_cmd->add_option("--term", term, "refine this term instead, or @file");

  auto* refine_cmd = app.add_subcommand("refine", "refine a term along a DAG hom H -> G");
  refine_cmd->add_option("--dag-src", dag_src, "source DAG H")->required();
  refine_cmd->add_option("--dag-dst", dag_dst, "target DAG G")->required();
  refine_cmd->add_option("--hom", hom_path, "hom file")->required();
  refine_cmd->add_option("--term", term, "term over Cau(G), or @file")->required();
  refine_cmd->add_flag("--dot", dot, "emit Graphviz instead of a term");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }
  if (*seed_opt) cfg.seed = seed;

  try {
    if (check->parsed()) {
      auto sig = load_signature(sig_path);
      Diagram d = load_term(term, sig, cfg, "term");
      auto show = [](const Word& w) { return w.empty() ? std::string("()") : to_string(w); };
      out << "ok: " << show(d.dom_word()) << " -> " << show(d.cod_word()) << '\n';
    } else if (normalize_cmd->parsed()) {
      auto sig = load_signature(sig_path);
      Diagram d = load_term(term, sig, cfg, "term");
      if (cfg.seed) {
        std::mt19937_64 rng(*cfg.seed);
        emit(out, normalize(d, rng), dot);
      } else {
        emit(out, normalize(d), dot);
      }
    } else if (dot_cmd->parsed()) {
      auto sig = load_signature(sig_path);
      out << to_dot(load_term(term, sig, cfg, "term"));
    } else if (eq->parsed()) {
      auto sig = load_signature(sig_path);
      Diagram a = load_term(term, sig, cfg, "term1");
      Diagram b = load_term(term2, sig, cfg, "term2");
      if (a.dom() != b.dom()) {
        out << "not equivalent: dom words differ\n";
        return 1;
      }
      if (a.cod() != b.cod()) {
        out << "not equivalent: cod words differ\n";
        return 1;
      }
      if (!equivalent(a, b)) {
        out << "not equivalent: normal forms are not congruent\n";
        return 1;
      }
      out << "equivalent\n";
    } else if (effect_cmd->parsed()) {
      auto model = cau(load_dag(dag_path));
      emit(out, causal_effect(model, split_word(given), split_word(on)), dot);
    } else if (intervene_cmd->parsed()) {
      auto model = cau(load_dag(dag_path));
      auto iv = intervene(model, split_word(at));
      if (!term.empty()) {
        emit(out, refine(iv.refinement, load_term(term, model.sig, cfg, "term")), false);
      } else {
        out << print_dag(*iv.model.dag);
        for (int u = 0; u < static_cast<int>(model.dag->size()); ++u) {
          out << model.sig->generator_name(u) << " => "
              << print_term(refine(iv.refinement, atom(model.sig, NodeValue::gen(u)))) << '\n';
        }
      }
    } else if (refine_cmd->parsed()) {
      auto h = std::make_shared<const OrderedDag>(load_dag(dag_src));
      auto g = std::make_shared<const OrderedDag>(load_dag(dag_dst));
      std::string text = read_file(hom_path);
      auto phi = from_input(hom_path, [&] { return parse_hom(text, h, g); });
      auto r = make_refinement(phi);
      emit(out, refine(r, load_term(term, r.source_model.sig, cfg, "term")), dot);
    }
  } catch (const std::exception& e) {
    err << "fmc: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace freemarkov::cli
