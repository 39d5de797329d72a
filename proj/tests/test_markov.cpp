#include <doctest.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>

#include "freemarkov/markov.hpp"
#include "freemarkov/surgery.hpp"
#include "oracles.hpp"
#include "random_diagrams.hpp"

using namespace freemarkov;
using testing::quasi_terminal_by_paths;

namespace {

Diagram gen(const SignaturePtr& s, const char* name) { return atom(s, NodeValue::gen(s->generator(name))); }
Diagram dup(const SignaturePtr& s, const char* a) { return atom(s, NodeValue::dup(s->letter(a))); }
Diagram disc(const SignaturePtr& s, const char* a) { return atom(s, NodeValue::disc(s->letter(a))); }
Diagram id(const SignaturePtr& s, Word w) { return identity(s, w); }

SignaturePtr abc() {
  return make_signature({"a", "b", "c"}, {{"f", {"a"}, {"b"}}, {"g", {"b"}, {"c"}}, {"k", {"a"}, {}}, {"e", {}, {"b"}}});
}

// One random Markov surgery, or d itself if nothing but the empty template matches.
Diagram random_surgery(const Diagram& d, const std::vector<Template>& ts, std::mt19937& rng) {
  for (int attempt = 0; attempt < 20; ++attempt) {
    const auto& t = ts[1 + rng() % (ts.size() - 1)];
    auto matches = find_matches(d, t);
    if (matches.empty()) continue;
    return apply_surgery(d, matches[rng() % matches.size()], t);
  }
  return d;
}

}  // namespace

TEST_CASE("markov_templates") {
  auto one = make_signature({"a"}, {});
  auto ts = markov_templates(one);
  CHECK(ts.size() == 9);
  CHECK(ts.front().name == "empty");
  for (const auto& t : ts) CHECK(validate_template(t).ok());
  CHECK_NOTHROW(require_symmetric(ts));

  auto s = abc();
  auto all = markov_templates(s);
  CHECK(all.size() == 1 + 8 * 3 + 2 * 4);
  for (const auto& t : all) CHECK(validate_template(t).ok());
  auto find = [&](const std::string& name) {
    return *std::find_if(all.begin(), all.end(), [&](const Template& t) { return t.name == name; });
  };
  auto kt = find("discard-nat(k)");
  CHECK(isomorphic(kt.omega, gen(s, "k")));
  CHECK(isomorphic(kt.lambda, disc(s, "a")));
  auto et = find("discard-nat(e)");
  CHECK(isomorphic(et.omega, compose(disc(s, "b"), gen(s, "e"))));
  CHECK(et.lambda.node_count() == 0);
  CHECK(et.lambda.dom().empty());
}

TEST_CASE("dup_word and disc_word") {
  auto s = abc();
  CHECK(dup_word(s, Word{}).node_count() == 0);
  CHECK(isomorphic(dup_word(s, Word{"a"}), dup(s, "a")));
  CHECK(isomorphic(disc_word(s, Word{"a", "b"}), tensor(disc(s, "a"), disc(s, "b"))));
  auto ab = dup_word(s, Word{"a", "b"});
  auto expected =
      compose(tensor(tensor(id(s, {"a"}), symmetry(s, Word{"a"}, Word{"b"})), id(s, {"b"})), tensor(dup(s, "a"), dup(s, "b")));
  CHECK(isomorphic(ab, expected));
  CHECK(ab.cod_word() == Word{"a", "b", "a", "b"});
  auto abc3 = dup_word(s, Word{"a", "b", "c"});
  CHECK(abc3.cod_word() == Word{"a", "b", "c", "a", "b", "c"});
  CHECK(well_formed(abc3).ok());
}

TEST_CASE("quasi_terminal_set examples") {
  auto s = abc();
  CHECK(quasi_terminal_set(id(s, {"a", "b"})).empty());
  auto fd = compose(disc(s, "b"), gen(s, "f"));
  CHECK(quasi_terminal_set(fd).size() == 2);
  auto half = compose(tensor(id(s, {"a"}), disc(s, "a")), dup(s, "a"));
  CHECK(quasi_terminal_set(half).size() == 2);
  CHECK_FALSE(is_markov_minimal(half));
  CHECK(is_markov_minimal(disc(s, "a")));
  CHECK(is_markov_minimal(id(s, {"c"})));
  CHECK(is_markov_minimal(gen(s, "k")));
  CHECK_FALSE(is_markov_minimal(fd));
}

TEST_CASE("quasi-terminal fixpoint vs maximal paths") {
  auto s = testing::rich();
  std::mt19937 rng(17);
  for (int i = 0; i < 500; ++i) {
    auto d = testing::random_diagram(s, rng, 1 + rng() % 8, 0.6);
    auto fix = quasi_terminal_set(d);
    auto paths = quasi_terminal_by_paths(d);
    // The path reading is contained in the fixpoint; both agree on minimality.
    CHECK(std::includes(fix.begin(), fix.end(), paths.begin(), paths.end()));
    auto terminal_only = [&](const std::vector<int>& xs) {
      return std::all_of(xs.begin(), xs.end(), [&](int x) { return d.out_arity(x) == 0; });
    };
    CHECK(is_markov_minimal(d) == terminal_only(paths));
    CHECK(is_markov_minimal(d) == terminal_only(fix));
  }
}

TEST_CASE("normalize examples") {
  auto s = abc();
  auto counit = compose(tensor(id(s, {"a"}), disc(s, "a")), dup(s, "a"));
  CHECK(isomorphic(normalize(counit), id(s, {"a"})));
  CHECK(isomorphic(normalize(compose(disc(s, "b"), gen(s, "f"))), disc(s, "a")));
  auto chain = seq(std::vector<Diagram>{gen(s, "f"), gen(s, "g"), disc(s, "c")});
  CHECK(isomorphic(normalize(chain), disc(s, "a")));
  auto trace = normalize_trace(chain);
  CHECK(trace.size() == 3);
  // Vacuous discard: a generator without outputs becomes discards.
  CHECK(isomorphic(normalize(gen(s, "k")), disc(s, "a")));
  // Both prongs discarded.
  auto both = compose(tensor(disc(s, "a"), disc(s, "a")), dup(s, "a"));
  CHECK(isomorphic(normalize(both), disc(s, "a")));
  // A discarded exogenous generator vanishes.
  CHECK(normalize(compose(disc(s, "b"), gen(s, "e"))).node_count() == 0);
}

TEST_CASE("congruence_form examples") {
  auto s = abc();
  auto left = compose(tensor(dup(s, "a"), id(s, {"a"})), dup(s, "a"));
  auto right = compose(tensor(id(s, {"a"}), dup(s, "a")), dup(s, "a"));
  CHECK(congruence_form(left).certificate == congruence_form(right).certificate);
  CHECK(markov_congruent(left, right));
  auto swapped = compose(symmetry(s, Word{"a"}, Word{"a"}), dup(s, "a"));
  CHECK(congruence_form(swapped).certificate == congruence_form(dup(s, "a")).certificate);
  auto cf = congruence_form(left);
  REQUIRE(cf.nodes.size() == 1);
  CHECK(cf.nodes[0].bundle);
  CHECK(cf.nodes[0].outputs == 3);
  CHECK(cf.nodes[0].merged.size() == 2);
  CHECK_THROWS_AS(congruence_form(compose(disc(s, "b"), gen(s, "f"))), Error);
  CHECK_THROWS_AS(markov_congruent(compose(disc(s, "b"), gen(s, "f")), disc(s, "a")), Error);

  // Dup next to a wire: cod rewirings are congruent exactly when the two
  // duplicate prongs stay on the same pair of cod ports.
  auto dw = tensor(dup(s, "a"), id(s, {"a"}));
  std::vector<int> p{0, 1, 2};
  do {
    auto rewired = compose(permutation(s, LetterIds{0, 0, 0}, p), dw);
    std::vector<int> prongs;
    for (int j = 0; j < 3; ++j)
      if (rewired.source_of({kBoundary, j}).node != kBoundary) prongs.push_back(j);
    bool same_pair = prongs == std::vector<int>{0, 1};
    CHECK(markov_congruent(rewired, dw) == same_pair);
  } while (std::next_permutation(p.begin(), p.end()));

  auto ab = tensor(disc(s, "a"), disc(s, "b"));
  auto ba = tensor(disc(s, "b"), disc(s, "a"));
  CHECK_FALSE(markov_congruent(ab, ba));
}

TEST_CASE("Markov laws hold under equivalent") {
  auto s = abc();
  for (const char* a : {"a", "b", "c"}) {
    auto d = dup(s, a);
    auto e = disc(s, a);
    auto i = id(s, {a});
    CHECK(equivalent(compose(tensor(d, i), d), compose(tensor(i, d), d)));
    CHECK(equivalent(compose(tensor(e, i), d), i));
    CHECK(equivalent(compose(tensor(i, e), d), i));
    CHECK(equivalent(compose(symmetry(s, Word{a}, Word{a}), d), d));
    CHECK_FALSE(equivalent(d, tensor(i, i)));
  }
  for (const auto& g : s->generators()) {
    auto f = atom(s, NodeValue::gen(s->generator(g.name)));
    CHECK(equivalent(compose(disc_word(s, g.cod), f), disc_word(s, g.dom)));
  }
  CHECK_FALSE(equivalent(dup(s, "a"), compose(tensor(id(s, {"a"}), disc(s, "a")), dup(s, "a"))));
  // Copying a generator's output is not copying its input.
  auto f = gen(s, "f");
  CHECK_FALSE(equivalent(compose(dup(s, "b"), f), compose(tensor(f, f), dup(s, "a"))));
  // ...unless it is deterministic by construction: a copied wire.
  CHECK(equivalent(compose(dup(s, "a"), id(s, {"a"})), dup(s, "a")));
}

TEST_CASE("normalize properties on random diagrams") {
  auto s = testing::rich();
  std::mt19937 rng(23);
  std::mt19937_64 order_rng(1);
  for (int i = 0; i < 400; ++i) {
    auto d = testing::random_diagram(s, rng, 1 + rng() % 12, 0.6);
    auto n = normalize(d);
    CHECK(is_markov_minimal(n));
    CHECK(n.dom() == d.dom());
    CHECK(n.cod() == d.cod());
    CHECK(isomorphic(normalize(n), n));
    auto r1 = normalize(d, order_rng);
    auto r2 = normalize(testing::shuffle_nodes(d, rng), order_rng);
    CHECK(markov_congruent(r1, n));
    CHECK(markov_congruent(r2, n));
    CHECK(equivalent(d, testing::shuffle_nodes(d, rng)));
  }
}

TEST_CASE("every normalization step is a Markov surgery") {
  auto s = testing::two_by_two();
  auto ts = markov_templates(s);
  std::mt19937 rng(31);
  std::mt19937_64 order_rng(2);
  int steps = 0;
  for (int i = 0; i < 400; ++i) {
    auto d = testing::random_diagram(s, rng, 1 + rng() % 5, 0.7);
    auto trace = normalize_trace(d, &order_rng);
    for (std::size_t k = 1; k < trace.size(); ++k) {
      CHECK(equivalent_bfs(trace[k - 1], trace[k], ts, 1, 10000) == Verdict::yes);
      CHECK(trace[k].node_count() < trace[k - 1].node_count());
      ++steps;
    }
  }
  CHECK(steps > 50);
}

TEST_CASE("equivalent is stable under random Markov surgeries") {
  auto s = testing::rich();
  auto ts = markov_templates(s);
  std::mt19937 rng(41);
  for (int i = 0; i < 200; ++i) {
    auto d = testing::random_diagram(s, rng, 1 + rng() % 6, 0.5);
    auto e = d;
    for (int k = 0; k < 3; ++k) e = random_surgery(e, ts, rng);
    CHECK(equivalent(d, e));
    CHECK(equivalence_code(d) == equivalence_code(e));
    CHECK(congruence_invariants(normalize(d)) == congruence_invariants(normalize(e)));
  }
}

TEST_CASE("equivalent agrees with bounded search") {
  auto s = testing::two_by_two();
  auto ts = markov_templates(s);
  std::mt19937 rng(43);
  std::vector<Diagram> pool;
  for (int i = 0; i < 60; ++i) pool.push_back(testing::random_diagram(s, rng, 1 + rng() % 3, 0.6));
  int conclusive = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i; j < pool.size(); j += 7) {
      auto v = equivalent_bfs(pool[i], pool[j], ts, 4, 2000);
      if (v == Verdict::inconclusive) continue;
      ++conclusive;
      CHECK((v == Verdict::yes) == equivalent(pool[i], pool[j]));
    }
  }
  CHECK(conclusive > 20);
}

TEST_CASE("equivalent is a monoidal congruence") {
  auto s = testing::rich();
  auto ts = markov_templates(s);
  std::mt19937 rng(47);
  for (int i = 0; i < 150; ++i) {
    auto d = testing::random_diagram(s, rng, 1 + rng() % 5);
    auto e = random_surgery(random_surgery(d, ts, rng), ts, rng);
    auto c = testing::random_diagram(s, rng, 1 + rng() % 4);
    CHECK(equivalent(tensor(c, d), tensor(c, e)));
    CHECK(equivalent(tensor(d, c), tensor(e, c)));
    // Close the codomain with discards and compose.
    auto closer = disc_word(s, d.cod());
    CHECK(equivalent(compose(closer, d), compose(closer, e)));
    auto opener = dup_word(s, d.dom());
    auto opened_d = compose(tensor(d, identity(s, d.dom())), opener);
    auto opened_e = compose(tensor(e, identity(s, d.dom())), opener);
    CHECK(equivalent(opened_d, opened_e));
  }
}

TEST_CASE("congruence_invariants") {
  auto s = abc();
  auto inv = congruence_invariants(id(s, {"a", "b"}));
  CHECK(inv.values.empty());
  CHECK(inv.paths.size() == 2);
  auto left = compose(tensor(dup(s, "a"), id(s, {"a"})), dup(s, "a"));
  auto right = compose(tensor(id(s, {"a"}), dup(s, "a")), dup(s, "a"));
  CHECK(congruence_invariants(left) == congruence_invariants(right));
  auto fg = compose(gen(s, "g"), gen(s, "f"));
  auto par = tensor(gen(s, "g"), gen(s, "f"));
  CHECK(congruence_invariants(fg).paths != congruence_invariants(par).paths);
}

TEST_CASE("apply_functor") {
  auto s = abc();
  // Identity functor.
  MarkovFunctor idf{s, s, {}, {}};
  for (int a = 0; a < 3; ++a) idf.letters.push_back({a});
  for (int g = 0; g < 4; ++g) idf.generators.push_back(atom(s, NodeValue::gen(g)));
  CHECK(validate_functor(idf).ok());
  std::mt19937 rng(3);
  auto t = make_signature({"x", "y"}, {{"p", {"x"}, {"y", "y"}}, {"q", {"y"}, {"x"}}, {"r", {}, {"y"}}});
  // a -> x, b -> y y, c -> empty.
  MarkovFunctor f{s, t, {{0}, {1, 1}, {}}, {}};
  f.generators.push_back(atom(t, NodeValue::gen(0)));                                                   // f: a -> b
  f.generators.push_back(disc_word(t, LetterIds{1, 1}));                                                // g: b -> c
  f.generators.push_back(gen(t, "q"));  // wrong shape
  f.generators.push_back(tensor(gen(t, "r"), gen(t, "r")));                                              // e: -> b
  CHECK_FALSE(validate_functor(f).ok());
  f.generators[2] = compose(disc_word(t, LetterIds{1, 1}), gen(t, "p"));  // k: a -> empty
  CHECK(validate_functor(f).ok());
  auto ts = markov_templates(s);
  for (int i = 0; i < 150; ++i) {
    auto d = testing::random_diagram(s, rng, 1 + rng() % 6, 0.5);
    CHECK(isomorphic(apply_functor(idf, d), d));
    auto fd = apply_functor(f, d);
    CHECK(well_formed(fd).ok());
    CHECK(fd.dom().size() == [&] {
      std::size_t n = 0;
      for (auto a : d.dom()) n += f.letters[a].size();
      return n;
    }());
    auto e = random_surgery(random_surgery(d, ts, rng), ts, rng);
    CHECK(equivalent(fd, apply_functor(f, e)));
    auto c = testing::random_diagram(s, rng, 1 + rng() % 3, 0.5);
    CHECK(isomorphic(apply_functor(f, tensor(d, c)), tensor(fd, apply_functor(f, c))));
    auto closer = disc_word(s, d.cod());
    CHECK(isomorphic(apply_functor(f, compose(closer, d)), compose(disc_word(t, fd.cod()), fd)));
  }
}
