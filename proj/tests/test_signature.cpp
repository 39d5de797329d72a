#include <doctest.h>

#include <random>

#include "freemarkov/signature.hpp"

using namespace freemarkov;

namespace {

bool mentions(const Report& r, const std::string& needle) {
  return r.str().find(needle) != std::string::npos;
}

DagPtr dag(std::vector<std::string> v, std::vector<std::pair<int, int>> arrows) {
  return std::make_shared<OrderedDag>(dag_from_indices(std::move(v), arrows));
}

}  // namespace

TEST_CASE("validate_signature") {
  CHECK(validate_signature(Signature({"a"}, {{"f", {"a"}, {"a", "a"}}})).ok());
  CHECK(validate_signature(Signature({"x", "y", "z"}, {})).ok());

  auto bad = validate_signature(Signature({"a"}, {{"f", {"a"}, {"b"}}}));
  CHECK_FALSE(bad.ok());
  CHECK(mentions(bad, "undeclared letter b"));

  CHECK(mentions(validate_signature(Signature({"a", "a"}, {})), "duplicate letter a"));
  CHECK(mentions(validate_signature(Signature({"a"}, {{"f", {}, {}}, {"f", {}, {}}})),
                 "duplicate generator f"));
  CHECK(mentions(validate_signature(Signature({"a"}, {{"dup", {"a"}, {}}})), "reserved"));
  CHECK_THROWS_AS(make_signature({"a"}, {{"f", {"a"}, {"b"}}}), Error);
}

TEST_CASE("signature lookup and encoding") {
  auto sig = make_signature({"a", "b"}, {{"f", {"a", "b"}, {"b"}}});
  CHECK(sig->letter("b") == 1);
  CHECK(sig->generator("f") == 0);
  CHECK(sig->gen_dom(0) == LetterIds{0, 1});
  CHECK(sig->decode(sig->encode({"b", "a", "b"})) == Word{"b", "a", "b"});
  CHECK_THROWS_AS(sig->encode({"c"}), Error);
  CHECK_FALSE(sig->find_generator("g"));
}

TEST_CASE("words") {
  Word w{"a", "b"};
  CHECK(word_concat({}, w) == w);
  CHECK(word_concat(w, {}) == w);
  CHECK(word_concat({"a", "b"}, {"c"}) == Word{"a", "b", "c"});
  CHECK(word_concat(word_concat({"a", "b"}, {"c"}), {}) == word_concat({"a"}, {"b", "c"}));

  CHECK(is_singular({}));
  CHECK(is_singular({"v1", "v2", "v3"}));
  CHECK_FALSE(is_singular({"v1", "v1"}));
}

TEST_CASE("word monoid laws on random words") {
  std::mt19937 rng(7);
  auto random_word = [&] {
    Word w(rng() % 5);
    for (auto& a : w) a = std::string(1, static_cast<char>('a' + rng() % 3));
    return w;
  };
  for (int i = 0; i < 200; ++i) {
    Word u = random_word(), v = random_word(), w = random_word();
    CHECK(word_concat(word_concat(u, v), w) == word_concat(u, word_concat(v, w)));
    CHECK(word_concat({}, w) == w);
    CHECK(word_concat(w, {}) == w);
  }
}

TEST_CASE("ordered dags") {
  auto report = validate_dag({"a", "b"}, {{"b", "a"}});
  CHECK(mentions(report, "against the vertex order"));
  CHECK(mentions(validate_dag({"a"}, {{"a", "a"}}), "loop"));
  CHECK(mentions(validate_dag({"a", "b"}, {{"a", "c"}}), "unknown vertex c"));
  CHECK(mentions(validate_dag({"a", "a"}, {}), "duplicate vertex"));
  CHECK(mentions(validate_dag({"a", "b"}, {{"a", "b"}, {"a", "b"}}), "duplicate arrow"));

  OrderedDag g({"v1", "v2", "v3"}, {{"v1", "v3"}, {"v2", "v3"}});
  CHECK(g.parents(2) == std::vector<int>{0, 1});
  CHECK(g.children(0) == std::vector<int>{2});
  CHECK(g.has_arrow(1, 2));
  CHECK_FALSE(g.has_arrow(0, 1));
}

TEST_CASE("validate_hom") {
  auto chain = dag({"v1", "v2", "v3"}, {{0, 1}, {1, 2}});
  auto point = dag({"p"}, {});
  CHECK(validate_hom({chain, point, {0, 0, 0}}).ok());
  CHECK(validate_hom(identity_hom(chain)).ok());

  auto two = dag({"u1", "u2"}, {{0, 1}});
  auto discrete = dag({"w1", "w2"}, {});
  auto bad = validate_hom({two, discrete, {0, 1}});
  CHECK(mentions(bad, "maps to non-arrow"));
  CHECK(mentions(validate_hom({discrete, discrete, {1, 0}}), "order violation"));
  CHECK(mentions(validate_hom({two, discrete, {0}}), "covers"));
  CHECK(mentions(validate_hom({two, discrete, {0, 5}}), "outside"));
}

TEST_CASE("compose_homs") {
  auto chain = dag({"v1", "v2", "v3"}, {{0, 1}, {1, 2}});
  auto pair = dag({"a", "b"}, {{0, 1}});
  auto big = dag({"x", "y", "z", "t"}, {{0, 1}, {1, 2}, {0, 3}, {2, 3}});
  DagHom collapse{chain, pair, {0, 0, 1}};
  DagHom embed{pair, big, {1, 2}};
  REQUIRE(validate_hom(collapse).ok());
  REQUIRE(validate_hom(embed).ok());

  auto c = compose_homs(embed, collapse);
  CHECK(c.vmap == std::vector<int>{1, 1, 2});  // computed by hand
  CHECK(validate_hom(c).ok());

  CHECK(compose_homs(identity_hom(pair), collapse).vmap == collapse.vmap);
  CHECK(compose_homs(collapse, identity_hom(chain)).vmap == collapse.vmap);
  CHECK_THROWS_AS(compose_homs(collapse, embed), Error);
}

TEST_CASE("hom composition is associative on random homs") {
  // All monotone maps between small random dags, filtered by validate_hom.
  std::mt19937 rng(11);
  auto random_dag = [&](int n) {
    std::vector<std::string> v;
    std::vector<std::pair<int, int>> arrows;
    for (int i = 0; i < n; ++i) v.push_back("v" + std::to_string(i));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng() % 2) arrows.emplace_back(i, j);
    return dag(v, arrows);
  };
  auto random_hom = [&](const DagPtr& s, const DagPtr& t) -> std::optional<DagHom> {
    for (int tries = 0; tries < 50; ++tries) {
      DagHom h{s, t, {}};
      for (std::size_t i = 0; i < s->size(); ++i) h.vmap.push_back(static_cast<int>(rng() % t->size()));
      std::sort(h.vmap.begin(), h.vmap.end());
      if (validate_hom(h).ok()) return h;
    }
    return std::nullopt;
  };
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    auto a = random_dag(1 + rng() % 4), b = random_dag(1 + rng() % 4), c = random_dag(1 + rng() % 4),
         d = random_dag(1 + rng() % 4);
    auto f = random_hom(a, b), g = random_hom(b, c), h = random_hom(c, d);
    if (!f || !g || !h) continue;
    ++checked;
    CHECK(compose_homs(*h, compose_homs(*g, *f)).vmap == compose_homs(compose_homs(*h, *g), *f).vmap);
    CHECK(validate_hom(compose_homs(*g, *f)).ok());
  }
  CHECK(checked > 50);
}
