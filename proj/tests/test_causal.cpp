#include <doctest.h>

#include <algorithm>
#include <random>

#include "enumerate.hpp"
#include "freemarkov/causal.hpp"
#include "random_diagrams.hpp"

using namespace freemarkov;

namespace {

DagPtr dag(std::vector<std::string> vs, std::vector<std::pair<std::string, std::string>> arrows) {
  return std::make_shared<const OrderedDag>(std::move(vs), std::move(arrows));
}

Diagram gen(const CausalModel& m, const std::string& v) {
  return atom(m.sig, NodeValue::gen(m.sig->generator(mechanism_name(v))));
}

DagHom hom(const DagPtr& h, const DagPtr& g, std::vector<int> vmap) { return {h, g, std::move(vmap)}; }

// Random diagram over Cau(G) built from its generators.
Diagram random_causal(const CausalModel& m, std::mt19937& rng, int nodes) {
  return testing::random_diagram(m.sig, rng, nodes, 0.5);
}

}  // namespace

TEST_CASE("cau") {
  auto one = cau(dag({"v"}, {}));
  CHECK(one.sig->letters() == std::vector<Letter>{"v"});
  CHECK(one.sig->generator_count() == 1);
  CHECK(one.sig->gen_dom(0).empty());
  CHECK(one.sig->generator_name(0) == "k_v");

  auto collider = cau(dag({"v1", "v2", "v3"}, {{"v2", "v3"}, {"v1", "v3"}}));
  CHECK(collider.sig->generators()[2].dom == Word{"v1", "v2"});
  CHECK(collider.sig->generators()[2].cod == Word{"v3"});
  CHECK(collider.sig->generators()[0].dom.empty());
}

TEST_CASE("causal_effect examples") {
  auto m = cau(dag({"v1", "v2", "v3"}, {{"v1", "v2"}, {"v2", "v3"}}));
  CHECK(isomorphic(causal_effect(m, {}, {"v1"}), gen(m, "v1")));
  CHECK(isomorphic(causal_effect(m, {"v2"}, {"v3"}), gen(m, "v3")));
  auto joint = causal_effect(m, {}, {"v2", "v3"});
  auto expected = compose(tensor(identity(m.sig, Word{"v2"}), gen(m, "v3")),
                          compose(atom(m.sig, NodeValue::dup(1)), compose(gen(m, "v2"), gen(m, "v1"))));
  CHECK(equivalent(joint, expected));
  auto reversed = causal_effect(m, {}, {"v3", "v2"});
  CHECK(equivalent(reversed, compose(symmetry(m.sig, Word{"v2"}, Word{"v3"}), joint)));
  CHECK_THROWS_AS(causal_effect(m, {"v1", "v1"}, {"v2"}), Error);
  CHECK_THROWS_AS(causal_effect(m, {}, {"nope"}), Error);
}

TEST_CASE("preimage_word") {
  auto g = dag({"v"}, {});
  auto h = dag({"u1", "u2", "u3"}, {{"u1", "u3"}});
  auto collapse = make_refinement(hom(h, g, {0, 0, 0}));
  CHECK(preimage_word(collapse, {"v"}) == Word{"u1", "u2", "u3"});
  CHECK(preimage_word(collapse, {}) == Word{});
  auto id = make_refinement(identity_hom(h));
  CHECK(preimage_word(id, {"u3", "u1"}) == Word{"u3", "u1"});
  auto g2 = dag({"a", "b"}, {});
  auto partial = make_refinement(hom(dag({"u"}, {}), g2, {1}));
  CHECK(preimage_word(partial, {"a"}).empty());
  CHECK(preimage_word(partial, {"b", "a"}) == Word{"u"});
}

TEST_CASE("refine examples") {
  auto g = dag({"v1", "v2"}, {{"v1", "v2"}});
  auto m = cau(g);
  auto id = make_refinement(identity_hom(g));
  std::mt19937 rng(5);
  for (int i = 0; i < 50; ++i) {
    auto d = random_causal(m, rng, 1 + rng() % 6);
    CHECK(equivalent(refine(id, d), d));
  }

  // Only v2 is hit: v1 refines to nothing.
  auto h = dag({"u"}, {});
  auto point = make_refinement(hom(h, g, {1}));
  CHECK(refine(point, atom(m.sig, NodeValue::dup(0))).node_count() == 0);
  CHECK(refine(point, atom(m.sig, NodeValue::disc(0))).node_count() == 0);
  auto hm = point.target_model;
  CHECK(equivalent(refine(point, gen(m, "v2")), gen(hm, "u")));
  CHECK(refine(point, gen(m, "v1")).node_count() == 0);

  // Splitting v2 into two independent vertices.
  auto split = dag({"u1", "u2", "u3"}, {{"u1", "u2"}, {"u1", "u3"}});
  auto s = make_refinement(hom(split, g, {0, 1, 1}));
  auto dup2 = refine(s, atom(m.sig, NodeValue::dup(1)));
  auto sm = s.target_model;
  auto interleaved = compose(tensor(tensor(identity(sm.sig, Word{"u2"}), symmetry(sm.sig, Word{"u2"}, Word{"u3"})),
                                    identity(sm.sig, Word{"u3"})),
                             tensor(atom(sm.sig, NodeValue::dup(1)), atom(sm.sig, NodeValue::dup(2))));
  CHECK(isomorphic(dup2, interleaved));
  CHECK(isomorphic(refine(s, atom(m.sig, NodeValue::disc(1))), disc_word(sm.sig, Word{"u2", "u3"})));
  auto k2 = refine(s, gen(m, "v2"));
  CHECK(k2.dom_word() == Word{"u1"});
  CHECK(k2.cod_word() == Word{"u2", "u3"});
  CHECK(equivalent(k2, compose(tensor(gen(sm, "u2"), gen(sm, "u3")), atom(sm.sig, NodeValue::dup(0)))));
  CHECK_THROWS_AS(refine(s, gen(sm, "u1")), Error);
}

TEST_CASE("refine is a strict Markov functor") {
  auto g = dag({"a", "b", "c"}, {{"a", "b"}, {"a", "c"}, {"b", "c"}});
  auto m = cau(g);
  auto h = dag({"x", "y", "z", "w"}, {{"x", "y"}, {"x", "z"}, {"y", "w"}, {"z", "w"}});
  auto homs = testing::all_homs(h, g);
  REQUIRE(homs.size() > 3);
  std::mt19937 rng(11);
  for (const auto& phi : homs) {
    auto r = make_refinement(phi);
    for (int v = 0; v < 3; ++v) {
      auto pre = r.functor.letters[v];
      CHECK(isomorphic(refine(r, atom(m.sig, NodeValue::dup(v))), dup_word(r.target_model.sig, pre)));
      CHECK(isomorphic(refine(r, atom(m.sig, NodeValue::disc(v))), disc_word(r.target_model.sig, pre)));
    }
    for (int i = 0; i < 10; ++i) {
      auto f = random_causal(m, rng, 1 + rng() % 4);
      auto k = random_causal(m, rng, 1 + rng() % 4);
      CHECK(isomorphic(refine(r, tensor(f, k)), tensor(refine(r, f), refine(r, k))));
      auto closer = disc_word(m.sig, f.cod());
      CHECK(equivalent(refine(r, compose(closer, f)), compose(refine(r, closer), refine(r, f))));
      auto opener = compose(tensor(f, identity(m.sig, f.dom())), dup_word(m.sig, f.dom()));
      CHECK(equivalent(refine(r, opener),
                       compose(refine(r, tensor(f, identity(m.sig, f.dom()))), refine(r, dup_word(m.sig, f.dom())))));
    }
  }
}

TEST_CASE("intervene") {
  auto chain = cau(dag({"v1", "v2"}, {{"v1", "v2"}}));
  auto iv = intervene(chain, {"v2"});
  CHECK(iv.model.dag->arrows().empty());
  auto image = refine(iv.refinement, gen(chain, "v2"));
  CHECK(equivalent(image, intervened_mechanism(iv, 1)));
  CHECK(equivalent(image, tensor(gen(iv.model, "v2"), atom(iv.model.sig, NodeValue::disc(0)))));
  CHECK(equivalent(refine(iv.refinement, gen(chain, "v1")), gen(iv.model, "v1")));

  auto root = intervene(chain, {"v1"});
  CHECK(*root.model.dag == *chain.dag);
  CHECK(equivalent(refine(root.refinement, gen(chain, "v2")), gen(root.model, "v2")));

  auto none = intervene(chain, {});
  CHECK(*none.model.dag == *chain.dag);
  CHECK_THROWS_AS(intervene(chain, {"v2", "v2"}), Error);

  // Every vertex of every small graph.
  for (const auto& g : testing::all_dags_up_to(4)) {
    auto m = cau(g);
    for (int u = 0; u < static_cast<int>(g->size()); ++u) {
      auto one = intervene(m, {g->name(u)});
      CHECK(equivalent(refine(one.refinement, atom(m.sig, NodeValue::gen(u))), intervened_mechanism(one, u)));
      for (int x = 0; x < static_cast<int>(g->size()); ++x) {
        if (x == u) continue;
        CHECK(equivalent(refine(one.refinement, atom(m.sig, NodeValue::gen(x))), atom(one.model.sig, NodeValue::gen(x))));
      }
    }
  }
}

TEST_CASE("check_cond_preserve examples") {
  auto g = dag({"v1", "v2", "v3"}, {{"v1", "v2"}, {"v2", "v3"}});
  auto id = make_refinement(identity_hom(g));
  CHECK(check_cond_preserve(id, {"v1"}, {"v3"}));
  CHECK(check_cond_preserve(id, {}, {"v2", "v1"}));
  auto two = dag({"a", "b"}, {{"a", "b"}});
  auto collapse = make_refinement(hom(g, two, {0, 0, 1}));
  CHECK(check_cond_preserve(collapse, {}, {"b"}));
  auto splitting = make_refinement(hom(dag({"u1", "u2", "u3"}, {{"u1", "u3"}, {"u2", "u3"}}), two, {0, 0, 1}));
  CHECK(check_cond_preserve(splitting, {"a"}, {"b"}));
  CHECK(check_cond_preserve(splitting, {}, {"b", "a"}));

  // A tampered image of k_v2 that forgets its input is caught.
  auto bad = id;
  auto& sig = bad.target_model.sig;
  bad.functor.generators[1] =
      compose(atom(sig, NodeValue::gen(1)), compose(atom(sig, NodeValue::gen(0)), atom(sig, NodeValue::disc(0))));
  CHECK_FALSE(check_cond_preserve(bad, {"v1"}, {"v2"}));
  CHECK(check_cond_preserve(bad, {}, {"v1"}));
}

TEST_CASE("conditionals are preserved on all graphs up to three vertices") {
  auto dags = testing::all_dags_up_to(3);
  int checked = 0;
  for (const auto& g : dags) {
    for (const auto& h : dags) {
      for (const auto& phi : testing::all_homs(h, g)) {
        auto r = make_refinement(phi);
        const int n = static_cast<int>(g->size());
        for (unsigned sm = 0; sm < (1u << n); ++sm) {
          for (unsigned tm = 0; tm < (1u << n); ++tm) {
            Word v, w;
            for (int x = 0; x < n; ++x) {
              if (sm >> x & 1) v.push_back(g->name(x));
              if (tm >> x & 1) w.push_back(g->name(x));
            }
            CHECK(check_cond_preserve(r, v, w));
            ++checked;
          }
        }
      }
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("check_functoriality") {
  auto g = dag({"v1", "v2", "v3"}, {{"v1", "v2"}, {"v2", "v3"}});
  auto mid = dag({"a", "b"}, {{"a", "b"}});
  auto point = dag({"p"}, {});
  CHECK(check_functoriality(identity_hom(g), identity_hom(g)));
  // Collapse a 3-chain to a point in two steps: G'' = chain, G' = 2-chain, G = point.
  auto psi = hom(g, mid, {0, 0, 1});
  auto phi = hom(mid, point, {0, 0});
  CHECK(check_functoriality(psi, phi));
  CHECK(check_functoriality(identity_hom(g), hom(g, mid, {0, 1, 1})));
  CHECK_THROWS_AS(check_functoriality(psi, psi), Error);

  auto dags = testing::all_dags_up_to(3);
  int pairs = 0;
  for (const auto& a : dags)
    for (const auto& b : dags)
      for (const auto& c : dags)
        for (const auto& p1 : testing::all_homs(a, b))
          for (const auto& p2 : testing::all_homs(b, c)) {
            CHECK(check_functoriality(p1, p2));
            ++pairs;
          }
  CHECK(pairs > 100);
}
