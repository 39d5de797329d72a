#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "freemarkov/diagram.hpp"
#include "freemarkov/surgery.hpp"

namespace freemarkov {

/// Duplicate on a word, interleaved: dom w, cod w·w.
Diagram dup_word(const SignaturePtr& sig, const LetterIds& w);
Diagram dup_word(const SignaturePtr& sig, const Word& w);
/// Tensor of per-letter discards: dom w, cod empty.
Diagram disc_word(const SignaturePtr& sig, const LetterIds& w);
Diagram disc_word(const SignaturePtr& sig, const Word& w);

/// The Markov templates: per letter coassociativity, left/right counitality
/// and cocommutativity, per generator discard-naturality, each in both
/// directions, plus the empty template (first).
std::vector<Template> markov_templates(const SignaturePtr& sig);

/// Nodes whose every forward path dies in terminal nodes (for duplicates:
/// through at least one prong). Sorted ids.
std::vector<int> quasi_terminal_set(const Diagram& d);
bool is_markov_minimal(const Diagram& d);

/// Removes counit redexes (a duplicate prong feeding a discard) and discard
/// redexes (a generator whose outputs all feed discards) until none remain.
Diagram normalize(const Diagram& d);
/// Same rewriting with the redex chosen at random at every step.
Diagram normalize(const Diagram& d, std::mt19937_64& rng);
/// Every intermediate diagram of a normalization run, input first.
std::vector<Diagram> normalize_trace(const Diagram& d, std::mt19937_64* rng = nullptr);

/// A Markov-minimal diagram with each maximal same-letter duplicate tree
/// contracted to one copy bundle with unordered outputs.
struct CongruenceForm {
  struct Node {
    NodeValue value;          // for bundles: dup on the bundle letter
    bool bundle = false;
    int outputs = 0;          // bundle arity k >= 2
    std::vector<int> merged;  // original node ids
  };
  std::vector<Node> nodes;
  std::vector<std::int32_t> code;  // canonical, includes dom/cod
  std::string certificate;
};

/// Throws Error if d is not Markov minimal.
CongruenceForm congruence_form(const Diagram& d);
/// Equality up to coassociativity/cocommutativity surgeries. Both inputs
/// must be Markov minimal.
bool markov_congruent(const Diagram& a, const Diagram& b);

/// Equality of morphisms in the free Markov category.
bool equivalent(const Diagram& a, const Diagram& b);
/// A complete invariant for equivalent(): equal codes iff equivalent.
std::vector<std::int32_t> equivalence_code(const Diagram& d);

/// Necessary conditions for congruence, computed on the bundle-contracted
/// diagram restricted to non-quasi-terminal nodes.
struct CongruenceInvariants {
  std::vector<NodeValue> values;                   // sorted multiset
  std::vector<std::vector<std::int32_t>> paths;    // maximal paths into cod
  std::vector<std::vector<std::int32_t>> splits;   // splitter paths between cod ports
  friend bool operator==(const CongruenceInvariants&, const CongruenceInvariants&) = default;
};

CongruenceInvariants congruence_invariants(const Diagram& d);

/// A strict Markov functor between free Markov categories, determined by
/// the images of letters (words) and generators (diagrams).
struct MarkovFunctor {
  SignaturePtr source;
  SignaturePtr target;
  std::vector<LetterIds> letters;    // indexed by source LetterId
  std::vector<Diagram> generators;   // indexed by source GenId
};

Report validate_functor(const MarkovFunctor& f);
/// Node-by-node substitution: dup/disc go to dup_word/disc_word of the
/// image word, generators to their image diagrams.
Diagram apply_functor(const MarkovFunctor& f, const Diagram& d);

}  // namespace freemarkov
