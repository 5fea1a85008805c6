#pragma once

// Neighbourhood systems N(a) of an IFS, the transition automaton over them,
// the maximal system N0 with its word a0, the b0 certificate and the exact
// weights that feed the density representation.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wsc/ifs.hpp"

namespace wsc {

struct GeomOptions {
  int depth = 6;       // initial cover depth for intersection predicates
  int depth_cap = 24;  // escalation stops here; undecided members are kept
};

/// Canonically ordered set of relative maps.
struct NeighbourhoodSystem {
  std::vector<Similarity> maps;
  std::vector<bool> unknown;  // member kept only because its predicate stayed undecided

  int size() const { return static_cast<int>(maps.size()); }
  bool contains_identity() const;
  int unknown_count() const;
  /// Position of f, or -1.
  int index_of(const Similarity& f) const;
  std::size_t hash() const;
  friend bool operator==(const NeighbourhoodSystem& a, const NeighbourhoodSystem& b) { return a.maps == b.maps; }
};

/// A system together with the unnormalized p-mass of the words realizing each map.
struct WeightedSystem {
  NeighbourhoodSystem base;
  std::vector<mpq_class> weights;

  mpq_class total() const;
  std::vector<mpq_class> normalized() const;
};

/// Entry of a transfer matrix: mass moving from member `from` of the source
/// state to member `to` of the target state.
struct TransferEntry {
  int from = 0;
  int to = 0;
  mpq_class coef;
  double coef_d = 0.0;
};

/// Direct enumeration of N(a) over the ratio window, with per-map word mass.
WeightedSystem neighbourhood_weighted(const IFS& ifs, std::span<const Symbol> a, const GeomOptions& geom = {});
NeighbourhoodSystem neighbourhood_system(const IFS& ifs, std::span<const Symbol> a, const GeomOptions& geom = {});

/// N(aj) from N(a), with the transfer entries that carry weights across.
struct StepResult {
  NeighbourhoodSystem system;
  std::vector<TransferEntry> transfer;
};
StepResult transition_step(const IFS& ifs, const NeighbourhoodSystem& state, Symbol j, const GeomOptions& geom = {});

/// Exhaustive enumeration over Gamma^|a| (equicontractive) or the full ratio
/// window, without merging prefixes. Used as an oracle.
WeightedSystem brute_force_weighted(const IFS& ifs, std::span<const Symbol> a, const GeomOptions& geom = {});

/// Interior-of-hull count N'(a) for d = 1; nullopt in higher dimension.
std::optional<int> interior_count(const IFS& ifs, const NeighbourhoodSystem& n);

struct AutomatonReport {
  struct State {
    int id = 0;
    Word word;  // shortest, then lexicographically first, word of length >= 1 reaching the state
    int depth = 0;
    int cardinality = 0;
    int unknown = 0;
    std::optional<int> interior;
  };
  std::vector<State> states;
  std::vector<std::array<int, 2>> edge_keys;  // (state, symbol)
  std::vector<int> edge_targets;
  bool closed = false;
  bool budget_exceeded = false;
  int max_cardinality = 0;
  int frontier_depth = 0;
};

/// Lazily built transition graph over canonical neighbourhood systems. State 0
/// is N(empty word) = {Id}.
class Automaton {
 public:
  explicit Automaton(IFS ifs, GeomOptions geom = {});

  const IFS& ifs() const { return ifs_; }
  const GeomOptions& geom() const { return geom_; }
  int state_count() const { return static_cast<int>(states_.size()); }
  const NeighbourhoodSystem& state(int id) const { return states_[static_cast<std::size_t>(id)].system; }

  /// Target state and transfer entries for (id, j); computed on first use.
  const StepResult& step_result(int id, Symbol j);
  int step(int id, Symbol j);
  /// State reached by reading w from the root.
  int walk(std::span<const Symbol> w);

  /// Breadth-first closure with budgets.
  AutomatonReport explore(int max_states, int max_depth);

  /// Exact unnormalized weights along w from the root.
  WeightedSystem weights(std::span<const Symbol> w);

 private:
  struct Node {
    NeighbourhoodSystem system;
    std::vector<int> edge;          // per symbol, -1 if unknown
    std::vector<StepResult> result;  // valid where edge >= 0
  };
  int intern(NeighbourhoodSystem s);

  IFS ifs_;
  GeomOptions geom_;
  std::vector<Node> states_;
  std::unordered_map<std::size_t, std::vector<int>> index_;
};

/// Shortest-then-lexicographic word of length >= 1 realizing the maximal
/// cardinality. Throws if the report is not closed.
Word find_a0(const AutomatonReport& report);

struct LemmaMaximalReport {
  int trials = 0;
  int passed = 0;
  int failed = 0;
  int undecided = 0;
  std::vector<Word> counterexamples;
  std::vector<Word> undecided_words;
  bool ok() const { return failed == 0 && undecided == 0 && passed == trials; }
};

/// Exact check N(c a0) = N0 for random prefixes c (lengths 0..max_prefix).
LemmaMaximalReport verify_lemma_maximal(const IFS& ifs, const Word& a0, const NeighbourhoodSystem& n0, int trials,
                                        std::uint64_t seed, int max_prefix = 12, const GeomOptions& geom = {});

struct B0Certificate {
  Word a0;
  Word b0;
  NeighbourhoodSystem n0;
  std::vector<int> family;  // indices into n0 of the members of F (Id first)
  std::vector<Word> b_h;    // parallel to family
  int disjointness_depth = 0;
  bool complete = false;
  std::string failure;  // stage description when incomplete
};

struct B0Budget {
  int max_match_nodes = 200000;
  int max_descendant_nodes = 1 << 16;
};

B0Certificate construct_b0(const IFS& ifs, const Word& a0, const NeighbourhoodSystem& n0, const B0Budget& budget = {},
                           const GeomOptions& geom = {});

struct CertificateCheck {
  bool identities = false;    // phi_b0 = h o phi_{b_h}
  bool neighbourhoods = false;  // N(b_h) = N0 and N(b0) = N0
  bool disjointness = false;  // B_b0 misses h(K) for h outside F
  std::vector<std::string> messages;
  bool ok() const { return identities && neighbourhoods && disjointness; }
};

/// Recheck of every certificate claim using direct enumeration, never the automaton.
CertificateCheck recheck_certificate(const IFS& ifs, const B0Certificate& cert, const GeomOptions& geom = {});

/// Total p-mass of the words c with phi_c = target.
mpq_class word_mass(const IFS& ifs, const Similarity& target, int max_nodes = 1 << 20);

struct ZetaCoefficients {
  /// coef[h][f] = sum of p_c over c with phi_c = phi_{b_h} o f (h in F, f in N0).
  std::vector<std::vector<mpq_class>> coef;
  std::vector<mpq_class> c_h;  // min over f of coef[h][f]
};

ZetaCoefficients compute_zeta_coefficients(const IFS& ifs, const B0Certificate& cert);

/// Unnormalized q~_h for a word ending in a0 b0, read from the weights at the
/// prefix of length |w| - |b0|. The result is indexed like cert.family.
std::vector<mpq_class> zeta_mixture_raw(Automaton& automaton, const B0Certificate& cert, std::span<const Symbol> w);

/// True when w ends with the word `suffix`.
bool ends_with(std::span<const Symbol> w, std::span<const Symbol> suffix);

}  // namespace wsc
