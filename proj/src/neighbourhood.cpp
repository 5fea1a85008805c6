#include "wsc/neighbourhood.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace wsc {

bool NeighbourhoodSystem::contains_identity() const {
  return std::any_of(maps.begin(), maps.end(), [](const Similarity& f) { return f.is_identity(); });
}

int NeighbourhoodSystem::unknown_count() const {
  return static_cast<int>(std::count(unknown.begin(), unknown.end(), true));
}

int NeighbourhoodSystem::index_of(const Similarity& f) const {
  auto it = std::lower_bound(maps.begin(), maps.end(), f,
                             [](const Similarity& a, const Similarity& b) { return canonical_compare(a, b) < 0; });
  if (it != maps.end() && *it == f) return static_cast<int>(it - maps.begin());
  return -1;
}

std::size_t NeighbourhoodSystem::hash() const {
  std::size_t h = maps.size();
  for (const auto& m : maps) h = h * 0x9e3779b97f4a7c15ULL ^ m.hash();
  return h;
}

mpq_class WeightedSystem::total() const {
  mpq_class t = 0;
  for (const auto& w : weights) t += w;
  return t;
}

std::vector<mpq_class> WeightedSystem::normalized() const {
  const mpq_class t = total();
  std::vector<mpq_class> out = weights;
  if (t != 0)
    for (auto& w : out) w /= t;
  return out;
}

bool ends_with(std::span<const Symbol> w, std::span<const Symbol> suffix) {
  if (suffix.size() > w.size()) return false;
  return std::equal(suffix.begin(), suffix.end(), w.end() - static_cast<std::ptrdiff_t>(suffix.size()));
}

namespace {

Word concat(const Word& a, const Word& b) {
  Word r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

Predicate escalate_ball(const IFS& ifs, const Similarity& g, const Ball& ball, const GeomOptions& geom) {
  int depth = geom.depth;
  for (;;) {
    const Predicate p = cover_ball_predicate(ifs, g, ball, depth);
    if (p != Predicate::unknown || depth >= geom.depth_cap) return p;
    depth = std::min(geom.depth_cap, std::max(1, depth * 2));
  }
}

Predicate escalate_set(const IFS& ifs, const Similarity& g, const GeomOptions& geom) {
  int depth = geom.depth;
  for (;;) {
    const Predicate p = set_intersection_predicate(ifs, g, depth);
    if (p != Predicate::unknown || depth >= geom.depth_cap) return p;
    depth = std::min(geom.depth_cap, std::max(1, depth * 2));
  }
}

struct Seed {
  Similarity map;
  int source = 0;
  mpq_class weight;
};

struct Expansion {
  NeighbourhoodSystem system;
  std::vector<TransferEntry> transfer;
  std::vector<mpq_class> member_weight;
};

// Enumerates the maps g o phi_c with ratio <= 1 < ratio of g o phi_{c-}
// (c empty allowed when ratio(g) <= 1) whose image of K meets B(0,1).
Expansion expand_window(const IFS& ifs, std::vector<Seed> seeds, const GeomOptions& geom) {
  const FieldElement one = FieldElement::one(ifs.field());
  const Ball unit = Ball::unit(ifs.field(), ifs.dim());
  using Contribs = std::map<int, mpq_class>;
  struct Member {
    Similarity map;
    Contribs contrib;
    bool unknown = false;
  };
  std::unordered_map<Similarity, std::size_t, SimilarityHash> member_index;
  std::vector<Member> members;

  struct Node {
    Similarity map;
    Contribs contrib;
  };
  std::vector<Node> frontier;
  {
    std::unordered_map<Similarity, std::size_t, SimilarityHash> idx;
    for (auto& s : seeds) {
      auto [it, fresh] = idx.emplace(s.map, frontier.size());
      if (fresh) frontier.push_back({s.map, {}});
      frontier[it->second].contrib[s.source] += s.weight;
    }
  }
  while (!frontier.empty()) {
    std::vector<Node> next;
    std::unordered_map<Similarity, std::size_t, SimilarityHash> next_idx;
    for (auto& node : frontier) {
      if (node.map.ratio <= one) {
        const Predicate p = escalate_ball(ifs, node.map, unit, geom);
        if (p == Predicate::disjoint) continue;
        auto [it, fresh] = member_index.emplace(node.map, members.size());
        if (fresh) members.push_back({node.map, {}, p == Predicate::unknown});
        Member& m = members[it->second];
        for (const auto& [src, w] : node.contrib) m.contrib[src] += w;
        continue;
      }
      if (cover_ball_predicate(ifs, node.map, unit, geom.depth) == Predicate::disjoint) continue;
      for (int j = 0; j < ifs.size(); ++j) {
        Similarity child = node.map.compose(ifs.map(j));
        auto [it, fresh] = next_idx.emplace(child, next.size());
        if (fresh) next.push_back({std::move(child), {}});
        Node& target = next[it->second];
        const mpq_class& pj = ifs.probs()[static_cast<std::size_t>(j)];
        for (const auto& [src, w] : node.contrib) target.contrib[src] += w * pj;
      }
    }
    frontier = std::move(next);
  }

  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return canonical_compare(members[a].map, members[b].map) < 0;
  });
  Expansion out;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    Member& m = members[order[pos]];
    out.system.maps.push_back(m.map);
    out.system.unknown.push_back(m.unknown);
    mpq_class total = 0;
    for (const auto& [src, w] : m.contrib) {
      out.transfer.push_back({src, static_cast<int>(pos), w, w.get_d()});
      total += w;
    }
    out.member_weight.push_back(total);
  }
  return out;
}

void require_nested_balls(const IFS& ifs) {
  // phi_j(B(0,1)) must lie in B(0,1) for the incremental step to be complete.
  const FieldElement one = FieldElement::one(ifs.field());
  for (int j = 0; j < ifs.size(); ++j) {
    const Similarity& m = ifs.map(j);
    FieldElement t2 = FieldElement::zero(ifs.field());
    for (const auto& t : m.translation) t2 += t * t;
    const FieldElement slack = one - m.ratio;
    if (t2 > slack * slack)
      throw std::invalid_argument("map " + std::to_string(j + 1) +
                                  " does not send B(0,1) into itself; normalize the system first");
  }
}

}  // namespace

WeightedSystem neighbourhood_weighted(const IFS& ifs, std::span<const Symbol> a, const GeomOptions& geom) {
  std::vector<Seed> seeds{{compose_word(ifs, a).inverse(), 0, mpq_class(1)}};
  Expansion e = expand_window(ifs, std::move(seeds), geom);
  return {std::move(e.system), std::move(e.member_weight)};
}

NeighbourhoodSystem neighbourhood_system(const IFS& ifs, std::span<const Symbol> a, const GeomOptions& geom) {
  return neighbourhood_weighted(ifs, a, geom).base;
}

StepResult transition_step(const IFS& ifs, const NeighbourhoodSystem& state, Symbol j, const GeomOptions& geom) {
  const Similarity inv = ifs.map(j).inverse();
  std::vector<Seed> seeds;
  for (int g = 0; g < state.size(); ++g)
    seeds.push_back({inv.compose(state.maps[static_cast<std::size_t>(g)]), g, mpq_class(1)});
  Expansion e = expand_window(ifs, std::move(seeds), geom);
  return {std::move(e.system), std::move(e.transfer)};
}

WeightedSystem brute_force_weighted(const IFS& ifs, std::span<const Symbol> a, const GeomOptions& geom) {
  const Similarity ainv = compose_word(ifs, a).inverse();
  const FieldElement ra = ifs.word_ratio(a);
  const Ball unit = Ball::unit(ifs.field(), ifs.dim());
  std::unordered_map<Similarity, std::pair<mpq_class, bool>, SimilarityHash> found;

  // Every word b with rho_b <= rho_a < rho_{b-}, no merging, no pruning.
  struct Item {
    Similarity phi;
    FieldElement ratio;
    mpq_class p;
  };
  std::vector<Item> stack{{Similarity::identity(ifs.field(), ifs.dim()), FieldElement::one(ifs.field()), mpq_class(1)}};
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    if (it.ratio <= ra) {
      const Similarity rel = ainv.compose(it.phi);
      const Predicate pr = escalate_ball(ifs, rel, unit, geom);
      if (pr == Predicate::disjoint) continue;
      auto& slot = found[rel];
      slot.first += it.p;
      slot.second = slot.second || pr == Predicate::unknown;
      continue;
    }
    for (int j = ifs.size() - 1; j >= 0; --j)
      stack.push_back({it.phi.compose(ifs.map(j)), it.ratio * ifs.map(j).ratio, it.p * ifs.probs()[static_cast<std::size_t>(j)]});
  }
  std::vector<std::pair<Similarity, std::pair<mpq_class, bool>>> items(found.begin(), found.end());
  std::sort(items.begin(), items.end(), [](const auto& x, const auto& y) { return canonical_compare(x.first, y.first) < 0; });
  WeightedSystem out;
  for (auto& [m, v] : items) {
    out.base.maps.push_back(m);
    out.base.unknown.push_back(v.second);
    out.weights.push_back(v.first);
  }
  return out;
}

std::optional<int> interior_count(const IFS& ifs, const NeighbourhoodSystem& n) {
  if (ifs.dim() != 1) return std::nullopt;
  const FieldElement lo = ifs.hull().lo[0], hi = ifs.hull().hi[0];
  int count = 0;
  for (const auto& f : n.maps) {
    const CoverBox b = ifs.hull().image(f);
    if (!(b.lo[0] < hi && b.hi[0] > lo)) continue;
    if (ifs.hull_is_attractor()) {
      ++count;
      continue;
    }
    // Without the interval fast path count a member unless it is certainly outside.
    ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Automaton

Automaton::Automaton(IFS ifs, GeomOptions geom) : ifs_(std::move(ifs)), geom_(geom) {
  require_nested_balls(ifs_);
  NeighbourhoodSystem root;
  root.maps.push_back(Similarity::identity(ifs_.field(), ifs_.dim()));
  root.unknown.push_back(false);
  intern(std::move(root));
}

int Automaton::intern(NeighbourhoodSystem s) {
  const std::size_t h = s.hash();
  auto& bucket = index_[h];
  for (int id : bucket)
    if (states_[static_cast<std::size_t>(id)].system == s) return id;
  const int id = static_cast<int>(states_.size());
  Node n;
  n.system = std::move(s);
  n.edge.assign(static_cast<std::size_t>(ifs_.size()), -1);
  n.result.resize(static_cast<std::size_t>(ifs_.size()));
  states_.push_back(std::move(n));
  bucket.push_back(id);
  return id;
}

const StepResult& Automaton::step_result(int id, Symbol j) {
  auto& node = states_[static_cast<std::size_t>(id)];
  if (node.edge[j] < 0) {
    StepResult r = transition_step(ifs_, node.system, j, geom_);
    const int target = intern(r.system);
    auto& fresh = states_[static_cast<std::size_t>(id)];  // intern may reallocate
    fresh.edge[j] = target;
    fresh.result[j] = std::move(r);
  }
  return states_[static_cast<std::size_t>(id)].result[j];
}

int Automaton::step(int id, Symbol j) {
  step_result(id, j);
  return states_[static_cast<std::size_t>(id)].edge[j];
}

int Automaton::walk(std::span<const Symbol> w) {
  int s = 0;
  for (Symbol j : w) s = step(s, j);
  return s;
}

WeightedSystem Automaton::weights(std::span<const Symbol> w) {
  int s = 0;
  std::vector<mpq_class> cur{mpq_class(1)};
  for (Symbol j : w) {
    const StepResult& r = step_result(s, j);
    std::vector<mpq_class> nxt(static_cast<std::size_t>(r.system.size()));
    for (const auto& e : r.transfer) nxt[static_cast<std::size_t>(e.to)] += cur[static_cast<std::size_t>(e.from)] * e.coef;
    cur = std::move(nxt);
    s = step(s, j);
  }
  return {state(s), std::move(cur)};
}

AutomatonReport Automaton::explore(int max_states, int max_depth) {
  if (max_states < 1 || max_depth < 1) throw std::invalid_argument("state and depth budgets must be >= 1");
  AutomatonReport rep;
  std::vector<Word> word(static_cast<std::size_t>(state_count()));
  std::vector<int> depth(static_cast<std::size_t>(state_count()), -1);
  std::vector<bool> have_word(static_cast<std::size_t>(state_count()), false);
  depth[0] = 0;
  std::deque<int> queue{0};
  bool complete = true;
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    if (depth[static_cast<std::size_t>(s)] >= max_depth) {
      complete = false;
      rep.frontier_depth = std::max(rep.frontier_depth, depth[static_cast<std::size_t>(s)]);
      continue;
    }
    for (int j = 0; j < ifs_.size(); ++j) {
      if (state_count() >= max_states && states_[static_cast<std::size_t>(s)].edge[static_cast<std::size_t>(j)] < 0) {
        rep.budget_exceeded = true;
        complete = false;
        break;
      }
      const int t = step(s, static_cast<Symbol>(j));
      if (static_cast<std::size_t>(t) >= word.size()) {
        word.resize(static_cast<std::size_t>(t) + 1);
        depth.resize(static_cast<std::size_t>(t) + 1, -1);
        have_word.resize(static_cast<std::size_t>(t) + 1, false);
      }
      rep.edge_keys.push_back({s, j});
      rep.edge_targets.push_back(t);
      if (!have_word[static_cast<std::size_t>(t)]) {
        Word w = word[static_cast<std::size_t>(s)];
        if (s == 0) w.clear();
        w.push_back(static_cast<Symbol>(j));
        word[static_cast<std::size_t>(t)] = std::move(w);
        have_word[static_cast<std::size_t>(t)] = true;
      }
      if (depth[static_cast<std::size_t>(t)] < 0) {
        depth[static_cast<std::size_t>(t)] = depth[static_cast<std::size_t>(s)] + 1;
        queue.push_back(t);
      }
    }
    if (rep.budget_exceeded) break;
    rep.frontier_depth = std::max(rep.frontier_depth, depth[static_cast<std::size_t>(s)] + 1);
  }
  if (!queue.empty()) complete = false;
  rep.closed = complete;
  for (int id = 0; id < state_count() && static_cast<std::size_t>(id) < depth.size(); ++id) {
    if (depth[static_cast<std::size_t>(id)] < 0) continue;
    AutomatonReport::State st;
    st.id = id;
    st.word = word[static_cast<std::size_t>(id)];
    st.depth = depth[static_cast<std::size_t>(id)];
    st.cardinality = states_[static_cast<std::size_t>(id)].system.size();
    st.unknown = states_[static_cast<std::size_t>(id)].system.unknown_count();
    st.interior = interior_count(ifs_, states_[static_cast<std::size_t>(id)].system);
    // The root is only listed with a nonempty word when some word returns to it.
    if (id == 0 && !have_word[0]) st.word.clear();
    rep.max_cardinality = std::max(rep.max_cardinality, st.cardinality);
    rep.states.push_back(std::move(st));
  }
  return rep;
}

Word find_a0(const AutomatonReport& report) {
  if (!report.closed) throw std::runtime_error("maximality not certified: automaton did not close");
  const AutomatonReport::State* best = nullptr;
  for (const auto& s : report.states) {
    if (s.cardinality != report.max_cardinality || s.word.empty()) continue;
    if (!best || s.word.size() < best->word.size() || (s.word.size() == best->word.size() && s.word < best->word))
      best = &s;
  }
  if (!best) throw std::runtime_error("no nonempty word realizes the maximal cardinality");
  return best->word;
}

LemmaMaximalReport verify_lemma_maximal(const IFS& ifs, const Word& a0, const NeighbourhoodSystem& n0, int trials,
                                        std::uint64_t seed, int max_prefix, const GeomOptions& geom) {
  LemmaMaximalReport rep;
  std::mt19937_64 gen(seed);
  GeomOptions deep = geom;
  deep.depth_cap = std::max(geom.depth_cap, 2 * geom.depth_cap);
  for (int t = 0; t < trials; ++t) {
    const auto len = static_cast<std::size_t>(gen() % static_cast<std::uint64_t>(max_prefix + 1));
    Word c(len);
    for (auto& s : c) s = static_cast<Symbol>(gen() % static_cast<std::uint64_t>(ifs.size()));
    const Word w = concat(c, a0);
    NeighbourhoodSystem n = neighbourhood_system(ifs, w, geom);
    if (n.unknown_count() > 0) n = neighbourhood_system(ifs, w, deep);
    ++rep.trials;
    if (n.unknown_count() > 0) {
      ++rep.undecided;
      rep.undecided_words.push_back(c);
    } else if (n == n0) {
      ++rep.passed;
    } else {
      ++rep.failed;
      rep.counterexamples.push_back(c);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// b0 certificate

namespace {

// A word b with phi_b = target, found breadth-first with hull containment pruning.
std::optional<Word> match_word(const IFS& ifs, const Similarity& target, int max_nodes) {
  const CoverBox goal = ifs.hull().image(target);
  struct Node {
    Similarity map;
    Word word;
  };
  std::vector<Node> frontier{{Similarity::identity(ifs.field(), ifs.dim()), {}}};
  int visited = 0;
  while (!frontier.empty()) {
    std::vector<Node> next;
    std::unordered_map<Similarity, std::size_t, SimilarityHash> seen;
    for (auto& n : frontier) {
      if (++visited > max_nodes) return std::nullopt;
      if (n.map == target) return n.word;
      if (n.map.ratio <= target.ratio) continue;
      for (int j = 0; j < ifs.size(); ++j) {
        Similarity child = n.map.compose(ifs.map(j));
        if (!ifs.hull().image(child).contains(goal)) continue;
        if (!seen.emplace(child, next.size()).second) continue;
        Word w = n.word;
        w.push_back(static_cast<Symbol>(j));
        next.push_back({std::move(child), std::move(w)});
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

struct MatchResult {
  Word b;
  Word c;
};

// Family search: pieces h o phi_c of size comparable to phi_A meeting K_A,
// matched exactly against phi_{b_n} o phi_b.
std::optional<MatchResult> descendant_overlap(const IFS& ifs, const Similarity& h, const Word& bn, const Word& a0,
                                              const GeomOptions& geom, int max_nodes) {
  const Word A = concat(bn, a0);
  const Similarity phiA = compose_word(ifs, A);
  const Similarity phiA_inv = phiA.inverse();
  const Similarity bn_inv = compose_word(ifs, bn).inverse();
  struct Node {
    Similarity map;
    Word c;
  };
  std::vector<Node> frontier{{h, {}}};
  int visited = 0;
  while (!frontier.empty()) {
    std::vector<Node> next;
    for (auto& n : frontier) {
      if (++visited > max_nodes) return std::nullopt;
      if (escalate_set(ifs, phiA_inv.compose(n.map), geom) == Predicate::disjoint) continue;
      if (n.map.ratio <= phiA.ratio) {
        const Similarity T = bn_inv.compose(n.map);
        if (auto b = match_word(ifs, T, max_nodes)) return MatchResult{*b, n.c};
        continue;
      }
      for (int j = 0; j < ifs.size(); ++j) {
        Word c = n.c;
        c.push_back(static_cast<Symbol>(j));
        next.push_back({n.map.compose(ifs.map(j)), std::move(c)});
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

Ball word_ball(const IFS& ifs, std::span<const Symbol> w) {
  const Similarity phi = compose_word(ifs, w);
  return {phi.translation, phi.ratio};
}

}  // namespace

B0Certificate construct_b0(const IFS& ifs, const Word& a0, const NeighbourhoodSystem& n0, const B0Budget& budget,
                           const GeomOptions& geom) {
  B0Certificate cert;
  cert.a0 = a0;
  cert.n0 = n0;
  cert.disjointness_depth = geom.depth;
  const int id_index = n0.index_of(Similarity::identity(ifs.field(), ifs.dim()));
  if (id_index < 0) {
    cert.failure = "N0 does not contain the identity";
    return cert;
  }
  std::vector<int> family{id_index};
  std::vector<Word> c_words{Word{}};
  Word bn;
  std::vector<bool> in_family(static_cast<std::size_t>(n0.size()), false);
  in_family[static_cast<std::size_t>(id_index)] = true;

  for (bool grew = true; grew;) {
    grew = false;
    const Similarity phiA_inv = compose_word(ifs, concat(bn, a0)).inverse();
    for (int hi = 0; hi < n0.size(); ++hi) {
      if (in_family[static_cast<std::size_t>(hi)]) continue;
      const Similarity& h = n0.maps[static_cast<std::size_t>(hi)];
      const Predicate meet = escalate_set(ifs, phiA_inv.compose(h), geom);
      if (meet == Predicate::disjoint) continue;
      auto m = descendant_overlap(ifs, h, bn, a0, geom, budget.max_match_nodes);
      if (!m) {
        if (meet == Predicate::intersects) {
          cert.failure = "no exact overlap found for member " + std::to_string(hi) + " at b_n=" + format_word(bn);
          return cert;
        }
        continue;
      }
      for (auto& c : c_words) c = concat(c, m->b);
      bn = concat(bn, m->b);
      family.push_back(hi);
      c_words.push_back(m->c);
      in_family[static_cast<std::size_t>(hi)] = true;
      grew = true;
      break;
    }
  }

  // Shortest descendant d whose ball misses every h(K) with h outside F.
  std::vector<int> outside;
  for (int hi = 0; hi < n0.size(); ++hi)
    if (!in_family[static_cast<std::size_t>(hi)]) outside.push_back(hi);
  auto separated = [&](const Word& d) {
    const Ball ball = word_ball(ifs, concat(bn, d));
    for (int hi : outside)
      if (escalate_ball(ifs, n0.maps[static_cast<std::size_t>(hi)], ball, geom) != Predicate::disjoint) return false;
    return true;
  };
  std::optional<Word> found;
  std::deque<Word> queue{Word{}};
  int visited = 0;
  while (!queue.empty() && !found) {
    Word d = std::move(queue.front());
    queue.pop_front();
    if (++visited > budget.max_descendant_nodes) break;
    if (separated(d)) {
      found = d;
      break;
    }
    for (int j = 0; j < ifs.size(); ++j) {
      Word e = d;
      e.push_back(static_cast<Symbol>(j));
      queue.push_back(std::move(e));
    }
  }
  if (!found) {
    cert.failure = "descendant search budget exhausted after " + std::to_string(visited) + " words at b_n=" + format_word(bn);
    cert.family = family;
    return cert;
  }
  const Word tail = concat(*found, a0);
  cert.b0 = concat(bn, tail);
  cert.family = family;
  for (const auto& c : c_words) cert.b_h.push_back(concat(c, tail));
  cert.complete = true;
  return cert;
}

CertificateCheck recheck_certificate(const IFS& ifs, const B0Certificate& cert, const GeomOptions& geom) {
  CertificateCheck chk;
  if (!cert.complete) {
    chk.messages.push_back("certificate incomplete: " + cert.failure);
    return chk;
  }
  const Similarity phi_b0 = compose_word(ifs, cert.b0);
  chk.identities = !cert.family.empty() && cert.family.size() == cert.b_h.size();
  for (std::size_t k = 0; k < cert.family.size() && k < cert.b_h.size(); ++k) {
    const Similarity& h = cert.n0.maps[static_cast<std::size_t>(cert.family[k])];
    if (!(h.compose(compose_word(ifs, cert.b_h[k])) == phi_b0)) {
      chk.identities = false;
      chk.messages.push_back("identity fails for b_h=" + format_word(cert.b_h[k]));
    }
  }
  if (cert.family.empty() || !cert.n0.maps[static_cast<std::size_t>(cert.family[0])].is_identity()) {
    chk.identities = false;
    chk.messages.push_back("family does not start with the identity");
  }
  chk.neighbourhoods = true;
  auto check_n = [&](const Word& w) {
    const NeighbourhoodSystem n = neighbourhood_system(ifs, w, geom);
    if (!(n == cert.n0) || n.unknown_count() > 0) {
      chk.neighbourhoods = false;
      chk.messages.push_back("N(" + format_word(w) + ") differs from N0");
    }
  };
  check_n(cert.b0);
  for (const auto& w : cert.b_h) check_n(w);
  chk.disjointness = true;
  const Ball ball{phi_b0.translation, phi_b0.ratio};
  for (int hi = 0; hi < cert.n0.size(); ++hi) {
    if (std::find(cert.family.begin(), cert.family.end(), hi) != cert.family.end()) continue;
    if (escalate_ball(ifs, cert.n0.maps[static_cast<std::size_t>(hi)], ball, geom) != Predicate::disjoint) {
      chk.disjointness = false;
      chk.messages.push_back("B_b0 not certified disjoint from member " + std::to_string(hi));
    }
  }
  return chk;
}

mpq_class word_mass(const IFS& ifs, const Similarity& target, int max_nodes) {
  const CoverBox goal = ifs.hull().image(target);
  struct Node {
    Similarity map;
    mpq_class p;
  };
  std::vector<Node> frontier{{Similarity::identity(ifs.field(), ifs.dim()), mpq_class(1)}};
  mpq_class total = 0;
  int visited = 0;
  while (!frontier.empty()) {
    std::vector<Node> next;
    std::unordered_map<Similarity, std::size_t, SimilarityHash> seen;
    for (auto& n : frontier) {
      if (++visited > max_nodes) throw std::runtime_error("word_mass node budget exceeded");
      if (n.map == target) {
        total += n.p;
        continue;
      }
      if (n.map.ratio <= target.ratio) continue;
      for (int j = 0; j < ifs.size(); ++j) {
        Similarity child = n.map.compose(ifs.map(j));
        if (!ifs.hull().image(child).contains(goal)) continue;
        const mpq_class pc = n.p * ifs.probs()[static_cast<std::size_t>(j)];
        auto [it, fresh] = seen.emplace(child, next.size());
        if (fresh) next.push_back({std::move(child), pc});
        else next[it->second].p += pc;
      }
    }
    frontier = std::move(next);
  }
  return total;
}

ZetaCoefficients compute_zeta_coefficients(const IFS& ifs, const B0Certificate& cert) {
  if (!cert.complete) throw std::runtime_error("certificate incomplete: " + cert.failure);
  ZetaCoefficients z;
  for (const auto& bh : cert.b_h) {
    const Similarity phi = compose_word(ifs, bh);
    std::vector<mpq_class> row;
    for (const auto& f : cert.n0.maps) row.push_back(word_mass(ifs, phi.compose(f)));
    const mpq_class mn = *std::min_element(row.begin(), row.end());
    if (mn <= 0) throw std::runtime_error("zero density lower bound for b_h=" + format_word(bh) + ": certificate invalid");
    z.c_h.push_back(mn);
    z.coef.push_back(std::move(row));
  }
  return z;
}

std::vector<mpq_class> zeta_mixture_raw(Automaton& automaton, const B0Certificate& cert, std::span<const Symbol> w) {
  if (w.size() < cert.b0.size()) throw std::invalid_argument("word shorter than b0");
  const auto prefix = w.first(w.size() - cert.b0.size());
  const WeightedSystem ws = automaton.weights(prefix);
  if (!(ws.base == cert.n0)) throw std::runtime_error("prefix does not carry the maximal neighbourhood system");
  std::vector<mpq_class> q;
  for (int hi : cert.family) q.push_back(ws.weights[static_cast<std::size_t>(hi)]);
  return q;
}

}  // namespace wsc
