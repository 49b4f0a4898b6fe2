#include "cfpp/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cfpp/error.hpp"

namespace cfpp {

namespace {

constexpr std::uint8_t kInactive = static_cast<std::uint8_t>(HalfEdgeStatus::FreeInactive);
constexpr std::uint8_t kPaired = static_cast<std::uint8_t>(HalfEdgeStatus::Paired);

[[noreturn]] void corrupted(const std::string& what) { throw Error(ErrorCode::InvariantViolated, what); }

}  // namespace

void Rates::validate() const {
  auto ok = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!ok(lambda1) || !ok(lambda2)) {
    throw Error(ErrorCode::InvalidArgument, "infection rates must be positive and finite");
  }
}

SeedPair draw_uniform_seeds(std::size_t n, Rng& rng) {
  if (n < 2) throw Error(ErrorCode::VertexOutOfRange, "need at least two vertices for two seeds");
  const auto first = static_cast<VertexId>(rng.below(n));
  auto second = static_cast<VertexId>(rng.below(n - 1));
  if (second >= first) ++second;
  return {first, second};
}

double m_at(const Trajectory& trajectory, std::uint64_t k) {
  const auto& pts = trajectory.points;
  const auto it = std::lower_bound(pts.begin(), pts.end(), k,
                                   [](const TrajectoryPoint& p, std::uint64_t key) { return p.k < key; });
  if (it != pts.end() && it->k == k) return it->m;
  if (trajectory.complete && !pts.empty() && k > trajectory.final_step && k <= trajectory.total_edges) {
    return pts.back().m;
  }
  throw Error(ErrorCode::StepNotRecorded, "step " + std::to_string(k) + " is not in the recorded trajectory");
}

double m_at(const Exploration& state, std::uint64_t k) {
  if (k == state.step_index()) return state.m();
  return m_at(state.trajectory(), k);
}

double m_at(const CompetitionOutcome& outcome, std::uint64_t k) { return m_at(outcome.trajectory, k); }

Exploration::Exploration(const DegreeSequence& seq, SeedPair seeds, Rates rates, ExplorationOptions options)
    : Exploration(seq, std::make_shared<const HalfEdgeIndex>(seq), seeds, rates, options) {}

Exploration::Exploration(const DegreeSequence& seq, std::shared_ptr<const HalfEdgeIndex> index, SeedPair seeds,
                         Rates rates, ExplorationOptions options)
    : index_(std::move(index)), rates_(rates), seeds_(seeds), options_(options) {
  rates_.validate();
  ratio_ = rates_.lambda1 / rates_.lambda2;
  const std::size_t n = seq.size();
  if (index_->vertex_count() != n || index_->half_edge_count() != seq.total_half_edges()) {
    throw Error(ErrorCode::InvalidArgument, "half-edge index does not match the degree sequence");
  }
  if (seeds.first >= n || seeds.second >= n) {
    throw Error(ErrorCode::VertexOutOfRange, "seed vertex outside [0, " + std::to_string(n) + ")");
  }
  if (seeds.first == seeds.second) {
    throw Error(ErrorCode::IdenticalSeeds, "both types seeded at vertex " + std::to_string(seeds.first));
  }
  if (options_.thinning == 0) throw Error(ErrorCode::InvalidArgument, "trajectory thinning must be >= 1");

  const std::size_t m = index_->half_edge_count();
  status_.assign(m, kInactive);
  free_pool_.resize(m);
  std::iota(free_pool_.begin(), free_pool_.end(), HalfEdgeId{0});
  free_pos_.resize(m);
  std::iota(free_pos_.begin(), free_pos_.end(), std::uint32_t{0});
  active_pos_.resize(m);
  free_count_ = m;
  vertex_type_.assign(n, 0);
  pairs_.reserve(m / 2);

  infect(seeds.first, 1, m);
  infect(seeds.second, 2, m);
  a1_ = active_count_[0];
  a2_ = active_count_[1];
  m_ = static_cast<double>(a1_) / static_cast<double>(a1_ + a2_);

  trajectory_.total_edges = m / 2;
  if (options_.window) {
    auto& w = *options_.window;
    w.end = std::min<std::uint64_t>(w.end, m / 2);
    if (w.nu > w.end) throw Error(ErrorCode::InvalidArgument, "diagnostic window starts after it ends");
    window_stats_.emplace();
  }
  record(true);
  track_window();
}

Exploration Exploration::on_graph(const DegreeSequence& seq, const Multigraph& graph, SeedPair seeds, Rates rates,
                                  ExplorationOptions options) {
  Exploration state(seq, seeds, rates, options);
  const std::size_t m = seq.total_half_edges();
  if (graph.n != seq.size() || graph.pairing.size() * 2 != m) {
    throw Error(ErrorCode::InvalidArgument, "graph does not realize the degree sequence");
  }
  constexpr auto kUnset = std::numeric_limits<HalfEdgeId>::max();
  state.mate_.assign(m, kUnset);
  for (const auto& [a, b] : graph.pairing) {
    if (a >= m || b >= m || a == b || state.mate_[a] != kUnset || state.mate_[b] != kUnset) {
      throw Error(ErrorCode::InvalidArgument, "graph pairing is not a perfect matching of the half-edges");
    }
    state.mate_[a] = b;
    state.mate_[b] = a;
  }
  return state;
}

void Exploration::activate(HalfEdgeId h, int type) {
  auto& pool = active_pool_[type - 1];
  status_[h] = static_cast<std::uint8_t>(type);
  active_pos_[h] = static_cast<std::uint32_t>(pool.size());
  pool.push_back(h);
  ++active_count_[type - 1];
}

void Exploration::remove_active(HalfEdgeId h, int type) {
  auto& pool = active_pool_[type - 1];
  const std::uint32_t pos = active_pos_[h];
  const HalfEdgeId moved = pool.back();
  pool[pos] = moved;
  active_pos_[moved] = pos;
  pool.pop_back();
  --active_count_[type - 1];
}

void Exploration::remove_free(HalfEdgeId h) {
  const std::uint32_t pos = free_pos_[h];
  const HalfEdgeId moved = free_pool_.back();
  free_pool_[pos] = moved;
  free_pos_[moved] = pos;
  free_pool_.pop_back();
  --free_count_;
}

void Exploration::infect(VertexId v, int type, HalfEdgeId skip) {
  vertex_type_[v] = static_cast<std::uint8_t>(type);
  infections_.push_back({v, type, k_, t_});
  for (HalfEdgeId h = index_->first(v); h < index_->last(v); ++h) {
    if (h == skip) continue;
    if (status_[h] != kInactive) corrupted("uninfected vertex " + std::to_string(v) + " has a non-inactive half-edge");
    activate(h, type);
  }
}

void Exploration::check_counters() const {
  const std::uint64_t m = index_->half_edge_count();
  if (active_count_[0] != active_pool_[0].size() || active_count_[1] != active_pool_[1].size()) {
    corrupted("active counters disagree with the active pools");
  }
  if (free_count_ != free_pool_.size()) corrupted("free counter disagrees with the free pool");
  if (2 * pairs_.size() + free_count_ != m) corrupted("half-edge conservation 2*pairs + free = 2N violated");
  if (pairs_.size() != k_) corrupted("step counter disagrees with the number of pairings");
}

std::optional<StepEvent> Exploration::advance(Rng& rng, double t_limit) {
  if (options_.check_invariants) check_counters();
  const std::uint64_t s1 = active_count_[0];
  const std::uint64_t s2 = active_count_[1];
  if (s1 + s2 == 0) throw Error(ErrorCode::NoActiveHalfEdges, "the infections have stopped");
  if (free_count_ < 2) throw Error(ErrorCode::ExhaustedFreePool, "active half-edge without a free partner");

  const double total_rate = rates_.lambda1 * static_cast<double>(s1) + rates_.lambda2 * static_cast<double>(s2);
  const double holding = rng.standard_exponential() / total_rate;
  if (t_ + holding > t_limit) return std::nullopt;

  const double w1 = ratio_ * static_cast<double>(s1);
  const int type = rng.uniform() * (w1 + static_cast<double>(s2)) < w1 ? 1 : 2;
  const auto& pool = active_pool_[type - 1];
  const HalfEdgeId q = pool[rng.below(pool.size())];
  HalfEdgeId r = 0;
  if (mate_.empty()) {
    do {
      r = free_pool_[rng.below(free_pool_.size())];
    } while (r == q);
  } else {
    r = mate_[q];
  }

  remove_active(q, type);
  remove_free(q);
  status_[q] = kPaired;

  const std::uint8_t r_status = status_[r];
  if (r_status == kPaired) corrupted("partner half-edge is already paired");
  remove_free(r);
  if (r_status != kInactive) remove_active(r, r_status);
  status_[r] = kPaired;
  pairs_.emplace_back(q, r);

  ++k_;
  t_ += holding;

  const VertexId x = index_->vertex(q);
  const VertexId y = index_->vertex(r);
  const bool fresh = r_status == kInactive;
  if (fresh) {
    if (vertex_type_[y] != 0) corrupted("inactive half-edge at an infected vertex");
    infect(y, type, r);
  }

  const double previous = m_;
  const std::uint64_t total = active();
  if (total > 0) m_ = static_cast<double>(active_count_[0]) / static_cast<double>(total);
  if (options_.window) {
    const auto& w = *options_.window;
    if (k_ - 1 >= w.nu && k_ <= w.end) {
      const double dm = m_ - previous;
      window_stats_->qv_sum += dm * dm;
    }
  }
  record(false);
  track_window();

  return StepEvent{.k = k_,
                   .t = t_,
                   .holding = holding,
                   .type = type,
                   .q = q,
                   .r = r,
                   .x = x,
                   .y = y,
                   .new_infection = fresh,
                   .s1 = active_count_[0],
                   .s2 = active_count_[1],
                   .m = m_};
}

StepEvent Exploration::step(Rng& rng) {
  return *advance(rng, std::numeric_limits<double>::infinity());
}

void Exploration::run_until_time(double t_end, Rng& rng) {
  while (active() > 0) {
    if (!advance(rng, t_end)) break;
  }
}

void Exploration::record(bool force) {
  auto& pts = trajectory_.points;
  if (!pts.empty() && pts.back().k == k_) return;
  if (force || k_ < options_.full_prefix || k_ % options_.thinning == 0) {
    pts.push_back({k_, t_, active_count_[0], active_count_[1], m_});
  }
  trajectory_.final_step = k_;
}

void Exploration::track_window() {
  if (!options_.window) return;
  const auto& w = *options_.window;
  auto& st = *window_stats_;
  if (k_ == w.nu) {
    st.m_nu = m_;
    window_started_ = true;
  }
  if (window_started_ && k_ <= w.end) {
    st.sup_deviation = std::max(st.sup_deviation, std::abs(m_ - st.m_nu));
    if (k_ >= 1) {
      st.min_active_ratio = std::min(st.min_active_ratio, static_cast<double>(active()) / static_cast<double>(k_));
    }
  }
}

void Exploration::finalize_window() {
  if (!options_.window) return;
  const auto& w = *options_.window;
  auto& st = *window_stats_;
  // After the last step S_k = 0 and M_k is constant up to k = N.
  if (k_ < w.end) {
    if (!window_started_) {
      st.m_nu = m_;
      window_started_ = true;
    }
    st.min_active_ratio = 0.0;
  }
}

CompetitionOutcome Exploration::run_to_termination(Rng& rng) {
  while (active() > 0) advance(rng, std::numeric_limits<double>::infinity());
  check_counters();
  record(true);
  trajectory_.complete = true;
  finalize_window();

  Pairing completion;
  if (mate_.empty()) {
    completion = uniform_matching(free_pool_, rng);
  } else {
    for (const HalfEdgeId h : free_pool_) {
      if (h < mate_[h]) completion.emplace_back(h, mate_[h]);
    }
  }

  CompetitionOutcome out;
  out.n = vertex_count();
  out.total_edges = total_edges();
  out.seeds = seeds_;
  out.rates = rates_;
  out.a1 = a1_;
  out.a2 = a2_;
  for (const auto& inf : infections_) ++(inf.type == 1 ? out.n1 : out.n2);
  out.termination_step = k_;
  out.termination_time = t_;
  Pairing all = pairs_;
  all.insert(all.end(), completion.begin(), completion.end());
  out.final_graph = graph_from_pairing(*index_, std::move(all));
  out.trajectory = trajectory_;
  out.window = window_stats_;
  return out;
}

void Exploration::audit() const {
  check_counters();
  const std::size_t m = index_->half_edge_count();
  std::uint64_t active_seen[2] = {0, 0};
  std::uint64_t free_seen = 0;
  for (HalfEdgeId h = 0; h < m; ++h) {
    const std::uint8_t s = status_[h];
    const int vt = vertex_type_[index_->vertex(h)];
    if (s == kPaired) continue;
    ++free_seen;
    if (free_pool_[free_pos_[h]] != h) corrupted("free pool position table is stale");
    if (s == kInactive) {
      if (vt != 0) corrupted("free inactive half-edge at an infected vertex");
    } else {
      if (vt != s) corrupted("active half-edge type differs from its vertex type");
      ++active_seen[s - 1];
      if (active_pool_[s - 1][active_pos_[h]] != h) corrupted("active pool position table is stale");
    }
  }
  if (free_seen != free_count_ || active_seen[0] != active_count_[0] || active_seen[1] != active_count_[1]) {
    corrupted("status table disagrees with the counters");
  }
  for (const auto& [q, r] : pairs_) {
    if (status_[q] != kPaired || status_[r] != kPaired) corrupted("recorded pair with a free half-edge");
  }
}

Exploration init_exploration(const DegreeSequence& seq, const SeedMode& seeds, Rates rates, Rng& rng,
                             ExplorationOptions options) {
  const SeedPair pair = std::holds_alternative<SeedPair>(seeds) ? std::get<SeedPair>(seeds)
                                                                : draw_uniform_seeds(seq.size(), rng);
  return Exploration(seq, pair, rates, options);
}

}  // namespace cfpp
