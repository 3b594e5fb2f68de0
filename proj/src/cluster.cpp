// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "esrsim/cluster.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "esrsim/error.hpp"
#include "esrsim/vecops.hpp"

namespace esrsim {
namespace cluster {

namespace {

std::string join_ranks(const std::vector<int>& ranks) {
  std::ostringstream os;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (i) os << ',';
    os << ranks[i];
  }
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

class Simulator::HookWrap : public pcg::PersistenceHook {
 public:
  HookWrap(Simulator* sim, pstore::Backend* inner, RunReport* rep,
           const FaultEvent* mid_persist_event)
      : sim_(sim), inner_(inner), rep_(rep), event_(mid_persist_event) {}

  void on_persist(std::uint64_t j, bool pair_close, int rank,
                  std::span<const double> p_slice, double beta_prev) override {
    if (event_ && !armed_) {
      inner_->arm_crash({event_->victims, event_->cut});
      armed_ = true;
    }
    if (pair_close) sim_->snapshot_rank(rank, j);
    inner_->on_persist(j, pair_close, rank, p_slice, beta_prev);
  }

  void on_persist_phase_done(std::uint64_t j, bool pair_close) override {
    inner_->on_persist_phase_done(j, pair_close);
    if (pair_close)
      sim_->line(*rep_, {"pair", static_cast<std::int64_t>(j), -1, 0,
                         sim_->clocks_.max_compute(), {}});
    if (event_ && armed_) {
      inner_->disarm_crash();
      sim_->kill(event_->victims, j, "mid_persist", *rep_);
      fired_ = true;
    }
  }

  bool fired() const { return fired_; }

 private:
  Simulator* sim_;
  pstore::Backend* inner_;
  RunReport* rep_;
  const FaultEvent* event_;
  bool armed_ = false;
  bool fired_ = false;
};

// ---------------------------------------------------------------------------

Simulator::Simulator(const ClusterConfig& cc, const pcg::SolveConfig& sc,
                     const linalg::CsrMatrix& a, std::vector<double> b,
                     linalg::PreconditionerKind pk)
    : ccfg_(cc), scfg_(sc), a_(a), b_(std::move(b)) {
  a_.validate();
  if (a_.n_rows != a_.n_cols ||
      static_cast<std::int64_t>(b_.size()) != a_.n_rows)
    raise(ErrorCode::shape_mismatch, "system dimensions");
  if (ccfg_.proc < 1 || ccfg_.nodes < 1 || ccfg_.slots_per_node < 1)
    raise(ErrorCode::invalid_config, "cluster sizes must be positive");
  if (ccfg_.proc > ccfg_.nodes * ccfg_.slots_per_node)
    raise(ErrorCode::invalid_config, "proc exceeds nodes * slots_per_node");
  if (!ccfg_.rank_to_node.empty()) {
    if (static_cast<int>(ccfg_.rank_to_node.size()) != ccfg_.proc)
      raise(ErrorCode::invalid_config, "rank_to_node length");
    std::vector<int> load(ccfg_.nodes, 0);
    for (int node : ccfg_.rank_to_node) {
      if (node < 0 || node >= ccfg_.nodes)
        raise(ErrorCode::invalid_config, "rank mapped to missing node");
      if (++load[node] > ccfg_.slots_per_node)
        raise(ErrorCode::invalid_config, "node oversubscribed");
    }
  }
  if (scfg_.c < 0 || scfg_.c >= ccfg_.proc)
    raise(ErrorCode::invalid_config, "c must satisfy 0 <= c < proc");

  if (ccfg_.rank_to_node.empty()) {
    ccfg_.rank_to_node.resize(ccfg_.proc);
    for (int s = 0; s < ccfg_.proc; ++s)
      ccfg_.rank_to_node[s] = s / ccfg_.slots_per_node;
  }
  initial_mapping_ = ccfg_.rank_to_node;
  part_ = linalg::Partition{a_.n_rows, ccfg_.proc};
  precond_ = pk == linalg::PreconditionerKind::jacobi
                 ? linalg::Preconditioner::jacobi(a_)
                 : linalg::Preconditioner::identity();
  plan_ = HaloPlan(a_, part_);
}

void Simulator::validate_plan(const FaultPlan& plan) const {
  const PersistSchedule sched{scfg_.persist_period};
  for (const auto& ev : plan.events) {
    if (ev.victims.empty())
      raise(ErrorCode::invalid_config, "fault event without victims");
    std::set<int> seen;
    for (int v : ev.victims) {
      if (v == ccfg_.proc && scfg_.recovery_mode == RecoveryMode::nvm_prd)
        raise(ErrorCode::invalid_config,
              "PRD rank in victim set (single point of failure)");
      if (v < 0 || v >= ccfg_.proc)
        raise(ErrorCode::invalid_config, "victim is not a compute rank");
      if (!seen.insert(v).second)
        raise(ErrorCode::invalid_config, "duplicate victim");
    }
    if (ev.phase == FaultEvent::Phase::mid_persist) {
      if (scfg_.recovery_mode == RecoveryMode::none)
        raise(ErrorCode::invalid_config,
              "mid_persist fault without a persistence backend");
      if (!sched.is_member(ev.j))
        raise(ErrorCode::invalid_config,
              "mid_persist fault at a non-persistence iteration");
    }
  }
}

bool Simulator::capacity_gate(RunReport& rep) {
  // Closed-form steady-state residency of the configured mode.
  const std::uint64_t n = static_cast<std::uint64_t>(a_.n_rows);
  const std::uint64_t ram_compute =
      static_cast<std::uint64_t>(ccfg_.proc) * a_.nnz() + 4 * n;
  const std::uint64_t ram_red =
      scfg_.recovery_mode == RecoveryMode::esr_inmem
          ? 2 * n * (static_cast<std::uint64_t>(scfg_.c) + 1)
          : 0;
  const std::uint64_t ram_bytes = 8 * (ram_compute + ram_red);
  if (ccfg_.mv_bytes && ram_bytes > ccfg_.mv_bytes) {
    rep.status = RunStatus::capacity_exceeded;
    std::ostringstream os;
    os << "volatile capacity: need " << ram_bytes << " bytes (compute "
       << 8 * ram_compute << " + redundancy " << 8 * ram_red << "), M_V = "
       << ccfg_.mv_bytes;
    rep.status_detail = os.str();
    line(rep, {"capacity", -1, -1, ram_bytes, 0,
               {{"kind", "M_V"}, {"detail", std::to_string(ram_bytes)}}});
    return false;
  }

  std::uint64_t nvm_bytes = 0;
  if (scfg_.recovery_mode == RecoveryMode::nvm_local) {
    for (int s = 0; s < ccfg_.proc; ++s)
      nvm_bytes += 2 * (rma::SlotHeader::kSize +
                        esr::RecoveryRecord::serialized_size(
                            part_.block_size(s)));
  } else if (scfg_.recovery_mode == RecoveryMode::nvm_prd) {
    std::uint64_t window = 0;
    for (int s = 0; s < ccfg_.proc; ++s)
      window += esr::RecoveryRecord::serialized_size(part_.block_size(s));
    nvm_bytes = 2 * (rma::SlotHeader::kSize + window);
  }
  if (ccfg_.mnv_bytes && nvm_bytes > ccfg_.mnv_bytes) {
    rep.status = RunStatus::capacity_exceeded;
    rep.status_detail = "non-volatile capacity: need " +
                        std::to_string(nvm_bytes) + " bytes, M_NV = " +
                        std::to_string(ccfg_.mnv_bytes);
    line(rep, {"capacity", -1, -1, nvm_bytes, 0, {{"kind", "M_NV"}}});
    return false;
  }
  return true;
}

std::vector<int> Simulator::detect_failures() const {
  std::vector<int> dead;
  for (int s = 0; s < ccfg_.proc; ++s)
    if (!alive_.empty() && !alive_[s]) dead.push_back(s);
  return dead;
}

void Simulator::snapshot_rank(int rank, std::uint64_t) {
  auto& window = snapshots_[rank];
  window.push_back(engine_->state(rank));
  while (window.size() > 2) window.pop_front();
}

std::uint64_t Simulator::hash_states() const {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](const void* data, std::size_t len) {
    h = fnv1a64(data, len, h);
  };
  for (int s = 0; s < ccfg_.proc; ++s) {
    const auto& st = engine_->state(s);
    mix(st.x.data(), st.x.size() * 8);
    mix(st.r.data(), st.r.size() * 8);
    mix(st.z.data(), st.z.size() * 8);
    mix(st.p.data(), st.p.size() * 8);
    mix(&st.alpha, 8);
    mix(&st.beta_prev, 8);
    mix(&st.rz, 8);
  }
  return h;
}

void Simulator::kill(const std::vector<int>& victims, std::uint64_t j,
                     const char* phase, RunReport& rep) {
  for (int v : victims) {
    if (!alive_[v]) continue;
    alive_[v] = 0;
    --occupancy_[ccfg_.node_of(v)];
    engine_->state(v) = pcg::SolverState{};  // volatile contents lost
    snapshots_[v].clear();
    if (backend_) backend_->on_rank_down(v);
    line(rep, {"kill", static_cast<std::int64_t>(j), v, 0,
               clocks_.max_compute(), {{"phase", phase}}});
  }
}

void Simulator::recover(RunReport& rep, std::uint64_t detected_at) {
  const std::vector<int> dead = detect_failures();
  line(rep, {"detect", static_cast<std::int64_t>(detected_at), -1, 0,
             clocks_.max_compute(), {{"ranks", join_ranks(dead)}}});

  if (!backend_)
    raise(ErrorCode::unrecoverable, "no recovery mode configured");
  if (static_cast<int>(dead.size()) > scfg_.c)
    raise(ErrorCode::unrecoverable,
          std::to_string(dead.size()) + " failures exceed tolerance c=" +
              std::to_string(scfg_.c));

  // Bring the failed ranks back: in place after node recovery for local
  // slots, first-fit replacements otherwise.
  if (scfg_.recovery_mode == RecoveryMode::nvm_local) {
    clocks_.sync_all(ccfg_.costs.node_recovery_delay);
    for (int v : dead) {
      ++occupancy_[ccfg_.node_of(v)];
      alive_[v] = 1;
      backend_->on_rank_up(v);
      line(rep, {"revive", static_cast<std::int64_t>(detected_at), v, 0,
                 clocks_.t[v], {{"node", std::to_string(ccfg_.node_of(v))}}});
    }
  } else {
    for (int v : dead) {
      int node = -1;
      for (int cand = 0; cand < ccfg_.nodes; ++cand)
        if (occupancy_[cand] < ccfg_.slots_per_node) {
          node = cand;
          break;
        }
      if (node < 0)
        raise(ErrorCode::unrecoverable, "no free slot for a replacement rank");
      ccfg_.rank_to_node[v] = node;
      ++occupancy_[node];
      alive_[v] = 1;
      clocks_.t[v] = clocks_.max_compute() + ccfg_.costs.spawn_delay;
      backend_->on_rank_up(v);
      line(rep, {"spawn", static_cast<std::int64_t>(detected_at), v, 0,
                 clocks_.t[v], {{"node", std::to_string(node)}}});
    }
  }

  // Rollback target: newest iteration for which every failed rank has a
  // record and every survivor still holds its own snapshot.
  std::set<std::uint64_t> candidates;
  bool first = true;
  for (int v : dead) {
    const auto avail = backend_->available_iterations(v);
    std::set<std::uint64_t> s(avail.begin(), avail.end());
    if (first) {
      candidates = std::move(s);
      first = false;
    } else {
      std::set<std::uint64_t> inter;
      std::set_intersection(candidates.begin(), candidates.end(), s.begin(),
                            s.end(), std::inserter(inter, inter.begin()));
      candidates = std::move(inter);
    }
  }
  std::vector<char> is_dead(ccfg_.proc, 0);
  for (int v : dead) is_dead[v] = 1;
  for (int s = 0; s < ccfg_.proc; ++s) {
    if (is_dead[s]) continue;
    std::set<std::uint64_t> have;
    for (const auto& snap : snapshots_[s]) have.insert(snap.j);
    std::set<std::uint64_t> inter;
    std::set_intersection(candidates.begin(), candidates.end(), have.begin(),
                          have.end(), std::inserter(inter, inter.begin()));
    candidates = std::move(inter);
  }

  RecoveryEvent event;
  event.detected_at_j = detected_at;
  event.victims = dead;
  for (int v : dead)
    event.replacement_node.emplace(v, ccfg_.node_of(v));

  if (candidates.empty()) {
    // Nothing persisted yet: the initial state is fully determined by
    // (A, b, x0), so restart from iteration 0.
    engine_->init();
    for (auto& w : snapshots_) w.clear();
    backend_->reset_sessions();
    event.cold_restart = true;
    event.rollback_j = 0;
    rep.recoveries.push_back(std::move(event));
    ++ledger_.recoveries;
    line(rep, {"cold_restart", static_cast<std::int64_t>(detected_at), -1, 0,
               clocks_.max_compute(), {}});
    return;
  }

  const std::uint64_t rollback_j = *candidates.rbegin();
  event.rollback_j = rollback_j;
  line(rep, {"rollback", static_cast<std::int64_t>(rollback_j), -1, 0,
             clocks_.max_compute(), {{"from", std::to_string(detected_at)}}});

  // Coordinator: the lowest-ranked replacement. It gathers records and
  // survivor slices, reconstructs, and scatters the failed blocks.
  const int coordinator = dead.front();
  std::map<int, esr::RecoveryRecord> records;
  for (int v : dead) {
    auto rec = backend_->fetch_at(v, rollback_j, coordinator);
    if (!rec)
      raise(ErrorCode::stale_record, "record vanished during recovery");
    records.emplace(v, std::move(*rec));
  }

  // Survivors roll back to their snapshots at the same iteration.
  std::uint64_t survivor_values = 0;
  double rz_at_rollback = 0.0;
  for (int s = 0; s < ccfg_.proc; ++s) {
    if (is_dead[s]) continue;
    auto& window = snapshots_[s];
    bool restored = false;
    for (const auto& snap : window)
      if (snap.j == rollback_j) {
        engine_->state(s) = snap;
        rz_at_rollback = snap.rz;
        restored = true;
        break;
      }
    if (!restored)
      raise(ErrorCode::stale_record, "survivor snapshot missing");
    while (!window.empty() && window.back().j > rollback_j) window.pop_back();
    survivor_values += 2 * part_.block_size(s);  // x and r to coordinator
  }
  ledger_.wire_recovery_values_total += survivor_values;
  clocks_.t[coordinator] +=
      ccfg_.costs.msg_latency * (ccfg_.proc - dead.size()) +
      ccfg_.costs.wire_per_byte * survivor_values * 8;

  esr::SurvivorView view;
  view.x.assign(a_.n_rows, 0.0);
  view.r.assign(a_.n_rows, 0.0);
  for (int s = 0; s < ccfg_.proc; ++s) {
    if (is_dead[s]) continue;
    const auto& st = engine_->state(s);
    std::copy(st.x.begin(), st.x.end(), view.x.begin() + part_.block_begin(s));
    std::copy(st.r.begin(), st.r.end(), view.r.begin() + part_.block_begin(s));
  }

  auto slices = esr::reconstruct(a_, precond_, b_, part_, dead, records,
                                 view, scfg_.c);

  std::uint64_t scatter_values = 0;
  for (int v : dead) {
    auto& sl = slices.at(v);
    pcg::SolverState st;
    st.j = rollback_j;
    st.x = sl.x;
    st.r = sl.r;
    st.z = sl.z;
    st.p = sl.p;
    st.alpha = 0.0;
    st.beta_prev = records.at(v).beta_prev;
    st.rz = rz_at_rollback;
    engine_->state(v) = std::move(st);
    snapshots_[v].clear();
    snapshots_[v].push_back(engine_->state(v));
    scatter_values += 4 * part_.block_size(v);
    line(rep, {"reconstruct", static_cast<std::int64_t>(rollback_j), v,
               4 * static_cast<std::uint64_t>(part_.block_size(v)) * 8,
               clocks_.t[coordinator], {}});
  }
  ledger_.wire_recovery_values_total += scatter_values;
  for (int s = 0; s < ccfg_.proc; ++s) {
    if (is_dead[s]) continue;
    engine_->state(s).rz = rz_at_rollback;
  }

  engine_->set_iteration(rollback_j);
  const PersistSchedule sched{scfg_.persist_period};
  if (sched.is_member(rollback_j)) engine_->skip_next_persist();
  backend_->reset_sessions();
  clocks_.sync_all(ccfg_.costs.reduce_latency);

  event.reconstructed = std::move(slices);
  rep.recoveries.push_back(std::move(event));
  ++ledger_.recoveries;
  line(rep, {"resume", static_cast<std::int64_t>(rollback_j), -1, 0,
             clocks_.max_compute(), {}});
}

RunReport Simulator::simulate(const FaultPlan& plan, bool capture) {
  validate_plan(plan);

  RunReport rep;
  ledger_ = OverheadLedger{};
  ledger_.n = static_cast<std::uint64_t>(a_.n_rows);
  ledger_.nnz = static_cast<std::uint64_t>(a_.nnz());
  ledger_.proc = ccfg_.proc;
  ledger_.c = scfg_.c;
  ledger_.persist_period = scfg_.persist_period;
  ledger_.mode = scfg_.recovery_mode;
  ledger_.sparsity_factor =
      static_cast<double>(a_.nnz()) / static_cast<double>(a_.n_rows);
  ledger_.ram_compute_values =
      static_cast<std::uint64_t>(ccfg_.proc) * a_.nnz() +
      4 * static_cast<std::uint64_t>(a_.n_rows);
  ledger_.wire_halo_values_per_iter = plan_.total_values_per_exchange();
  switch (scfg_.recovery_mode) {
    case RecoveryMode::none:
      break;
    case RecoveryMode::esr_inmem:
      ledger_.wire_redundancy_values_per_persist =
          esr::peer_redundancy_wire_rate(part_, scfg_.c, &plan_);
      break;
    case RecoveryMode::nvm_local:
      ledger_.nvm_written_values_per_persist = ledger_.n;
      break;
    case RecoveryMode::nvm_prd:
      ledger_.nvm_written_values_per_persist = ledger_.n;
      ledger_.wire_redundancy_values_per_persist = ledger_.n;
      break;
  }

  line(rep, {"run_start", -1, -1, 0, 0,
             {{"mode", to_string(scfg_.recovery_mode)},
              {"proc", std::to_string(ccfg_.proc)},
              {"n", std::to_string(a_.n_rows)},
              {"period", std::to_string(scfg_.persist_period)},
              {"c", std::to_string(scfg_.c)},
              {"seed", std::to_string(ccfg_.seed)}}});

  if (!capacity_gate(rep)) {
    rep.ledger = ledger_;
    return rep;
  }

  // Fresh durable storage per run: the directory belongs to this
  // simulation. Refuse to wipe a directory we did not create.
  const auto marker = ccfg_.storage_dir / ".esrsim_storage";
  std::error_code ec;
  if (std::filesystem::exists(ccfg_.storage_dir, ec) &&
      !std::filesystem::is_empty(ccfg_.storage_dir, ec) &&
      !std::filesystem::exists(marker, ec))
    raise(ErrorCode::invalid_config,
          "storage dir " + ccfg_.storage_dir.string() +
              " exists with foreign content; pick a dedicated directory");
  std::filesystem::remove_all(ccfg_.storage_dir, ec);
  std::filesystem::create_directories(ccfg_.storage_dir);
  std::ofstream(marker) << "esrsim slot storage\n";

  clocks_ = pcg::ClockSet(ccfg_.proc);
  backend_ = pstore::make_backend(scfg_.recovery_mode, part_, scfg_.c, &plan_,
                                  ccfg_.storage_dir, &ledger_, &clocks_,
                                  ccfg_.costs);
  if (backend_)
    backend_->set_liveness([this](int r) {
      return r >= 0 && r < static_cast<int>(alive_.size()) &&
             alive_[r] != 0;
    });
  engine_ = std::make_unique<pcg::Engine>(a_, b_, precond_, part_, scfg_,
                                          plan_, &ledger_, &clocks_,
                                          &ccfg_.costs);
  engine_->init();

  alive_.assign(ccfg_.proc, 1);
  ccfg_.rank_to_node = initial_mapping_;  // replacements do not leak across runs
  occupancy_.assign(ccfg_.nodes, 0);
  for (int s = 0; s < ccfg_.proc; ++s) ++occupancy_[ccfg_.rank_to_node[s]];
  snapshots_.assign(ccfg_.proc, {});

  std::vector<char> event_fired(plan.events.size(), 0);
  auto pending_event = [&](std::uint64_t j,
                           FaultEvent::Phase ph) -> const FaultEvent* {
    for (std::size_t i = 0; i < plan.events.size(); ++i)
      if (!event_fired[i] && plan.events[i].j == j &&
          plan.events[i].phase == ph)
        return &plan.events[i];
    return nullptr;
  };
  auto mark_fired = [&](const FaultEvent* ev) {
    for (std::size_t i = 0; i < plan.events.size(); ++i)
      if (&plan.events[i] == ev) event_fired[i] = 1;
  };

  pcg::Engine::Callbacks cb;
  cb.at_iteration_start = [&](std::uint64_t j) {
    rep.iterate_hashes.push_back(hash_states());
    if (capture) {
      std::vector<pcg::SolverState> snap;
      snap.reserve(ccfg_.proc);
      for (int s = 0; s < ccfg_.proc; ++s) snap.push_back(engine_->state(s));
      rep.state_trace[j] = std::move(snap);
    }
    line(rep, {"iter", static_cast<std::int64_t>(j), -1, 0,
               clocks_.max_compute(),
               {{"res", hex_double(engine_->last_relative_residual())},
                {"hash", std::to_string(rep.iterate_hashes.back())}}});
  };
  cb.after_spmv = [&](std::uint64_t j) {
    if (const FaultEvent* ev = pending_event(j, FaultEvent::Phase::compute)) {
      mark_fired(ev);
      kill(ev->victims, j, "compute", rep);
    }
  };
  cb.global_sync = [&](std::uint64_t) {
    for (int s = 0; s < ccfg_.proc; ++s)
      if (!alive_[s]) throw FailureInterrupt{};
  };

  bool converged = false;
  for (;;) {
    const FaultEvent* mp_event =
        pending_event(engine_->iteration(), FaultEvent::Phase::mid_persist);
    HookWrap hook(this, backend_.get(), &rep, mp_event);
    try {
      if (engine_->iteration() >= scfg_.max_iter) break;
      if (engine_->step(backend_ ? &hook : nullptr, cb)) {
        converged = true;
        break;
      }
      if (hook.fired()) mark_fired(mp_event);
    } catch (const FailureInterrupt&) {
      if (hook.fired()) mark_fired(mp_event);
      try {
        recover(rep, engine_->iteration());
      } catch (const Error& e) {
        rep.status = RunStatus::unrecoverable;
        rep.status_detail = e.what();
        line(rep, {"unrecoverable",
                   static_cast<std::int64_t>(engine_->iteration()), -1, 0,
                   clocks_.max_compute(), {{"reason", e.what()}}});
        break;
      }
    }
  }

  if (rep.status != RunStatus::unrecoverable) {
    rep.status = converged ? RunStatus::converged : RunStatus::max_iter;
  }
  rep.iterations = engine_->iteration();
  rep.rel_residual = engine_->last_relative_residual();
  rep.final_x = engine_->assemble_x();
  rep.iterate_hashes.push_back(hash_states());
  if (backend_) backend_->fill_residency(ledger_);
  line(rep, {"converge", static_cast<std::int64_t>(rep.iterations), -1, 0,
             clocks_.max_compute(),
             {{"status", to_string(rep.status)},
              {"res", hex_double(rep.rel_residual)},
              {"x_hash",
               std::to_string(fnv1a64(rep.final_x.data(),
                                      rep.final_x.size() * 8))}}});
  rep.ledger = ledger_;
  return rep;
}

FaultPlan parse_fault_plan(const std::string& text) {
  FaultPlan plan;
  if (text.empty()) return plan;
  std::stringstream events(text);
  std::string item;
  while (std::getline(events, item, ';')) {
    if (item.empty()) continue;
    FaultEvent ev;
    std::stringstream fields(item);
    std::string j_s, phase_s, ranks_s;
    if (!std::getline(fields, j_s, ':') || !std::getline(fields, phase_s, ':') ||
        !std::getline(fields, ranks_s))
      raise(ErrorCode::invalid_config,
            "fault event must be j:phase:ranks, got '" + item + "'");
    ev.j = std::stoull(j_s);
    if (phase_s == "compute") {
      ev.phase = FaultEvent::Phase::compute;
    } else if (phase_s.rfind("mid_persist", 0) == 0) {
      ev.phase = FaultEvent::Phase::mid_persist;
      const auto at = phase_s.find('@');
      ev.cut = at == std::string::npos ? 0 : std::stoull(phase_s.substr(at + 1));
    } else {
      raise(ErrorCode::invalid_config, "unknown fault phase '" + phase_s + "'");
    }
    std::stringstream ranks(ranks_s);
    std::string r;
    while (std::getline(ranks, r, ',')) ev.victims.push_back(std::stoi(r));
    std::sort(ev.victims.begin(), ev.victims.end());
    plan.events.push_back(std::move(ev));
  }
  return plan;
}

}  // namespace cluster
}  // namespace esrsim
