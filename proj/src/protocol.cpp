#include "hra/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hra {

int table_l_urllc(const TableReservation& table, int k_mmtc) {
    if (table.points.empty()) throw std::invalid_argument("reservation table is empty");
    const auto& pts = table.points;
    if (k_mmtc <= pts.front().first) return pts.front().second;
    if (k_mmtc >= pts.back().first) return pts.back().second;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (k_mmtc <= pts[i].first) {
            const auto [x0, y0] = pts[i - 1];
            const auto [x1, y1] = pts[i];
            const double frac = static_cast<double>(k_mmtc - x0) / (x1 - x0);
            return static_cast<int>(std::lround(y0 + frac * (y1 - y0)));
        }
    }
    return pts.back().second;
}

void EngineConfig::validate() const {
    traffic.validate();
    grid.validate();
    urllc_profile.validate();
    mmtc_profile.validate();
    acb.validate();
    if (history_window < 1) throw std::invalid_argument("history_window must be >= 1");
    if (prior_urllc < 0 || prior_mmtc < 0)
        throw std::invalid_argument("cold-start priors must be >= 0");
    if (const auto* fixed = std::get_if<FixedReservation>(&reservation)) {
        if (fixed->l_urllc < 0 || fixed->l_mmtc < 0)
            throw std::invalid_argument("reservation.fixed channel counts must be >= 0");
        if (fixed->l_urllc + fixed->l_mmtc < 1)
            throw std::invalid_argument("reservation.fixed must reserve at least one channel");
        if (fixed->l_urllc + fixed->l_mmtc > grid.total_rbs())
            throw std::invalid_argument("reservation.fixed exceeds the grid RB count");
    }
    if (const auto* table = std::get_if<TableReservation>(&reservation)) {
        if (table->total < 1) throw std::invalid_argument("reservation.table_total must be >= 1");
        if (table->points.empty()) throw std::invalid_argument("reservation.table is empty");
        if (!std::is_sorted(table->points.begin(), table->points.end(),
                            [](auto& a, auto& b) { return a.first < b.first; }))
            throw std::invalid_argument("reservation.table points must be ascending in k_mmtc");
        for (const auto& [k, lu] : table->points) {
            if (lu < 0 || lu > table->total)
                throw std::invalid_argument("reservation.table l_urllc out of [0, total]");
        }
    }
    if (std::holds_alternative<SlicerReservation>(reservation)) {
        if (slicer.urllc_mu < 0 || slicer.urllc_mu > max_numerology)
            throw std::invalid_argument("slicer.urllc_mu must be in {0,1,2}");
    }
}

SimulationEngine::SimulationEngine(EngineConfig cfg, BacklogPredictor* predictor)
    : cfg_(std::move(cfg)), predictor_(predictor), history_(cfg_.history_window) {
    cfg_.validate();
    if (!predictor_) throw std::invalid_argument("engine needs a predictor");
    users_.resize(static_cast<std::size_t>(cfg_.traffic.k_urllc) + cfg_.traffic.k_mmtc);
    for (int i = 0; i < cfg_.traffic.k_urllc; ++i) users_[i].service = ServiceClass::urllc;
    for (std::size_t i = cfg_.traffic.k_urllc; i < users_.size(); ++i)
        users_[i].service = ServiceClass::mmtc;
}

BacklogEstimate SimulationEngine::true_backlog() const {
    BacklogEstimate k{};
    for (const auto& u : users_) {
        if (u.status != UserStatus::pending) continue;
        (u.service == ServiceClass::urllc ? k.urllc : k.mmtc)++;
    }
    return k;
}

void SimulationEngine::admit_arrivals(long t, Rng& rng, ClassFrameStats& su,
                                      ClassFrameStats& sm) {
    auto admit = [&](int user_id, ClassFrameStats& s) {
        UserState& u = users_[static_cast<std::size_t>(user_id)];
        if (u.status == UserStatus::idle) {
            u.status = UserStatus::pending;
            u.attempts = 0;
            u.arrival_frame = t;
            ++s.arrivals;
        } else {
            ++s.arrivals_dropped_busy;  // single-packet queue
        }
    };
    for (int idx : draw_urllc_arrival_users(cfg_.traffic, t, rng)) admit(idx, su);
    for (int idx : draw_mmtc_arrival_users(cfg_.traffic, t, rng))
        admit(cfg_.traffic.k_urllc + idx, sm);
}

std::pair<int, int> SimulationEngine::reserve_channels(const BacklogEstimate& est, long t) {
    if (const auto* fixed = std::get_if<FixedReservation>(&cfg_.reservation))
        return {fixed->l_urllc, fixed->l_mmtc};
    if (const auto* table = std::get_if<TableReservation>(&cfg_.reservation)) {
        const int lu = table_l_urllc(*table, cfg_.traffic.k_mmtc);
        return {lu, table->total - lu};
    }
    const ChannelPlan plan = maxrect_pack(est.urllc, est.mmtc, cfg_.grid, cfg_.urllc_profile,
                                          cfg_.mmtc_profile, cfg_.slicer, t);
    return {plan.l_urllc(), plan.l_mmtc()};
}

FrameOutcome SimulationEngine::run_frame(long t, Rng& rng) {
    FrameOutcome out;
    out.frame = t;
    ClassFrameStats& su = out.urllc;
    ClassFrameStats& sm = out.mmtc;
    auto stats_of = [&](ServiceClass c) -> ClassFrameStats& {
        return c == ServiceClass::urllc ? su : sm;
    };

    // Barred users whose timers expired rejoin the backlog.
    for (auto& u : users_) {
        if (u.status == UserStatus::barred && u.rejoin_frame <= t) u.status = UserStatus::pending;
    }
    for (const auto& u : users_) {
        if (u.status == UserStatus::pending) ++stats_of(u.service).carried;
    }

    admit_arrivals(t, rng, su, sm);
    su.contenders = su.carried + su.arrivals;
    sm.contenders = sm.carried + sm.arrivals;

    // S.0 (SIB2): predict the backlog and reserve channels accordingly.
    if (auto* oracle = dynamic_cast<OraclePredictor*>(predictor_))
        oracle->set_truth({su.contenders, sm.contenders});
    const BacklogEstimate est =
        predictor_->predict(history_).value_or(BacklogEstimate{cfg_.prior_urllc, cfg_.prior_mmtc});
    su.predicted = est.urllc;
    sm.predicted = est.mmtc;
    const auto [l_urllc, l_mmtc] = reserve_channels(est, t);
    su.channels = l_urllc;
    sm.channels = l_mmtc;

    // S.1 (Msg1): every pending user of a class with channels picks one
    // uniformly; that participation costs one of its W attempts.
    ClassChannels chan_u, chan_m;
    chan_u.count = l_urllc;
    chan_u.selectors.assign(static_cast<std::size_t>(l_urllc), {});
    chan_m.count = l_mmtc;
    chan_m.selectors.assign(static_cast<std::size_t>(l_mmtc), {});
    for (std::size_t id = 0; id < users_.size(); ++id) {
        UserState& u = users_[id];
        if (u.status != UserStatus::pending) continue;
        ClassChannels& ch = u.service == ServiceClass::urllc ? chan_u : chan_m;
        if (ch.count == 0) continue;  // whole class backlog carries over
        const int pick = std::uniform_int_distribution<int>(0, ch.count - 1)(rng);
        ch.selectors[static_cast<std::size_t>(pick)].push_back(static_cast<int>(id));
        ++u.attempts;
    }

    auto serve = [&](int user_id) {
        UserState& u = users_[static_cast<std::size_t>(user_id)];
        ClassFrameStats& s = stats_of(u.service);
        ++s.served;
        s.latency_frames += t - u.arrival_frame;
        u.status = UserStatus::idle;
        u.attempts = 0;
        u.arrival_frame = -1;
    };

    // S.2 (Msg2) and S.3 (Msg3) per class: sole selectors succeed outright;
    // colliders face the barring check, and a collided channel is recovered
    // when exactly one collider survives it.
    auto resolve_class = [&](ClassChannels& ch, ServiceClass service, bool acb_applies,
                             ClassTriplet& triplet) {
        ClassFrameStats& s = stats_of(service);

        std::vector<int> collided;  // channel indices
        double collider_sum = 0.0;
        for (int c = 0; c < ch.count; ++c) {
            const auto& sel = ch.selectors[static_cast<std::size_t>(c)];
            if (sel.empty()) continue;
            if (sel.size() >= 2) {
                collided.push_back(c);
                collider_sum += static_cast<double>(sel.size());
            }
        }
        s.msg1_collided = static_cast<int>(collided.size());

        double p = 1.0;
        if (acb_applies) {
            if (cfg_.acb.mode == AcbMode::fixed) {
                p = cfg_.acb.p_fixed;
            } else if (!collided.empty()) {
                p = optimal_acb(collider_sum / static_cast<double>(collided.size()));
            }
        }
        s.p_acb = p;

        int resolved = 0;
        for (int c : collided) {
            std::vector<int> passers;
            for (int id : ch.selectors[static_cast<std::size_t>(c)]) {
                if (acb_check(p, rng)) {
                    passers.push_back(id);
                } else {
                    UserState& u = users_[static_cast<std::size_t>(id)];
                    u.status = UserStatus::barred;
                    u.barred_at = t;
                    u.rejoin_frame = t + std::max(1, barring_delay(cfg_.acb.barring_time, rng));
                }
            }
            if (passers.size() == 1) {
                serve(passers.front());
                ++resolved;
            }
            // >= 2 passers re-collide in Msg3; everyone stays pending.
        }

        int soles = 0;
        for (int c = 0; c < ch.count; ++c) {
            if (ch.selectors[static_cast<std::size_t>(c)].size() == 1) {
                serve(ch.selectors[static_cast<std::size_t>(c)].front());
                ++soles;
            }
        }

        triplet.success = soles + resolved;
        triplet.collision = static_cast<int>(collided.size()) - resolved;
        triplet.idle = ch.count - triplet.success - triplet.collision;
    };

    resolve_class(chan_u, ServiceClass::urllc, cfg_.acb.apply_urllc, out.observation.urllc);
    resolve_class(chan_m, ServiceClass::mmtc, cfg_.acb.apply_mmtc, out.observation.mmtc);
    out.observation.frame_index = t;

    // Attempt limit: anyone who burned their W-th attempt without success is
    // shut down, whether they ended the frame pending or freshly barred.
    for (auto& u : users_) {
        const bool active = u.status == UserStatus::pending ||
                            (u.status == UserStatus::barred && u.barred_at == t);
        if (active && u.attempts >= cfg_.acb.max_attempts) {
            ++stats_of(u.service).dropped;
            u.status = UserStatus::idle;
            u.attempts = 0;
            u.arrival_frame = -1;
            u.barred_at = -1;
        }
    }

    for (const auto& u : users_) {
        if (u.status == UserStatus::pending) ++stats_of(u.service).backlog_out;
        if (u.status == UserStatus::barred && u.barred_at == t) ++stats_of(u.service).newly_barred;
    }

    // Frame conservation and triplet identities; violations are engine bugs.
    for (const ClassFrameStats* s : {&su, &sm}) {
        if (s->contenders != s->served + s->dropped + s->newly_barred + s->backlog_out)
            throw std::logic_error("frame conservation identity violated");
    }
    if (out.observation.urllc.total() != l_urllc || out.observation.mmtc.total() != l_mmtc)
        throw std::logic_error("observation triplet does not sum to the channel count");

    history_.push(out.observation);
    return out;
}

std::vector<RealizationTrace> run_simulation(
    const EngineConfig& cfg,
    const std::function<std::unique_ptr<BacklogPredictor>()>& predictor_factory, long frames,
    int realizations, std::uint64_t master_seed) {
    if (frames < 1) throw std::invalid_argument("run_simulation: frames must be >= 1");
    if (realizations < 1) throw std::invalid_argument("run_simulation: realizations must be >= 1");

    std::vector<RealizationTrace> traces;
    traces.reserve(static_cast<std::size_t>(realizations));
    for (int r = 0; r < realizations; ++r) {
        Rng rng = make_realization_rng(master_seed, static_cast<std::uint64_t>(r));
        auto predictor = predictor_factory();
        SimulationEngine engine(cfg, predictor.get());
        RealizationTrace trace;
        trace.frames.reserve(static_cast<std::size_t>(frames));
        for (long t = 0; t < frames; ++t) trace.frames.push_back(engine.run_frame(t, rng));
        traces.push_back(std::move(trace));
    }
    return traces;
}

} // namespace hra
