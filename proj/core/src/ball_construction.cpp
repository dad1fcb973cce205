#include "episcale/ball_construction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace episcale {

namespace {

// Closure contact with relative tolerance on the center distance.
bool closures_touch(Vec2 pa, double ra, Vec2 pb, double rb) {
    const double d = dist(pa, pb);
    return d <= ra + rb + 1e-12 * std::max(d, ra + rb);
}

}  // namespace

BallFamily BallFamily::from_circles(const std::vector<Vec2>& centers,
                                    const std::vector<double>& radii) {
    if (centers.size() != radii.size())
        throw std::invalid_argument("centers/radii size mismatch");
    std::vector<Ball> input;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        if (!(radii[i] > 0.0))
            throw std::invalid_argument("ball radii must be > 0");
        Ball b;
        b.id = static_cast<std::int64_t>(i);
        b.center = centers[i];
        b.radius = radii[i];
        b.t_created = 0.0;
        input.push_back(b);
    }
    return merge_to_disjoint(input);
}

BallFamily BallFamily::merge_to_disjoint(const std::vector<Ball>& input) {
    BallFamily fam;
    for (const Ball& b : input) {
        Ball nb = b;
        nb.id = fam.next_id_++;
        nb.t_created = 0.0;
        nb.t_merged = std::numeric_limits<double>::infinity();
        fam.balls_.push_back(nb);
        fam.initial_.push_back(nb.id);
        fam.alive_.push_back(nb.id);
    }
    fam.cascade_merges(0.0, false);
    return fam;
}

std::vector<Ball> BallFamily::current_balls() const { return balls_at(time_); }

std::vector<Ball> BallFamily::balls_at(double s) const {
    if (s < 0.0 || s > time_ + 1e-15)
        throw std::domain_error("balls_at: time outside the evolved range");
    std::vector<Ball> out;
    for (const Ball& b : balls_) {
        if (b.t_created <= s && s < b.t_merged) {
            Ball cur = b;
            cur.radius = b.radius * std::exp(s - b.t_created);
            out.push_back(cur);
        }
    }
    return out;
}

std::int64_t BallFamily::owner_at(std::int64_t id, double t) const {
    std::int64_t cur = id;
    while (true) {
        const Ball& b = balls_.at(static_cast<std::size_t>(cur));
        if (t < b.t_merged) return cur;
        cur = b.child;
    }
}

Ball BallFamily::state_of(std::int64_t id, double t) const {
    const Ball& b = balls_.at(static_cast<std::size_t>(id));
    if (!(b.t_created <= t && t < b.t_merged))
        throw std::domain_error("state_of: ball not alive at requested time");
    Ball cur = b;
    cur.radius = b.radius * std::exp(t - b.t_created);
    return cur;
}

void BallFamily::cascade_merges(double t_now, bool contact_event) {
    bool first_at_this_time =
        contact_event && (events_.empty() || events_.back().t < t_now);
    while (true) {
        // Lexicographically smallest touching pair by (min id, max id).
        std::int64_t best_a = -1, best_b = -1;
        for (std::size_t i = 0; i < alive_.size(); ++i) {
            for (std::size_t j = i + 1; j < alive_.size(); ++j) {
                std::int64_t a = std::min(alive_[i], alive_[j]);
                std::int64_t b = std::max(alive_[i], alive_[j]);
                const Ball sa = state_of(a, t_now);
                const Ball sb = state_of(b, t_now);
                if (!closures_touch(sa.center, sa.radius, sb.center, sb.radius))
                    continue;
                if (best_a < 0 || std::tie(a, b) < std::tie(best_a, best_b)) {
                    best_a = a;
                    best_b = b;
                }
            }
        }
        if (best_a < 0) break;
        const Ball sa = state_of(best_a, t_now);
        const Ball sb = state_of(best_b, t_now);
        Ball merged;
        merged.id = next_id_++;
        merged.radius = sa.radius + sb.radius;
        merged.center = (sa.radius / merged.radius) * sa.center +
                        (sb.radius / merged.radius) * sb.center;
        merged.t_created = t_now;
        merged.parent_a = best_a;
        merged.parent_b = best_b;
        balls_[static_cast<std::size_t>(best_a)].t_merged = t_now;
        balls_[static_cast<std::size_t>(best_a)].child = merged.id;
        balls_[static_cast<std::size_t>(best_b)].t_merged = t_now;
        balls_[static_cast<std::size_t>(best_b)].child = merged.id;
        balls_.push_back(merged);
        alive_.erase(std::remove_if(alive_.begin(), alive_.end(),
                                    [&](std::int64_t id) {
                                        return id == best_a || id == best_b;
                                    }),
                     alive_.end());
        alive_.push_back(merged.id);
        events_.push_back({t_now, best_a, best_b, merged.id, merged.center,
                           merged.radius, first_at_this_time});
        first_at_this_time = false;
    }
}

void BallFamily::evolve(double t) {
    if (!(t > time_)) throw std::domain_error("evolve: target time must exceed current time");
    while (true) {
        // Next contact: t_c = now + ln(dist / (r_i + r_j)) over alive pairs.
        double t_next = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < alive_.size(); ++i) {
            for (std::size_t j = i + 1; j < alive_.size(); ++j) {
                const Ball a = state_of(alive_[i], time_);
                const Ball b = state_of(alive_[j], time_);
                const double ratio = dist(a.center, b.center) / (a.radius + b.radius);
                const double tc = time_ + std::log(std::max(ratio, 1.0));
                t_next = std::min(t_next, tc);
            }
        }
        if (t_next > t) break;
        time_ = t_next;
        cascade_merges(time_, true);
    }
    time_ = t;
}

BallPropertyReport verify_ball_properties(const std::vector<Ball>& initial,
                                          const BallFamily& trace,
                                          const std::vector<double>& times,
                                          double tol) {
    BallPropertyReport rep;
    auto fail = [&rep](bool& flag, const std::string& msg) {
        flag = false;
        rep.violations.push_back(msg);
    };
    double r_sum0 = 0.0;
    for (const Ball& b : initial) r_sum0 += b.radius;

    std::vector<double> ts = times;
    std::sort(ts.begin(), ts.end());
    for (double t : ts) {
        if (t < 0.0 || t > trace.time()) continue;
        const auto balls = trace.balls_at(t);
        // 1: sum of radii grows at most like e^t.
        double r_sum = 0.0;
        for (const Ball& b : balls) r_sum += b.radius;
        if (r_sum > std::exp(t) * r_sum0 * (1.0 + tol)) {
            std::ostringstream os;
            os << "radius sum " << r_sum << " exceeds e^t * " << r_sum0
               << " at t = " << t;
            fail(rep.radius_sum_ok, os.str());
        }
        // 2: every initial ball is covered by its owner.
        for (std::size_t i = 0; i < initial.size(); ++i) {
            const std::int64_t id = trace.initial_ids()[i];
            const Ball own = trace.state_of(trace.owner_at(id, t), t);
            const double slack =
                own.radius - (dist(initial[i].center, own.center) + initial[i].radius);
            if (slack < -tol * std::max(1.0, own.radius)) {
                std::ostringstream os;
                os << "initial ball " << id << " not covered at t = " << t;
                fail(rep.coverage_ok, os.str());
            }
        }
    }
    // 3: nesting between ordered sample times, with a uniqueness check
    // against every other ball alive at the later time.
    for (std::size_t u = 0; u < ts.size(); ++u) {
        for (std::size_t v = u + 1; v < ts.size(); ++v) {
            const double s = ts[u], t = ts[v];
            if (s < 0.0 || t > trace.time() || !(s < t)) continue;
            for (const Ball& bs : trace.balls_at(s)) {
                const double grown = bs.radius * std::exp(t - s);
                const Ball own = trace.state_of(trace.owner_at(bs.id, t), t);
                const double slack =
                    own.radius - (dist(bs.center, own.center) + grown);
                if (slack < -tol * std::max(1.0, own.radius)) {
                    std::ostringstream os;
                    os << "ball " << bs.id << " expanded from t = " << s
                       << " not nested in its owner at t = " << t;
                    fail(rep.nesting_ok, os.str());
                }
                int containers = 0;
                for (const Ball& bt : trace.balls_at(t)) {
                    if (dist(bs.center, bt.center) + grown <=
                        bt.radius * (1.0 + tol) + tol)
                        ++containers;
                }
                if (containers != 1) {
                    std::ostringstream os;
                    os << "ball " << bs.id << " expanded from t = " << s
                       << " contained in " << containers << " balls at t = " << t;
                    fail(rep.nesting_ok, os.str());
                }
            }
        }
    }
    return rep;
}

}  // namespace episcale
