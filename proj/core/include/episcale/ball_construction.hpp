#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "episcale/geometry.hpp"

namespace episcale {

/// One ball of the construction. Radii grow as e^{t - t_created} between
/// merge events; merged balls get fresh ids.
struct Ball {
    std::int64_t id;
    Vec2 center;
    double radius;      // at t_created
    double t_created;
    double t_merged = std::numeric_limits<double>::infinity();
    std::int64_t parent_a = -1;  // merge parents, -1 for input balls
    std::int64_t parent_b = -1;
    std::int64_t child = -1;     // ball this one merged into
};

struct MergeEvent {
    double t;
    std::int64_t id_a;
    std::int64_t id_b;
    std::int64_t id_new;
    Vec2 center;
    double radius;
    bool primary;  // first contact at this event time (cascade merges are not)
};

/// Family of balls with full merge history. Closures are pairwise disjoint at
/// every represented time; radii expand at the common exponential rate.
class BallFamily {
  public:
    /// Merges the input balls (radius-sum rule, radius-weighted centers) until
    /// closures are pairwise disjoint; the result is the family at t = 0.
    static BallFamily merge_to_disjoint(const std::vector<Ball>& input);
    static BallFamily from_circles(const std::vector<Vec2>& centers,
                                   const std::vector<double>& radii);

    double time() const { return time_; }
    /// Balls alive at the current time with their current radii.
    std::vector<Ball> current_balls() const;
    /// Balls alive at an arbitrary past time s in [0, time()].
    std::vector<Ball> balls_at(double s) const;
    /// Every ball ever created (input, cascade and merge products).
    const std::vector<Ball>& all_balls() const { return balls_; }
    const std::vector<MergeEvent>& events() const { return events_; }
    const std::vector<std::int64_t>& initial_ids() const { return initial_; }

    /// Id of the ball that contains ball `id` at time t (follows merge links).
    std::int64_t owner_at(std::int64_t id, double t) const;
    /// Center/radius of ball `id` as of time t (requires it alive at t).
    Ball state_of(std::int64_t id, double t) const;

    /// Event-driven evolution to target time t > time(): pure exponential
    /// expansion between contacts, cascading merges at frozen event times.
    /// Throws std::domain_error for a nonpositive step.
    void evolve(double t);

  private:
    void cascade_merges(double t_now, bool contact_event);

    std::vector<Ball> balls_;
    std::vector<std::int64_t> initial_;
    std::vector<std::int64_t> alive_;
    std::vector<MergeEvent> events_;
    double time_ = 0.0;
    std::int64_t next_id_ = 0;
};

/// Property report for the three construction guarantees: radius-sum growth
/// bound, coverage of the initial balls, and unique nested ownership between
/// sample times.
struct BallPropertyReport {
    bool radius_sum_ok = true;
    bool coverage_ok = true;
    bool nesting_ok = true;
    std::vector<std::string> violations;
    bool pass() const { return radius_sum_ok && coverage_ok && nesting_ok; }
};
BallPropertyReport verify_ball_properties(const std::vector<Ball>& initial,
                                          const BallFamily& trace,
                                          const std::vector<double>& times,
                                          double tol = 1e-9);

}  // namespace episcale
