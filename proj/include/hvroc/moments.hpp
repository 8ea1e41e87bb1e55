#pragma once

#include "hvroc/lqg_automation.hpp"
#include "hvroc/lqs_human.hpp"

#include <optional>

namespace hvroc {

enum class Layout {
    HumanAlone,  // [x; xh_H]
    Coupled      // [x; xh_H; xh_A]
};

struct MomentTrajectory {
    Layout layout = Layout::HumanAlone;
    int n = 0;
    int stacked_dim = 0;
    VecSeq means;  // N+1 entries
    MatSeq covs;   // N+1 entries

    int N() const { return static_cast<int>(means.size()) - 1; }
};

struct PositionStats {
    Eigen::Vector2d mean;
    Eigen::Matrix2d cov;
};

MomentTrajectory propagate_human_alone(const PlantModel& plant, const HumanPolicy& human);
MomentTrajectory propagate_coupled(const PlantModel& plant, const HumanPolicy& human,
                                   const AutomationPolicy& automation);

// Closed-loop transition of the stacked state at step t.
Mat stacked_transition(const PlantModel& plant, const HumanPolicy& human,
                       const AutomationPolicy* automation, int t);

// Positions live in the first two entries of the x-block.
PositionStats position_stats(const MomentTrajectory& traj, int t);

inline int mid_index(int N) { return N / 2; }

// Smallest t with |E p_axis - p_ref| < band*|p_ref| for every later step.
std::optional<int> settling_time(const MomentTrajectory& traj, int axis, double p_ref,
                                 double band_fraction = 0.05);

} // namespace hvroc
