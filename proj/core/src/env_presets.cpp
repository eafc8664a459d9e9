#include <stdexcept>

#include "exacktr/env.hpp"

namespace exacktr::env {

namespace {

// 9 rooms in a 3x3 arrangement connected as a serpentine chain; the goal sits
// seven rooms away from the start, reward 1 at the goal and nothing else.
constexpr const char* kSparseMaze = R"(env_id=sparse-maze
actions=forward,turn-left,turn-right
step_limit=300
start_heading=E
respawn_curriculum=0
reward.goal=1
grid:
######################
#......#......#......#
#......#......#......#
#..S..........#......#
#......#.............#
#......#......#......#
#......#......#......#
##################.###
#......#......#......#
#......#......#......#
#......#.............#
#.............#......#
#......#......#......#
#......#......#......#
###.##################
#......#......#......#
#......#......#......#
#.............#......#
#......#..........G..#
#......#......#......#
#......#......#......#
######################
)";

// 4 rooms: the key room is split by a hazard line that must be jumped, the
// treasure room is behind a door and its direct corridor is lined by hazards.
constexpr const char* kMiniMontezuma = R"(env_id=mini-montezuma
actions=forward,turn-left,turn-right,jump,wait
step_limit=500
start_heading=S
respawn_curriculum=0
reward.door=300
reward.goal=100
reward.key=100
grid:
##########################
#S...........#.....H.....#
#............#.....H.....#
#..................H...K.#
#............#.....H.....#
#............#.....H.....#
###.######################
#............#...........#
#............#..HHHHHHH..#
#............D.........G.#
#............#..HHHHHHH..#
#............#...........#
##########################
)";

}  // namespace

EnvSpec EnvSpec::builtin(const std::string& name) {
  if (name == "sparse-maze") return parse(kSparseMaze);
  if (name == "mini-montezuma") return parse(kMiniMontezuma);
  throw std::invalid_argument("unknown builtin environment: " + name);
}

std::vector<std::string> EnvSpec::builtin_names() {
  return {"sparse-maze", "mini-montezuma"};
}

}  // namespace exacktr::env
