#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "exacktr/rng.hpp"

namespace exacktr::env {

enum class Cell : char {
  Wall = '#',
  Floor = '.',
  Start = 'S',
  Goal = 'G',
  Key = 'K',
  Door = 'D',
  Hazard = 'H',
};

enum class Heading : int { N = 0, E = 1, S = 2, W = 3 };

char heading_char(Heading h);
Heading heading_from_char(char c);

// Action ids. Basic environments use {Forward, TurnLeft, TurnRight};
// Montezuma-style environments add {Jump, Wait}.
enum Action : int {
  kForward = 0,
  kTurnLeft = 1,
  kTurnRight = 2,
  kJump = 3,
  kWait = 4,
};

enum class ActionSet { Basic3, Montezuma5 };

enum class Cause { None, Goal, Death, Timeout };
const char* cause_name(Cause c);

struct GridPos {
  int row = 0;
  int col = 0;
  bool operator==(const GridPos&) const = default;
};

// Static description of an environment: grid, dynamics constants and reward
// table. Loadable from / serializable to a plain-text spec, canonical form
// round-trips byte for byte.
struct EnvSpec {
  std::string env_id;
  std::vector<std::string> grid;  // one string per row, validated rectangular
  ActionSet action_set = ActionSet::Basic3;
  int step_limit = 0;
  Heading start_heading = Heading::E;
  bool respawn_curriculum = false;
  std::map<std::string, double> reward_table;  // event name -> reward

  // Derived at parse time.
  GridPos start;
  std::vector<GridPos> keys;   // row-major discovery order
  std::vector<GridPos> doors;  // door i requires key i

  int rows() const { return static_cast<int>(grid.size()); }
  int cols() const { return grid.empty() ? 0 : static_cast<int>(grid[0].size()); }
  Cell at(GridPos p) const { return static_cast<Cell>(grid[p.row][p.col]); }
  bool in_bounds(GridPos p) const {
    return p.row >= 0 && p.row < rows() && p.col >= 0 && p.col < cols();
  }

  int action_count() const { return action_set == ActionSet::Basic3 ? 3 : 5; }
  int item_bits() const { return static_cast<int>(keys.size() + doors.size()); }
  // One-hot agent cell + one-hot heading + inventory bits + normalized step count.
  int frame_dim() const { return rows() * cols() + 4 + item_bits() + 1; }

  double reward_for(const std::string& event) const {
    auto it = reward_table.find(event);
    return it == reward_table.end() ? 0.0 : it->second;
  }

  static EnvSpec parse(const std::string& text);
  std::string serialize() const;
  static EnvSpec load_file(const std::filesystem::path& path);
  void save_file(const std::filesystem::path& path) const;

  // Shipped layouts: "sparse-maze" (22x22, 9 rooms, goal reward 1, 3 actions)
  // and "mini-montezuma" (13x26, 4 rooms, key/door/hazards, 5 actions).
  // `name_or_path` falls back to load_file when it names no builtin.
  static EnvSpec builtin(const std::string& name);
  static EnvSpec resolve(const std::string& name_or_path);
  static std::vector<std::string> builtin_names();
};

struct EnvState {
  GridPos pos;
  Heading heading = Heading::E;
  std::uint32_t inventory = 0;  // bits [0..keys) collected, [keys..keys+doors) opened
  int step_count = 0;
  bool alive = true;
};

// Four most recent raw frames concatenated, oldest first. At episode start all
// slots hold the initial frame.
struct ObservationStack {
  static constexpr int kFrames = 4;

  int frame_dim = 0;
  Eigen::VectorXd data;  // kFrames * frame_dim

  static ObservationStack initial(const Eigen::VectorXd& frame);
  void push(const Eigen::VectorXd& frame);
  Eigen::VectorXd frame(int slot) const;  // slot 0 = oldest, 3 = newest
};

struct StepResult {
  ObservationStack observation;
  double reward = 0.0;
  bool done = false;
  Cause cause = Cause::None;
};

// Pure dynamics: raw feature frame of a state.
Eigen::VectorXd observe_frame(const EnvSpec& spec, const EnvState& state);
// Spec-level observe: shifts the stack and appends the state's frame.
ObservationStack observe(const EnvSpec& spec, const EnvState& state,
                         const ObservationStack& previous);

struct StepOutcome {
  EnvState state;
  double reward = 0.0;
  bool done = false;
  Cause cause = Cause::None;
};

// Pure single transition. Precondition: the episode is not already finished.
StepOutcome step(const EnvSpec& spec, const EnvState& state, int action);

// Fresh episode state. With respawn_curriculum the position is drawn uniformly
// (seed-derived) from the reachable floor cells; heading stays canonical.
EnvState reset_state(const EnvSpec& spec, std::uint64_t seed);

// Floor/start cells reachable from the start by 4-neighbor walking; walls,
// hazards and doors block. Row-major order.
std::vector<GridPos> reachable_floor_cells(const EnvSpec& spec);

struct ValidationReport {
  int reachable_cells = 0;       // distinct positions reachable under full dynamics
  int min_moves_to_goal = 0;     // move count (turns free), lower bound on actions
  double max_episode_reward = 0.0;
  std::string summary() const;
};

// Proves by breadth-first search over (position, inventory) that the goal is
// reachable with maximal reward and within the step limit's move budget.
// Throws std::invalid_argument on malformed or unreachable specs.
ValidationReport validate_spec(const EnvSpec& spec);

// Single stateful episode wrapper over the pure dynamics.
class Env {
 public:
  explicit Env(EnvSpec spec);

  void reset(std::uint64_t seed);
  // Episode from an explicit start cell (canonical heading). Used by the
  // curriculum internals and perturbed-start evaluation.
  void reset_at(GridPos pos);
  StepResult step(int action);  // throws std::logic_error if already done

  const EnvSpec& spec() const { return spec_; }
  const EnvState& state() const { return state_; }
  const ObservationStack& observation() const { return obs_; }
  bool done() const { return done_; }
  double episode_reward() const { return episode_reward_; }
  // True when every key has been collected and every door opened.
  bool inventory_complete() const;

 private:
  EnvSpec spec_;
  EnvState state_;
  ObservationStack obs_;
  bool done_ = true;
  double episode_reward_ = 0.0;
};

}  // namespace exacktr::env
