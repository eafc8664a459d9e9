#include "exacktr/env.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "exacktr/text_format.hpp"

namespace exacktr::env {

namespace {

constexpr const char* kBasicActions = "forward,turn-left,turn-right";
constexpr const char* kMontezumaActions = "forward,turn-left,turn-right,jump,wait";

GridPos heading_delta(Heading h) {
  switch (h) {
    case Heading::N: return {-1, 0};
    case Heading::E: return {0, 1};
    case Heading::S: return {1, 0};
    case Heading::W: return {0, -1};
  }
  return {0, 0};
}

GridPos offset(GridPos p, GridPos d, int times = 1) {
  return {p.row + d.row * times, p.col + d.col * times};
}

bool is_grid_char(char c) {
  switch (c) {
    case '#': case '.': case 'S': case 'G': case 'K': case 'D': case 'H':
      return true;
    default:
      return false;
  }
}

}  // namespace

char heading_char(Heading h) {
  return "NESW"[static_cast<int>(h)];
}

Heading heading_from_char(char c) {
  switch (c) {
    case 'N': return Heading::N;
    case 'E': return Heading::E;
    case 'S': return Heading::S;
    case 'W': return Heading::W;
    default: throw std::invalid_argument("unknown heading: " + std::string(1, c));
  }
}

const char* cause_name(Cause c) {
  switch (c) {
    case Cause::None: return "none";
    case Cause::Goal: return "goal";
    case Cause::Death: return "death";
    case Cause::Timeout: return "timeout";
  }
  return "none";
}

EnvSpec EnvSpec::parse(const std::string& text) {
  EnvSpec spec;
  std::istringstream in(text);
  std::string line;
  bool in_grid = false;
  bool saw_actions = false, saw_limit = false, saw_id = false;

  while (std::getline(in, line)) {
    if (!in_grid) {
      if (line == "grid:") {
        in_grid = true;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("env spec: expected key=value before grid:, got '" + line + "'");
      }
      const std::string key = line.substr(0, eq);
      const std::string value = line.substr(eq + 1);
      if (key == "env_id") {
        spec.env_id = value;
        saw_id = true;
      } else if (key == "actions") {
        if (value == kBasicActions) {
          spec.action_set = ActionSet::Basic3;
        } else if (value == kMontezumaActions) {
          spec.action_set = ActionSet::Montezuma5;
        } else {
          throw std::invalid_argument("env spec: unknown action set '" + value + "'");
        }
        saw_actions = true;
      } else if (key == "step_limit") {
        spec.step_limit = text_format::parse_int(value, "step_limit");
        saw_limit = true;
      } else if (key == "start_heading") {
        if (value.size() != 1) throw std::invalid_argument("env spec: bad start_heading");
        spec.start_heading = heading_from_char(value[0]);
      } else if (key == "respawn_curriculum") {
        spec.respawn_curriculum = text_format::parse_bool(value, "respawn_curriculum");
      } else if (key.rfind("reward.", 0) == 0) {
        spec.reward_table[key.substr(7)] = text_format::parse_double(value, key);
      } else {
        throw std::invalid_argument("env spec: unknown key '" + key + "'");
      }
    } else {
      if (line.empty()) continue;
      spec.grid.push_back(line);
    }
  }

  if (!saw_id || !saw_actions || !saw_limit || !in_grid) {
    throw std::invalid_argument("env spec: missing env_id, actions, step_limit or grid:");
  }
  if (spec.step_limit <= 0) throw std::invalid_argument("env spec: step_limit must be > 0");
  if (spec.grid.empty()) throw std::invalid_argument("env spec: empty grid");

  const auto width = spec.grid[0].size();
  int starts = 0;
  for (int r = 0; r < spec.rows(); ++r) {
    if (spec.grid[r].size() != width) {
      throw std::invalid_argument("env spec: grid is not rectangular");
    }
    for (int c = 0; c < spec.cols(); ++c) {
      const char ch = spec.grid[r][c];
      if (!is_grid_char(ch)) {
        throw std::invalid_argument("env spec: bad grid character '" + std::string(1, ch) + "'");
      }
      const GridPos p{r, c};
      switch (static_cast<Cell>(ch)) {
        case Cell::Start:
          spec.start = p;
          ++starts;
          break;
        case Cell::Key: spec.keys.push_back(p); break;
        case Cell::Door: spec.doors.push_back(p); break;
        default: break;
      }
    }
  }
  if (starts != 1) throw std::invalid_argument("env spec: exactly one start cell required");
  if (spec.doors.size() > spec.keys.size()) {
    throw std::invalid_argument("env spec: more doors than keys");
  }
  return spec;
}

std::string EnvSpec::serialize() const {
  std::string out;
  out += "env_id=" + env_id + "\n";
  out += "actions=";
  out += (action_set == ActionSet::Basic3 ? kBasicActions : kMontezumaActions);
  out += "\n";
  out += "step_limit=" + std::to_string(step_limit) + "\n";
  out += "start_heading=" + std::string(1, heading_char(start_heading)) + "\n";
  out += "respawn_curriculum=" + std::string(respawn_curriculum ? "1" : "0") + "\n";
  for (const auto& [event, reward] : reward_table) {
    out += "reward." + event + "=" + text_format::format_double(reward) + "\n";
  }
  out += "grid:\n";
  for (const auto& row : grid) out += row + "\n";
  return out;
}

EnvSpec EnvSpec::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open env spec: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void EnvSpec::save_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write env spec: " + path.string());
  out << serialize();
}

EnvSpec EnvSpec::resolve(const std::string& name_or_path) {
  for (const auto& name : builtin_names()) {
    if (name == name_or_path) return builtin(name);
  }
  return load_file(name_or_path);
}

ObservationStack ObservationStack::initial(const Eigen::VectorXd& frame) {
  ObservationStack s;
  s.frame_dim = static_cast<int>(frame.size());
  s.data.resize(kFrames * s.frame_dim);
  for (int i = 0; i < kFrames; ++i) s.data.segment(i * s.frame_dim, s.frame_dim) = frame;
  return s;
}

void ObservationStack::push(const Eigen::VectorXd& frame) {
  data.head((kFrames - 1) * frame_dim) = data.tail((kFrames - 1) * frame_dim).eval();
  data.tail(frame_dim) = frame;
}

Eigen::VectorXd ObservationStack::frame(int slot) const {
  return data.segment(slot * frame_dim, frame_dim);
}

Eigen::VectorXd observe_frame(const EnvSpec& spec, const EnvState& state) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(spec.frame_dim());
  f[state.pos.row * spec.cols() + state.pos.col] = 1.0;
  const int heading_base = spec.rows() * spec.cols();
  f[heading_base + static_cast<int>(state.heading)] = 1.0;
  const int item_base = heading_base + 4;
  for (int b = 0; b < spec.item_bits(); ++b) {
    f[item_base + b] = (state.inventory >> b) & 1u ? 1.0 : 0.0;
  }
  f[item_base + spec.item_bits()] =
      static_cast<double>(state.step_count) / static_cast<double>(spec.step_limit);
  return f;
}

ObservationStack observe(const EnvSpec& spec, const EnvState& state,
                         const ObservationStack& previous) {
  ObservationStack next = previous;
  next.push(observe_frame(spec, state));
  return next;
}

namespace {

int key_index(const EnvSpec& spec, GridPos p) {
  for (std::size_t i = 0; i < spec.keys.size(); ++i) {
    if (spec.keys[i] == p) return static_cast<int>(i);
  }
  return -1;
}

int door_index(const EnvSpec& spec, GridPos p) {
  for (std::size_t i = 0; i < spec.doors.size(); ++i) {
    if (spec.doors[i] == p) return static_cast<int>(i);
  }
  return -1;
}

// A cell the agent may end a move on (hazards included: entering one kills).
bool enterable(const EnvSpec& spec, GridPos p, std::uint32_t inventory) {
  if (!spec.in_bounds(p)) return false;
  const Cell c = spec.at(p);
  if (c == Cell::Wall) return false;
  if (c == Cell::Door) {
    const int d = door_index(spec, p);
    return (inventory >> d) & 1u;  // matching key collected
  }
  return true;
}

// A cell a jump may fly over: anything but walls and closed doors.
bool overflyable(const EnvSpec& spec, GridPos p, std::uint32_t inventory) {
  if (!spec.in_bounds(p)) return false;
  const Cell c = spec.at(p);
  if (c == Cell::Wall) return false;
  if (c == Cell::Door) {
    const int d = door_index(spec, p);
    return (inventory >> d) & 1u;
  }
  return true;
}

// Applies cell events after the agent lands on `pos`.
void resolve_cell(const EnvSpec& spec, EnvState& st, double& reward, Cause& cause) {
  switch (spec.at(st.pos)) {
    case Cell::Goal:
      reward += spec.reward_for("goal");
      cause = Cause::Goal;
      break;
    case Cell::Hazard:
      cause = Cause::Death;  // death yields reward 0
      break;
    case Cell::Key: {
      const int k = key_index(spec, st.pos);
      if (!((st.inventory >> k) & 1u)) {
        st.inventory |= 1u << k;
        reward += spec.reward_for("key");
      }
      break;
    }
    case Cell::Door: {
      const int d = door_index(spec, st.pos);
      const int bit = static_cast<int>(spec.keys.size()) + d;
      if (!((st.inventory >> bit) & 1u)) {
        st.inventory |= 1u << bit;
        reward += spec.reward_for("door");
      }
      break;
    }
    default:
      break;
  }
}

}  // namespace

StepOutcome step(const EnvSpec& spec, const EnvState& state, int action) {
  if (action < 0 || action >= spec.action_count()) {
    throw std::out_of_range("env step: action out of range");
  }
  StepOutcome out;
  out.state = state;
  EnvState& st = out.state;
  Cause cause = Cause::None;

  switch (action) {
    case kForward: {
      const GridPos target = offset(st.pos, heading_delta(st.heading));
      if (enterable(spec, target, st.inventory)) {
        st.pos = target;
        resolve_cell(spec, st, out.reward, cause);
      }
      break;
    }
    case kTurnLeft:
      st.heading = static_cast<Heading>((static_cast<int>(st.heading) + 3) % 4);
      break;
    case kTurnRight:
      st.heading = static_cast<Heading>((static_cast<int>(st.heading) + 1) % 4);
      break;
    case kJump: {
      const GridPos d = heading_delta(st.heading);
      const GridPos mid = offset(st.pos, d);
      const GridPos land = offset(st.pos, d, 2);
      if (overflyable(spec, mid, st.inventory) && enterable(spec, land, st.inventory)) {
        st.pos = land;
        resolve_cell(spec, st, out.reward, cause);
      }
      break;
    }
    case kWait:
      break;
  }

  st.step_count += 1;
  if (cause == Cause::None && st.step_count >= spec.step_limit) {
    cause = Cause::Timeout;
  }
  if (cause == Cause::Death) st.alive = false;
  out.cause = cause;
  out.done = cause != Cause::None;
  return out;
}

EnvState reset_state(const EnvSpec& spec, std::uint64_t seed) {
  EnvState st;
  st.pos = spec.start;
  st.heading = spec.start_heading;
  if (spec.respawn_curriculum) {
    const auto cells = reachable_floor_cells(spec);
    if (cells.empty()) throw std::invalid_argument("respawn curriculum: no reachable floor cells");
    Rng rng(seed);
    st.pos = cells[rng.uniform_int(static_cast<int>(cells.size()))];
  }
  return st;
}

std::vector<GridPos> reachable_floor_cells(const EnvSpec& spec) {
  std::vector<std::uint8_t> seen(spec.rows() * spec.cols(), 0);
  std::deque<GridPos> frontier{spec.start};
  seen[spec.start.row * spec.cols() + spec.start.col] = 1;
  auto walkable = [&](GridPos p) {
    if (!spec.in_bounds(p)) return false;
    const Cell c = spec.at(p);
    return c == Cell::Floor || c == Cell::Start || c == Cell::Key || c == Cell::Goal;
  };
  while (!frontier.empty()) {
    const GridPos p = frontier.front();
    frontier.pop_front();
    for (const GridPos d : {GridPos{-1, 0}, GridPos{0, 1}, GridPos{1, 0}, GridPos{0, -1}}) {
      const GridPos q = offset(p, d);
      if (!walkable(q)) continue;
      auto& mark = seen[q.row * spec.cols() + q.col];
      if (mark) continue;
      mark = 1;
      frontier.push_back(q);
    }
  }
  std::vector<GridPos> cells;
  for (int r = 0; r < spec.rows(); ++r) {
    for (int c = 0; c < spec.cols(); ++c) {
      const GridPos p{r, c};
      const Cell cell = spec.at(p);
      if (seen[r * spec.cols() + c] && (cell == Cell::Floor || cell == Cell::Start)) {
        cells.push_back(p);
      }
    }
  }
  return cells;
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  out << "reachable positions: " << reachable_cells
      << ", min moves to goal: " << min_moves_to_goal
      << ", max episode reward: " << text_format::format_double(max_episode_reward);
  return out.str();
}

ValidationReport validate_spec(const EnvSpec& spec) {
  bool has_goal = false;
  for (const auto& row : spec.grid) {
    if (row.find('G') != std::string::npos) has_goal = true;
  }
  if (!has_goal) throw std::invalid_argument("env spec: no goal cell");

  // BFS over (position, inventory); turns are free so heading is irrelevant
  // to reachability. Hazard cells are lethal and never expanded.
  const int cells = spec.rows() * spec.cols();
  const int inv_states = 1 << spec.item_bits();
  std::vector<int> dist(static_cast<std::size_t>(cells) * inv_states, -1);
  auto at_index = [&](GridPos p, std::uint32_t inv) {
    return static_cast<std::size_t>(p.row * spec.cols() + p.col) * inv_states + inv;
  };

  struct Node {
    GridPos pos;
    std::uint32_t inv;
  };
  std::deque<Node> frontier{{spec.start, 0}};
  dist[at_index(spec.start, 0)] = 0;

  double best_reward = -1.0;
  int best_moves = -1;
  std::vector<std::uint8_t> pos_seen(cells, 0);
  pos_seen[spec.start.row * spec.cols() + spec.start.col] = 1;

  auto item_reward = [&](std::uint32_t inv) {
    double total = 0.0;
    for (std::size_t i = 0; i < spec.keys.size(); ++i) {
      if ((inv >> i) & 1u) total += spec.reward_for("key");
    }
    for (std::size_t i = 0; i < spec.doors.size(); ++i) {
      if ((inv >> (spec.keys.size() + i)) & 1u) total += spec.reward_for("door");
    }
    return total;
  };

  while (!frontier.empty()) {
    const Node n = frontier.front();
    frontier.pop_front();
    const int d = dist[at_index(n.pos, n.inv)];

    std::vector<GridPos> targets;
    for (const GridPos dir : {GridPos{-1, 0}, GridPos{0, 1}, GridPos{1, 0}, GridPos{0, -1}}) {
      targets.push_back(offset(n.pos, dir));
      if (spec.action_set == ActionSet::Montezuma5) {
        const GridPos mid = offset(n.pos, dir);
        const GridPos land = offset(n.pos, dir, 2);
        if (overflyable(spec, mid, n.inv) && spec.in_bounds(land)) targets.push_back(land);
      }
    }
    for (const GridPos q : targets) {
      if (!enterable(spec, q, n.inv)) continue;
      const Cell c = spec.at(q);
      if (c == Cell::Hazard) continue;
      std::uint32_t inv = n.inv;
      if (c == Cell::Key) inv |= 1u << key_index(spec, q);
      if (c == Cell::Door) inv |= 1u << (spec.keys.size() + door_index(spec, q));
      if (c == Cell::Goal) {
        const double reward = item_reward(inv) + spec.reward_for("goal");
        if (reward > best_reward || (reward == best_reward && d + 1 < best_moves)) {
          best_reward = reward;
          best_moves = d + 1;
        }
        continue;  // goal ends the episode
      }
      auto& entry = dist[at_index(q, inv)];
      if (entry >= 0) continue;
      entry = d + 1;
      pos_seen[q.row * spec.cols() + q.col] = 1;
      frontier.push_back({q, inv});
    }
  }

  if (best_moves < 0) throw std::invalid_argument("env spec: goal unreachable from start");
  if (best_moves > spec.step_limit) {
    throw std::invalid_argument("env spec: goal unreachable within step limit");
  }

  ValidationReport report;
  report.reachable_cells = static_cast<int>(std::count(pos_seen.begin(), pos_seen.end(), 1));
  report.min_moves_to_goal = best_moves;
  report.max_episode_reward = best_reward;
  return report;
}

Env::Env(EnvSpec spec) : spec_(std::move(spec)) {}

void Env::reset(std::uint64_t seed) {
  state_ = reset_state(spec_, seed);
  obs_ = ObservationStack::initial(observe_frame(spec_, state_));
  done_ = false;
  episode_reward_ = 0.0;
}

void Env::reset_at(GridPos pos) {
  if (!spec_.in_bounds(pos) || spec_.at(pos) == Cell::Wall) {
    throw std::invalid_argument("reset_at: position not a usable cell");
  }
  state_ = EnvState{};
  state_.pos = pos;
  state_.heading = spec_.start_heading;
  obs_ = ObservationStack::initial(observe_frame(spec_, state_));
  done_ = false;
  episode_reward_ = 0.0;
}

StepResult Env::step(int action) {
  if (done_) throw std::logic_error("Env::step: episode already finished");
  const StepOutcome out = env::step(spec_, state_, action);
  state_ = out.state;
  obs_ = observe(spec_, state_, obs_);
  done_ = out.done;
  episode_reward_ += out.reward;
  StepResult result;
  result.observation = obs_;
  result.reward = out.reward;
  result.done = out.done;
  result.cause = out.cause;
  return result;
}

bool Env::inventory_complete() const {
  const std::uint32_t all = (1u << spec_.item_bits()) - 1u;
  return spec_.item_bits() == 0 ? false : (state_.inventory & all) == all;
}

}  // namespace exacktr::env
