#pragma once

// Survey-mission simulator: a deterministic environment with random water
// currents, driven by plans from the explorer over a generated model.
//
// The world is a set of 2D integer locations: a start point, one anchor per
// survey area (Level 1: the area centroid; Level 2: individual waypoints),
// and a final rendezvous point. A plan is a sequence of survey events plus a
// terminal rendezvous event. The simulator executes plans leg by leg,
// samples current onsets, learns a consumption scale factor at survey
// boundaries, and re-plans there.
//
// Distances are half-up integer Euclidean lengths. Movement is chopped into
// chunks of at most `chop` meters; a chunk is the unit of current duration
// and of coverage accounting. Current onset is drawn once per transit (at
// its start, only while no current is active): a Bernoulli draw on the next
// u64, then a uniform chunk offset within that transit; the active period
// then runs for a configured number of chunks (fixed, or geometric with the
// configured mean, drawn at scheduling time). In-area mowing never draws.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gmc/explorer.hpp"
#include "gmc/goal.hpp"
#include "gmc/parser.hpp"
#include "gmc/printer.hpp"

namespace gmc {

struct MowSpec {
  Int legs = 1;          // parallel passes
  Int leg_length = 0;    // meters per pass
  Int turn_length = 0;   // meters between consecutive passes
  Int total() const { return legs * leg_length + (legs - 1) * turn_length; }
};

struct AreaSpec {
  std::string name;              // doubles as the survey event label
  std::vector<Int> waypoint_ids;
  std::vector<Int> entry_ids;    // Level 2: entry/exit candidates
  Int reward = 0;
  MowSpec mow;
};

struct CurrentDuration {
  enum class Kind { Fixed, Geometric };
  Kind kind = Kind::Geometric;
  Int legs = 22;  // fixed length, or the geometric mean
};

struct MissionConfig {
  Int level = 1;
  std::uint64_t seed = 0;
  std::vector<std::pair<Int, Int>> waypoints;
  std::vector<AreaSpec> areas;
  std::pair<Int, Int> initial{0, 0};
  std::pair<Int, Int> final_pos{0, 0};
  Int energy = 0;
  Int e_num = 1, e_den = 1;          // energy required per meter
  Int cur_p_num = 1, cur_p_den = 5;  // current onset probability
  Int cur_m_num = 2, cur_m_den = 1;  // current consumption multiplier
  CurrentDuration duration;
  Int chop = 200;
  bool early_coverage = false;
  Int rendezvous_reward = 0;
  std::vector<std::pair<Int, Int>> obstacles;
  Int obstacle_radius = 0;
  std::optional<std::pair<Int, Int>> hostile;
  Int surface_clearance = 3;
  Int scale_percent = 100;  // learned consumption scale, percent

  // Empty string when valid, else the first problem found.
  std::string validate() const {
    if (level != 1 && level != 2) return "level must be 1 or 2";
    if (energy < 0) return "energy must be >= 0";
    if (chop < 1) return "chop must be >= 1";
    if (e_den <= 0 || cur_p_den <= 0 || cur_m_den <= 0)
      return "rational denominators must be > 0";
    if (e_num < 0) return "energyRequiredByMeter must be >= 0";
    if (cur_p_num < 0 || cur_p_num > cur_p_den)
      return "current probability must be in [0,1]";
    if (cur_m_num < 0) return "current multiplier must be >= 0";
    if (duration.legs < 1) return "current duration must be >= 1 leg";
    if (obstacle_radius < 0) return "obstacle radius must be >= 0";
    if (surface_clearance < 0) return "surface clearance must be >= 0";
    if (scale_percent < 1) return "scale percent must be >= 1";
    if (rendezvous_reward < 0) return "rewards must be >= 0";
    if (areas.empty()) return "at least one area is required";
    std::set<std::string> names;
    for (const auto& a : areas) {
      if (a.name.empty() || a.name == "rend" || a.name == "mission")
        return "area name '" + a.name + "' is reserved or empty";
      if (!(std::isalpha((unsigned char)a.name[0]) || a.name[0] == '_'))
        return "area name '" + a.name + "' is not an identifier";
      for (char c : a.name)
        if (!(std::isalnum((unsigned char)c) || c == '_'))
          return "area name '" + a.name + "' is not an identifier";
      if (!names.insert(a.name).second)
        return "duplicate area name '" + a.name + "'";
      if (a.reward < 0) return "rewards must be >= 0";
      if (a.waypoint_ids.empty())
        return "area '" + a.name + "' has no waypoints";
      for (Int id : a.waypoint_ids)
        if (id < 0 || (std::size_t)id >= waypoints.size())
          return "area '" + a.name + "' references an unknown waypoint";
      if (a.mow.legs < 1 || a.mow.leg_length < 1 || a.mow.turn_length < 0)
        return "area '" + a.name + "' has an invalid mow pattern";
      if (level == 2) {
        if (a.entry_ids.empty())
          return "level 2 requires entry/exit candidates for '" + a.name + "'";
        for (Int id : a.entry_ids)
          if (std::find(a.waypoint_ids.begin(), a.waypoint_ids.end(), id) ==
              a.waypoint_ids.end())
            return "entry candidate of '" + a.name +
                   "' is not one of its waypoints";
      }
    }
    return "";
  }
};

// ---------------------------------------------------------------------------
// Geometry

struct Pt {
  Int x = 0, y = 0;
};

inline Int dist_pt(Pt a, Pt b) { return euclid_dist(a.x, a.y, b.x, b.y); }

// True when segment a-b passes within radius r of p (inclusive), computed
// exactly: squared distances cross-multiplied in 128-bit integers.
inline bool segment_near(Pt a, Pt b, Pt p, Int r) {
  __int128 dx = b.x - a.x, dy = b.y - a.y;
  __int128 wx = p.x - a.x, wy = p.y - a.y;
  __int128 len2 = dx * dx + dy * dy;
  __int128 dot = wx * dx + wy * dy;
  __int128 r2 = (__int128)r * r;
  if (len2 == 0 || dot <= 0) return wx * wx + wy * wy <= r2;
  if (dot >= len2) {
    __int128 vx = p.x - b.x, vy = p.y - b.y;
    return vx * vx + vy * vy <= r2;
  }
  // perpendicular distance^2 = (|w|^2*len2 - dot^2) / len2
  __int128 cross = wx * dy - wy * dx;
  return cross * cross <= r2 * len2;
}

namespace detail {

// Movement chunks: (n-1) full `chop` lengths then the remainder.
inline std::vector<Int> chop_chunks(Int dist, Int chop) {
  std::vector<Int> out;
  if (dist <= 0) return out;
  Int n = (dist + chop - 1) / chop;
  for (Int i = 0; i < n - 1; ++i) out.push_back(chop);
  out.push_back(dist - chop * (n - 1));
  return out;
}

// In-area mow path as chunks: legs alternating with turns, each chopped.
inline std::vector<Int> mow_chunks(const MowSpec& m, Int chop) {
  std::vector<Int> out;
  for (Int i = 0; i < m.legs; ++i) {
    auto leg = chop_chunks(m.leg_length, chop);
    out.insert(out.end(), leg.begin(), leg.end());
    if (i + 1 < m.legs && m.turn_length > 0) {
      auto turn = chop_chunks(m.turn_length, chop);
      out.insert(out.end(), turn.begin(), turn.end());
    }
  }
  return out;
}

inline Int floor_div(__int128 n, __int128 d) {
  __int128 q = n / d, r = n % d;
  if (r != 0 && ((n < 0) != (d < 0))) --q;
  return checked_narrow(q, "scaled cost");
}

inline Int scaled(Int raw, Int percent) {
  return floor_div((__int128)raw * percent, 100);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Model generation
//
// Locations are indexed 0 = start, 1..k = survey anchors, k+1 = final.
// Level 1 has one anchor per area (its centroid); Level 2 one per waypoint,
// with per-(entry,exit) survey events. Event costs are pre-scaled by the
// learned percentage (floored per table entry) so guards, currency debits,
// and plan objectives all see the same integers.

struct MissionEventInfo {
  std::size_t area = 0;
  Int entry_loc = 0;  // location index the transit targets
  Int exit_loc = 0;   // location index the survey ends at
  Int mow_raw = 0;    // unscaled in-area distance (incl. L2 orientation)
};

struct MissionModelInfo {
  MissionConfig cfg;
  std::vector<Pt> locs;               // location index -> coordinates
  std::vector<std::string> loc_name;  // location index -> display name
  std::vector<Int> dt_raw;            // flattened location distance table
  std::string text;                   // generated model source
  Model model;                        // parsed + currency-wired
  CurrencyLedger ledger;
  std::string entry = "mission";
  std::string goal_text;
  // key: label for Level 1 areas, label + "." + index for Level 2
  std::vector<std::pair<std::string, MissionEventInfo>> events;

  Int n_locs() const { return (Int)locs.size(); }
  Int dt(Int from, Int to) const { return dt_raw[from * n_locs() + to]; }
  const MissionEventInfo* event(const std::string& key) const {
    for (const auto& e : events)
      if (e.first == key) return &e.second;
    return nullptr;
  }
};

namespace detail {

struct RuntimeState {
  Int loc = 0;
  Int energy = 0;
  std::vector<bool> visited;
};

inline Pt centroid(const MissionConfig& cfg, const AreaSpec& a) {
  __int128 sx = 0, sy = 0;
  for (Int id : a.waypoint_ids) {
    sx += cfg.waypoints[id].first;
    sy += cfg.waypoints[id].second;
  }
  Int n = (Int)a.waypoint_ids.size();
  auto half_up = [n](__int128 s) {
    // round-half-up of s/n for either sign
    __int128 num = 2 * s + n;
    __int128 den = 2 * n;
    __int128 q = num / den, r = num % den;
    if (r != 0 && num < 0) --q;
    return checked_narrow(q, "centroid");
  };
  return Pt{half_up(sx), half_up(sy)};
}

// Level 2 in-area distance: enter at corner e, mow the pattern in whichever
// orientation is cheaper, leave at corner x. The pattern is anchored at the
// area's first and last waypoints.
inline Int l2_mow_raw(const MissionConfig& cfg, const AreaSpec& a, Int e,
                      Int x) {
  Pt pe{cfg.waypoints[e].first, cfg.waypoints[e].second};
  Pt px{cfg.waypoints[x].first, cfg.waypoints[x].second};
  Pt c0{cfg.waypoints[a.waypoint_ids.front()].first,
        cfg.waypoints[a.waypoint_ids.front()].second};
  Pt cl{cfg.waypoints[a.waypoint_ids.back()].first,
        cfg.waypoints[a.waypoint_ids.back()].second};
  Int fwd = dist_pt(pe, c0) + a.mow.total() + dist_pt(cl, px);
  Int rev = dist_pt(pe, cl) + a.mow.total() + dist_pt(c0, px);
  return std::min(fwd, rev);
}

inline std::string ints(const std::vector<Int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(v[i]);
  }
  return s + "]";
}

inline MissionModelInfo build_info(const MissionConfig& cfg,
                                   const RuntimeState* rt) {
  std::string bad = cfg.validate();
  if (!bad.empty()) throw std::invalid_argument("mission config: " + bad);

  MissionModelInfo info;
  info.cfg = cfg;
  const Int n_areas = (Int)cfg.areas.size();

  // locations
  info.locs.push_back(Pt{cfg.initial.first, cfg.initial.second});
  info.loc_name.push_back("start");
  std::vector<Int> area_anchor(n_areas, 0);   // L1: anchor location per area
  std::vector<Int> wp_loc(cfg.waypoints.size(), -1);
  if (cfg.level == 1) {
    for (Int i = 0; i < n_areas; ++i) {
      area_anchor[i] = (Int)info.locs.size();
      info.locs.push_back(centroid(cfg, cfg.areas[i]));
      info.loc_name.push_back(cfg.areas[i].name);
    }
  } else {
    for (std::size_t w = 0; w < cfg.waypoints.size(); ++w) {
      wp_loc[w] = (Int)info.locs.size();
      info.locs.push_back(Pt{cfg.waypoints[w].first, cfg.waypoints[w].second});
      info.loc_name.push_back("w" + std::to_string(w));
    }
  }
  const Int final_loc = (Int)info.locs.size();
  info.locs.push_back(Pt{cfg.final_pos.first, cfg.final_pos.second});
  info.loc_name.push_back("final");
  const Int L = info.n_locs();

  info.dt_raw.assign(L * L, 0);
  for (Int i = 0; i < L; ++i)
    for (Int j = 0; j < L; ++j)
      info.dt_raw[i * L + j] = dist_pt(info.locs[i], info.locs[j]);

  // obstacle corridor table and hostile proximity per location
  std::vector<Int> blocked(L * L, 0);
  for (Int i = 0; i < L; ++i)
    for (Int j = 0; j < L; ++j)
      for (const auto& ob : cfg.obstacles)
        if (segment_near(info.locs[i], info.locs[j],
                         Pt{ob.first, ob.second}, cfg.obstacle_radius)) {
          blocked[i * L + j] = 1;
          break;
        }
  std::vector<Int> hostile_near(L, 0);
  if (cfg.hostile)
    for (Int i = 0; i < L; ++i)
      hostile_near[i] =
          dist_pt(info.locs[i], Pt{cfg.hostile->first, cfg.hostile->second}) <=
                  cfg.surface_clearance
              ? 1
              : 0;

  // scaled cost tables
  std::vector<Int> dt_scaled(L * L, 0);
  for (Int i = 0; i < L * L; ++i)
    dt_scaled[i] = scaled(info.dt_raw[i], cfg.scale_percent);

  // runtime overrides
  Int at0 = rt ? rt->loc : 0;
  Int energy0 = rt ? rt->energy : cfg.energy;
  std::vector<Int> vis0(n_areas, 0);
  if (rt)
    for (Int i = 0; i < n_areas; ++i) vis0[i] = rt->visited[i] ? 1 : 0;

  Int max_dt = 0, max_mw = 0;
  for (Int v : dt_scaled) max_dt = std::max(max_dt, v);

  const std::string Ls = std::to_string(L);
  auto dt_ix = [&](const std::string& to) {
    return "dt[at * " + Ls + " + " + to + "]";
  };
  auto lb_ix = [&](const std::string& to) {
    return "lb[at * " + Ls + " + " + to + "]";
  };

  std::string branches;
  auto add_branch = [&](const std::string& guard, const std::string& label,
                        const std::string& prog, const std::string& cont) {
    if (!branches.empty()) branches += "\n  [] ";
    branches += "[" + guard + "] " + label + "{" + prog + "} -> " + cont;
  };

  std::vector<Int> mw_scaled;
  if (cfg.level == 1) {
    for (Int i = 0; i < n_areas; ++i) {
      Int mraw = cfg.areas[i].mow.total();
      Int msc = scaled(mraw, cfg.scale_percent);
      mw_scaled.push_back(msc);
      max_mw = std::max(max_mw, msc);
      std::string to = std::to_string(area_anchor[i]);
      std::string cost = dt_ix(to) + " + mw[" + std::to_string(i) + "]";
      add_branch(
          "visited[" + std::to_string(i) + "] == 0 && energyLevel >= " + cost,
          cfg.areas[i].name,
          "energyLevel = energyLevel - (" + cost + "); if (" + lb_ix(to) +
              " == 1) { hitObstacle = 1; } at = " + to + "; visited[" +
              std::to_string(i) + "] = 1; hostileNearSurf = hn[" + to + "];",
          "mission()");
      info.events.push_back(
          {cfg.areas[i].name,
           MissionEventInfo{(std::size_t)i, area_anchor[i], area_anchor[i],
                            mraw}});
    }
  } else {
    for (Int i = 0; i < n_areas; ++i) {
      const AreaSpec& a = cfg.areas[i];
      Int nc = (Int)a.entry_ids.size();
      for (Int ei = 0; ei < nc; ++ei) {
        for (Int xi = 0; xi < nc; ++xi) {
          Int e = a.entry_ids[ei], x = a.entry_ids[xi];
          Int mraw = l2_mow_raw(cfg, a, e, x);
          Int msc = scaled(mraw, cfg.scale_percent);
          std::string to = std::to_string(wp_loc[e]);
          std::string end = std::to_string(wp_loc[x]);
          std::string cost = dt_ix(to) + " + " + std::to_string(msc);
          Int ix = ei * nc + xi;
          add_branch("visited[" + std::to_string(i) +
                         "] == 0 && energyLevel >= " + cost,
                     a.name + "." + std::to_string(ix),
                     "energyLevel = energyLevel - (" + cost + "); if (" +
                         lb_ix(to) + " == 1) { hitObstacle = 1; } at = " +
                         end + "; visited[" + std::to_string(i) +
                         "] = 1; hostileNearSurf = hn[" + end + "];",
                     "mission()");
          info.events.push_back(
              {a.name + "." + std::to_string(ix),
               MissionEventInfo{(std::size_t)i, wp_loc[e], wp_loc[x], mraw}});
        }
      }
    }
  }
  {
    std::string to = std::to_string(final_loc);
    std::string cost = dt_ix(to);
    add_branch("energyLevel >= " + cost, "rend",
               "energyLevel = energyLevel - (" + cost + "); if (" + lb_ix(to) +
                   " == 1) { hitObstacle = 1; } at = " + to +
                   "; hostileNearSurf = hn[" + to + "];",
               "Skip");
  }

  std::string t;
  t += "var at:{0.." + std::to_string(L - 1) + "} = " + std::to_string(at0) +
       ";\n";
  t += "var visited[" + std::to_string(n_areas) + "]:{0..1} = " + ints(vis0) +
       ";\n";
  t += "var energyLevel:{0.." + std::to_string(std::max(cfg.energy, energy0)) +
       "} = " + std::to_string(energy0) + ";\n";
  t += "var lambda = 0;\n";
  t += "var hitObstacle:{0..1} = 0;\n";
  t += "var hostileNearSurf:{0..1} = 0;\n";
  t += "var dt[" + std::to_string(L * L) + "]:{0.." + std::to_string(max_dt) +
       "} = " + ints(dt_scaled) + ";\n";
  if (cfg.level == 1)
    t += "var mw[" + std::to_string(n_areas) + "]:{0.." +
         std::to_string(max_mw) + "} = " + ints(mw_scaled) + ";\n";
  t += "var lb[" + std::to_string(L * L) + "]:{0..1} = " + ints(blocked) +
       ";\n";
  t += "var hn[" + std::to_string(L) + "]:{0..1} = " + ints(hostile_near) +
       ";\n\n";
  t += "mission() = " + branches + ";\n\n";
  info.goal_text =
      "at == " + std::to_string(final_loc) + " && hitObstacle == 0";
  t += "#assert mission() reaches " + info.goal_text + " with max(lambda);\n";
  t += "#assert mission() |= [] energyLevel >= 0;\n";
  t += "#assert mission() |= [] hitObstacle == 0;\n";
  t += "#assert mission() |= [] hostileNearSurf == 0;\n";

  info.text = t;

  info.ledger.lambda_var = "lambda";
  ResourceSpec rs;
  rs.name = "energy";
  rs.variable = "energyLevel";
  rs.conversion.kind = ConversionFn::Kind::Linear;
  rs.conversion.rate_num = 1;
  rs.conversion.rate_den = 1;
  info.ledger.resources.push_back(rs);
  for (Int i = 0; i < n_areas; ++i) {
    GoalSpec g;
    g.name = cfg.areas[i].name;
    g.cond = parse_cond_text("visited[" + std::to_string(i) + "] == 1");
    g.reward = cfg.areas[i].reward;
    info.ledger.goals.push_back(std::move(g));
  }
  {
    GoalSpec g;
    g.name = "rend";
    g.cond = parse_cond_text("at == " + std::to_string(final_loc));
    g.reward = cfg.rendezvous_reward;
    g.critical = true;
    info.ledger.goals.push_back(std::move(g));
  }

  std::vector<std::string> findings;
  info.model = wire_currency(parse_model(info.text), info.ledger, &findings);
  if (!findings.empty())
    throw std::invalid_argument("mission wiring: " + findings[0]);
  // text must describe the model the mission actually runs, so re-print it
  // after the currency wiring
  info.text = print_model(info.model);
  return info;
}

}  // namespace detail

inline MissionModelInfo build_mission_model_info(const MissionConfig& cfg) {
  return detail::build_info(cfg, nullptr);
}

inline Model build_mission_model(const MissionConfig& cfg) {
  return detail::build_info(cfg, nullptr).model;
}

// ---------------------------------------------------------------------------
// Environment

struct WorldState {
  Int loc = 0;  // location index in the built model's terms
  Pt pos{0, 0};
  Int energy = 0;
  std::vector<std::pair<Int, Int>> coverage;  // per area: chunks done / total
  bool current_active = false;
  Int current_legs_left = 0;
  bool onset_pending = false;
  Int onset_in = 0;  // chunks until the scheduled onset activates
  Int elapsed_legs = 0;
  Int scale_percent = 100;
};

struct EnergyExhausted : std::runtime_error {
  Int deficit;
  explicit EnergyExhausted(Int d)
      : std::runtime_error("energy exhausted (deficit " + std::to_string(d) +
                           ")"),
        deficit(d) {}
};

// Bernoulli draw with an exact rational threshold on the next u64 (the
// cutoff is floor(p * 2^64), so the bias is below 2^-64).
inline bool bernoulli_draw(std::mt19937_64& rng, Int p_num, Int p_den) {
  if (p_num <= 0) { rng(); return false; }
  if (p_num >= p_den) { rng(); return true; }
  unsigned __int128 cut =
      ((unsigned __int128)p_num << 64) / (unsigned __int128)p_den;
  return (unsigned __int128)rng() < cut;
}

// Called once at the start of each transit while no current is active:
// draws the onset and, if it fires, the chunk offset and (for geometric
// durations) the length. Mow paths never call this.
inline void draw_current_onset(WorldState& w, const MissionConfig& cfg,
                               std::mt19937_64& rng, Int n_chunks) {
  if (w.current_active || w.onset_pending || n_chunks <= 0) return;
  if (!bernoulli_draw(rng, cfg.cur_p_num, cfg.cur_p_den)) return;
  w.onset_pending = true;
  w.onset_in = (Int)(rng() % (std::uint64_t)n_chunks);
  if (cfg.duration.kind == CurrentDuration::Kind::Fixed) {
    w.current_legs_left = cfg.duration.legs;
  } else {
    // geometric with mean m: continue with probability (m-1)/m
    Int legs = 1;
    while (legs < 1000000 &&
           bernoulli_draw(rng, cfg.duration.legs - 1, cfg.duration.legs))
      ++legs;
    w.current_legs_left = legs;
  }
}

// Advances the world by one movement chunk. At a transit start (and only
// there) it first runs the onset draw over the whole transit; it then
// activates a scheduled onset, charges dist * energyRequiredByMeter (times
// the multiplier while a current is active, floored), and counts the
// current down.
inline Int step_environment(WorldState& w, Int dist, const MissionConfig& cfg,
                            std::mt19937_64& rng, bool transit_start = false,
                            Int transit_chunks = 0) {
  if (dist < 0) throw std::invalid_argument("negative leg distance");
  if (transit_start) draw_current_onset(w, cfg, rng, transit_chunks);
  if (w.onset_pending) {
    if (w.onset_in == 0) {
      w.onset_pending = false;
      w.current_active = true;
    } else {
      --w.onset_in;
    }
  }
  __int128 num = (__int128)dist * cfg.e_num;
  __int128 den = cfg.e_den;
  if (w.current_active) {
    num *= cfg.cur_m_num;
    den *= cfg.cur_m_den;
  }
  Int actual = dist == 0 ? 0 : detail::floor_div(num, den);
  if (w.current_active && --w.current_legs_left <= 0)
    w.current_active = false;
  ++w.elapsed_legs;
  if (actual > w.energy) throw EnergyExhausted(actual - w.energy);
  w.energy -= actual;
  return actual;
}

// round-half-up(scale * actual / expected) in integer math
inline Int update_energy_scale(Int scale, Int expected, Int actual) {
  if (expected <= 0) throw std::invalid_argument("expected must be > 0");
  if (scale < 0 || actual < 0)
    throw std::invalid_argument("scale and actual must be >= 0");
  return detail::floor_div((__int128)2 * scale * actual + expected,
                           (__int128)2 * expected);
}

// ---------------------------------------------------------------------------
// Mission log

struct MissionLog {
  bool success = false;
  std::string fail_reason;            // empty on success
  Int final_energy = 0;
  std::vector<Int> scales;            // initial value plus each update
  std::vector<std::string> surveyed;  // area names in completion order
  std::vector<std::vector<std::string>> plans;  // labels of each plan
  std::vector<std::string> lines;

  std::string to_string() const {
    std::string out;
    for (const auto& l : lines) {
      out += l;
      out += '\n';
    }
    return out;
  }
};

struct MissionFailed : std::runtime_error {
  MissionLog log;
  explicit MissionFailed(MissionLog l)
      : std::runtime_error("mission failed: " + l.fail_reason),
        log(std::move(l)) {}
};

namespace detail {

inline std::string join_labels(const std::vector<std::string>& v) {
  if (v.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += v[i];
  }
  return s;
}

inline std::vector<std::string> witness_labels(const WitnessTrace& w) {
  std::vector<std::string> out;
  for (const auto& s : w.steps) out.push_back(s.label);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Plan vetting (for plans from untrusted external planners)

struct VetOutcome {
  bool vetted = false;
  ReplayVerdict verdict;
};

// Replays an external plan against the verified model; Vetted requires an
// accepted replay whose final state satisfies the goal. Rejected plans are
// added to `disabled` and must never be resubmitted (doing so throws).
inline VetOutcome vet_external_plan(Explorer& ex, const std::string& entry,
                                    const std::vector<Int>& args,
                                    const std::vector<std::string>& plan,
                                    const CondP& goal,
                                    std::set<std::vector<std::string>>& disabled) {
  if (disabled.count(plan))
    throw std::invalid_argument("plan is already disabled");
  VetOutcome out;
  out.verdict = ex.replay(entry, args, plan);
  bool goal_ok = out.verdict.accepted &&
                 ex.engine().eval_cond(out.verdict.final_vals, goal);
  if (out.verdict.accepted && !goal_ok) {
    out.verdict.accepted = false;
    out.verdict.reject_index = plan.size();
    out.verdict.reason = ReplayReason::NoSuchLabel;
    out.verdict.message = "plan ends without satisfying the goal";
  }
  out.vetted = out.verdict.accepted;
  if (!out.vetted) disabled.insert(plan);
  return out;
}

// Heuristic external-planner stub: coverage-greedy. Proposes every survey
// subset in every order, highest total reward first with the cheaper raw
// distance estimate as tie-break; the stub knows the geometry but not the
// energy budget, so its favourites are exactly the plans vetting must catch.
inline std::vector<std::vector<std::string>> greedy_candidates(
    const MissionModelInfo& info) {
  const std::size_t n = info.cfg.areas.size();
  // scored as (negated reward, estimated cost, labels); stable sort keeps
  // enumeration order for full ties
  std::vector<std::tuple<Int, Int, std::vector<std::string>>> scored;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<std::size_t> ix;
    Int reward = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) {
        ix.push_back(i);
        reward += info.cfg.areas[i].reward;
      }
    do {
      Int cost = 0;
      Int at = 0;
      std::vector<std::string> labels;
      for (std::size_t a : ix) {
        // Level 2: use the first entry/exit candidate pair (index 0)
        const std::string key = info.cfg.level == 1
                                    ? info.cfg.areas[a].name
                                    : info.cfg.areas[a].name + ".0";
        const MissionEventInfo* ev = info.event(key);
        cost += info.dt(at, ev->entry_loc) + ev->mow_raw;
        at = ev->exit_loc;
        labels.push_back(key);
      }
      cost += info.dt(at, info.n_locs() - 1);
      labels.push_back("rend");
      scored.push_back({-reward, cost, std::move(labels)});
    } while (std::next_permutation(ix.begin(), ix.end()));
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) {
                     if (std::get<0>(a) != std::get<0>(b))
                       return std::get<0>(a) < std::get<0>(b);
                     return std::get<1>(a) < std::get<1>(b);
                   });
  std::vector<std::vector<std::string>> out;
  for (auto& s : scored) out.push_back(std::move(std::get<2>(s)));
  return out;
}

// Runs the stub against the vetting harness: submits candidates in
// preference order, skipping disabled ones, until a plan is vetted.
inline std::optional<std::vector<std::string>> vet_until_accepted(
    Explorer& ex, const std::string& entry, const MissionModelInfo& info,
    std::set<std::vector<std::string>>& disabled) {
  CondP goal = parse_cond_text(info.goal_text);
  for (const auto& plan : greedy_candidates(info)) {
    if (disabled.count(plan)) continue;
    VetOutcome v = vet_external_plan(ex, entry, {}, plan, goal, disabled);
    if (v.vetted) return plan;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// The monitor-interpret-evaluate-control loop

inline MissionLog run_mission(const MissionConfig& cfg0,
                              const ExplorerOptions& xopt = {}) {
  MissionConfig cfg = cfg0;
  std::string bad = cfg.validate();
  if (!bad.empty()) throw std::invalid_argument("mission config: " + bad);

  MissionLog log;
  std::mt19937_64 rng(cfg.seed);

  detail::RuntimeState rt;
  rt.loc = 0;
  rt.energy = cfg.energy;
  rt.visited.assign(cfg.areas.size(), false);

  WorldState w;
  w.loc = 0;
  w.energy = cfg.energy;
  w.scale_percent = cfg.scale_percent;
  w.coverage.assign(cfg.areas.size(), {0, 1});

  log.scales.push_back(w.scale_percent);
  log.lines.push_back("mission level=" + std::to_string(cfg.level) +
                      " areas=" + std::to_string(cfg.areas.size()) +
                      " energy=" + std::to_string(cfg.energy) +
                      " seed=" + std::to_string(cfg.seed) +
                      " scale=" + std::to_string(w.scale_percent));

  auto fail = [&](const std::string& reason) {
    log.success = false;
    log.fail_reason = reason;
    log.final_energy = w.energy;
    log.lines.push_back("end status=failed reason=" + reason +
                        " energy=" + std::to_string(w.energy));
    return log;
  };

  // (re)build the model for the current world and plan optimally
  Int plan_no = 0;
  MissionModelInfo info;
  std::vector<std::string> plan;
  auto replan = [&]() -> bool {
    cfg.scale_percent = w.scale_percent;
    info = detail::build_info(cfg, &rt);
    Engine eng(info.model);
    Explorer ex(eng, xopt);
    CheckResult r = ex.check_reaches_optimal(
        info.entry, {}, parse_cond_text(info.goal_text), "lambda",
        OptDir::Max);
    if (r.kind != CheckKind::Optimal) return false;
    plan = detail::witness_labels(r.witness);
    ++plan_no;
    log.plans.push_back(plan);
    log.lines.push_back(
        "plan n=" + std::to_string(plan_no) +
        " from=" + info.loc_name[rt.loc] +
        " energy=" + std::to_string(rt.energy) +
        " scale=" + std::to_string(w.scale_percent) +
        " labels=" + detail::join_labels(plan) +
        " objective=" + std::to_string(r.objective));
    return true;
  };

  // evaluate the remaining plan against a freshly built model
  auto evaluate = [&](const std::vector<std::string>& rest) -> bool {
    cfg.scale_percent = w.scale_percent;
    MissionModelInfo fresh = detail::build_info(cfg, &rt);
    Engine eng(fresh.model);
    Explorer ex(eng, xopt);
    ReplayVerdict v = ex.replay(fresh.entry, {}, rest);
    bool ok = v.accepted &&
              eng.eval_cond(v.final_vals, parse_cond_text(fresh.goal_text));
    std::string line = "evaluate labels=" + detail::join_labels(rest) +
                       " verdict=" + (ok ? "valid" : "invalid");
    if (!v.accepted)
      line += " index=" + std::to_string(v.reject_index) + " reason=" +
              (v.reason == ReplayReason::Ambiguous ? "ambiguous" : "blocked");
    log.lines.push_back(line);
    return ok;
  };

  if (!replan()) return fail("no-plan");

  // execute a chopped path; returns actual energy spent
  auto run_chunks = [&](const std::vector<Int>& chunks, bool is_transit) {
    Int actual = 0;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      bool was_on = w.current_active;
      actual += step_environment(w, chunks[i], cfg, rng,
                                 is_transit && i == 0, (Int)chunks.size());
      if (!was_on && w.current_active)
        log.lines.push_back(
            "current onset leg=" + std::to_string(w.elapsed_legs - 1) +
            " duration=" + std::to_string(w.current_legs_left + 1));
      if (was_on && !w.current_active)
        log.lines.push_back("current offset leg=" +
                            std::to_string(w.elapsed_legs));
    }
    return actual;
  };

  while (true) {
    if (plan.empty()) return fail("empty-plan");
    std::string label = plan.front();
    plan.erase(plan.begin());

    try {
      if (label == "rend") {
        Int raw = info.dt(rt.loc, info.n_locs() - 1);
        auto chunks = detail::chop_chunks(raw, cfg.chop);
        Int actual = run_chunks(chunks, true);
        rt.loc = info.n_locs() - 1;
        w.loc = rt.loc;
        w.pos = info.locs[rt.loc];
        rt.energy = w.energy;
        log.lines.push_back("transit to=final distance=" +
                            std::to_string(raw) +
                            " actual=" + std::to_string(actual));
        log.final_energy = w.energy;
        log.success = true;
        log.lines.push_back(
            "rendezvous energy=" + std::to_string(w.energy));
        std::string sc;
        for (std::size_t i = 0; i < log.scales.size(); ++i) {
          if (i) sc += ",";
          sc += std::to_string(log.scales[i]);
        }
        log.lines.push_back("end status=complete surveyed=" +
                            detail::join_labels(log.surveyed) +
                            " rendezvous=1 energy=" +
                            std::to_string(w.energy) + " scales=" + sc);
        return log;
      }

      const MissionEventInfo* ev = info.event(label);
      if (!ev) return fail("unknown-label");
      const AreaSpec& area = cfg.areas[ev->area];

      // expected cost under the scale the plan was made with
      Int expected = detail::scaled(info.dt(rt.loc, ev->entry_loc),
                                    w.scale_percent) +
                     detail::scaled(ev->mow_raw, w.scale_percent);

      // transit (one onset draw at its start)
      Int traw = info.dt(rt.loc, ev->entry_loc);
      auto tchunks = detail::chop_chunks(traw, cfg.chop);
      Int actual = run_chunks(tchunks, true);
      log.lines.push_back("transit to=" + info.loc_name[ev->entry_loc] +
                          " distance=" + std::to_string(traw) +
                          " actual=" + std::to_string(actual));

      // in-area path: Level 1 mows the pattern; Level 2 additionally
      // carries the orientation-dependent approach/exit inside mow_raw
      std::vector<Int> mchunks;
      if (cfg.level == 1) {
        mchunks = detail::mow_chunks(area.mow, cfg.chop);
      } else {
        mchunks = detail::chop_chunks(ev->mow_raw, cfg.chop);
      }
      Int planned_chunks = (Int)mchunks.size();
      if (cfg.early_coverage && planned_chunks > 1) mchunks.pop_back();
      Int mactual = run_chunks(mchunks, false);
      actual += mactual;
      w.coverage[ev->area] = {planned_chunks, planned_chunks};
      rt.loc = ev->exit_loc;
      w.loc = rt.loc;
      w.pos = info.locs[rt.loc];
      rt.visited[ev->area] = true;
      rt.energy = w.energy;
      log.lines.push_back("mow area=" + area.name +
                          " distance=" + std::to_string(ev->mow_raw) +
                          " actual=" + std::to_string(mactual) +
                          " coverage=100");
      log.surveyed.push_back(area.name);
      log.lines.push_back("survey area=" + area.name +
                          " expected=" + std::to_string(expected) +
                          " actual=" + std::to_string(actual));

      // interpret: learn the consumption scale from this window
      Int ns = update_energy_scale(w.scale_percent, expected, actual);
      log.lines.push_back("scale old=" + std::to_string(w.scale_percent) +
                          " new=" + std::to_string(ns));
      w.scale_percent = ns;
      log.scales.push_back(ns);

      // evaluate the rest of the old plan, then re-plan at the boundary
      evaluate(plan);
      if (!replan()) return fail("no-plan");
    } catch (const EnergyExhausted&) {
      return fail("energy-exhausted");
    }
  }
}

// ---------------------------------------------------------------------------
// JSON configuration files

inline MissionConfig mission_from_json(const nlohmann::json& j) {
  MissionConfig c;
  c.level = j.value("level", 1);
  c.seed = j.value("seed", (std::uint64_t)0);
  for (const auto& w : j.at("waypoints"))
    c.waypoints.push_back({w.at(0).get<Int>(), w.at(1).get<Int>()});
  for (const auto& ja : j.at("areas")) {
    AreaSpec a;
    a.name = ja.at("name").get<std::string>();
    for (const auto& id : ja.at("waypoints")) a.waypoint_ids.push_back(id.get<Int>());
    if (ja.contains("entries"))
      for (const auto& id : ja.at("entries")) a.entry_ids.push_back(id.get<Int>());
    a.reward = ja.value("reward", 0);
    const auto& jm = ja.at("mow");
    a.mow.legs = jm.at("legs").get<Int>();
    a.mow.leg_length = jm.at("legLength").get<Int>();
    a.mow.turn_length = jm.value("turnLength", 0);
    c.areas.push_back(std::move(a));
  }
  c.initial = {j.at("initial").at(0).get<Int>(), j.at("initial").at(1).get<Int>()};
  c.final_pos = {j.at("final").at(0).get<Int>(), j.at("final").at(1).get<Int>()};
  c.energy = j.at("energy").get<Int>();
  if (j.contains("energyRequiredByMeter")) {
    c.e_num = j.at("energyRequiredByMeter").at(0).get<Int>();
    c.e_den = j.at("energyRequiredByMeter").at(1).get<Int>();
  }
  if (j.contains("currentProbability")) {
    c.cur_p_num = j.at("currentProbability").at(0).get<Int>();
    c.cur_p_den = j.at("currentProbability").at(1).get<Int>();
  }
  if (j.contains("currentMultiplier")) {
    c.cur_m_num = j.at("currentMultiplier").at(0).get<Int>();
    c.cur_m_den = j.at("currentMultiplier").at(1).get<Int>();
  }
  if (j.contains("currentDuration")) {
    const auto& jd = j.at("currentDuration");
    std::string k = jd.value("kind", "geometric");
    if (k == "fixed")
      c.duration.kind = CurrentDuration::Kind::Fixed;
    else if (k == "geometric")
      c.duration.kind = CurrentDuration::Kind::Geometric;
    else
      throw std::invalid_argument("unknown current duration kind '" + k + "'");
    c.duration.legs = jd.value("legs", 22);
  }
  c.chop = j.value("chop", 200);
  c.early_coverage = j.value("earlyCoverage", false);
  c.rendezvous_reward = j.value("rendezvousReward", 0);
  if (j.contains("obstacles"))
    for (const auto& o : j.at("obstacles"))
      c.obstacles.push_back({o.at(0).get<Int>(), o.at(1).get<Int>()});
  c.obstacle_radius = j.value("obstacleRadius", 0);
  if (j.contains("hostile") && !j.at("hostile").is_null())
    c.hostile = {j.at("hostile").at(0).get<Int>(),
                 j.at("hostile").at(1).get<Int>()};
  c.surface_clearance = j.value("surfaceClearance", 3);
  c.scale_percent = j.value("scalePercent", 100);
  std::string bad = c.validate();
  if (!bad.empty()) throw std::invalid_argument("mission config: " + bad);
  return c;
}

inline nlohmann::json mission_to_json(const MissionConfig& c) {
  nlohmann::json j;
  j["level"] = c.level;
  j["seed"] = c.seed;
  j["waypoints"] = nlohmann::json::array();
  for (const auto& w : c.waypoints) j["waypoints"].push_back({w.first, w.second});
  j["areas"] = nlohmann::json::array();
  for (const auto& a : c.areas) {
    nlohmann::json ja;
    ja["name"] = a.name;
    ja["waypoints"] = a.waypoint_ids;
    if (!a.entry_ids.empty()) ja["entries"] = a.entry_ids;
    ja["reward"] = a.reward;
    ja["mow"] = {{"legs", a.mow.legs},
                 {"legLength", a.mow.leg_length},
                 {"turnLength", a.mow.turn_length}};
    j["areas"].push_back(ja);
  }
  j["initial"] = {c.initial.first, c.initial.second};
  j["final"] = {c.final_pos.first, c.final_pos.second};
  j["energy"] = c.energy;
  j["energyRequiredByMeter"] = {c.e_num, c.e_den};
  j["currentProbability"] = {c.cur_p_num, c.cur_p_den};
  j["currentMultiplier"] = {c.cur_m_num, c.cur_m_den};
  j["currentDuration"] = {
      {"kind",
       c.duration.kind == CurrentDuration::Kind::Fixed ? "fixed" : "geometric"},
      {"legs", c.duration.legs}};
  j["chop"] = c.chop;
  j["earlyCoverage"] = c.early_coverage;
  j["rendezvousReward"] = c.rendezvous_reward;
  j["obstacles"] = nlohmann::json::array();
  for (const auto& o : c.obstacles) j["obstacles"].push_back({o.first, o.second});
  j["obstacleRadius"] = c.obstacle_radius;
  if (c.hostile)
    j["hostile"] = {c.hostile->first, c.hostile->second};
  else
    j["hostile"] = nullptr;
  j["surfaceClearance"] = c.surface_clearance;
  j["scalePercent"] = c.scale_percent;
  return j;
}

}  // namespace gmc
