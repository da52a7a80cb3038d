//! Trail-laying sensor agents standing in for the plasmodium.
//!
//! Each agent senses the combined stimulus (chemistry plus its own trail)
//! at three points ahead, turns toward the strongest, moves with a
//! probability gated by the stimulus, and deposits trail where it lands.
//! Thresholding the trail gives the occupancy the classifiers read.

use std::f64::consts::{PI, TAU};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chemistry::StimulusMap;
use crate::error::SwarmError;
use crate::geometry::{Arena, ZoneId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agent {
    /// Position in millimetres.
    pub x: f64,
    pub y: f64,
    /// Radians, in `[0, 2pi)`.
    pub heading: f64,
}

impl Agent {
    #[inline]
    pub fn cell(&self, arena: &Arena) -> usize {
        self.cell_with(1.0 / arena.cell_size(), arena)
    }

    #[inline]
    fn cell_with(&self, inv_cell: f64, arena: &Arena) -> usize {
        arena.index((self.x * inv_cell) as usize, (self.y * inv_cell) as usize)
    }

    /// Left-right reflection inside an arena `width_mm` wide.
    pub fn mirrored(&self, width_mm: f64) -> Agent {
        Agent {
            x: width_mm - self.x,
            y: self.y,
            heading: (PI - self.heading).rem_euclid(TAU),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MotionParams {
    /// mm ahead of the agent.
    pub sensor_offset: f64,
    /// Radians between the forward sensor and each flank sensor.
    pub sensor_angle: f64,
    /// Radians turned per step.
    pub rotate_angle: f64,
    /// mm per move.
    pub step_len: f64,
    /// Trail added to the landing cell per move.
    pub deposit: f64,
    /// Fraction of trail lost per step.
    pub trail_evap: f64,
    /// Upper bound on a cell's trail; deposits saturate here.
    pub trail_cap: f64,
    /// Rate of the 5-point trail diffusion over traversable cells, at most
    /// 0.25.
    pub trail_diffusion: f64,
    /// Weight of trail in the sensed value.
    pub trail_gain: f64,
    pub stimulus_gain: f64,
    pub stall_threshold: f64,
    pub retreat_prob_slope: f64,
    /// Probability of an extra random turn of `rotate_angle` per step.
    pub turn_noise: f64,
    /// Most agents a cell accepts from its neighbours; 0 means unlimited.
    pub cell_capacity: u16,
}

impl Default for MotionParams {
    fn default() -> Self {
        MotionParams {
            sensor_offset: 6.0,
            sensor_angle: 45f64.to_radians(),
            rotate_angle: 45f64.to_radians(),
            step_len: 0.5,
            deposit: 1.0,
            trail_evap: 0.05,
            trail_diffusion: 0.02,
            trail_cap: 11.0,
            trail_gain: 1.0,
            stimulus_gain: 4.0,
            stall_threshold: -2.0,
            retreat_prob_slope: 0.02,
            turn_noise: 0.0,
            cell_capacity: 2,
        }
    }
}

impl MotionParams {
    pub fn validate(&self) -> Result<(), SwarmError> {
        let bad = |m: &str| Err(SwarmError::InvalidParams(m.to_string()));
        let finite = [
            self.sensor_offset,
            self.sensor_angle,
            self.rotate_angle,
            self.step_len,
            self.deposit,
            self.trail_evap,
            self.trail_diffusion,
            self.trail_gain,
            self.stimulus_gain,
            self.stall_threshold,
            self.retreat_prob_slope,
            self.turn_noise,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("all motion parameters must be finite");
        }
        if self.sensor_offset <= 0.0 || self.step_len <= 0.0 {
            return bad("sensor_offset and step_len must be positive");
        }
        if !(0.0..1.0).contains(&self.trail_evap) {
            return bad("trail_evap must lie in [0, 1)");
        }
        if !(0.0..=0.25).contains(&self.trail_diffusion) {
            return bad("trail_diffusion must lie in [0, 0.25]");
        }
        if !(self.trail_cap > 0.0) {
            return bad("trail_cap must be positive");
        }
        if !(0.0..=1.0).contains(&self.turn_noise) {
            return bad("turn_noise must lie in [0, 1]");
        }
        if self.deposit < 0.0 || self.retreat_prob_slope < 0.0 {
            return bad("deposit and retreat_prob_slope must be non-negative");
        }
        Ok(())
    }

    /// Trail level of a cell that receives one deposit every step.
    pub fn steady_trail(&self) -> f64 {
        if self.trail_evap > 0.0 {
            self.deposit / self.trail_evap
        } else {
            f64::INFINITY
        }
    }

    /// Default occupancy threshold: a quarter of the steady single-deposit
    /// level.
    pub fn default_theta_occ(&self) -> f64 {
        0.25 * self.steady_trail()
    }
}

/// Source of the random draws an agent step consumes. Implemented for every
/// `rand` generator; [`Mirrored`] reflects the angular draws so mirrored runs
/// can be replayed.
pub trait MotionRng {
    /// Uniform in `[0, 1)`.
    fn unit(&mut self) -> f64;
    /// Uniform heading in `[0, 2pi)`.
    fn angle(&mut self) -> f64;
    /// Flank tie-break; `true` picks the left flank.
    fn coin(&mut self) -> bool;
}

impl<R: RngCore> MotionRng for R {
    #[inline]
    fn unit(&mut self) -> f64 {
        self.gen::<f64>()
    }

    #[inline]
    fn angle(&mut self) -> f64 {
        self.gen::<f64>() * TAU
    }

    #[inline]
    fn coin(&mut self) -> bool {
        self.gen::<bool>()
    }
}

/// Wraps a generator so every heading draw `a` becomes `pi - a` and every
/// flank choice is swapped.
#[derive(Debug, Clone)]
pub struct Mirrored<R>(pub R);

impl<R: RngCore> MotionRng for Mirrored<R> {
    fn unit(&mut self) -> f64 {
        self.0.unit()
    }

    fn angle(&mut self) -> f64 {
        (PI - self.0.angle()).rem_euclid(TAU)
    }

    fn coin(&mut self) -> bool {
        !self.0.coin()
    }
}

#[derive(Debug, Clone)]
pub struct PlasmodiumState {
    pub agents: Vec<Agent>,
    pub trail: Vec<f64>,
    rng: ChaCha8Rng,
    links: Vec<[u32; 4]>,
    scratch: Vec<f64>,
}

/// Places `n_agents` uniformly over the inoculation zone with uniform
/// headings and an empty trail.
pub fn init_inoculum(arena: &Arena, n_agents: usize, seed: u64) -> Result<PlasmodiumState, SwarmError> {
    if n_agents == 0 {
        return Err(SwarmError::NoAgents);
    }
    let cells = arena
        .zone(ZoneId::Inoculation)
        .ok_or(SwarmError::MissingInoculation)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = arena.cell_size();
    let agents = (0..n_agents)
        .map(|_| {
            let (cx, cy) = arena.coords(cells[rng.gen_range(0..cells.len())]);
            let fx: f64 = rng.gen();
            let fy: f64 = rng.gen();
            Agent {
                x: (cx as f64 + fx) * h,
                y: (cy as f64 + fy) * h,
                heading: rng.gen::<f64>() * TAU,
            }
        })
        .collect();
    Ok(PlasmodiumState {
        agents,
        trail: vec![0.0; arena.len()],
        rng,
        links: Vec::new(),
        scratch: Vec::new(),
    })
}

impl PlasmodiumState {
    /// Assembles a state from explicit parts, e.g. a mirrored copy.
    pub fn from_parts(agents: Vec<Agent>, trail: Vec<f64>, seed: u64) -> Self {
        PlasmodiumState {
            agents,
            trail,
            rng: ChaCha8Rng::seed_from_u64(seed),
            links: Vec::new(),
            scratch: Vec::new(),
        }
    }

    /// One swarm update driven by the state's own random stream.
    pub fn step(&mut self, stim: &StimulusMap, arena: &Arena, params: &MotionParams) {
        if self.links.len() != arena.len() {
            self.links = trail_links(arena);
        }
        move_agents(&mut self.agents, &mut self.trail, stim, arena, params, &mut self.rng);
        update_trail(&mut self.trail, &mut self.scratch, &self.links, params);
    }

    pub fn occupancy(&self, theta_occ: f64) -> Vec<bool> {
        occupancy(&self.trail, theta_occ)
    }
}

/// Per-run trig constants so each agent step costs one `sin_cos`.
#[derive(Debug, Clone, Copy)]
struct Kinematics {
    sensor: (f64, f64),
    rotate: (f64, f64),
    inv_cell: f64,
    width_mm: f64,
    height_mm: f64,
}

impl Kinematics {
    fn new(arena: &Arena, p: &MotionParams) -> Self {
        let h = arena.cell_size();
        Kinematics {
            sensor: p.sensor_angle.sin_cos(),
            rotate: p.rotate_angle.sin_cos(),
            inv_cell: 1.0 / h,
            width_mm: arena.width() as f64 * h,
            height_mm: arena.height() as f64 * h,
        }
    }
}

#[inline]
fn sample(
    px: f64,
    py: f64,
    k: &Kinematics,
    arena: &Arena,
    trail: &[f64],
    stim: &StimulusMap,
    trail_gain: f64,
) -> Sensed {
    let w = arena.width() as isize;
    let h = arena.height() as isize;
    let cx = ((px * k.inv_cell) as isize).clamp(0, w - 1) as usize;
    let cy = ((py * k.inv_cell) as isize).clamp(0, h - 1) as usize;
    let i = arena.index(cx, cy);
    let s = stim.at(i);
    Sensed {
        stimulus: s,
        value: s + trail_gain * trail[i],
    }
}

/// One sensor reading: the chemical stimulus alone and the steering value
/// that adds the weighted trail.
#[derive(Debug, Clone, Copy)]
struct Sensed {
    stimulus: f64,
    value: f64,
}

#[inline]
fn sense_dir(
    agent: &Agent,
    dir: (f64, f64),
    k: &Kinematics,
    arena: &Arena,
    trail: &[f64],
    stim: &StimulusMap,
    p: &MotionParams,
) -> [Sensed; 3] {
    let (s, c) = dir;
    let (ss, sc) = k.sensor;
    let d = p.sensor_offset;
    // heading - sensor_angle and heading + sensor_angle.
    let (lc, ls) = (c * sc + s * ss, s * sc - c * ss);
    let (rc, rs) = (c * sc - s * ss, s * sc + c * ss);
    let left = sample(agent.x + d * lc, agent.y + d * ls, k, arena, trail, stim, p.trail_gain);
    let fwd = sample(agent.x + d * c, agent.y + d * s, k, arena, trail, stim, p.trail_gain);
    let right = sample(agent.x + d * rc, agent.y + d * rs, k, arena, trail, stim, p.trail_gain);
    [left, fwd, right]
}

/// Sensed values `(left, forward, right)` at `sensor_offset` ahead and
/// `-sensor_angle`, `0`, `+sensor_angle` off the heading. Sample points are
/// clamped to the grid.
pub fn sense(
    agent: &Agent,
    trail: &[f64],
    stim: &StimulusMap,
    arena: &Arena,
    params: &MotionParams,
) -> (f64, f64, f64) {
    let k = Kinematics::new(arena, params);
    let [l, f, r] = sense_dir(agent, agent.heading.sin_cos(), &k, arena, trail, stim, params);
    (l.value, f.value, r.value)
}

#[inline]
fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Probability that an agent whose forward value is `s` moves this step.
pub fn move_probability(s: f64, params: &MotionParams) -> f64 {
    logistic(params.stimulus_gain * s - params.stall_threshold)
}

/// Probability that an agent whose forward value is `s` reverses.
pub fn retreat_probability(s: f64, params: &MotionParams) -> f64 {
    (params.retreat_prob_slope * (-s).max(0.0)).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Turn {
    Left,
    Keep,
    Right,
}

#[inline]
fn choose_turn<R: MotionRng + ?Sized>(l: f64, f: f64, r: f64, rng: &mut R) -> Turn {
    if l > f && r > f {
        if l > r {
            Turn::Left
        } else if r > l {
            Turn::Right
        } else if rng.coin() {
            Turn::Left
        } else {
            Turn::Right
        }
    } else if l > f {
        Turn::Left
    } else if r > f {
        Turn::Right
    } else {
        Turn::Keep
    }
}

/// What happened to an agent in one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Moved,
    Stalled,
    Blocked,
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn step_agent<R: MotionRng + ?Sized>(
    agent: &mut Agent,
    crowd: &mut [u16],
    trail: &mut [f64],
    stim: &StimulusMap,
    arena: &Arena,
    p: &MotionParams,
    k: &Kinematics,
    rng: &mut R,
) -> StepOutcome {
    let (s, c) = agent.heading.sin_cos();
    let [l, f, r] = sense_dir(agent, (s, c), k, arena, trail, stim, p);
    let (hs, hc);
    let here = agent.cell_with(k.inv_cell, arena);
    let gate = move_probability(f.stimulus, p);
    if rng.unit() < retreat_probability(f.stimulus, p) {
        agent.heading = (agent.heading + PI).rem_euclid(TAU);
        if rng.unit() >= gate {
            return StepOutcome::Stalled;
        }
        (hs, hc) = (-s, -c);
    } else {
        if rng.unit() >= gate {
            return StepOutcome::Stalled;
        }
        let mut turn = match choose_turn(l.value, f.value, r.value, rng) {
            Turn::Left => -1.0,
            Turn::Keep => 0.0,
            Turn::Right => 1.0,
        };
        if p.turn_noise > 0.0 && rng.unit() < p.turn_noise {
            turn += if rng.coin() { -1.0 } else { 1.0 };
        }
        if turn == 0.0 {
            (hs, hc) = (s, c);
        } else {
            agent.heading = (agent.heading + turn * p.rotate_angle).rem_euclid(TAU);
            if turn.abs() == 1.0 {
                let (rs, rc) = k.rotate;
                let rs = turn * rs;
                (hc, hs) = (c * rc - s * rs, s * rc + c * rs);
            } else {
                (hs, hc) = agent.heading.sin_cos();
            }
        }
    }

    let nx = agent.x + p.step_len * hc;
    let ny = agent.y + p.step_len * hs;
    let inside = nx >= 0.0 && ny >= 0.0 && nx < k.width_mm && ny < k.height_mm;
    let target = inside.then(|| {
        arena.index((nx * k.inv_cell) as usize, (ny * k.inv_cell) as usize)
    });
    let free = |idx: usize, crowd: &[u16]| {
        crowd.is_empty() || crowd[idx] < p.cell_capacity || idx == here
    };
    match target {
        Some(idx) if arena.is_traversable(idx) && free(idx, crowd) => {
            if !crowd.is_empty() {
                crowd[here] -= 1;
                crowd[idx] += 1;
            }
            agent.x = nx;
            agent.y = ny;
            trail[idx] = (trail[idx] + p.deposit).min(p.trail_cap);
            StepOutcome::Moved
        }
        _ => {
            agent.heading = rng.angle();
            StepOutcome::Blocked
        }
    }
}

/// Rotate, gate, attempt a step, deposit. See the module docs.
pub fn agent_step<R: MotionRng + ?Sized>(
    agent: &mut Agent,
    trail: &mut [f64],
    stim: &StimulusMap,
    arena: &Arena,
    params: &MotionParams,
    rng: &mut R,
) -> StepOutcome {
    let k = Kinematics::new(arena, params);
    step_agent(agent, &mut [], trail, stim, arena, params, &k, rng)
}

/// Steps every agent in index order, then evaporates the trail. All
/// randomness comes from `rng` in agent order.
pub fn step_swarm_with<R: MotionRng + ?Sized>(
    agents: &mut [Agent],
    trail: &mut [f64],
    stim: &StimulusMap,
    arena: &Arena,
    params: &MotionParams,
    rng: &mut R,
) {
    move_agents(agents, trail, stim, arena, params, rng);
    let mut t = trail.to_vec();
    update_trail(&mut t, &mut Vec::new(), &trail_links(arena), params);
    trail.copy_from_slice(&t);
}

fn move_agents<R: MotionRng + ?Sized>(
    agents: &mut [Agent],
    trail: &mut [f64],
    stim: &StimulusMap,
    arena: &Arena,
    params: &MotionParams,
    rng: &mut R,
) {
    let k = Kinematics::new(arena, params);
    let mut crowd = Vec::new();
    if params.cell_capacity > 0 {
        crowd = vec![0u16; arena.len()];
        for agent in agents.iter() {
            let c = &mut crowd[agent.cell_with(k.inv_cell, arena)];
            *c = c.saturating_add(1);
        }
    }
    for agent in agents.iter_mut() {
        step_agent(agent, &mut crowd, trail, stim, arena, params, &k, rng);
        debug_assert!(arena.is_traversable(agent.cell(arena)), "agent left the substrate");
    }
}

/// Reflecting 4-neighbourhood `[west, east, north, south]` of every cell;
/// a neighbour that is off-grid or not traversable is replaced by the cell
/// itself, so Void cells only ever see themselves.
fn trail_links(arena: &Arena) -> Vec<[u32; 4]> {
    let (w, h) = (arena.width(), arena.height());
    (0..arena.len())
        .map(|i| {
            let (x, y) = (i % w, i / w);
            if !arena.is_traversable(i) {
                return [i as u32; 4];
            }
            let pick = |ok: bool, j: usize| {
                if ok && arena.is_traversable(j) {
                    j as u32
                } else {
                    i as u32
                }
            };
            [
                pick(x > 0, i.wrapping_sub(1)),
                pick(x + 1 < w, i + 1),
                pick(y > 0, i.wrapping_sub(w)),
                pick(y + 1 < h, i + w),
            ]
        })
        .collect()
}

/// Diffuses the trail over traversable cells (walls reflect) and applies
/// evaporation. Neighbour sums are paired `(west + east) + (north + south)`
/// so mirrored states stay mirrored bit for bit.
fn update_trail(trail: &mut Vec<f64>, scratch: &mut Vec<f64>, links: &[[u32; 4]], params: &MotionParams) {
    let keep = 1.0 - params.trail_evap;
    let r = params.trail_diffusion;
    if r == 0.0 {
        trail.iter_mut().for_each(|t| *t *= keep);
        return;
    }
    scratch.resize(trail.len(), 0.0);
    for ((out, &c), l) in scratch.iter_mut().zip(trail.iter()).zip(links) {
        let [w, e, n, s] = l.map(|j| trail[j as usize]);
        *out = keep * (c + r * ((w + e) + (n + s) - 4.0 * c));
    }
    std::mem::swap(trail, scratch);
}

/// A cell is occupied when it has ever received trail and its level is at
/// least `theta_occ`.
pub fn occupancy(trail: &[f64], theta_occ: f64) -> Vec<bool> {
    trail.iter().map(|&t| t > 0.0 && t >= theta_occ).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_straight_channel, build_t_junction};

    fn zero_stim(a: &Arena) -> StimulusMap {
        StimulusMap::zeros(a.len())
    }

    #[test]
    fn inoculum_inside_zone_and_deterministic() {
        let a = build_t_junction(1.0, 40.0, 10.0).unwrap();
        let s1 = init_inoculum(&a, 1000, 42).unwrap();
        let s2 = init_inoculum(&a, 1000, 42).unwrap();
        assert_eq!(s1.agents, s2.agents);
        let zone = a.zone(ZoneId::Inoculation).unwrap();
        assert!(s1.agents.iter().all(|ag| zone.binary_search(&ag.cell(&a)).is_ok()));
        assert!(s1.agents.iter().all(|ag| (0.0..TAU).contains(&ag.heading)));
        assert!(s1.trail.iter().all(|&t| t == 0.0));
        assert!(s1.occupancy(0.0).iter().all(|&o| !o));
    }

    #[test]
    fn inoculum_rejects_zero_agents() {
        let a = build_t_junction(1.0, 40.0, 10.0).unwrap();
        assert_eq!(init_inoculum(&a, 0, 1).unwrap_err(), SwarmError::NoAgents);
    }

    #[test]
    fn uniform_field_senses_equal() {
        let a = build_t_junction(1.0, 40.0, 10.0).unwrap();
        let mut stim = zero_stim(&a);
        stim.values_mut().iter_mut().for_each(|v| *v = 0.7);
        let trail = vec![0.0; a.len()];
        let ag = Agent { x: 55.0, y: 30.0, heading: 1.3 };
        let (l, f, r) = sense(&ag, &trail, &stim, &a, &MotionParams::default());
        assert_eq!((l, f), (f, r));
        assert_eq!(f, 0.7);
        let z = sense(&ag, &trail, &zero_stim(&a), &a, &MotionParams::default());
        assert_eq!(z, (0.0, 0.0, 0.0));
    }

    #[test]
    fn field_rising_to_the_left_of_heading() {
        // Heading +x (0 rad) with y downward: the left sensor (-45 deg) is at
        // smaller y. Make the stimulus grow as y shrinks.
        let a = build_t_junction(1.0, 40.0, 10.0).unwrap();
        let mut stim = zero_stim(&a);
        for (i, v) in stim.values_mut().iter_mut().enumerate() {
            let (_, y) = a.coords(i);
            *v = 100.0 - y as f64;
        }
        let trail = vec![0.0; a.len()];
        let ag = Agent { x: 30.0, y: 10.0, heading: 0.0 };
        let (l, f, r) = sense(&ag, &trail, &stim, &a, &MotionParams::default());
        assert!(l > f && f > r);
    }

    #[test]
    fn logistic_gate_limits() {
        let p = MotionParams {
            stall_threshold: 0.0,
            ..MotionParams::default()
        };
        assert_eq!(move_probability(0.0, &p), 0.5);
        assert!(move_probability(100.0, &p) > 1.0 - 1e-12);
        assert!(move_probability(-100.0, &p) < 1e-12);
        assert_eq!(retreat_probability(1.0, &p), 0.0);
        assert!(retreat_probability(-1e9, &p) == 1.0);
    }

    #[test]
    fn zero_stimulus_keeps_heading_and_moves_half_the_time() {
        let a = build_straight_channel(1.0, 200.0, 60.0, true).unwrap();
        let p = MotionParams {
            stall_threshold: 0.0,
            trail_gain: 0.0,
            ..MotionParams::default()
        };
        let stim = zero_stim(&a);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut trail = vec![0.0; a.len()];
        let mut moved = 0;
        let n = 4000;
        for _ in 0..n {
            let mut ag = Agent { x: 105.0, y: 35.0, heading: 0.4 };
            if agent_step(&mut ag, &mut trail, &stim, &a, &p, &mut rng) == StepOutcome::Moved {
                moved += 1;
            }
            assert_eq!(ag.heading, 0.4);
        }
        let frac = moved as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.03, "moved fraction {frac}");
    }

    #[test]
    fn facing_void_does_not_move() {
        let a = build_straight_channel(1.0, 40.0, 10.0, false).unwrap();
        let p = MotionParams {
            stall_threshold: -50.0,
            ..MotionParams::default()
        };
        let stim = zero_stim(&a);
        let mut trail = vec![0.0; a.len()];
        let (_, y0) = a.coords(a.zone(ZoneId::Inoculation).unwrap()[0]);
        // Just below the channel's top wall, heading straight up.
        let start = Agent { x: 20.0, y: y0 as f64 + 0.2, heading: 1.5 * PI };
        let mut ag = start;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = agent_step(&mut ag, &mut trail, &stim, &a, &p, &mut rng);
        assert_eq!(out, StepOutcome::Blocked);
        assert_eq!((ag.x, ag.y), (start.x, start.y));
        assert!(trail.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn occupancy_thresholds() {
        let trail = vec![0.0, 0.5, 2.0];
        assert_eq!(occupancy(&trail, 0.0), vec![false, true, true]);
        assert_eq!(occupancy(&trail, 1.0), vec![false, false, true]);
        assert_eq!(occupancy(&trail, 3.0), vec![false, false, false]);
    }

    #[test]
    fn agents_stay_on_substrate() {
        let a = build_t_junction(1.0, 40.0, 10.0).unwrap();
        let mut s = init_inoculum(&a, 300, 5).unwrap();
        let stim = zero_stim(&a);
        let p = MotionParams::default();
        for _ in 0..500 {
            s.step(&stim, &a, &p);
            assert!(s.agents.iter().all(|ag| a.is_traversable(ag.cell(&a))));
        }
        assert!(s.trail.iter().all(|&t| t >= 0.0));
    }

    #[test]
    fn mirrored_rng_reflects_draws() {
        let mut a = ChaCha8Rng::seed_from_u64(11);
        let mut b = Mirrored(ChaCha8Rng::seed_from_u64(11));
        for _ in 0..50 {
            let (x, y) = (a.angle(), b.angle());
            assert!(((PI - x).rem_euclid(TAU) - y).abs() < 1e-12);
            assert_eq!(a.coin(), !b.coin());
            assert_eq!(a.unit(), b.unit());
        }
    }
}
