//! Single trials, outcome classification and the Monte Carlo harnesses.

pub mod classify;
pub mod harness;
pub mod mst;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::chemistry::{
    fields_for_inputs, source_cells, Field, InputAssignment, InputLabel, LabelMap, SpeciesTable,
    StimulusMap,
};
use crate::error::{SimError, SwarmError};
use crate::geometry::{
    build_compound_t, build_open_dish, build_straight_channel, build_t_junction, Arena, ArenaKind,
    ZoneId,
};
use crate::plasmodium::{init_inoculum, MotionParams, PlasmodiumState};

pub use classify::{
    advancement_distance, classify_spanning, classify_t_outcome, pad_bits, rim_reached, Outcome,
    OutputVector, SpanningReport, DEFAULT_CORD_WIDTH_MM, DEFAULT_PAD_FRACTION,
};
pub use harness::{
    run_compound_scenario, run_spanning, run_trials, run_truth_table, CompoundReport,
    SpanningSummary, TruthTableOptions, TruthTableReport,
};
pub use mst::mst_length;

/// Geometry to build for a trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ArenaSpec {
    TJunction {
        #[serde(default = "one")]
        cell_size: f64,
        #[serde(default = "t_arm")]
        arm_length: f64,
        #[serde(default = "t_width")]
        channel_width: f64,
    },
    Compound {
        #[serde(default = "one")]
        cell_size: f64,
        #[serde(default = "compound_arm")]
        arm_length: f64,
        #[serde(default = "compound_width")]
        channel_width: f64,
    },
    Dish {
        #[serde(default = "one")]
        cell_size: f64,
        #[serde(default = "dish_diameter")]
        diameter: f64,
        #[serde(default)]
        pads: Vec<ZoneId>,
    },
    Channel {
        #[serde(default = "one")]
        cell_size: f64,
        #[serde(default = "t_arm")]
        length: f64,
        #[serde(default = "t_width")]
        width: f64,
        #[serde(default)]
        centred_inoculum: bool,
    },
}

fn one() -> f64 {
    1.0
}
fn t_arm() -> f64 {
    40.0
}
fn t_width() -> f64 {
    10.0
}
fn compound_arm() -> f64 {
    16.0
}
fn compound_width() -> f64 {
    8.0
}
fn dish_diameter() -> f64 {
    90.0
}

impl Default for ArenaSpec {
    fn default() -> Self {
        ArenaSpec::t_junction()
    }
}

impl ArenaSpec {
    /// 1 mm cells, 40 mm arms, 10 mm channels.
    pub fn t_junction() -> Self {
        ArenaSpec::TJunction {
            cell_size: one(),
            arm_length: t_arm(),
            channel_width: t_width(),
        }
    }

    /// 1 mm cells, 16 mm arms, 8 mm channels.
    pub fn compound() -> Self {
        ArenaSpec::Compound {
            cell_size: one(),
            arm_length: compound_arm(),
            channel_width: compound_width(),
        }
    }

    pub fn dish(pads: &[ZoneId]) -> Self {
        ArenaSpec::Dish {
            cell_size: one(),
            diameter: dish_diameter(),
            pads: pads.to_vec(),
        }
    }

    pub fn cell_size(&self) -> f64 {
        match self {
            ArenaSpec::TJunction { cell_size, .. }
            | ArenaSpec::Compound { cell_size, .. }
            | ArenaSpec::Dish { cell_size, .. }
            | ArenaSpec::Channel { cell_size, .. } => *cell_size,
        }
    }

    pub fn build(&self) -> Result<Arena, SimError> {
        let arena = match *self {
            ArenaSpec::TJunction {
                cell_size,
                arm_length,
                channel_width,
            } => build_t_junction(cell_size, arm_length, channel_width)?,
            ArenaSpec::Compound {
                cell_size,
                arm_length,
                channel_width,
            } => build_compound_t(cell_size, arm_length, channel_width)?,
            ArenaSpec::Dish {
                cell_size,
                diameter,
                ref pads,
            } => build_open_dish(cell_size, diameter, pads)?,
            ArenaSpec::Channel {
                cell_size,
                length,
                width,
                centred_inoculum,
            } => build_straight_channel(cell_size, length, width, centred_inoculum)?,
        };
        Ok(arena)
    }
}

/// Everything needed to replay one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrialConfig {
    pub arena: ArenaSpec,
    pub inputs: InputAssignment,
    pub species: SpeciesTable,
    pub labels: LabelMap,
    pub motion: MotionParams,
    pub n_agents: usize,
    pub steps: usize,
    /// Chemical-free steps before the pads start emitting; `None` means 10%
    /// of `steps`.
    pub warmup_steps: Option<usize>,
    /// Chemistry updates per swarm step.
    pub chem_substeps: usize,
    pub seed: u64,
    /// Occupancy threshold; `None` means a quarter of the steady
    /// single-deposit trail level.
    pub theta_occ: Option<f64>,
    pub pad_fraction: f64,
    pub cord_width: f64,
    /// Also record pads reached at any step (reported, never used for the
    /// final outcome).
    pub classify_any_time: bool,
}

pub const DEFAULT_AGENTS: usize = 800;
pub const DEFAULT_STEPS: usize = 5000;
pub const DEFAULT_CHEM_SUBSTEPS: usize = 5;

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            arena: ArenaSpec::default(),
            inputs: InputAssignment::default(),
            species: SpeciesTable::default(),
            labels: LabelMap::default(),
            motion: MotionParams::default(),
            n_agents: DEFAULT_AGENTS,
            steps: DEFAULT_STEPS,
            warmup_steps: None,
            chem_substeps: DEFAULT_CHEM_SUBSTEPS,
            seed: 0,
            theta_occ: None,
            pad_fraction: DEFAULT_PAD_FRACTION,
            cord_width: DEFAULT_CORD_WIDTH_MM,
            classify_any_time: false,
        }
    }
}

impl TrialConfig {
    pub fn warmup(&self) -> usize {
        self.warmup_steps.unwrap_or(self.steps / 10)
    }

    pub fn theta(&self) -> f64 {
        self.theta_occ
            .unwrap_or_else(|| self.motion.default_theta_occ())
    }

    /// Simple T with the given two-letter combo on (OutL, OutR).
    pub fn t_combo(combo: &str) -> Result<Self, SimError> {
        Ok(TrialConfig {
            inputs: InputAssignment::from_combo(combo)?,
            ..TrialConfig::default()
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Checks everything that could otherwise fail mid-run.
    pub fn validate(&self) -> Result<Arena, SimError> {
        let arena = self.arena.build()?;
        self.species.validate(arena.cell_size())?;
        self.motion.validate()?;
        if self.n_agents == 0 {
            return Err(SwarmError::NoAgents.into());
        }
        if self.steps == 0 {
            return Err(SimError::Config("steps must be at least 1".into()));
        }
        if self.chem_substeps == 0 {
            return Err(SimError::Config("chem_substeps must be at least 1".into()));
        }
        if self.warmup() > self.steps {
            return Err(SimError::Config(
                "warmup_steps exceeds the step budget".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.pad_fraction) {
            return Err(SimError::Config("pad_fraction must lie in [0, 1]".into()));
        }
        if !(self.cord_width > 0.0) {
            return Err(SimError::Config("cord_width must be positive".into()));
        }
        if self.theta().is_nan() || self.theta() < 0.0 {
            return Err(SimError::Config("theta_occ must be non-negative".into()));
        }
        self.inputs
            .complete_for(&arena, &self.species, &self.labels)?;
        Ok(arena)
    }

    /// Pads labelled with the activator.
    pub fn activator_pads(&self) -> BTreeSet<ZoneId> {
        self.inputs
            .0
            .iter()
            .filter(|(_, l)| {
                **l == InputLabel::Activator
                    || matches!(l, InputLabel::Species(s) if *s == self.labels.activator)
            })
            .map(|(z, _)| *z)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub seed: u64,
    pub steps: usize,
    pub outcome: Outcome,
    pub bits: OutputVector,
    /// mm past the inoculation block; absent for the open dish.
    pub advancement_mm: Option<f64>,
    /// Open dish only.
    pub spanning: Option<SpanningReport>,
    /// Open dish only.
    pub rim_reached: Option<bool>,
    /// Present when `classify_any_time` is set.
    pub reached_any_time: Option<OutputVector>,
    #[serde(skip)]
    pub occupancy: Vec<bool>,
}

/// Read-only view handed to observers after every step.
pub struct Snapshot<'a> {
    /// Number of steps completed.
    pub step: usize,
    pub arena: &'a Arena,
    pub fields: &'a [Field],
    pub swarm: &'a PlasmodiumState,
    pub theta_occ: f64,
}

pub fn run_trial(config: &TrialConfig) -> Result<TrialResult, SimError> {
    run_trial_observed(config, |_| {})
}

/// Runs a trial, calling `observe` after each step. Warm-up steps move the
/// swarm with no chemistry; afterwards each step emits, diffuses, refreshes
/// the stimulus and moves the swarm.
pub fn run_trial_observed(
    config: &TrialConfig,
    mut observe: impl FnMut(&Snapshot<'_>),
) -> Result<TrialResult, SimError> {
    let arena = config.validate()?;
    let inputs = config
        .inputs
        .complete_for(&arena, &config.species, &config.labels)?;
    let mut fields = fields_for_inputs(&config.species, &inputs, &config.labels, &arena)?;
    let sources: Vec<Vec<usize>> = fields
        .iter()
        .map(|f| source_cells(&f.species().name, &inputs, &config.labels, &arena))
        .collect();
    let mut stim = StimulusMap::zeros(arena.len());
    let mut swarm = init_inoculum(&arena, config.n_agents, config.seed)?;
    let theta = config.theta();
    let warmup = config.warmup();
    let mut any_time = config
        .classify_any_time
        .then(|| pad_bits(&vec![false; arena.len()], &arena, config.pad_fraction));

    for step in 0..config.steps {
        if step >= warmup && !fields.is_empty() {
            for (f, cells) in fields.iter_mut().zip(&sources) {
                for _ in 0..config.chem_substeps {
                    f.emit_at(cells);
                    crate::chemistry::diffuse(f);
                }
            }
            stim.refresh(&fields);
        }
        swarm.step(&stim, &arena, &config.motion);
        if let Some(acc) = any_time.as_mut() {
            let occ = swarm.occupancy(theta);
            acc.merge(&pad_bits(&occ, &arena, config.pad_fraction));
        }
        observe(&Snapshot {
            step: step + 1,
            arena: &arena,
            fields: &fields,
            swarm: &swarm,
            theta_occ: theta,
        });
    }

    let occupancy = swarm.occupancy(theta);
    let (bits, outcome, advancement, spanning, rim) = match arena.kind() {
        ArenaKind::TJunction | ArenaKind::CompoundT => {
            let (bits, outcome) = classify_t_outcome(&occupancy, &arena, config.pad_fraction)?;
            let adv = advancement_distance(&occupancy, &arena)?;
            (bits, outcome, Some(adv), None, None)
        }
        ArenaKind::Channel => {
            let bits = pad_bits(&occupancy, &arena, config.pad_fraction);
            let outcome = classify::outcome_from_bits(&bits);
            let adv = advancement_distance(&occupancy, &arena)?;
            (bits, outcome, Some(adv), None, None)
        }
        ArenaKind::OpenDish => {
            let bits = pad_bits(&occupancy, &arena, config.pad_fraction);
            let outcome = classify::outcome_from_bits(&bits);
            let report = classify_spanning(
                &occupancy,
                &arena,
                &config.activator_pads(),
                config.pad_fraction,
                config.cord_width,
            )?;
            let rim = rim_reached(&occupancy, &arena);
            (bits, outcome, None, Some(report), Some(rim))
        }
    };

    Ok(TrialResult {
        seed: config.seed,
        steps: config.steps,
        outcome,
        bits,
        advancement_mm: advancement,
        spanning,
        rim_reached: rim,
        reached_any_time: any_time,
        occupancy,
    })
}
