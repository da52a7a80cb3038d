//! Monte Carlo harnesses. Trials run on a worker pool but are always
//! reported in ascending trial order, so output does not depend on the
//! number of workers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::chemistry::{InputAssignment, InputLabel};
use crate::error::SimError;
use crate::geometry::ZoneId;

use super::{run_trial, Outcome, OutputVector, SpanningReport, TrialConfig, TrialResult};

/// Runs every config, in parallel on `jobs` workers (0 = all cores),
/// returning results in input order.
pub fn run_trials(configs: &[TrialConfig], jobs: usize) -> Result<Vec<TrialResult>, SimError> {
    if jobs == 1 || configs.len() <= 1 {
        return configs.iter().map(run_trial).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| SimError::Config(format!("worker pool: {e}")))?;
    pool.install(|| configs.par_iter().map(run_trial).collect())
}

/// The nine input combos in table order.
pub const COMBOS: [&str; 9] = ["II", "IA", "AI", "IN", "NI", "NN", "AN", "NA", "AA"];

/// Expected result of a simple-T combo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Expected {
    Suppressed,
    LeftOrRight,
    Left,
    Right,
    Split,
}

impl Expected {
    /// Hard-coded from the wet-lab truth table: any inhibitor suppresses,
    /// no chemical gives one random output, activator routes or splits.
    pub fn for_combo(combo: &str) -> Option<Expected> {
        Some(match combo {
            "II" | "IA" | "AI" | "IN" | "NI" => Expected::Suppressed,
            "NN" => Expected::LeftOrRight,
            "AN" => Expected::Left,
            "NA" => Expected::Right,
            "AA" => Expected::Split,
            _ => return None,
        })
    }

    pub fn accepts(self, outcome: &Outcome) -> bool {
        matches!(
            (self, outcome),
            (Expected::Suppressed, Outcome::Suppressed)
                | (Expected::LeftOrRight, Outcome::Left | Outcome::Right)
                | (Expected::Left, Outcome::Left)
                | (Expected::Right, Outcome::Right)
                | (Expected::Split, Outcome::Split)
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            Expected::Suppressed => "0,0",
            Expected::LeftOrRight => "1,0 or 0,1",
            Expected::Left => "1,0",
            Expected::Right => "0,1",
            Expected::Split => "1,1",
        }
    }
}

/// Success rate reported for each combo in the wet-lab table.
pub fn reported_success(combo: &str) -> Option<f64> {
    Some(match combo {
        "II" | "IA" | "AI" | "IN" | "NI" | "NN" => 1.0,
        "AN" | "NA" => 0.9,
        "AA" => 0.8,
        _ => return None,
    })
}

/// Signed input coding, e.g. `-1,1` for IA.
pub fn signal_input(combo: &str) -> String {
    combo
        .chars()
        .map(|c| {
            InputLabel::from(c.to_string().as_str())
                .signal()
                .map_or_else(|| "?".to_string(), |s| s.to_string())
        })
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Debug, Clone, Serialize)]
pub struct TruthTableOptions {
    pub trials: usize,
    /// Trials for NN when it should differ from `trials`.
    pub nn_trials: Option<usize>,
    pub jobs: usize,
    pub combos: Vec<String>,
}

impl Default for TruthTableOptions {
    fn default() -> Self {
        TruthTableOptions {
            trials: 50,
            nn_trials: None,
            jobs: 1,
            combos: COMBOS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_id: usize,
    pub combo: String,
    pub seed: u64,
    pub outcome: Outcome,
    pub left_bit: bool,
    pub right_bit: bool,
    pub advancement_mm: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Stats {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Stats {
        let n = values.len();
        if n == 0 {
            return Stats::default();
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Stats {
            n,
            mean,
            sd: var.sqrt(),
        }
    }

    /// Standard error of `self.mean - other.mean`.
    pub fn pooled_se(&self, other: &Stats) -> f64 {
        let term = |s: &Stats| {
            if s.n == 0 {
                0.0
            } else {
                s.sd * s.sd / s.n as f64
            }
        };
        (term(self) + term(other)).sqrt()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComboRow {
    pub combo: String,
    pub signal_input: String,
    pub expected: Option<Expected>,
    pub trials: usize,
    pub histogram: BTreeMap<String, usize>,
    pub success_fraction: Option<f64>,
    pub reported_success: Option<f64>,
    pub advancement: Stats,
    /// Share of Left among Left/Right outcomes.
    pub left_fraction: Option<f64>,
}

impl ComboRow {
    pub fn count(&self, outcome: &Outcome) -> usize {
        self.histogram.get(&outcome.label()).copied().unwrap_or(0)
    }

    pub fn fraction(&self, outcome: &Outcome) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.count(outcome) as f64 / self.trials as f64
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TruthTableReport {
    pub rows: Vec<ComboRow>,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

impl TruthTableReport {
    pub fn row(&self, combo: &str) -> Option<&ComboRow> {
        self.rows.iter().find(|r| r.combo == combo)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("trial_id,combo,outcome,left_bit,right_bit,advancement_mm,steps\n");
        for r in &self.records {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{:.3},{}",
                r.trial_id,
                r.combo,
                r.outcome,
                u8::from(r.left_bit),
                u8::from(r.right_bit),
                r.advancement_mm,
                r.steps
            );
        }
        s
    }

    /// Side-by-side comparison with the reported wet-lab rates.
    pub fn summary_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<5} {:<7} {:<11} {:>6} {:>9} {:>9}  {:>4} {:>4} {:>4} {:>4}  {:>14}",
            "combo", "signal", "expected", "n", "reported", "observed", "Sup", "L", "R", "Spl", "advance (mm)"
        );
        for r in &self.rows {
            let fmt_pct = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{:.0}%", 100.0 * v));
            let _ = writeln!(
                s,
                "{:<5} {:<7} {:<11} {:>6} {:>9} {:>9}  {:>4} {:>4} {:>4} {:>4}  {:>6.1} ± {:<5.1}",
                r.combo,
                r.signal_input,
                r.expected.map_or("-", Expected::label),
                r.trials,
                fmt_pct(r.reported_success),
                fmt_pct(r.success_fraction),
                r.count(&Outcome::Suppressed),
                r.count(&Outcome::Left),
                r.count(&Outcome::Right),
                r.count(&Outcome::Split),
                r.advancement.mean,
                r.advancement.sd,
            );
        }
        s
    }
}

/// Runs every combo on the simple T. Trial `k` of each combo uses seed
/// `base.seed + k`, so combos are paired seed for seed.
pub fn run_truth_table(
    base: &TrialConfig,
    opts: &TruthTableOptions,
) -> Result<TruthTableReport, SimError> {
    let mut configs = Vec::new();
    let mut tags = Vec::new();
    for combo in &opts.combos {
        let n = if combo == "NN" {
            opts.nn_trials.unwrap_or(opts.trials)
        } else {
            opts.trials
        };
        let inputs = InputAssignment::from_combo(combo)?;
        for k in 0..n {
            let mut c = base.clone();
            c.inputs = inputs.clone();
            c.seed = base.seed.wrapping_add(k as u64);
            configs.push(c);
            tags.push(combo.clone());
        }
    }
    let results = run_trials(&configs, opts.jobs)?;

    let records: Vec<TrialRecord> = results
        .iter()
        .zip(&tags)
        .enumerate()
        .map(|(id, (r, combo))| TrialRecord {
            trial_id: id,
            combo: combo.clone(),
            seed: r.seed,
            outcome: r.outcome.clone(),
            left_bit: r.bits.left(),
            right_bit: r.bits.right(),
            advancement_mm: r.advancement_mm.unwrap_or(0.0),
            steps: r.steps,
        })
        .collect();

    let rows = opts
        .combos
        .iter()
        .map(|combo| {
            let recs: Vec<&TrialRecord> = records.iter().filter(|r| &r.combo == combo).collect();
            let mut histogram: BTreeMap<String, usize> = ["Suppressed", "Left", "Right", "Split"]
                .iter()
                .map(|k| (k.to_string(), 0))
                .collect();
            for r in &recs {
                *histogram.entry(r.outcome.label()).or_insert(0) += 1;
            }
            let expected = Expected::for_combo(combo);
            let success_fraction = expected.map(|e| {
                let ok = recs.iter().filter(|r| e.accepts(&r.outcome)).count();
                ok as f64 / recs.len().max(1) as f64
            });
            let adv: Vec<f64> = recs.iter().map(|r| r.advancement_mm).collect();
            let lefts = recs.iter().filter(|r| r.outcome == Outcome::Left).count();
            let rights = recs.iter().filter(|r| r.outcome == Outcome::Right).count();
            let left_fraction =
                (lefts + rights > 0).then(|| lefts as f64 / (lefts + rights) as f64);
            ComboRow {
                combo: combo.clone(),
                signal_input: signal_input(combo),
                expected,
                trials: recs.len(),
                histogram,
                success_fraction,
                reported_success: reported_success(combo),
                advancement: Stats::of(&adv),
                left_fraction,
            }
        })
        .collect();

    Ok(TruthTableReport { rows, records })
}

/// Which outputs of one junction were reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Branch {
    Neither,
    Only(ZoneId),
    Split,
}

impl Branch {
    pub fn from_bits(a: (ZoneId, bool), b: (ZoneId, bool)) -> Branch {
        match (a.1, b.1) {
            (false, false) => Branch::Neither,
            (true, false) => Branch::Only(a.0),
            (false, true) => Branch::Only(b.0),
            (true, true) => Branch::Split,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Branch::Neither => "none".into(),
            Branch::Only(z) => z.name().into(),
            Branch::Split => "split".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompoundTrial {
    pub trial_id: usize,
    pub seed: u64,
    pub bits: OutputVector,
    /// Central junction, read off the central inputs C5 and C6.
    pub central: Branch,
    /// Left secondary junction (C1 upper, C2 lower).
    pub left: Branch,
    /// Right secondary junction (C4 upper, C3 lower).
    pub right: Branch,
    pub success: Option<bool>,
    pub advancement_mm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompoundReport {
    pub assignment: BTreeMap<ZoneId, String>,
    /// Bits implied by the assignment: a pad should be reached iff it holds
    /// the activator. Absent when no pad holds it.
    pub expected: Option<OutputVector>,
    pub trials: Vec<CompoundTrial>,
    pub success_fraction: Option<f64>,
    pub central_histogram: BTreeMap<String, usize>,
    pub pattern_histogram: BTreeMap<String, usize>,
}

impl CompoundReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("trial_id,seed,C1,C2,C3,C4,C5,C6,central,left,right,success,advancement_mm\n");
        for t in &self.trials {
            let b = |z| u8::from(t.bits.bit(z));
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{:.3}",
                t.trial_id,
                t.seed,
                b(ZoneId::C1),
                b(ZoneId::C2),
                b(ZoneId::C3),
                b(ZoneId::C4),
                b(ZoneId::C5),
                b(ZoneId::C6),
                t.central.label(),
                t.left.label(),
                t.right.label(),
                t.success.map_or("-".to_string(), |v| u8::from(v).to_string()),
                t.advancement_mm
            );
        }
        s
    }
}

/// Runs `trials` seeds of one compound-junction assignment and classifies
/// each junction.
pub fn run_compound_scenario(
    base: &TrialConfig,
    assignment: &InputAssignment,
    trials: usize,
    jobs: usize,
) -> Result<CompoundReport, SimError> {
    let configs: Vec<TrialConfig> = (0..trials)
        .map(|k| {
            let mut c = base.clone();
            c.inputs = assignment.clone();
            c.seed = base.seed.wrapping_add(k as u64);
            c
        })
        .collect();
    let results = run_trials(&configs, jobs)?;

    let activator: BTreeSet<ZoneId> = base_with(base, assignment).activator_pads();
    let expected = (!activator.is_empty()).then(|| {
        OutputVector(
            ZoneId::COMPOUND_PADS
                .iter()
                .map(|z| (*z, activator.contains(z)))
                .collect(),
        )
    });

    let mut central_histogram = BTreeMap::new();
    let mut pattern_histogram = BTreeMap::new();
    let trials: Vec<CompoundTrial> = results
        .iter()
        .enumerate()
        .map(|(id, r)| {
            let bit = |z| (z, r.bits.bit(z));
            let central = Branch::from_bits(bit(ZoneId::C5), bit(ZoneId::C6));
            let left = Branch::from_bits(bit(ZoneId::C1), bit(ZoneId::C2));
            let right = Branch::from_bits(bit(ZoneId::C4), bit(ZoneId::C3));
            *central_histogram.entry(central.label()).or_insert(0) += 1;
            *pattern_histogram.entry(r.bits.describe()).or_insert(0) += 1;
            let success = expected
                .as_ref()
                .map(|e| ZoneId::COMPOUND_PADS.iter().all(|z| e.bit(*z) == r.bits.bit(*z)));
            CompoundTrial {
                trial_id: id,
                seed: r.seed,
                bits: r.bits.clone(),
                central,
                left,
                right,
                success,
                advancement_mm: r.advancement_mm.unwrap_or(0.0),
            }
        })
        .collect();
    let success_fraction = expected.as_ref().map(|_| {
        trials.iter().filter(|t| t.success == Some(true)).count() as f64 / trials.len().max(1) as f64
    });
    Ok(CompoundReport {
        assignment: assignment
            .0
            .iter()
            .map(|(z, l)| (*z, l.code().to_string()))
            .collect(),
        expected,
        trials,
        success_fraction,
        central_histogram,
        pattern_histogram,
    })
}

fn base_with(base: &TrialConfig, assignment: &InputAssignment) -> TrialConfig {
    TrialConfig {
        inputs: assignment.clone(),
        ..base.clone()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpanningTrial {
    pub trial_id: usize,
    pub seed: u64,
    pub report: SpanningReport,
    pub rim_reached: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpanningSummary {
    pub activator_pads: BTreeSet<ZoneId>,
    pub trials: Vec<SpanningTrial>,
    /// Share of trials where every activator pad is occupied and joined to
    /// the inoculum.
    pub connected_fraction: f64,
    /// Among connected trials, share with effective/MST length <= 2.
    pub ratio_ok_fraction: Option<f64>,
    pub rim_fraction: f64,
}

pub const MAX_SPANNING_RATIO: f64 = 2.0;

impl SpanningSummary {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "trial_id,seed,pads_occupied,all_connected,network_area_mm2,effective_length_mm,mst_length_mm,ratio,rim_reached\n",
        );
        for t in &self.trials {
            let r = &t.report;
            let pads: Vec<&str> = r.pads_occupied.iter().map(|z| z.name()).collect();
            let _ = writeln!(
                s,
                "{},{},{},{},{:.1},{:.3},{:.3},{},{}",
                t.trial_id,
                t.seed,
                if pads.is_empty() { "-".to_string() } else { pads.join("+") },
                u8::from(r.all_connected),
                r.network_area,
                r.effective_length,
                r.mst_length,
                r.ratio.map_or("-".to_string(), |v| format!("{v:.4}")),
                u8::from(t.rim_reached)
            );
        }
        s
    }
}

/// Open-dish trials with the activator on `pads` (every other compass pad
/// present in the arena stays neutral).
pub fn run_spanning(
    base: &TrialConfig,
    trials: usize,
    jobs: usize,
) -> Result<SpanningSummary, SimError> {
    let configs: Vec<TrialConfig> = (0..trials)
        .map(|k| base.clone().with_seed(base.seed.wrapping_add(k as u64)))
        .collect();
    let results = run_trials(&configs, jobs)?;
    let trials: Vec<SpanningTrial> = results
        .into_iter()
        .enumerate()
        .map(|(id, r)| {
            let report = r.spanning.ok_or_else(|| {
                SimError::Config("spanning experiments need an open-dish arena".into())
            })?;
            Ok(SpanningTrial {
                trial_id: id,
                seed: r.seed,
                report,
                rim_reached: r.rim_reached.unwrap_or(false),
            })
        })
        .collect::<Result<_, SimError>>()?;
    let n = trials.len().max(1) as f64;
    let connected: Vec<&SpanningTrial> = trials.iter().filter(|t| t.report.all_connected).collect();
    let ratio_ok_fraction = (!connected.is_empty()).then(|| {
        connected
            .iter()
            .filter(|t| t.report.ratio.is_some_and(|r| r <= MAX_SPANNING_RATIO))
            .count() as f64
            / connected.len() as f64
    });
    Ok(SpanningSummary {
        activator_pads: base.activator_pads(),
        connected_fraction: connected.len() as f64 / n,
        ratio_ok_fraction,
        rim_fraction: trials.iter().filter(|t| t.rim_reached).count() as f64 / n,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_table() {
        for c in ["II", "IA", "AI", "IN", "NI"] {
            assert_eq!(Expected::for_combo(c), Some(Expected::Suppressed));
        }
        assert!(Expected::LeftOrRight.accepts(&Outcome::Left));
        assert!(Expected::LeftOrRight.accepts(&Outcome::Right));
        assert!(!Expected::LeftOrRight.accepts(&Outcome::Split));
        assert!(!Expected::Left.accepts(&Outcome::Right));
        assert_eq!(signal_input("IA"), "-1,1");
        assert_eq!(signal_input("NN"), "0,0");
    }

    #[test]
    fn stats_sample_sd() {
        let s = Stats::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(Stats::of(&[]).n, 0);
    }

    #[test]
    fn branch_labels() {
        assert_eq!(
            Branch::from_bits((ZoneId::C5, true), (ZoneId::C6, true)),
            Branch::Split
        );
        assert_eq!(
            Branch::from_bits((ZoneId::C5, false), (ZoneId::C6, true)).label(),
            "C6"
        );
    }
}
