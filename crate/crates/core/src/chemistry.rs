//! Volatile chemical fields: constant-rate pad sources, explicit five-point
//! diffusion with first-order decay, and the signed stimulus the swarm
//! reacts to.
//!
//! Vapour spreads over the whole grid, Void cells included, because the
//! compounds act through the dish headspace. The grid edge is a
//! zero-flux wall.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ChemistryError;
use crate::geometry::{Arena, CellClass, ZoneId};

pub const FARNESENE: &str = "farnesene";
pub const HEXENYL_ACETATE: &str = "cis-3-hexenyl acetate";
pub const NONANAL: &str = "nonanal";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChemicalSpecies {
    pub name: String,
    /// Signed chemotactic strength in [-1, 1]; positive attracts.
    pub weight: f64,
    /// mm^2 per step.
    pub diffusivity: f64,
    /// Fraction lost per step.
    pub decay: f64,
    /// Concentration added per step to each source cell.
    pub emission: f64,
}

impl ChemicalSpecies {
    pub fn validate(&self) -> Result<(), ChemistryError> {
        let bad = |reason: &str| ChemistryError::InvalidSpecies {
            name: self.name.clone(),
            reason: reason.to_string(),
        };
        if !(-1.0..=1.0).contains(&self.weight) {
            return Err(bad("weight must lie in [-1, 1]"));
        }
        if !(self.diffusivity >= 0.0) || !self.diffusivity.is_finite() {
            return Err(bad("diffusivity must be non-negative"));
        }
        if !(0.0..1.0).contains(&self.decay) {
            return Err(bad("decay must lie in [0, 1)"));
        }
        if !(self.emission >= 0.0) || !self.emission.is_finite() {
            return Err(bad("emission must be non-negative"));
        }
        Ok(())
    }

    /// Explicit-scheme limit `4 D <= h^2`.
    pub fn check_stability(&self, cell_size: f64) -> Result<(), ChemistryError> {
        let limit = cell_size * cell_size;
        if 4.0 * self.diffusivity > limit {
            return Err(ChemistryError::Unstable {
                name: self.name.clone(),
                diffusivity: self.diffusivity,
                limit,
            });
        }
        Ok(())
    }
}

/// Ordered species table. Order matters only for output naming and for the
/// order fields are summed in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpeciesTable(pub Vec<ChemicalSpecies>);

/// Chemoattractants, strongest first. cis-3-hexenyl acetate is left out:
/// it is used as the weak inhibitor.
const ATTRACTANT_RANKING: [&str; 9] = [
    FARNESENE,
    "beta-myrcene",
    "tridecane",
    "limonene",
    "p-cymene",
    "3-octanone",
    "beta-pinene",
    "m-cresol",
    "benzylacetate",
];

/// Chemorepellents, strongest first.
const REPELLENT_RANKING: [&str; 9] = [
    NONANAL,
    "benzaldehyde",
    "methylbenzoate",
    "linalool",
    "methyl-p-benzoquinone",
    "eugenol",
    "benzyl alcohol",
    "geraniol",
    "2-phenylethanol",
];

/// Transport shared by every species, per chemistry update.
pub const DEFAULT_DIFFUSIVITY: f64 = 0.24;
pub const DEFAULT_DECAY: f64 = 2.0e-4;
pub const DEFAULT_EMISSION: f64 = 0.3;
/// Source strength of every repellent. Pads release a hundred times more
/// repellent than attractant, which is what lets a -0.3 weight still
/// dominate a +1.0 activator across the junction.
pub const HEXENYL_EMISSION: f64 = 30.0;

impl Default for SpeciesTable {
    fn default() -> Self {
        let species = |name: &str, weight: f64, emission: f64| ChemicalSpecies {
            name: name.to_string(),
            weight,
            diffusivity: DEFAULT_DIFFUSIVITY,
            decay: DEFAULT_DECAY,
            emission,
        };
        let mut v = Vec::new();
        // Ranked species past the first get evenly spaced weights inside the
        // open unit interval; only their order is meaningful.
        let n = ATTRACTANT_RANKING.len() as f64;
        for (k, name) in ATTRACTANT_RANKING.iter().enumerate() {
            let w = if k == 0 { 1.0 } else { 1.0 - k as f64 / n };
            v.push(species(name, w, DEFAULT_EMISSION));
        }
        v.push(species(HEXENYL_ACETATE, -0.3, HEXENYL_EMISSION));
        let n = REPELLENT_RANKING.len() as f64;
        for (k, name) in REPELLENT_RANKING.iter().enumerate() {
            let w = if k == 0 { -1.0 } else { -(1.0 - k as f64 / n) };
            v.push(species(name, w, HEXENYL_EMISSION));
        }
        SpeciesTable(v)
    }
}

impl SpeciesTable {
    pub fn get(&self, name: &str) -> Option<&ChemicalSpecies> {
        self.0.iter().find(|s| s.name == name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut ChemicalSpecies> {
        self.0.iter_mut().find(|s| s.name == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ChemicalSpecies> {
        self.0.iter()
    }

    /// Replaces a species with the same name or appends a new one.
    pub fn upsert(&mut self, species: ChemicalSpecies) {
        match self.get_mut(&species.name) {
            Some(s) => *s = species,
            None => self.0.push(species),
        }
    }

    pub fn validate(&self, cell_size: f64) -> Result<(), ChemistryError> {
        for (i, s) in self.0.iter().enumerate() {
            s.validate()?;
            s.check_stability(cell_size)?;
            if self.0[..i].iter().any(|o| o.name == s.name) {
                return Err(ChemistryError::InvalidSpecies {
                    name: s.name.clone(),
                    reason: "duplicate name".into(),
                });
            }
        }
        Ok(())
    }
}

/// Label written on a pad: activator, inhibitor, nothing, or a named
/// species from the table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InputLabel {
    Activator,
    Inhibitor,
    Neutral,
    Species(String),
}

impl InputLabel {
    /// Signed input coding: A = +1, I = -1, N = 0.
    pub fn signal(&self) -> Option<i8> {
        match self {
            InputLabel::Activator => Some(1),
            InputLabel::Inhibitor => Some(-1),
            InputLabel::Neutral => Some(0),
            InputLabel::Species(_) => None,
        }
    }

    pub fn code(&self) -> &str {
        match self {
            InputLabel::Activator => "A",
            InputLabel::Inhibitor => "I",
            InputLabel::Neutral => "N",
            InputLabel::Species(s) => s,
        }
    }
}

impl From<&str> for InputLabel {
    fn from(s: &str) -> Self {
        match s {
            "A" => InputLabel::Activator,
            "I" => InputLabel::Inhibitor,
            "N" => InputLabel::Neutral,
            other => InputLabel::Species(other.to_string()),
        }
    }
}

impl fmt::Display for InputLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for InputLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for InputLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(InputLabel::from(s.as_str()))
    }
}

/// Which species the A and I labels stand for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabelMap {
    pub activator: String,
    pub inhibitor: String,
}

impl Default for LabelMap {
    fn default() -> Self {
        LabelMap {
            activator: FARNESENE.to_string(),
            inhibitor: HEXENYL_ACETATE.to_string(),
        }
    }
}

impl LabelMap {
    /// Species name a label emits, or `None` for N.
    pub fn resolve<'a>(&'a self, label: &'a InputLabel) -> Option<&'a str> {
        match label {
            InputLabel::Activator => Some(&self.activator),
            InputLabel::Inhibitor => Some(&self.inhibitor),
            InputLabel::Neutral => None,
            InputLabel::Species(s) => Some(s),
        }
    }
}

/// One label per pad of an arena.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InputAssignment(pub BTreeMap<ZoneId, InputLabel>);

impl InputAssignment {
    /// Every pad of `arena` labelled N.
    pub fn neutral(arena: &Arena) -> Self {
        InputAssignment(
            arena
                .pads()
                .into_iter()
                .map(|z| (z, InputLabel::Neutral))
                .collect(),
        )
    }

    pub fn with(mut self, zone: ZoneId, label: impl Into<InputLabel>) -> Self {
        self.0.insert(zone, label.into());
        self
    }

    pub fn label(&self, zone: ZoneId) -> &InputLabel {
        self.0.get(&zone).unwrap_or(&InputLabel::Neutral)
    }

    /// Two-letter combo such as `"AN"` for the (OutL, OutR) pads of a T.
    pub fn from_combo(combo: &str) -> Result<Self, ChemistryError> {
        let chars: Vec<char> = combo.chars().collect();
        if chars.len() != 2 {
            return Err(ChemistryError::Assignment(format!(
                "combo `{combo}` must have two letters"
            )));
        }
        let label = |c: char| match c {
            'A' | 'I' | 'N' => Ok(InputLabel::from(c.to_string().as_str())),
            _ => Err(ChemistryError::Assignment(format!(
                "combo letter `{c}` is not one of A, I, N"
            ))),
        };
        let mut m = BTreeMap::new();
        m.insert(ZoneId::OutL, label(chars[0])?);
        m.insert(ZoneId::OutR, label(chars[1])?);
        Ok(InputAssignment(m))
    }

    /// Fills unlabelled pads with N and rejects labels on zones the arena
    /// lacks or species the table lacks.
    pub fn complete_for(
        &self,
        arena: &Arena,
        table: &SpeciesTable,
        labels: &LabelMap,
    ) -> Result<Self, ChemistryError> {
        let pads = arena.pads();
        for (zone, label) in &self.0 {
            if !pads.contains(zone) {
                return Err(ChemistryError::Assignment(format!(
                    "arena has no pad {zone}"
                )));
            }
            if let Some(name) = labels.resolve(label) {
                if table.get(name).is_none() {
                    return Err(ChemistryError::UnknownSpecies(name.to_string()));
                }
            }
        }
        let mut out = InputAssignment::neutral(arena);
        for (zone, label) in &self.0 {
            out.0.insert(*zone, label.clone());
        }
        Ok(out)
    }

    pub fn mirrored(&self) -> Self {
        InputAssignment(
            self.0
                .iter()
                .map(|(z, l)| (z.mirrored(), l.clone()))
                .collect(),
        )
    }
}

/// Concentration grid for one species, aligned with an arena.
#[derive(Debug, Clone)]
pub struct Field {
    species: ChemicalSpecies,
    width: usize,
    height: usize,
    rate: f64,
    conc: Vec<f64>,
    scratch: Vec<f64>,
}

impl Field {
    pub fn new(species: ChemicalSpecies, arena: &Arena) -> Result<Self, ChemistryError> {
        Field::on_grid(species, arena.width(), arena.height(), arena.cell_size())
    }

    /// Zero field on a bare `width` x `height` grid of `cell_size` mm cells.
    pub fn on_grid(
        species: ChemicalSpecies,
        width: usize,
        height: usize,
        cell_size: f64,
    ) -> Result<Self, ChemistryError> {
        if !(cell_size > 0.0 && cell_size.is_finite()) || width == 0 || height == 0 {
            return Err(ChemistryError::InvalidGrid(format!(
                "{width} x {height} cells of {cell_size} mm"
            )));
        }
        species.validate()?;
        species.check_stability(cell_size)?;
        let n = width * height;
        Ok(Field {
            rate: species.diffusivity / (cell_size * cell_size),
            species,
            width,
            height,
            conc: vec![0.0; n],
            scratch: vec![0.0; n],
        })
    }

    /// One diffusion and decay update, with no emission.
    pub fn diffuse(&mut self) {
        diffuse(self);
    }

    pub fn species(&self) -> &ChemicalSpecies {
        &self.species
    }

    pub fn conc(&self) -> &[f64] {
        &self.conc
    }

    pub fn conc_mut(&mut self) -> &mut [f64] {
        &mut self.conc
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn total_mass(&self) -> f64 {
        self.conc.iter().sum()
    }

    /// Adds one step of emission at each listed cell.
    pub fn emit_at(&mut self, cells: &[usize]) {
        let e = self.species.emission;
        for &i in cells {
            self.conc[i] += e;
        }
    }

    fn check_aligned(&self, arena: &Arena) -> Result<(), ChemistryError> {
        if self.width != arena.width() || self.height != arena.height() {
            return Err(ChemistryError::Misaligned {
                field: (self.width, self.height),
                arena: (arena.width(), arena.height()),
            });
        }
        Ok(())
    }
}

/// Pad cells whose label resolves to `species`.
pub fn source_cells(
    species: &str,
    assignment: &InputAssignment,
    labels: &LabelMap,
    arena: &Arena,
) -> Vec<usize> {
    arena
        .cells()
        .iter()
        .enumerate()
        .filter_map(|(i, cell)| match cell {
            CellClass::SourcePad(zone) => {
                (labels.resolve(assignment.label(*zone)) == Some(species)).then_some(i)
            }
            _ => None,
        })
        .collect()
}

/// Adds one step of emission at every pad cell whose label resolves to this
/// field's species.
pub fn emit_sources(
    field: &mut Field,
    assignment: &InputAssignment,
    labels: &LabelMap,
    arena: &Arena,
) -> Result<(), ChemistryError> {
    field.check_aligned(arena)?;
    let cells = source_cells(&field.species.name, assignment, labels, arena);
    field.emit_at(&cells);
    Ok(())
}

/// One explicit step:
/// `c' = (1 - decay) * (c + D/h^2 * lap(c))` with reflecting edges.
///
/// The update is double buffered and neighbour sums are formed as
/// `(west + east) + (north + south)`, so a left-right symmetric state stays
/// bit-exactly symmetric.
pub fn step_field(field: &mut Field, arena: &Arena) -> Result<(), ChemistryError> {
    field.check_aligned(arena)?;
    diffuse(field);
    Ok(())
}

pub(crate) fn diffuse(field: &mut Field) {
    let (w, h) = (field.width, field.height);
    let r = field.rate;
    let keep = 1.0 - field.species.decay;
    let c = &field.conc;
    let out = &mut field.scratch;
    let cell = |ci: f64, west: f64, east: f64, north: f64, south: f64| {
        keep * (ci + r * ((west + east) + (north + south) - 4.0 * ci))
    };
    for y in 0..h {
        let row = y * w;
        let cur = &c[row..row + w];
        let up = if y > 0 { &c[row - w..row] } else { cur };
        let down = if y + 1 < h { &c[row + w..row + 2 * w] } else { cur };
        let dst = &mut out[row..row + w];
        if w == 1 {
            dst[0] = cell(cur[0], cur[0], cur[0], up[0], down[0]);
            continue;
        }
        dst[0] = cell(cur[0], cur[0], cur[1], up[0], down[0]);
        let last = w - 1;
        dst[last] = cell(cur[last], cur[last - 1], cur[last], up[last], down[last]);
        // Interior cells, written branch-free so the loop vectorises.
        let inner = &mut dst[1..last];
        let n = inner.len();
        let (west, mid, east) = (&cur[..n], &cur[1..n + 1], &cur[2..n + 2]);
        let (north, south) = (&up[1..n + 1], &down[1..n + 1]);
        for x in 0..n {
            inner[x] = cell(mid[x], west[x], east[x], north[x], south[x]);
        }
    }
    std::mem::swap(&mut field.conc, &mut field.scratch);
}

/// Signed stimulus `sum_i weight_i * conc_i(pos)`.
pub fn stimulus(fields: &[Field], pos: usize) -> f64 {
    fields
        .iter()
        .map(|f| f.species.weight * f.conc[pos])
        .sum()
}

/// Stimulus evaluated over the whole grid, refreshed once per step so that
/// agents do a single lookup per sensor.
#[derive(Debug, Clone, Default)]
pub struct StimulusMap {
    values: Vec<f64>,
}

impl StimulusMap {
    pub fn zeros(len: usize) -> Self {
        StimulusMap {
            values: vec![0.0; len],
        }
    }

    pub fn from_fields(fields: &[Field], len: usize) -> Self {
        let mut m = Self::zeros(len);
        m.refresh(fields);
        m
    }

    pub fn refresh(&mut self, fields: &[Field]) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
        for f in fields {
            let w = f.species.weight;
            for (v, &c) in self.values.iter_mut().zip(&f.conc) {
                *v += w * c;
            }
        }
    }

    #[inline]
    pub fn at(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// Fields for every species that at least one pad emits, in table order.
pub fn fields_for_inputs(
    table: &SpeciesTable,
    assignment: &InputAssignment,
    labels: &LabelMap,
    arena: &Arena,
) -> Result<Vec<Field>, ChemistryError> {
    let mut out = Vec::new();
    for s in table.iter() {
        let used = assignment
            .0
            .values()
            .any(|l| labels.resolve(l) == Some(s.name.as_str()));
        if used {
            out.push(Field::new(s.clone(), arena)?);
        }
    }
    for label in assignment.0.values() {
        if let Some(name) = labels.resolve(label) {
            if table.get(name).is_none() {
                return Err(ChemistryError::UnknownSpecies(name.to_string()));
            }
        }
    }
    Ok(out)
}
