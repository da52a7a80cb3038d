//! Reading outcomes off a final occupancy grid.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::geometry::{flood, Arena, ArenaKind, ZoneId};

use super::mst::mst_length;

/// Default share of a pad's cells that must be occupied for its bit to be 1.
pub const DEFAULT_PAD_FRACTION: f64 = 0.10;
/// Default mean cord width used to turn network area into a length.
pub const DEFAULT_CORD_WIDTH_MM: f64 = 3.0;

/// One bit per pad.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutputVector(pub BTreeMap<ZoneId, bool>);

impl OutputVector {
    pub fn bit(&self, zone: ZoneId) -> bool {
        self.0.get(&zone).copied().unwrap_or(false)
    }

    pub fn left(&self) -> bool {
        self.bit(ZoneId::OutL)
    }

    pub fn right(&self) -> bool {
        self.bit(ZoneId::OutR)
    }

    pub fn set(&self) -> Vec<ZoneId> {
        self.0.iter().filter(|(_, &b)| b).map(|(z, _)| *z).collect()
    }

    pub fn any(&self) -> bool {
        self.0.values().any(|&b| b)
    }

    /// Bitwise OR, used by the any-time-reached variant.
    pub fn merge(&mut self, other: &OutputVector) {
        for (z, &b) in &other.0 {
            *self.0.entry(*z).or_insert(false) |= b;
        }
    }

    /// Compact form such as `C4=1 C6=1` listing every pad.
    pub fn describe(&self) -> String {
        self.0
            .iter()
            .map(|(z, &b)| format!("{z}={}", u8::from(b)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Suppressed,
    Left,
    Right,
    Split,
    /// Pads reached in arenas other than the simple T.
    Reached(Vec<ZoneId>),
}

impl Outcome {
    pub fn from_t_bits(left: bool, right: bool) -> Outcome {
        match (left, right) {
            (false, false) => Outcome::Suppressed,
            (true, false) => Outcome::Left,
            (false, true) => Outcome::Right,
            (true, true) => Outcome::Split,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Outcome::Suppressed => "Suppressed".into(),
            Outcome::Left => "Left".into(),
            Outcome::Right => "Right".into(),
            Outcome::Split => "Split".into(),
            Outcome::Reached(z) => z
                .iter()
                .map(|z| z.name())
                .collect::<Vec<_>>()
                .join("+"),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for Outcome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

/// Bit per pad: 1 iff at least `frac` of the pad's cells are occupied.
pub fn pad_bits(occupancy: &[bool], arena: &Arena, frac: f64) -> OutputVector {
    let mut bits = BTreeMap::new();
    for pad in arena.pads() {
        let cells = arena.zone(pad).unwrap_or(&[]);
        let hit = cells.iter().filter(|&&i| occupancy[i]).count();
        bits.insert(pad, hit as f64 >= frac * cells.len() as f64 && hit > 0);
    }
    OutputVector(bits)
}

/// Outcome at the output pads of a junction arena.
pub fn classify_t_outcome(
    occupancy: &[bool],
    arena: &Arena,
    frac: f64,
) -> Result<(OutputVector, Outcome), GeometryError> {
    let bits = pad_bits(occupancy, arena, frac);
    let outcome = match arena.kind() {
        ArenaKind::TJunction => Outcome::from_t_bits(bits.left(), bits.right()),
        ArenaKind::CompoundT => outcome_from_bits(&bits),
        _ => {
            return Err(GeometryError::WrongArena {
                expected: "junction",
            })
        }
    };
    Ok((bits, outcome))
}

pub(crate) fn outcome_from_bits(bits: &OutputVector) -> Outcome {
    let set = bits.set();
    if set.is_empty() {
        Outcome::Suppressed
    } else {
        Outcome::Reached(set)
    }
}

/// Furthest occupied input-channel cell, in mm past the inoculation block.
pub fn advancement_distance(occupancy: &[bool], arena: &Arena) -> Result<f64, GeometryError> {
    if arena.input_channel().is_none() {
        return Err(GeometryError::WrongArena {
            expected: "channel",
        });
    }
    Ok(occupancy
        .iter()
        .enumerate()
        .filter(|(_, &o)| o)
        .filter_map(|(i, _)| arena.channel_distance(i))
        .fold(0.0, f64::max))
}

/// True when any cell on the dish rim is occupied.
pub fn rim_reached(occupancy: &[bool], arena: &Arena) -> bool {
    arena.rim_cells().into_iter().any(|i| occupancy[i])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanningReport {
    pub pads_occupied: BTreeSet<ZoneId>,
    pub all_connected: bool,
    pub network_area: f64,
    pub effective_length: f64,
    pub mst_length: f64,
    /// `effective_length / mst_length`, absent when there is nothing to span.
    pub ratio: Option<f64>,
}

/// Compares the occupied network with the MST over the activator pads and
/// the inoculation point.
pub fn classify_spanning(
    occupancy: &[bool],
    arena: &Arena,
    pads_with_a: &BTreeSet<ZoneId>,
    frac: f64,
    cord_width: f64,
) -> Result<SpanningReport, GeometryError> {
    let bits = pad_bits(occupancy, arena, frac);
    let pads_occupied: BTreeSet<ZoneId> = bits.set().into_iter().collect();
    let inoc = arena
        .zone(ZoneId::Inoculation)
        .ok_or_else(|| GeometryError::MissingZone("Inoculation".into()))?;

    let component = flood(arena, inoc, |i| occupancy[i]);
    let all_connected = !pads_with_a.is_empty()
        && pads_with_a.iter().all(|z| {
            pads_occupied.contains(z)
                && arena
                    .zone(*z)
                    .is_some_and(|cells| cells.iter().any(|&i| component[i]))
        });

    let cell_area = arena.cell_size() * arena.cell_size();
    let network_area = occupancy.iter().filter(|&&o| o).count() as f64 * cell_area;
    let effective_length = network_area / cord_width;
    let mut points = Vec::new();
    points.push(arena.zone_center(ZoneId::Inoculation).expect("inoculation zone"));
    for z in pads_with_a {
        points.push(
            arena
                .zone_center(*z)
                .ok_or_else(|| GeometryError::MissingZone(z.name().into()))?,
        );
    }
    let mst = if points.len() >= 2 {
        mst_length(&points).unwrap_or(0.0)
    } else {
        0.0
    };
    let ratio = (mst > 0.0).then(|| effective_length / mst);
    Ok(SpanningReport {
        pads_occupied,
        all_connected,
        network_area,
        effective_length,
        mst_length: mst,
        ratio,
    })
}
