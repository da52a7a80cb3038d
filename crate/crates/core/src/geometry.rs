//! Discrete arenas: T junctions cut from agar, the compound junction, the
//! open dish and a straight test channel.
//!
//! Coordinates are cell indices with `x` growing to the right and `y`
//! growing downward, so "up the input channel" means decreasing `y`. The
//! grid edge is a sealed wall; everything not cut out as channel is
//! [`CellClass::Void`].

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Side of a filter-paper pad, in millimetres.
pub const PAD_SIZE_MM: f64 = 10.0;
/// Length of the inoculation block along the input channel, in millimetres.
pub const INOCULUM_LENGTH_MM: f64 = 10.0;
/// Vapour margin left around cut channels.
pub const MARGIN_MM: f64 = 5.0;
/// Distance between the dish rim and the centre of each compass pad.
pub const PAD_RIM_INSET_MM: f64 = 10.0;

/// Named regions of an arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ZoneId {
    Inoculation,
    OutL,
    OutR,
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    N,
    S,
    E,
    W,
}

impl ZoneId {
    pub const COMPOUND_PADS: [ZoneId; 6] = [
        ZoneId::C1,
        ZoneId::C2,
        ZoneId::C3,
        ZoneId::C4,
        ZoneId::C5,
        ZoneId::C6,
    ];
    pub const COMPASS: [ZoneId; 4] = [ZoneId::N, ZoneId::S, ZoneId::E, ZoneId::W];

    /// Character used for this zone in text dumps.
    pub fn letter(self) -> char {
        match self {
            ZoneId::Inoculation => 'P',
            ZoneId::OutL => 'L',
            ZoneId::OutR => 'R',
            ZoneId::C1 => '1',
            ZoneId::C2 => '2',
            ZoneId::C3 => '3',
            ZoneId::C4 => '4',
            ZoneId::C5 => '5',
            ZoneId::C6 => '6',
            ZoneId::N => 'N',
            ZoneId::S => 'S',
            ZoneId::E => 'E',
            ZoneId::W => 'W',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ZoneId::Inoculation => "Inoculation",
            ZoneId::OutL => "OutL",
            ZoneId::OutR => "OutR",
            ZoneId::C1 => "C1",
            ZoneId::C2 => "C2",
            ZoneId::C3 => "C3",
            ZoneId::C4 => "C4",
            ZoneId::C5 => "C5",
            ZoneId::C6 => "C6",
            ZoneId::N => "N",
            ZoneId::S => "S",
            ZoneId::E => "E",
            ZoneId::W => "W",
        }
    }

    /// The zone seen in a left-right mirror of the arena.
    pub fn mirrored(self) -> ZoneId {
        match self {
            ZoneId::OutL => ZoneId::OutR,
            ZoneId::OutR => ZoneId::OutL,
            ZoneId::C1 => ZoneId::C4,
            ZoneId::C4 => ZoneId::C1,
            ZoneId::C2 => ZoneId::C3,
            ZoneId::C3 => ZoneId::C2,
            ZoneId::C5 => ZoneId::C6,
            ZoneId::C6 => ZoneId::C5,
            ZoneId::E => ZoneId::W,
            ZoneId::W => ZoneId::E,
            other => other,
        }
    }
}

impl fmt::Display for ZoneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ZoneId {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let zone = match s {
            "Inoculation" | "P" => ZoneId::Inoculation,
            "OutL" | "L" => ZoneId::OutL,
            "OutR" | "R" => ZoneId::OutR,
            "C1" => ZoneId::C1,
            "C2" => ZoneId::C2,
            "C3" => ZoneId::C3,
            "C4" => ZoneId::C4,
            "C5" => ZoneId::C5,
            "C6" => ZoneId::C6,
            "N" => ZoneId::N,
            "S" => ZoneId::S,
            "E" => ZoneId::E,
            "W" => ZoneId::W,
            _ => return Err(GeometryError::UnknownZone(s.to_string())),
        };
        Ok(zone)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellClass {
    Agar,
    Void,
    SourcePad(ZoneId),
}

impl CellClass {
    /// Pads sit on the substrate, so agents may stand on them.
    #[inline]
    pub fn is_traversable(self) -> bool {
        !matches!(self, CellClass::Void)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArenaKind {
    TJunction,
    CompoundT,
    OpenDish,
    Channel,
}

/// Half-open cell rectangle `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl Rect {
    pub fn new(x0: usize, y0: usize, x1: usize, y1: usize) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn is_empty(&self) -> bool {
        self.x0 >= self.x1 || self.y0 >= self.y1
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x0 < other.x1 && other.x0 < self.x1 && self.y0 < other.y1 && other.y0 < self.y1
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.y0..self.y1).flat_map(move |y| (self.x0..self.x1).map(move |x| (x, y)))
    }
}

/// The stretch of the input channel between the inoculation block and the
/// junction. Distances along it are measured upward from `base_row`, the
/// row just past the inoculation block's far edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputChannel {
    pub rect: Rect,
    pub toward_negative_y: bool,
}

impl InputChannel {
    /// Along-channel distance in cells of row/column `coord`, counted so the
    /// first channel cell past the inoculum is 1.
    fn cells_from_inoculum(&self, x: usize, y: usize) -> Option<usize> {
        if !self.rect.contains(x, y) {
            return None;
        }
        Some(if self.toward_negative_y {
            self.rect.y1 - y
        } else {
            x + 1 - self.rect.x0
        })
    }
}

#[derive(Debug, Clone)]
pub struct Arena {
    width: usize,
    height: usize,
    cell_size: f64,
    kind: ArenaKind,
    cells: Vec<CellClass>,
    zones: BTreeMap<ZoneId, Vec<usize>>,
    input_channel: Option<InputChannel>,
}

impl Arena {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Millimetres per cell edge.
    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn kind(&self) -> ArenaKind {
        self.kind
    }

    pub fn cells(&self) -> &[CellClass] {
        &self.cells
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.width, idx / self.width)
    }

    #[inline]
    pub fn cell(&self, x: usize, y: usize) -> CellClass {
        self.cells[y * self.width + x]
    }

    #[inline]
    pub fn is_traversable(&self, idx: usize) -> bool {
        self.cells[idx].is_traversable()
    }

    pub fn zones(&self) -> &BTreeMap<ZoneId, Vec<usize>> {
        &self.zones
    }

    pub fn zone(&self, id: ZoneId) -> Option<&[usize]> {
        self.zones.get(&id).map(Vec::as_slice)
    }

    /// Source-pad zones in canonical order.
    pub fn pads(&self) -> Vec<ZoneId> {
        self.zones
            .keys()
            .copied()
            .filter(|z| *z != ZoneId::Inoculation)
            .collect()
    }

    pub fn input_channel(&self) -> Option<&InputChannel> {
        self.input_channel.as_ref()
    }

    /// Along-channel distance (mm) of a cell inside the input channel.
    pub fn channel_distance(&self, idx: usize) -> Option<f64> {
        let (x, y) = self.coords(idx);
        self.input_channel
            .as_ref()
            .and_then(|ch| ch.cells_from_inoculum(x, y))
            .map(|n| n as f64 * self.cell_size)
    }

    /// Centre of a zone's bounding box in millimetres.
    pub fn zone_center(&self, id: ZoneId) -> Option<(f64, f64)> {
        let cells = self.zones.get(&id)?;
        let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
        for &idx in cells {
            let (x, y) = self.coords(idx);
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x + 1);
            y1 = y1.max(y + 1);
        }
        Some((
            0.5 * (x0 + x1) as f64 * self.cell_size,
            0.5 * (y0 + y1) as f64 * self.cell_size,
        ))
    }

    pub fn neighbors4(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let (x, y) = self.coords(idx);
        let w = self.width;
        let h = self.height;
        [
            (x > 0).then(|| idx - 1),
            (x + 1 < w).then(|| idx + 1),
            (y > 0).then(|| idx - w),
            (y + 1 < h).then(|| idx + w),
        ]
        .into_iter()
        .flatten()
    }

    /// Traversable cells 4-connected to `start` (breadth first).
    pub fn flood_traversable(&self, start: &[usize]) -> Vec<bool> {
        flood(self, start, |i| self.is_traversable(i))
    }

    /// In-dish traversable cells with at least one Void 4-neighbour or a
    /// grid edge.
    pub fn rim_cells(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.is_traversable(i))
            .filter(|&i| {
                let (x, y) = self.coords(i);
                x == 0
                    || y == 0
                    || x + 1 == self.width
                    || y + 1 == self.height
                    || self.neighbors4(i).any(|j| !self.is_traversable(j))
            })
            .collect()
    }

    /// Plain-text grid: `#` Void, `.` Agar, zone letters for pads and the
    /// inoculation block. One row per line.
    pub fn to_text(&self) -> String {
        let mut inoc = vec![false; self.len()];
        if let Some(cells) = self.zones.get(&ZoneId::Inoculation) {
            for &i in cells {
                inoc[i] = true;
            }
        }
        let mut out = String::with_capacity(self.len() + self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                let i = self.index(x, y);
                let c = match self.cells[i] {
                    CellClass::Void => '#',
                    CellClass::SourcePad(z) => z.letter(),
                    CellClass::Agar if inoc[i] => ZoneId::Inoculation.letter(),
                    CellClass::Agar => '.',
                };
                out.push(c);
            }
            out.push('\n');
        }
        out
    }

    /// Left-right reflection with zone labels swapped accordingly.
    pub fn mirrored(&self) -> Arena {
        let w = self.width;
        let mut cells = self.cells.clone();
        for y in 0..self.height {
            for x in 0..w {
                cells[y * w + x] = match self.cells[y * w + (w - 1 - x)] {
                    CellClass::SourcePad(z) => CellClass::SourcePad(z.mirrored()),
                    c => c,
                };
            }
        }
        let zones = self
            .zones
            .iter()
            .map(|(z, idxs)| {
                let mut m: Vec<usize> = idxs
                    .iter()
                    .map(|&i| {
                        let (x, y) = self.coords(i);
                        y * w + (w - 1 - x)
                    })
                    .collect();
                m.sort_unstable();
                (z.mirrored(), m)
            })
            .collect();
        let input_channel = self.input_channel.map(|ch| InputChannel {
            rect: Rect::new(w - ch.rect.x1, ch.rect.y0, w - ch.rect.x0, ch.rect.y1),
            toward_negative_y: ch.toward_negative_y,
        });
        Arena {
            width: w,
            height: self.height,
            cell_size: self.cell_size,
            kind: self.kind,
            cells,
            zones,
            input_channel,
        }
    }

    fn check_invariants(&self) -> Result<(), GeometryError> {
        for (zone, cells) in &self.zones {
            if cells.is_empty() {
                return Err(GeometryError::Dimension(format!("zone {zone} is empty")));
            }
            if cells.iter().any(|&i| i >= self.len()) {
                return Err(GeometryError::Dimension(format!(
                    "zone {zone} lies outside the grid"
                )));
            }
        }
        if let Some(cells) = self.zones.get(&ZoneId::Inoculation) {
            if cells.iter().any(|&i| self.cells[i] != CellClass::Agar) {
                return Err(GeometryError::Dimension(
                    "inoculation zone overlaps a pad or void".into(),
                ));
            }
        } else {
            return Err(GeometryError::Dimension("no inoculation zone".into()));
        }
        Ok(())
    }
}

pub(crate) fn flood(arena: &Arena, start: &[usize], pass: impl Fn(usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; arena.len()];
    let mut queue = VecDeque::new();
    for &s in start {
        if pass(s) && !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(i) = queue.pop_front() {
        for j in arena.neighbors4(i) {
            if !seen[j] && pass(j) {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen
}

/// Snap a physical length to whole cells.
fn to_cells(mm: f64, cell_size: f64, what: &str) -> Result<usize, GeometryError> {
    if !mm.is_finite() || mm <= 0.0 {
        return Err(GeometryError::Dimension(format!("{what} must be positive")));
    }
    let n = (mm / cell_size).round();
    if n < 1.0 {
        return Err(GeometryError::Dimension(format!(
            "{what} of {mm} mm is smaller than one cell"
        )));
    }
    Ok(n as usize)
}

fn check_cell_size(cell_size: f64) -> Result<(), GeometryError> {
    if !cell_size.is_finite() || cell_size <= 0.0 {
        return Err(GeometryError::Dimension("cell_size must be positive".into()));
    }
    Ok(())
}

/// Paints rectangles onto a Void grid and rejects overlapping pads.
struct Painter {
    width: usize,
    height: usize,
    cells: Vec<CellClass>,
    zones: BTreeMap<ZoneId, Vec<usize>>,
}

impl Painter {
    fn new(width: usize, height: usize) -> Self {
        Painter {
            width,
            height,
            cells: vec![CellClass::Void; width * height],
            zones: BTreeMap::new(),
        }
    }

    fn check_bounds(&self, r: &Rect, what: &str) -> Result<(), GeometryError> {
        if r.is_empty() || r.x1 > self.width || r.y1 > self.height {
            return Err(GeometryError::Dimension(format!(
                "{what} does not fit inside the arena"
            )));
        }
        Ok(())
    }

    fn channel(&mut self, r: Rect) -> Result<(), GeometryError> {
        self.check_bounds(&r, "channel")?;
        for (x, y) in r.cells() {
            let c = &mut self.cells[y * self.width + x];
            if *c == CellClass::Void {
                *c = CellClass::Agar;
            }
        }
        Ok(())
    }

    fn pad(&mut self, zone: ZoneId, r: Rect) -> Result<(), GeometryError> {
        self.check_bounds(&r, zone.name())?;
        let mut idxs = Vec::with_capacity((r.x1 - r.x0) * (r.y1 - r.y0));
        for (x, y) in r.cells() {
            let i = y * self.width + x;
            if let CellClass::SourcePad(other) = self.cells[i] {
                return Err(GeometryError::Overlap(format!("pads {other} and {zone}")));
            }
            self.cells[i] = CellClass::SourcePad(zone);
            idxs.push(i);
        }
        idxs.sort_unstable();
        self.zones.insert(zone, idxs);
        Ok(())
    }

    fn inoculation(&mut self, r: Rect) -> Result<(), GeometryError> {
        self.check_bounds(&r, "inoculation zone")?;
        let mut idxs = Vec::new();
        for (x, y) in r.cells() {
            let i = y * self.width + x;
            if matches!(self.cells[i], CellClass::SourcePad(_)) {
                return Err(GeometryError::Overlap("inoculation zone overlaps a pad".into()));
            }
            self.cells[i] = CellClass::Agar;
            idxs.push(i);
        }
        idxs.sort_unstable();
        self.zones.insert(ZoneId::Inoculation, idxs);
        Ok(())
    }

    fn finish(
        self,
        cell_size: f64,
        kind: ArenaKind,
        input_channel: Option<InputChannel>,
    ) -> Result<Arena, GeometryError> {
        let arena = Arena {
            width: self.width,
            height: self.height,
            cell_size,
            kind,
            cells: self.cells,
            zones: self.zones,
            input_channel,
        };
        arena.check_invariants()?;
        Ok(arena)
    }
}

/// Start offset that centres a block of `inner` cells on a band of `outer`
/// cells starting at `start`. May move left of `start` when `inner > outer`.
fn centred(start: usize, outer: usize, inner: usize) -> usize {
    (start + outer / 2).saturating_sub(inner / 2)
}

/// Simple T: a vertical input channel with the inoculation block at its
/// base, meeting a horizontal bar whose two arms end in the OutL and OutR
/// pads.
pub fn build_t_junction(
    cell_size: f64,
    arm_length: f64,
    channel_width: f64,
) -> Result<Arena, GeometryError> {
    check_cell_size(cell_size)?;
    let arm = to_cells(arm_length, cell_size, "arm_length")?;
    let cw = to_cells(channel_width, cell_size, "channel_width")?;
    let pad = to_cells(PAD_SIZE_MM, cell_size, "pad")?;
    let inoc = to_cells(INOCULUM_LENGTH_MM, cell_size, "inoculum")?;
    let margin = (MARGIN_MM / cell_size).round() as usize;
    if arm < 2 * cw {
        return Err(GeometryError::Dimension(format!(
            "arm_length {arm_length} mm is shorter than twice the channel width"
        )));
    }

    let overhang = pad.saturating_sub(cw).div_ceil(2);
    let bar_y = margin + overhang;
    let stem_x = margin + pad + arm;
    let width = 2 * margin + 2 * pad + 2 * arm + cw;
    let inoc_y = bar_y + cw + arm;
    let height = (inoc_y + inoc).max(centred(bar_y, cw, pad) + pad) + margin;

    let mut p = Painter::new(width, height);
    p.channel(Rect::new(margin + pad, bar_y, width - margin - pad, bar_y + cw))?;
    p.channel(Rect::new(stem_x, bar_y + cw, stem_x + cw, inoc_y))?;
    p.inoculation(Rect::new(stem_x, inoc_y, stem_x + cw, inoc_y + inoc))?;
    let pad_y = centred(bar_y, cw, pad);
    p.pad(ZoneId::OutL, Rect::new(margin, pad_y, margin + pad, pad_y + pad))?;
    p.pad(
        ZoneId::OutR,
        Rect::new(width - margin - pad, pad_y, width - margin, pad_y + pad),
    )?;
    let channel = InputChannel {
        rect: Rect::new(stem_x, bar_y + cw, stem_x + cw, inoc_y),
        toward_negative_y: true,
    };
    p.finish(cell_size, ArenaKind::TJunction, Some(channel))
}

/// Compound T: the simple T with a replicate T at the end of each
/// horizontal arm. Each secondary T runs vertically; its upper and lower
/// arms end in C1/C2 (left) and C4/C3 (right), and the central inputs C5
/// and C6 sit on the outer side of each secondary junction.
pub fn build_compound_t(
    cell_size: f64,
    arm_length: f64,
    channel_width: f64,
) -> Result<Arena, GeometryError> {
    check_cell_size(cell_size)?;
    let arm = to_cells(arm_length, cell_size, "arm_length")?;
    let cw = to_cells(channel_width, cell_size, "channel_width")?;
    let pad = to_cells(PAD_SIZE_MM, cell_size, "pad")?;
    let inoc = to_cells(INOCULUM_LENGTH_MM, cell_size, "inoculum")?;
    let margin = (MARGIN_MM / cell_size).round() as usize;
    if arm < 2 * cw {
        return Err(GeometryError::Dimension(format!(
            "arm_length {arm_length} mm is shorter than twice the channel width"
        )));
    }

    // Left secondary bar starts after the C5 pad.
    let sec_l = margin + pad;
    let stem_x = sec_l + cw + arm;
    let sec_r = stem_x + cw + arm;
    let width = sec_r + cw + pad + margin;
    let bar_y = margin + pad + arm;
    let sec_top = bar_y - arm;
    let sec_bot = bar_y + cw + arm;
    let inoc_y = bar_y + cw + arm;
    let height = (sec_bot + pad).max(inoc_y + inoc) + margin;

    // Secondary Ts, including their pads, must stay clear of each other and
    // of the input stem.
    let pad_x_l = centred(sec_l, cw, pad);
    // The right pads mirror the left ones so odd widths stay symmetric.
    let pad_x_r = width - pad_x_l - pad;
    let left_box = Rect::new(pad_x_l.min(sec_l - pad), sec_top - pad, pad_x_l + pad, sec_bot + pad);
    let right_box = Rect::new(pad_x_r, sec_top - pad, (pad_x_r + pad).max(sec_r + cw + pad), sec_bot + pad);
    let stem = Rect::new(stem_x, bar_y + cw, stem_x + cw, inoc_y + inoc);
    if left_box.intersects(&right_box) {
        return Err(GeometryError::Overlap("secondary junctions overlap".into()));
    }
    if left_box.intersects(&stem) || right_box.intersects(&stem) {
        return Err(GeometryError::Overlap(
            "secondary junction overlaps the input channel".into(),
        ));
    }

    let mut p = Painter::new(width, height);
    p.channel(Rect::new(sec_l, bar_y, sec_r + cw, bar_y + cw))?;
    p.channel(Rect::new(sec_l, sec_top, sec_l + cw, sec_bot))?;
    p.channel(Rect::new(sec_r, sec_top, sec_r + cw, sec_bot))?;
    p.channel(Rect::new(stem_x, bar_y + cw, stem_x + cw, inoc_y))?;
    p.inoculation(Rect::new(stem_x, inoc_y, stem_x + cw, inoc_y + inoc))?;
    let mid_y = centred(bar_y, cw, pad);
    p.pad(ZoneId::C1, Rect::new(pad_x_l, sec_top - pad, pad_x_l + pad, sec_top))?;
    p.pad(ZoneId::C2, Rect::new(pad_x_l, sec_bot, pad_x_l + pad, sec_bot + pad))?;
    p.pad(ZoneId::C3, Rect::new(pad_x_r, sec_bot, pad_x_r + pad, sec_bot + pad))?;
    p.pad(ZoneId::C4, Rect::new(pad_x_r, sec_top - pad, pad_x_r + pad, sec_top))?;
    p.pad(ZoneId::C5, Rect::new(sec_l - pad, mid_y, sec_l, mid_y + pad))?;
    p.pad(ZoneId::C6, Rect::new(sec_r + cw, mid_y, sec_r + cw + pad, mid_y + pad))?;
    let channel = InputChannel {
        rect: Rect::new(stem_x, bar_y + cw, stem_x + cw, inoc_y),
        toward_negative_y: true,
    };
    p.finish(cell_size, ArenaKind::CompoundT, Some(channel))
}

/// Open Petri dish: every cell inside the disc is agar, the inoculum sits at
/// the centre and each requested compass pad is centred
/// [`PAD_RIM_INSET_MM`] inside the rim.
pub fn build_open_dish(
    cell_size: f64,
    diameter: f64,
    pads: &[ZoneId],
) -> Result<Arena, GeometryError> {
    check_cell_size(cell_size)?;
    let pad = to_cells(PAD_SIZE_MM, cell_size, "pad")?;
    let inoc = to_cells(INOCULUM_LENGTH_MM, cell_size, "inoculum")?;
    // Centred blocks are only symmetric when the grid shares their parity.
    let mut d = to_cells(diameter, cell_size, "diameter")?;
    if d % 2 != pad % 2 {
        d += 1;
    }
    let inset = (diameter / 2.0 - PAD_RIM_INSET_MM) / cell_size;
    if inset <= 0.0 {
        return Err(GeometryError::Dimension(
            "dish too small to hold pads inside the rim".into(),
        ));
    }
    let offset = inset.round() as isize;
    let r = d as f64 / 2.0;
    let mut p = Painter::new(d, d);
    for y in 0..d {
        for x in 0..d {
            let dx = x as f64 + 0.5 - r;
            let dy = y as f64 + 0.5 - r;
            if dx * dx + dy * dy <= r * r {
                p.cells[y * d + x] = CellClass::Agar;
            }
        }
    }
    let c0 = (d / 2).saturating_sub(inoc / 2);
    let centre = Rect::new(c0, c0, c0 + inoc, c0 + inoc);
    let mid = (d / 2) as isize;
    for &zone in pads {
        let (cx, cy) = match zone {
            ZoneId::N => (mid, mid - offset),
            ZoneId::S => (mid, mid + offset),
            ZoneId::E => (mid + offset, mid),
            ZoneId::W => (mid - offset, mid),
            other => {
                return Err(GeometryError::Dimension(format!(
                    "{other} is not a compass pad"
                )))
            }
        };
        let half = (pad / 2) as isize;
        let (x0, y0) = (cx - half, cy - half);
        if x0 < 0 || y0 < 0 {
            return Err(GeometryError::Dimension(format!("pad {zone} outside dish")));
        }
        let (x0, y0) = (x0 as usize, y0 as usize);
        let rect = Rect::new(x0, y0, x0 + pad, y0 + pad);
        if rect.intersects(&centre) {
            return Err(GeometryError::Overlap(format!(
                "pad {zone} overlaps the inoculation zone"
            )));
        }
        p.pad(zone, rect)?;
    }
    p.inoculation(centre)?;
    p.finish(cell_size, ArenaKind::OpenDish, None)
}

/// Straight horizontal channel of `length` x `width` mm. The inoculum sits
/// at the left end (or centred when `centred_inoculum`), and an OutR pad
/// closes the right end; a centred inoculum also gets an OutL pad on the
/// left end.
pub fn build_straight_channel(
    cell_size: f64,
    length: f64,
    width: f64,
    centred_inoculum: bool,
) -> Result<Arena, GeometryError> {
    check_cell_size(cell_size)?;
    let len = to_cells(length, cell_size, "length")?;
    let cw = to_cells(width, cell_size, "width")?;
    let pad = to_cells(PAD_SIZE_MM, cell_size, "pad")?;
    let inoc = to_cells(INOCULUM_LENGTH_MM, cell_size, "inoculum")?;
    let margin = (MARGIN_MM / cell_size).round() as usize;
    if inoc >= len {
        return Err(GeometryError::Dimension(
            "channel shorter than the inoculum".into(),
        ));
    }
    let overhang = pad.saturating_sub(cw).div_ceil(2);
    let y0 = margin + overhang;
    let left_pad = if centred_inoculum { pad } else { 0 };
    let x0 = margin + left_pad;
    let gw = x0 + len + pad + margin;
    let gh = (y0 + cw).max(centred(y0, cw, pad) + pad) + margin;
    let mut p = Painter::new(gw, gh);
    p.channel(Rect::new(x0, y0, x0 + len, y0 + cw))?;
    let ix = if centred_inoculum { x0 + (len - inoc) / 2 } else { x0 };
    p.inoculation(Rect::new(ix, y0, ix + inoc, y0 + cw))?;
    let py = centred(y0, cw, pad);
    p.pad(ZoneId::OutR, Rect::new(x0 + len, py, x0 + len + pad, py + pad))?;
    if centred_inoculum {
        p.pad(ZoneId::OutL, Rect::new(margin, py, margin + pad, py + pad))?;
    }
    let channel = InputChannel {
        rect: Rect::new(ix + inoc, y0, x0 + len, y0 + cw),
        toward_negative_y: false,
    };
    p.finish(cell_size, ArenaKind::Channel, Some(channel))
}
