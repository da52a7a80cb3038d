//! 8-bit binary PGM snapshots of the chemical fields, the trail and the
//! occupancy grid.
//!
//! Each frame is scaled linearly from its own minimum and maximum onto
//! `0..=255`; the mapping is written next to the image in a `.txt` sidecar
//! so the original values can be recovered.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::chemistry::Field;
use crate::plasmodium::PlasmodiumState;

pub const MAXVAL: u8 = 255;

/// Linear map used for one frame: `value = min + grey * scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameScale {
    pub min: f64,
    pub max: f64,
}

impl FrameScale {
    pub fn of(values: &[f64]) -> FrameScale {
        let (min, max) = values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        if min > max {
            FrameScale { min: 0.0, max: 0.0 }
        } else {
            FrameScale { min, max }
        }
    }

    /// Value units per grey level; zero for a flat frame.
    pub fn scale(&self) -> f64 {
        (self.max - self.min) / f64::from(MAXVAL)
    }

    pub fn grey(&self, v: f64) -> u8 {
        let span = self.max - self.min;
        if !(span > 0.0) || !v.is_finite() {
            return 0;
        }
        let g = ((v - self.min) / span * f64::from(MAXVAL)).round();
        g.clamp(0.0, f64::from(MAXVAL)) as u8
    }

    pub fn sidecar(&self) -> String {
        format!(
            "min {:e}\nmax {:e}\nscale {:e}\n",
            self.min,
            self.max,
            self.scale()
        )
    }
}

/// Encodes a row-major grid as a P5 image with maxval 255.
pub fn encode_pgm(values: &[f64], width: usize, height: usize) -> (Vec<u8>, FrameScale) {
    assert_eq!(values.len(), width * height, "grid size mismatch");
    let scale = FrameScale::of(values);
    let header = format!("P5\n{width} {height}\n{MAXVAL}\n");
    let mut out = Vec::with_capacity(header.len() + values.len());
    out.extend_from_slice(header.as_bytes());
    out.extend(values.iter().map(|&v| scale.grey(v)));
    (out, scale)
}

/// Turns a species name into something safe for a file name.
pub fn frame_label(name: &str) -> String {
    let mut s = String::with_capacity(name.len());
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            s.push(c.to_ascii_lowercase());
        } else if !s.ends_with('-') {
            s.push('-');
        }
    }
    s.trim_matches('-').to_string()
}

pub fn frame_name(label: &str, step: usize) -> String {
    format!("frame_{label}_{step:06}.pgm")
}

/// Writes frames into one directory, creating it on first use.
#[derive(Debug, Clone)]
pub struct FrameWriter {
    dir: PathBuf,
    created: bool,
}

impl FrameWriter {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FrameWriter {
            dir: dir.into(),
            created: false,
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes `frame_{label}_{step}.pgm` and its `.txt` sidecar; returns the
    /// image path.
    pub fn write(
        &mut self,
        label: &str,
        step: usize,
        values: &[f64],
        width: usize,
        height: usize,
    ) -> io::Result<PathBuf> {
        if !self.created {
            fs::create_dir_all(&self.dir)?;
            self.created = true;
        }
        let (bytes, scale) = encode_pgm(values, width, height);
        let path = self.dir.join(frame_name(label, step));
        fs::write(&path, bytes)?;
        fs::write(path.with_extension("txt"), scale.sidecar())?;
        Ok(path)
    }

    /// One frame per field, then the trail and the occupancy.
    pub fn write_snapshot(
        &mut self,
        step: usize,
        width: usize,
        height: usize,
        fields: &[Field],
        swarm: &PlasmodiumState,
        theta_occ: f64,
    ) -> io::Result<()> {
        for f in fields {
            self.write(&frame_label(&f.species().name), step, f.conc(), width, height)?;
        }
        self.write("trail", step, &swarm.trail, width, height)?;
        let occ: Vec<f64> = swarm
            .occupancy(theta_occ)
            .into_iter()
            .map(|o| if o { 1.0 } else { 0.0 })
            .collect();
        self.write("occupancy", step, &occ, width, height)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_pixels() {
        let (bytes, scale) = encode_pgm(&[0.0, 1.0, 2.0, 4.0], 2, 2);
        assert_eq!(&bytes[..11], b"P5\n2 2\n255\n");
        assert_eq!(&bytes[11..], &[0, 64, 128, 255]);
        assert_eq!(scale, FrameScale { min: 0.0, max: 4.0 });
        assert_eq!(scale.scale(), 4.0 / 255.0);
    }

    #[test]
    fn flat_frame_is_black() {
        let (bytes, scale) = encode_pgm(&[3.0; 6], 3, 2);
        assert!(bytes[11..].iter().all(|&b| b == 0));
        assert_eq!(scale.scale(), 0.0);
    }

    #[test]
    fn labels_and_names() {
        assert_eq!(frame_label("cis-3-hexenyl acetate"), "cis-3-hexenyl-acetate");
        assert_eq!(frame_label("Farnesene"), "farnesene");
        assert_eq!(frame_name("trail", 42), "frame_trail_000042.pgm");
    }

    #[test]
    fn writer_emits_image_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = FrameWriter::new(dir.path().join("frames"));
        let p = w.write("trail", 7, &[0.0, 0.5], 2, 1).unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"P5\n2 1\n255\n\x00\xff");
        let side = fs::read_to_string(p.with_extension("txt")).unwrap();
        assert!(side.contains("max 5e-1"), "{side}");
    }
}
