//! Exact and near-exact properties of the vapour field update.

use physarum_core::chemistry::{ChemicalSpecies, Field, InputAssignment, FARNESENE};
use physarum_core::experiments::{ArenaSpec, TrialConfig, DEFAULT_CHEM_SUBSTEPS, DEFAULT_STEPS};
use physarum_core::geometry::{build_straight_channel, build_t_junction, ZoneId};
use physarum_core::chemistry::{source_cells, LabelMap};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn species(diffusivity: f64, decay: f64, emission: f64) -> ChemicalSpecies {
    ChemicalSpecies {
        name: "test".into(),
        weight: 1.0,
        diffusivity,
        decay,
        emission,
    }
}

fn random_field(w: usize, h: usize, d: f64, decay: f64, seed: u64) -> Field {
    let mut f = Field::on_grid(species(d, decay, 0.0), w, h, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    f.conc_mut().iter_mut().for_each(|c| *c = rng.gen::<f64>());
    f
}

#[test]
fn mass_is_conserved_without_decay() {
    let mut f = random_field(37, 23, 0.25, 0.0, 1);
    let mut prev = f.total_mass();
    for _ in 0..10_000 {
        f.diffuse();
        let m = f.total_mass();
        assert!(((m - prev) / prev).abs() <= 1e-9, "mass drifted {prev} -> {m}");
        prev = m;
    }
}

#[test]
fn decayed_mass_follows_closed_form() {
    let decay = 3.0e-3;
    let mut f = random_field(30, 20, 0.2, decay, 2);
    let m0 = f.total_mass();
    for n in 1..=2000 {
        f.diffuse();
        let expected = m0 * (1.0 - decay).powi(n);
        let rel = ((f.total_mass() - expected) / expected).abs();
        assert!(rel <= 1e-9, "step {n}: relative error {rel}");
    }
}

/// Dense 2-D convolution of `a` (size `na` square) with `b` (size `nb`
/// square), returning a square of size `na + nb - 1`.
fn convolve(a: &[f64], na: usize, b: &[f64], nb: usize) -> Vec<f64> {
    let n = na + nb - 1;
    let mut out = vec![0.0; n * n];
    for ay in 0..na {
        for ax in 0..na {
            let av = a[ay * na + ax];
            if av == 0.0 {
                continue;
            }
            for by in 0..nb {
                for bx in 0..nb {
                    out[(ay + by) * n + ax + bx] += av * b[by * nb + bx];
                }
            }
        }
    }
    out
}

#[test]
fn impulse_response_matches_convolution_oracle() {
    let (d, decay) = (0.2, 1.0e-3);
    let size = 21;
    let centre = size / 2;
    let keep = 1.0 - decay;
    let kernel = [
        0.0,
        keep * d,
        0.0,
        keep * d,
        keep * (1.0 - 4.0 * d),
        keep * d,
        0.0,
        keep * d,
        0.0,
    ];
    let mut f = Field::on_grid(species(d, decay, 0.0), size, size, 1.0).unwrap();
    f.conc_mut()[centre * size + centre] = 1.0;
    let mut oracle = vec![1.0];
    let mut on = 1;
    // Ten steps keep the support inside the grid, so walls play no part.
    for _ in 0..centre {
        f.diffuse();
        oracle = convolve(&oracle, on, &kernel, 3);
        on += 2;
    }
    assert_eq!(on, size);
    for (i, (&got, &want)) in f.conc().iter().zip(&oracle).enumerate() {
        assert!(
            (got - want).abs() <= 1e-12,
            "cell {i}: got {got}, oracle {want}"
        );
    }
}

#[test]
fn symmetric_field_stays_bit_exact_under_mirroring() {
    let (w, h) = (31, 17);
    let mut f = random_field(w, h, 0.24, 2.0e-4, 3);
    for y in 0..h {
        for x in 0..w / 2 {
            let v = f.conc()[y * w + x];
            f.conc_mut()[y * w + (w - 1 - x)] = v;
        }
    }
    for _ in 0..500 {
        f.diffuse();
    }
    let c = f.conc();
    for y in 0..h {
        for x in 0..w {
            assert_eq!(
                c[y * w + x].to_bits(),
                c[y * w + (w - 1 - x)].to_bits(),
                "asymmetry at ({x}, {y})"
            );
        }
    }
}

#[test]
fn steady_gradient_is_monotone_along_a_dead_end_channel() {
    let arena = build_straight_channel(1.0, 40.0, 10.0, false).unwrap();
    let assignment = InputAssignment::neutral(&arena).with(ZoneId::OutR, "A");
    let labels = LabelMap::default();
    let cells = source_cells(FARNESENE, &assignment, &labels, &arena);
    assert!(!cells.is_empty());
    let mut f = Field::new(species(0.24, 2.0e-3, 0.01), &arena).unwrap();
    for _ in 0..20_000 {
        f.emit_at(&cells);
        f.diffuse();
    }
    let channel = arena.input_channel().unwrap().rect;
    let y = (channel.y0 + channel.y1) / 2;
    let row: Vec<f64> = (channel.x0..channel.x1)
        .map(|x| f.conc()[arena.index(x, y)])
        .collect();
    assert!(
        row.windows(2).all(|p| p[0] < p[1]),
        "profile not increasing toward the source: {row:?}"
    );
}

#[test]
fn default_transport_reaches_ten_percent_at_forty_mm_early() {
    let config = TrialConfig {
        inputs: InputAssignment::from_combo("AN").unwrap(),
        ..TrialConfig::default()
    };
    assert_eq!(config.arena, ArenaSpec::t_junction());
    let arena = build_t_junction(1.0, 40.0, 10.0).unwrap();
    let sp = config.species.get(FARNESENE).unwrap().clone();
    let cells = source_cells(FARNESENE, &config.inputs, &config.labels, &arena);
    let pad = arena.zone(ZoneId::OutL).unwrap();
    let (px1, py) = pad
        .iter()
        .map(|&i| arena.coords(i))
        .fold((0, 0), |(mx, sy), (x, y)| (mx.max(x), sy + y));
    let py = py / pad.len();
    let adjacent = arena.index(px1 + 1, py);
    let far = arena.index(px1 + 40, py);

    let per_step = DEFAULT_CHEM_SUBSTEPS;
    let budget = DEFAULT_STEPS / 5;
    let mut f = Field::new(sp.clone(), &arena).unwrap();
    let mut history = Vec::with_capacity(budget);
    for _ in 0..budget {
        for _ in 0..per_step {
            f.emit_at(&cells);
            f.diffuse();
        }
        history.push(f.conc()[far]);
    }
    // Run on to the steady state.
    let mut prev = f.conc()[adjacent];
    loop {
        for _ in 0..10_000 {
            f.emit_at(&cells);
            f.diffuse();
        }
        let now = f.conc()[adjacent];
        if (now - prev).abs() <= 1e-9 * now {
            break;
        }
        prev = now;
    }
    let target = 0.1 * f.conc()[adjacent];
    let reached = history.iter().position(|&c| c >= target);
    assert!(
        reached.is_some(),
        "40 mm point at {} after {budget} steps, target {target}",
        history.last().unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn field_stays_non_negative_and_bounded(
        w in 3usize..20,
        h in 3usize..20,
        d in 0.0f64..=0.25,
        decay in 0.0f64..0.1,
        seed in any::<u64>(),
        steps in 1usize..200,
    ) {
        let mut f = random_field(w, h, d, decay, seed);
        let max0 = f.conc().iter().cloned().fold(0.0, f64::max);
        let m0 = f.total_mass();
        for _ in 0..steps {
            f.diffuse();
        }
        prop_assert!(f.conc().iter().all(|&c| c >= 0.0 && c <= max0 * (1.0 + 1e-12)));
        prop_assert!(f.total_mass() <= m0 * (1.0 + 1e-12));
    }

    #[test]
    fn diffusion_is_linear(seed in any::<u64>(), a in -3.0f64..3.0) {
        let f1 = random_field(9, 7, 0.2, 0.01, seed);
        let f2 = random_field(9, 7, 0.2, 0.01, seed.wrapping_add(1));
        let mut sum = f1.clone();
        for (s, &v) in sum.conc_mut().iter_mut().zip(f2.conc()) {
            *s += a * v;
        }
        let (mut f1, mut f2) = (f1, f2);
        f1.diffuse();
        f2.diffuse();
        sum.diffuse();
        for ((&s, &x), &y) in sum.conc().iter().zip(f1.conc()).zip(f2.conc()) {
            prop_assert!((s - (x + a * y)).abs() <= 1e-12);
        }
    }
}
