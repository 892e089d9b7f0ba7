//! Symmetric unequally spaced linear antenna arrays: layout model, array
//! factor, peak sidelobe level, and the optimizer-facing encoding.
//!
//! An array is a line of isotropic elements with uniform amplitude
//! excitation. The far-field array factor at angle `theta` (degrees off
//! broadside) is
//!
//! ```text
//! AF(theta) = | sum_i exp( j (2 pi x_i sin(theta) / lambda + phi_i) ) |
//! ```
//!
//! with element positions `x_i` and excitation phases `phi_i`. Layouts are
//! symmetric (`x_{-i} = -x_i`, `phi_{-i} = phi_i`), adjacent spacings are
//! restricted to `[0.5 lambda, lambda]` to limit mutual coupling and keep
//! grating lobes out, and phases lie in `[0, pi]`.
//!
//! The synthesis objective is the peak sidelobe level: the largest
//! magnitude ratio `AF(theta) / AF(theta0)` over the angular grid outside
//! the mainlobe, in dB (field convention, `20 log10`). The mainlobe extent
//! is found per layout by walking outward from `theta0` to the first local
//! minimum on each side; everything between (and including) those first
//! nulls is excluded.

use std::sync::Arc;

use thiserror::Error;

use crate::objectives::ObjectiveSpec;

/// Penalty value the synthesis objective returns for degenerate patterns
/// (boresight null or a mainlobe swallowing the whole grid); unreachable
/// for genomes inside the encoding box, but every in-bounds evaluation must
/// stay finite.
pub const DEGENERATE_PSLL_PENALTY: f64 = 1.0e3;

#[derive(Debug, Error)]
pub enum AntennaError {
    #[error("element count must be at least 2, got {0}")]
    InvalidElementCount(usize),
    #[error("genome length mismatch: expected {expected}, got {got}")]
    GenomeLength { expected: usize, got: usize },
    #[error("genome[{index}] = {value} outside [{low}, {high}]")]
    GenomeOutOfBounds {
        index: usize,
        value: f64,
        low: f64,
        high: f64,
    },
    #[error("invalid angle grid: {0}")]
    InvalidGrid(String),
    #[error("theta0 = {theta0} does not lie on the grid (step {step})")]
    Theta0OffGrid { theta0: f64, step: f64 },
    #[error("degenerate layout: array factor vanishes at theta0")]
    DegenerateLayout,
    #[error("mainlobe exclusion covers the whole grid; no sidelobe region left")]
    ExclusionCoversGrid,
    #[error("layout violates the symmetric-array model: {0}")]
    AsymmetricLayout(String),
}

/// A concrete array: positions in wavelength units (sorted ascending),
/// per-element phases in radians, and the wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayLayout {
    pub positions: Vec<f64>,
    pub phases: Vec<f64>,
    pub wavelength: f64,
}

impl ArrayLayout {
    pub fn new(positions: Vec<f64>, phases: Vec<f64>, wavelength: f64) -> ArrayLayout {
        debug_assert_eq!(positions.len(), phases.len());
        ArrayLayout {
            positions,
            phases,
            wavelength,
        }
    }

    pub fn element_count(&self) -> usize {
        self.positions.len()
    }

    /// Check the symmetric-array invariants: mirrored positions and phases,
    /// adjacent spacings within `[0.5 lambda, lambda]`, phases in `[0, pi]`.
    pub fn validate(&self) -> Result<(), AntennaError> {
        let n = self.positions.len();
        if n != self.phases.len() {
            return Err(AntennaError::AsymmetricLayout(format!(
                "{} positions vs {} phases",
                n,
                self.phases.len()
            )));
        }
        let lam = self.wavelength;
        let tol = 1e-9 * lam;
        for i in 0..n {
            let mirror = n - 1 - i;
            if (self.positions[i] + self.positions[mirror]).abs() > tol {
                return Err(AntennaError::AsymmetricLayout(format!(
                    "positions[{i}] and positions[{mirror}] are not mirrored"
                )));
            }
            if (self.phases[i] - self.phases[mirror]).abs() > 1e-9 {
                return Err(AntennaError::AsymmetricLayout(format!(
                    "phases[{i}] and phases[{mirror}] differ"
                )));
            }
            if !(-1e-9..=std::f64::consts::PI + 1e-9).contains(&self.phases[i]) {
                return Err(AntennaError::AsymmetricLayout(format!(
                    "phases[{i}] = {} outside [0, pi]",
                    self.phases[i]
                )));
            }
        }
        for w in self.positions.windows(2) {
            let d = w[1] - w[0];
            if d < 0.5 * lam - tol || d > lam + tol {
                return Err(AntennaError::AsymmetricLayout(format!(
                    "adjacent spacing {d} outside [{}, {}]",
                    0.5 * lam,
                    lam
                )));
            }
        }
        Ok(())
    }
}

/// What the genome optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodingMode {
    /// Element positions only; all phases zero.
    PositionOnly,
    /// Positions plus one phase per mirrored element pair.
    PositionPhase,
}

impl EncodingMode {
    pub fn from_name(name: &str) -> Result<EncodingMode, AntennaError> {
        match name.to_ascii_lowercase().as_str() {
            "po" | "position-only" | "position_only" => Ok(EncodingMode::PositionOnly),
            "pp" | "position-phase" | "position_phase" => Ok(EncodingMode::PositionPhase),
            other => Err(AntennaError::InvalidGrid(format!(
                "unknown encoding mode `{other}` (expected `po` or `pp`)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EncodingMode::PositionOnly => "po",
            EncodingMode::PositionPhase => "pp",
        }
    }
}

/// Genome layout for a symmetric array of `element_count` elements.
///
/// Odd arrays keep a center element at the origin; the genome holds the
/// `n = (count - 1) / 2` adjacent spacings of the positive half, each in
/// `[0.5, 1]` wavelengths. Even arrays have no center element; the genome
/// holds the half-offset of the innermost positive element in
/// `[0.25, 0.5]` (so the center gap spans `[0.5, 1]`) followed by the
/// remaining `n - 1` spacings. Position-phase mode appends one phase in
/// `[0, pi]` per positive-half element; the center element of an odd array
/// keeps phase 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SusaaEncoding {
    pub mode: EncodingMode,
    pub element_count: usize,
    pub genome: Vec<f64>,
}

impl SusaaEncoding {
    /// Number of genome entries for the given mode and element count.
    pub fn genome_dim(mode: EncodingMode, element_count: usize) -> usize {
        let n_side = element_count / 2;
        match mode {
            EncodingMode::PositionOnly => n_side,
            EncodingMode::PositionPhase => 2 * n_side,
        }
    }

    /// Box bounds of the genome, in wavelength units / radians.
    pub fn genome_bounds(mode: EncodingMode, element_count: usize) -> (Vec<f64>, Vec<f64>) {
        let n_side = element_count / 2;
        let odd = element_count % 2 == 1;
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for i in 0..n_side {
            if !odd && i == 0 {
                lower.push(0.25);
                upper.push(0.5);
            } else {
                lower.push(0.5);
                upper.push(1.0);
            }
        }
        if mode == EncodingMode::PositionPhase {
            lower.extend(std::iter::repeat_n(0.0, n_side));
            upper.extend(std::iter::repeat_n(std::f64::consts::PI, n_side));
        }
        (lower, upper)
    }

    pub fn new(
        mode: EncodingMode,
        element_count: usize,
        genome: Vec<f64>,
    ) -> Result<SusaaEncoding, AntennaError> {
        if element_count < 2 {
            return Err(AntennaError::InvalidElementCount(element_count));
        }
        let expected = Self::genome_dim(mode, element_count);
        if genome.len() != expected {
            return Err(AntennaError::GenomeLength {
                expected,
                got: genome.len(),
            });
        }
        let enc = SusaaEncoding {
            mode,
            element_count,
            genome,
        };
        enc.check_bounds()?;
        Ok(enc)
    }

    fn check_bounds(&self) -> Result<(), AntennaError> {
        let (lower, upper) = Self::genome_bounds(self.mode, self.element_count);
        for (i, &g) in self.genome.iter().enumerate() {
            if g < lower[i] || g > upper[i] {
                return Err(AntennaError::GenomeOutOfBounds {
                    index: i,
                    value: g,
                    low: lower[i],
                    high: upper[i],
                });
            }
        }
        Ok(())
    }

    /// Positive-half element positions (cumulative spacing sums).
    fn positive_positions(&self) -> Vec<f64> {
        let n_side = self.element_count / 2;
        let odd = self.element_count % 2 == 1;
        let mut out = Vec::with_capacity(n_side);
        let mut cum = 0.0;
        for i in 0..n_side {
            if !odd && i == 0 {
                cum = self.genome[0];
            } else {
                cum += self.genome[i];
            }
            out.push(cum);
        }
        out
    }

    fn side_phases(&self) -> Vec<f64> {
        let n_side = self.element_count / 2;
        match self.mode {
            EncodingMode::PositionOnly => vec![0.0; n_side],
            EncodingMode::PositionPhase => self.genome[n_side..].to_vec(),
        }
    }

    /// Expand the genome into the full mirrored layout (wavelength 1).
    pub fn decode(&self) -> Result<ArrayLayout, AntennaError> {
        self.check_bounds()?;
        let side_pos = self.positive_positions();
        let side_phase = self.side_phases();
        let odd = self.element_count % 2 == 1;

        let mut positions = Vec::with_capacity(self.element_count);
        let mut phases = Vec::with_capacity(self.element_count);
        for (p, f) in side_pos.iter().zip(&side_phase).rev() {
            positions.push(-p);
            phases.push(*f);
        }
        if odd {
            positions.push(0.0);
            phases.push(0.0);
        }
        for (p, f) in side_pos.iter().zip(&side_phase) {
            positions.push(*p);
            phases.push(*f);
        }
        Ok(ArrayLayout::new(positions, phases, 1.0))
    }
}

/// Angular sweep for pattern evaluation: degrees, uniform step, with
/// `theta0` guaranteed to fall on a grid point.
#[derive(Debug, Clone)]
pub struct AngleGrid {
    step: f64,
    theta0: f64,
    theta0_index: usize,
    angles: Vec<f64>,
    sin_theta: Vec<f64>,
}

impl AngleGrid {
    /// Build a grid covering `[theta_min, theta_max]` with the given step;
    /// `theta0` must coincide with a grid point.
    pub fn new(
        theta_min: f64,
        theta_max: f64,
        step: f64,
        theta0: f64,
    ) -> Result<AngleGrid, AntennaError> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(AntennaError::InvalidGrid(format!(
                "step must be positive, got {step}"
            )));
        }
        if theta_min >= theta_max || !theta_min.is_finite() || !theta_max.is_finite() {
            return Err(AntennaError::InvalidGrid(format!(
                "need theta_min < theta_max, got [{theta_min}, {theta_max}]"
            )));
        }
        if theta0 < theta_min || theta0 > theta_max {
            return Err(AntennaError::InvalidGrid(format!(
                "theta0 = {theta0} outside [{theta_min}, {theta_max}]"
            )));
        }
        let below = ((theta0 - theta_min) / step).round();
        if ((theta_min + below * step) - theta0).abs() > 1e-9 * step.max(1.0) {
            return Err(AntennaError::Theta0OffGrid { theta0, step });
        }
        let above = ((theta_max - theta0) / step + 1e-9).floor();
        let theta0_index = below as usize;
        let count = theta0_index + above as usize + 1;

        // Anchor every angle on theta0 so that the grid point there is
        // exact and symmetric pairs mirror exactly.
        let angles: Vec<f64> = (0..count)
            .map(|i| theta0 + (i as f64 - theta0_index as f64) * step)
            .collect();
        let sin_theta = angles.iter().map(|a| a.to_radians().sin()).collect();
        Ok(AngleGrid {
            step,
            theta0,
            theta0_index,
            angles,
            sin_theta,
        })
    }

    /// The sweep used throughout: `[-90, 90]` degrees, 0.2 degree
    /// resolution, mainlobe at broadside.
    pub fn standard() -> AngleGrid {
        AngleGrid::new(-90.0, 90.0, 0.2, 0.0).expect("standard grid is valid")
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn sin_theta(&self) -> &[f64] {
        &self.sin_theta
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn theta0_index(&self) -> usize {
        self.theta0_index
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// True when `theta0 = 0` sits centered in a mirror-symmetric sweep, in
    /// which case pattern magnitudes of symmetric layouts repeat on both
    /// halves and evaluation can run on the non-negative half only.
    pub fn is_symmetric_about_zero(&self) -> bool {
        self.theta0 == 0.0 && self.theta0_index * 2 + 1 == self.angles.len()
    }
}

/// Array factor magnitude at one angle.
pub fn array_factor(layout: &ArrayLayout, theta_deg: f64) -> f64 {
    let s = theta_deg.to_radians().sin();
    let k = 2.0 * std::f64::consts::PI / layout.wavelength;
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, phi) in layout.positions.iter().zip(&layout.phases) {
        let arg = k * x * s + phi;
        re += arg.cos();
        im += arg.sin();
    }
    re.hypot(im)
}

/// Magnitudes over every grid angle.
fn magnitudes_on_grid(layout: &ArrayLayout, grid: &AngleGrid) -> Vec<f64> {
    let k = 2.0 * std::f64::consts::PI / layout.wavelength;
    grid.sin_theta()
        .iter()
        .map(|&s| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (x, phi) in layout.positions.iter().zip(&layout.phases) {
                let arg = k * x * s + phi;
                re += arg.cos();
                im += arg.sin();
            }
            re.hypot(im)
        })
        .collect()
}

/// First local minimum on each side of `i0`: walk outward while the
/// magnitude strictly decreases. Returned indices clamp to the grid ends
/// when no rise is found.
fn mainlobe_nulls(mags: &[f64], i0: usize) -> (usize, usize) {
    let mut right = i0;
    while right + 1 < mags.len() && mags[right + 1] < mags[right] {
        right += 1;
    }
    let mut left = i0;
    while left > 0 && mags[left - 1] < mags[left] {
        left -= 1;
    }
    (left, right)
}

/// Peak sidelobe level in dB: `20 log10( max_{sidelobes} AF / AF(theta0) )`,
/// the sidelobe region being every grid angle strictly outside the closed
/// interval between the first nulls around `theta0`.
pub fn psll_db(layout: &ArrayLayout, grid: &AngleGrid) -> Result<f64, AntennaError> {
    let mags = magnitudes_on_grid(layout, grid);
    let i0 = grid.theta0_index();
    let mag0 = mags[i0];
    if mag0 <= 0.0 {
        return Err(AntennaError::DegenerateLayout);
    }
    let (left, right) = mainlobe_nulls(&mags, i0);
    let peak = mags[..left]
        .iter()
        .chain(mags[right + 1..].iter())
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return Err(AntennaError::ExclusionCoversGrid);
    }
    Ok(20.0 * (peak / mag0).log10())
}

/// Normalized radiation pattern `(theta, dB)` over the grid, 0 dB at the
/// mainlobe center. Nulls are floored at -400 dB to keep the data finite.
pub fn radiation_pattern(
    layout: &ArrayLayout,
    grid: &AngleGrid,
) -> Result<Vec<(f64, f64)>, AntennaError> {
    let mags = magnitudes_on_grid(layout, grid);
    let mag0 = mags[grid.theta0_index()];
    if mag0 <= 0.0 {
        return Err(AntennaError::DegenerateLayout);
    }
    Ok(grid
        .angles()
        .iter()
        .zip(&mags)
        .map(|(&theta, &m)| {
            let db = if m > 0.0 {
                (20.0 * (m / mag0).log10()).max(-400.0)
            } else {
                -400.0
            };
            (theta, db)
        })
        .collect())
}

/// Precomputed evaluation table shared by every objective call.
struct SynthesisTable {
    /// `2 pi sin(theta)` per evaluated angle; when `half` is set this
    /// covers `theta0` (index 0) through the grid's upper end only.
    u: Vec<f64>,
    /// Index of `theta0` within `u`.
    i0: usize,
    /// Contribution of an odd array's center element.
    center: f64,
    half: bool,
    odd: bool,
    n_side: usize,
    mode: EncodingMode,
}

impl SynthesisTable {
    fn new(mode: EncodingMode, element_count: usize, grid: &AngleGrid) -> SynthesisTable {
        let odd = element_count % 2 == 1;
        let half = grid.is_symmetric_about_zero();
        let two_pi = 2.0 * std::f64::consts::PI;
        let (u, i0): (Vec<f64>, usize) = if half {
            (
                grid.sin_theta()[grid.theta0_index()..]
                    .iter()
                    .map(|s| two_pi * s)
                    .collect(),
                0,
            )
        } else {
            (
                grid.sin_theta().iter().map(|s| two_pi * s).collect(),
                grid.theta0_index(),
            )
        };
        SynthesisTable {
            u,
            i0,
            center: if odd { 1.0 } else { 0.0 },
            half,
            odd,
            n_side: element_count / 2,
            mode,
        }
    }

    /// PSLL of a genome assumed in bounds. Degenerate patterns map to
    /// [`DEGENERATE_PSLL_PENALTY`] so the value is always finite.
    fn evaluate(&self, genome: &[f64]) -> f64 {
        // Positive-half positions from the spacing entries.
        let mut pos = [0.0f64; 64];
        let n = self.n_side;
        let mut cum = 0.0;
        for i in 0..n {
            if !self.odd && i == 0 {
                cum = genome[0];
            } else {
                cum += genome[i];
            }
            pos[i] = cum;
        }
        let pos = &pos[..n];

        let mut mags = Vec::with_capacity(self.u.len());
        match self.mode {
            EncodingMode::PositionOnly => {
                for &u in &self.u {
                    let mut acc = self.center;
                    for &x in pos {
                        acc += 2.0 * (u * x).cos();
                    }
                    mags.push(acc.abs());
                }
            }
            EncodingMode::PositionPhase => {
                let phases = &genome[n..2 * n];
                let mut cos_phi = [0.0f64; 64];
                let mut sin_phi = [0.0f64; 64];
                for (i, &p) in phases.iter().enumerate() {
                    cos_phi[i] = p.cos();
                    sin_phi[i] = p.sin();
                }
                for &u in &self.u {
                    let mut re = self.center;
                    let mut im = 0.0;
                    for (i, &x) in pos.iter().enumerate() {
                        let w = 2.0 * (u * x).cos();
                        re += w * cos_phi[i];
                        im += w * sin_phi[i];
                    }
                    mags.push(re.hypot(im));
                }
            }
        }

        let mag0 = mags[self.i0];
        if mag0 <= 0.0 {
            return DEGENERATE_PSLL_PENALTY;
        }
        let (left, right) = mainlobe_nulls(&mags, self.i0);
        let mut peak = f64::NEG_INFINITY;
        if self.half {
            for &m in &mags[right + 1..] {
                peak = peak.max(m);
            }
        } else {
            for &m in mags[..left].iter().chain(&mags[right + 1..]) {
                peak = peak.max(m);
            }
        }
        if !peak.is_finite() {
            return DEGENERATE_PSLL_PENALTY;
        }
        20.0 * (peak / mag0).log10()
    }
}

/// Wrap the synthesis problem as a box-constrained minimization objective:
/// the genome box of [`SusaaEncoding`] with the PSLL in dB as the value.
pub fn susaa_objective(
    mode: EncodingMode,
    element_count: usize,
    grid: &AngleGrid,
) -> Result<ObjectiveSpec, AntennaError> {
    if element_count < 2 {
        return Err(AntennaError::InvalidElementCount(element_count));
    }
    if element_count / 2 > 64 {
        return Err(AntennaError::InvalidElementCount(element_count));
    }
    let (lower, upper) = SusaaEncoding::genome_bounds(mode, element_count);
    let table = Arc::new(SynthesisTable::new(mode, element_count, grid));
    let name = format!("susaa{}_{}", element_count, mode.name());
    let spec = ObjectiveSpec::custom(name, lower, upper, None, move |genome: &[f64]| {
        table.evaluate(genome)
    })
    .expect("genome bounds are a valid box");
    Ok(spec)
}
