//! Benchmark objectives: classical multimodal test functions, optional
//! shift/rotation transforms, and a loader for transform data files.
//!
//! Builtin functions, their conventional domains, and global optima
//! (all minima have value 0):
//!
//! | name        | formula                                                              | domain               | optimum at |
//! |-------------|----------------------------------------------------------------------|----------------------|------------|
//! | sphere      | `sum x_d^2`                                                          | `[-100, 100]^D`      | `0`        |
//! | rosenbrock  | `sum 100 (x_{d+1} - x_d^2)^2 + (1 - x_d)^2`                          | `[-30, 30]^D`        | `1`        |
//! | ackley      | `-20 exp(-0.2 sqrt(mean x^2)) - exp(mean cos 2 pi x) + 20 + e`       | `[-32.768, 32.768]^D`| `0`        |
//! | rastrigin   | `10 D + sum (x_d^2 - 10 cos 2 pi x_d)`                               | `[-5.12, 5.12]^D`    | `0`        |
//! | griewank    | `1 + sum x_d^2 / 4000 - prod cos(x_d / sqrt(d))`                     | `[-600, 600]^D`      | `0`        |
//! | schwefel    | `418.9829 D - sum x_d sin(sqrt|x_d|)`                                | `[-500, 500]^D`      | `420.9687` |
//! | weierstrass | `sum_d sum_k a^k cos(2 pi b^k (x_d + 0.5)) - D sum_k a^k cos(pi b^k)`| `[-0.5, 0.5]^D`      | `0`        |
//!
//! The weierstrass series is truncated at `k_max = 20` with `a = 0.5`,
//! `b = 3` (the conventional constants). The schwefel optimum coordinate is
//! irrational, so its value at the quoted coordinate is only zero to about
//! `1e-2` in 30 dimensions.
//!
//! A transform file carries a shift vector and a rotation matrix in plain
//! text: the first line holds `D` shift values, the next `D` lines hold the
//! rotation rows, all whitespace-separated decimals. The matrix must be
//! orthogonal to `1e-8` in the max norm of `R^T R - I`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

/// Tolerance on `max |R^T R - I|` for rotation matrices.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

const WEIERSTRASS_A: f64 = 0.5;
const WEIERSTRASS_B: f64 = 3.0;
const WEIERSTRASS_K_MAX: usize = 20;

/// Errors from objective construction, evaluation, and transform loading.
#[derive(Debug, Error)]
pub enum ObjectiveError {
    #[error("unknown objective function `{0}`")]
    UnknownFunction(String),
    #[error("{what}: expected {expected} values, got {got}")]
    WrongCount {
        what: String,
        expected: usize,
        got: usize,
    },
    #[error("dimension mismatch: objective `{name}` has dimension {expected}, point has {got}")]
    DimensionMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("rotation matrix is not orthogonal: max |R^T R - I| = {max_deviation:e}")]
    NotOrthogonal { max_deviation: f64 },
    #[error("cannot read transform file `{path}`: {source}")]
    TransformIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("transform file `{path}` line {line}: {message}")]
    TransformParse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("invalid bounds for `{name}`: dimension {index} has [{low}, {high}]")]
    InvalidBounds {
        name: String,
        index: usize,
        low: f64,
        high: f64,
    },
}

/// The builtin multimodal test functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Sphere,
    Rosenbrock,
    Ackley,
    Rastrigin,
    Griewank,
    Schwefel,
    Weierstrass,
}

impl Builtin {
    /// All builtins, in catalog order.
    pub const ALL: [Builtin; 7] = [
        Builtin::Sphere,
        Builtin::Rosenbrock,
        Builtin::Ackley,
        Builtin::Rastrigin,
        Builtin::Griewank,
        Builtin::Schwefel,
        Builtin::Weierstrass,
    ];

    /// Parse a function name.
    pub fn from_name(name: &str) -> Result<Builtin, ObjectiveError> {
        match name.to_ascii_lowercase().as_str() {
            "sphere" => Ok(Builtin::Sphere),
            "rosenbrock" => Ok(Builtin::Rosenbrock),
            "ackley" => Ok(Builtin::Ackley),
            "rastrigin" => Ok(Builtin::Rastrigin),
            "griewank" => Ok(Builtin::Griewank),
            "schwefel" => Ok(Builtin::Schwefel),
            "weierstrass" => Ok(Builtin::Weierstrass),
            other => Err(ObjectiveError::UnknownFunction(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Sphere => "sphere",
            Builtin::Rosenbrock => "rosenbrock",
            Builtin::Ackley => "ackley",
            Builtin::Rastrigin => "rastrigin",
            Builtin::Griewank => "griewank",
            Builtin::Schwefel => "schwefel",
            Builtin::Weierstrass => "weierstrass",
        }
    }

    /// Conventional search domain `[low, high]` per dimension.
    pub fn default_domain(self) -> (f64, f64) {
        match self {
            Builtin::Sphere => (-100.0, 100.0),
            Builtin::Rosenbrock => (-30.0, 30.0),
            Builtin::Ackley => (-32.768, 32.768),
            Builtin::Rastrigin => (-5.12, 5.12),
            Builtin::Griewank => (-600.0, 600.0),
            Builtin::Schwefel => (-500.0, 500.0),
            Builtin::Weierstrass => (-0.5, 0.5),
        }
    }

    /// Value of the global minimum (0 for every builtin; schwefel only to
    /// about 1e-2 because its optimum coordinate is irrational).
    pub fn optimum_value(self) -> f64 {
        0.0
    }

    /// Evaluate the function at `x`.
    pub fn evaluate(self, x: &[f64]) -> f64 {
        let d = x.len();
        match self {
            Builtin::Sphere => x.iter().map(|v| v * v).sum(),
            Builtin::Rosenbrock => x
                .windows(2)
                .map(|w| {
                    let a = w[1] - w[0] * w[0];
                    let b = 1.0 - w[0];
                    100.0 * a * a + b * b
                })
                .sum(),
            Builtin::Ackley => {
                let dd = d as f64;
                let sum_sq: f64 = x.iter().map(|v| v * v).sum();
                let sum_cos: f64 = x.iter().map(|v| (2.0 * std::f64::consts::PI * v).cos()).sum();
                -20.0 * (-0.2 * (sum_sq / dd).sqrt()).exp() - (sum_cos / dd).exp()
                    + 20.0
                    + std::f64::consts::E
            }
            Builtin::Rastrigin => {
                10.0 * d as f64
                    + x.iter()
                        .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos())
                        .sum::<f64>()
            }
            Builtin::Griewank => {
                let sum: f64 = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let prod: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                1.0 + sum - prod
            }
            Builtin::Schwefel => {
                418.9829 * d as f64
                    - x.iter().map(|v| v * v.abs().sqrt().sin()).sum::<f64>()
            }
            Builtin::Weierstrass => {
                let two_pi = 2.0 * std::f64::consts::PI;
                let mut total = 0.0;
                for &xd in x {
                    for k in 0..=WEIERSTRASS_K_MAX {
                        let bk = WEIERSTRASS_B.powi(k as i32);
                        total += WEIERSTRASS_A.powi(k as i32) * (two_pi * bk * (xd + 0.5)).cos();
                    }
                }
                let mut offset = 0.0;
                for k in 0..=WEIERSTRASS_K_MAX {
                    let bk = WEIERSTRASS_B.powi(k as i32);
                    offset += WEIERSTRASS_A.powi(k as i32) * (std::f64::consts::PI * bk).cos();
                }
                total - d as f64 * offset
            }
        }
    }
}

/// Evaluate a builtin by name; unknown names are rejected.
pub fn evaluate_builtin(name: &str, x: &[f64]) -> Result<f64, ObjectiveError> {
    Ok(Builtin::from_name(name)?.evaluate(x))
}

/// A square rotation matrix, row-major, validated orthogonal on construction.
#[derive(Debug, Clone)]
pub struct Rotation {
    dim: usize,
    rows: Vec<f64>,
}

impl Rotation {
    /// Build from row-major data; checks shape and orthogonality.
    pub fn new(dim: usize, rows: Vec<f64>) -> Result<Rotation, ObjectiveError> {
        if rows.len() != dim * dim {
            return Err(ObjectiveError::WrongCount {
                what: "rotation matrix entries".into(),
                expected: dim * dim,
                got: rows.len(),
            });
        }
        let r = Rotation { dim, rows };
        let dev = r.orthogonality_deviation();
        if dev >= ORTHOGONALITY_TOL {
            return Err(ObjectiveError::NotOrthogonal { max_deviation: dev });
        }
        Ok(r)
    }

    pub fn identity(dim: usize) -> Rotation {
        let mut rows = vec![0.0; dim * dim];
        for i in 0..dim {
            rows[i * dim + i] = 1.0;
        }
        Rotation { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.rows[row * self.dim + col]
    }

    /// `max |R^T R - I|` over all entries.
    pub fn orthogonality_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut dot = 0.0;
                for k in 0..n {
                    dot += self.entry(k, i) * self.entry(k, j);
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// `out = R * v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for (i, slot) in out.iter_mut().enumerate() {
            let row = &self.rows[i * self.dim..(i + 1) * self.dim];
            *slot = row.iter().zip(v).map(|(r, x)| r * x).sum();
        }
    }
}

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// What an [`ObjectiveSpec`] evaluates under the hood.
#[derive(Clone)]
enum ObjectiveKind {
    Builtin {
        base: Builtin,
        shift: Option<Vec<f64>>,
        rotation: Option<Rotation>,
        f_bias: f64,
    },
    Custom(EvalFn),
}

/// A bounded box-constrained minimization problem.
#[derive(Clone)]
pub struct ObjectiveSpec {
    name: String,
    dim: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    kind: ObjectiveKind,
    optimum_value: Option<f64>,
}

impl fmt::Debug for ObjectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveSpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("optimum_value", &self.optimum_value)
            .finish()
    }
}

impl ObjectiveSpec {
    /// A builtin function on its conventional domain, untransformed.
    pub fn builtin(base: Builtin, dim: usize) -> ObjectiveSpec {
        assert!(dim >= 1, "objective dimension must be at least 1");
        let (low, high) = base.default_domain();
        ObjectiveSpec {
            name: base.name().to_string(),
            dim,
            lower: vec![low; dim],
            upper: vec![high; dim],
            kind: ObjectiveKind::Builtin {
                base,
                shift: None,
                rotation: None,
                f_bias: 0.0,
            },
            optimum_value: Some(base.optimum_value()),
        }
    }

    /// A problem defined by an arbitrary evaluator over the given box.
    pub fn custom<F>(
        name: impl Into<String>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        optimum_value: Option<f64>,
        evaluator: F,
    ) -> Result<ObjectiveSpec, ObjectiveError>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let name = name.into();
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(ObjectiveError::WrongCount {
                what: format!("bounds for `{name}`"),
                expected: lower.len().max(1),
                got: upper.len(),
            });
        }
        let spec = ObjectiveSpec {
            dim: lower.len(),
            name,
            lower,
            upper,
            kind: ObjectiveKind::Custom(Arc::new(evaluator)),
            optimum_value,
        };
        spec.check_bounds()?;
        Ok(spec)
    }

    fn check_bounds(&self) -> Result<(), ObjectiveError> {
        for i in 0..self.dim {
            let (lo, hi) = (self.lower[i], self.upper[i]);
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(ObjectiveError::InvalidBounds {
                    name: self.name.clone(),
                    index: i,
                    low: lo,
                    high: hi,
                });
            }
        }
        Ok(())
    }

    /// Replace the search box (same bounds in every dimension).
    pub fn with_domain(mut self, low: f64, high: f64) -> Result<ObjectiveSpec, ObjectiveError> {
        self.lower = vec![low; self.dim];
        self.upper = vec![high; self.dim];
        self.check_bounds()?;
        Ok(self)
    }

    /// Attach a shift vector: the function is evaluated at `R (x - shift)`.
    pub fn with_shift(mut self, shift: Vec<f64>) -> Result<ObjectiveSpec, ObjectiveError> {
        if shift.len() != self.dim {
            return Err(ObjectiveError::WrongCount {
                what: format!("shift vector for `{}`", self.name),
                expected: self.dim,
                got: shift.len(),
            });
        }
        match &mut self.kind {
            ObjectiveKind::Builtin { shift: slot, .. } => {
                *slot = Some(shift);
                // A shifted optimum location generally leaves the box or the
                // base landscape; the optimum *value* is unchanged.
                Ok(self)
            }
            ObjectiveKind::Custom(_) => Err(ObjectiveError::UnknownFunction(
                "cannot attach a shift to a custom objective".into(),
            )),
        }
    }

    /// Attach a rotation matrix: the function is evaluated at `R (x - shift)`.
    pub fn with_rotation(mut self, rotation: Rotation) -> Result<ObjectiveSpec, ObjectiveError> {
        if rotation.dim() != self.dim {
            return Err(ObjectiveError::WrongCount {
                what: format!("rotation matrix for `{}`", self.name),
                expected: self.dim * self.dim,
                got: rotation.dim() * rotation.dim(),
            });
        }
        match &mut self.kind {
            ObjectiveKind::Builtin { rotation: slot, .. } => {
                *slot = Some(rotation);
                Ok(self)
            }
            ObjectiveKind::Custom(_) => Err(ObjectiveError::UnknownFunction(
                "cannot attach a rotation to a custom objective".into(),
            )),
        }
    }

    /// Add a constant to every function value.
    pub fn with_bias(mut self, bias: f64) -> ObjectiveSpec {
        if let ObjectiveKind::Builtin { f_bias, .. } = &mut self.kind {
            *f_bias = bias;
        }
        if let Some(opt) = &mut self.optimum_value {
            *opt += bias;
        }
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn optimum_value(&self) -> Option<f64> {
        self.optimum_value
    }

    /// Width of the widest coordinate interval.
    pub fn widest_range(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .fold(0.0, f64::max)
    }

    /// Evaluate at `x`: `base(R (x - shift)) + f_bias` for builtin problems,
    /// the raw evaluator for custom ones.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim, "point dimension mismatch");
        match &self.kind {
            ObjectiveKind::Builtin {
                base,
                shift,
                rotation,
                f_bias,
            } => {
                let mut z: Vec<f64> = match shift {
                    Some(s) => x.iter().zip(s).map(|(xi, si)| xi - si).collect(),
                    None => x.to_vec(),
                };
                if let Some(r) = rotation {
                    let mut rotated = vec![0.0; self.dim];
                    r.apply(&z, &mut rotated);
                    z = rotated;
                }
                base.evaluate(&z) + f_bias
            }
            ObjectiveKind::Custom(f) => f(x),
        }
    }

    /// Function error `f(x) - optimum_value`, or the raw value when the
    /// optimum is unknown.
    pub fn error_of(&self, value: f64) -> f64 {
        match self.optimum_value {
            Some(opt) => value - opt,
            None => value,
        }
    }
}

/// Parse a shift vector and rotation matrix from a transform file.
pub fn load_transform_file(
    path: impl AsRef<Path>,
    dim: usize,
) -> Result<(Vec<f64>, Rotation), ObjectiveError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ObjectiveError::TransformIo {
        path: path.display().to_string(),
        source,
    })?;
    let path_str = path.display().to_string();

    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());

    let parse_line = |line_no: usize, line: &str| -> Result<Vec<f64>, ObjectiveError> {
        line.split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| ObjectiveError::TransformParse {
                        path: path_str.clone(),
                        line: line_no + 1,
                        message: format!("`{tok}` is not a decimal number"),
                    })
            })
            .collect()
    };

    let (shift_line_no, shift_line) =
        lines.next().ok_or_else(|| ObjectiveError::TransformParse {
            path: path_str.clone(),
            line: 1,
            message: "file has no shift line".into(),
        })?;
    let shift = parse_line(shift_line_no, shift_line)?;
    if shift.len() != dim {
        return Err(ObjectiveError::WrongCount {
            what: format!("shift entries in `{path_str}`"),
            expected: dim,
            got: shift.len(),
        });
    }

    let mut rows = Vec::with_capacity(dim * dim);
    for expected_row in 0..dim {
        let (line_no, line) = lines.next().ok_or_else(|| ObjectiveError::WrongCount {
            what: format!("rotation rows in `{path_str}`"),
            expected: dim,
            got: expected_row,
        })?;
        let row = parse_line(line_no, line)?;
        if row.len() != dim {
            return Err(ObjectiveError::WrongCount {
                what: format!("entries in rotation row {} of `{path_str}`", expected_row + 1),
                expected: dim,
                got: row.len(),
            });
        }
        rows.extend(row);
    }

    let rotation = Rotation::new(dim, rows)?;
    Ok((shift, rotation))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optima_evaluate_to_zero() {
        for dim in [2, 10, 30] {
            assert!(Builtin::Sphere.evaluate(&vec![0.0; dim]).abs() < 1e-8);
            assert!(Builtin::Rosenbrock.evaluate(&vec![1.0; dim]).abs() < 1e-8);
            assert!(Builtin::Ackley.evaluate(&vec![0.0; dim]).abs() < 1e-8);
            assert!(Builtin::Rastrigin.evaluate(&vec![0.0; dim]).abs() < 1e-8);
            assert!(Builtin::Griewank.evaluate(&vec![0.0; dim]).abs() < 1e-8);
            assert!(Builtin::Weierstrass.evaluate(&vec![0.0; dim]).abs() < 1e-8);
        }
    }

    #[test]
    fn schwefel_near_zero_at_published_coordinate() {
        let x = vec![420.9687; 30];
        let v = Builtin::Schwefel.evaluate(&x);
        assert!(v.abs() < 1e-2, "schwefel at optimum coordinate: {v}");
    }

    #[test]
    fn unknown_name_is_rejected() {
        assert!(matches!(
            evaluate_builtin("sphereee", &[0.0]),
            Err(ObjectiveError::UnknownFunction(_))
        ));
    }

    #[test]
    fn identity_transform_matches_builtin() {
        let spec = ObjectiveSpec::builtin(Builtin::Rastrigin, 3)
            .with_shift(vec![0.0; 3])
            .unwrap()
            .with_rotation(Rotation::identity(3))
            .unwrap();
        let x = [1.5, -2.0, 0.25];
        assert_eq!(spec.evaluate(&x), Builtin::Rastrigin.evaluate(&x));
    }

    #[test]
    fn value_at_shift_is_base_at_origin_plus_bias() {
        let shift = vec![1.0, -2.0];
        let spec = ObjectiveSpec::builtin(Builtin::Ackley, 2)
            .with_shift(shift.clone())
            .unwrap()
            .with_bias(7.5);
        let expected = Builtin::Ackley.evaluate(&[0.0, 0.0]) + 7.5;
        assert!((spec.evaluate(&shift) - expected).abs() < 1e-12);
    }

    #[test]
    fn non_orthogonal_matrix_is_rejected() {
        let err = Rotation::new(2, vec![1.0, 1.0, 0.0, 1.0]).unwrap_err();
        assert!(matches!(err, ObjectiveError::NotOrthogonal { .. }));
    }

    #[test]
    fn evaluation_is_pure() {
        let spec = ObjectiveSpec::builtin(Builtin::Griewank, 4);
        let x = [3.0, -1.0, 0.5, 2.0];
        assert_eq!(spec.evaluate(&x), spec.evaluate(&x));
    }
}
