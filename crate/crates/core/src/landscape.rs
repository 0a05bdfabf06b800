//! Loss-landscape slices: block-normalized random directions, Gram-Schmidt
//! orthogonalization, and 2-D grid evaluation of an arbitrary loss
//! functional around a base parameter vector.
//!
//! Directions are rescaled per manifest block to the base vector's block
//! norms, so every layer is perturbed at a comparable relative scale.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Flat parameter vector plus the tensor shapes it was flattened from.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    values: Vec<f64>,
    manifest: Vec<Vec<usize>>,
}

impl ParamVector {
    pub fn new(values: Vec<f64>, manifest: Vec<Vec<usize>>) -> Result<Self> {
        if manifest.is_empty() {
            return Err(Error::invalid("manifest must be non-empty"));
        }
        let total: usize = manifest.iter().map(|s| s.iter().product::<usize>()).sum();
        if total != values.len() {
            return Err(Error::invalid(format!(
                "manifest sizes sum to {total}, but there are {} values",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("parameter values must be finite"));
        }
        Ok(ParamVector { values, manifest })
    }

    /// A single-block vector, shaped as one flat tensor.
    pub fn flat(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        ParamVector::new(values, vec![vec![n]])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn manifest(&self) -> &[Vec<usize>] {
        &self.manifest
    }

    /// (start, end) index ranges of the manifest blocks, in order.
    pub fn block_ranges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.manifest.len());
        let mut start = 0;
        for shape in &self.manifest {
            let size: usize = shape.iter().product();
            out.push((start, start + size));
            start += size;
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn same_layout(&self, other: &ParamVector) -> bool {
        self.manifest == other.manifest
    }
}

pub fn dot(a: &ParamVector, b: &ParamVector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid("vector lengths differ"));
    }
    Ok(a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum())
}

/// Random direction with per-block norms matching the base vector's: i.i.d.
/// standard normal entries per block, rescaled so each block's norm equals
/// the corresponding block norm of w0. Zero-norm blocks get zero direction.
pub fn sample_direction<R: Rng + ?Sized>(w0: &ParamVector, rng: &mut R) -> ParamVector {
    let mut values = vec![0.0; w0.len()];
    for (start, end) in w0.block_ranges() {
        let target: f64 = w0.values[start..end].iter().map(|v| v * v).sum::<f64>().sqrt();
        if target == 0.0 {
            continue;
        }
        let raw: Vec<f64> = (start..end).map(|_| rng.sample(StandardNormal)).collect();
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        for (slot, v) in values[start..end].iter_mut().zip(&raw) {
            *slot = v * target / norm;
        }
    }
    ParamVector { values, manifest: w0.manifest.clone() }
}

/// Single Gram-Schmidt projection of `d_y_raw` against `d_x`; the result is
/// not re-normalized. A parallel input leaves nothing and is an error.
pub fn orthogonalize(d_y_raw: &ParamVector, d_x: &ParamVector) -> Result<ParamVector> {
    if !d_y_raw.same_layout(d_x) {
        return Err(Error::invalid("direction layouts differ"));
    }
    let xx = dot(d_x, d_x)?;
    if xx == 0.0 {
        return Err(Error::invalid("cannot orthogonalize against a zero vector"));
    }
    let coeff = dot(d_y_raw, d_x)? / xx;
    let values: Vec<f64> =
        d_y_raw.values.iter().zip(&d_x.values).map(|(y, x)| y - coeff * x).collect();
    let out = ParamVector { values, manifest: d_y_raw.manifest.clone() };
    if out.norm() <= 1e-12 * d_y_raw.norm() {
        return Err(Error::DegenerateDirection(
            "directions are parallel after projection".into(),
        ));
    }
    Ok(out)
}

/// 2-D slice of a loss functional: values at w0 + alpha d_x + beta d_y over
/// a uniform grid with alpha, beta in [-r, r].
#[derive(Debug, Clone)]
pub struct LandscapeGrid {
    r: f64,
    steps: usize,
    coefficients: Vec<f64>,
    values: Vec<f64>,
}

impl LandscapeGrid {
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Grid coefficient along either axis at index i.
    pub fn coefficient(&self, i: usize) -> f64 {
        self.coefficients[i]
    }

    /// Loss at (alpha index, beta index); NaN marks a failed evaluation.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.steps + j]
    }

    /// CSV rows (alpha, beta, loss); failed cells serialize as `nan`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,beta,loss\n");
        for i in 0..self.steps {
            for j in 0..self.steps {
                let v = self.value(i, j);
                let cell = if v.is_nan() { "nan".to_string() } else { format!("{v}") };
                out.push_str(&format!(
                    "{},{},{}\n",
                    self.coefficients[i], self.coefficients[j], cell
                ));
            }
        }
        out
    }
}

/// Mirror-symmetric uniform coefficients over [-r, r]: the second half is
/// the exact negation of the first, and an odd count centers on 0.0, so even
/// functionals evaluate at exactly opposite perturbations.
fn grid_coefficients(r: f64, steps: usize) -> Vec<f64> {
    let mut c = vec![0.0; steps];
    for i in 0..steps / 2 {
        let a = -r + 2.0 * r * i as f64 / (steps - 1) as f64;
        c[i] = a;
        c[steps - 1 - i] = -a;
    }
    c
}

pub fn evaluate_grid(
    w0: &ParamVector,
    d_x: &ParamVector,
    d_y: &ParamVector,
    r: f64,
    steps: usize,
    loss: &dyn Fn(&ParamVector) -> f64,
) -> Result<LandscapeGrid> {
    if steps < 2 {
        return Err(Error::invalid("grid needs at least 2 steps per axis"));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::invalid("grid range must be positive"));
    }
    if !w0.same_layout(d_x) || !w0.same_layout(d_y) {
        return Err(Error::invalid("direction layouts differ from the base vector"));
    }
    let coefficients = grid_coefficients(r, steps);
    let mut values = vec![f64::NAN; steps * steps];
    let mut probe = w0.clone();
    for i in 0..steps {
        for j in 0..steps {
            let (alpha, beta) = (coefficients[i], coefficients[j]);
            for (k, slot) in probe.values.iter_mut().enumerate() {
                *slot = w0.values[k] + alpha * d_x.values[k] + beta * d_y.values[k];
            }
            let v = loss(&probe);
            // Non-finite evaluations stay NaN; the sweep continues.
            if v.is_finite() {
                values[i * steps + j] = v;
            }
        }
    }
    Ok(LandscapeGrid { r, steps, coefficients, values })
}

/// Test functionals for the grid evaluator and the CLI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinLoss {
    /// Squared norm of the parameters.
    Quadratic,
    /// Banana-valley benchmark over consecutive coordinate pairs.
    Rosenbrock,
    /// Always this value.
    Constant(f64),
}

impl BuiltinLoss {
    pub fn eval(&self, w: &ParamVector) -> f64 {
        match self {
            BuiltinLoss::Quadratic => w.values().iter().map(|v| v * v).sum(),
            BuiltinLoss::Rosenbrock => {
                let v = w.values();
                let mut sum = 0.0;
                for i in 0..v.len().saturating_sub(1) {
                    let a = v[i + 1] - v[i] * v[i];
                    let b = 1.0 - v[i];
                    sum += 100.0 * a * a + b * b;
                }
                sum
            }
            BuiltinLoss::Constant(c) => *c,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn manifest_must_match_the_value_count() {
        assert!(ParamVector::new(vec![0.0; 6], vec![vec![2, 3]]).is_ok());
        assert!(ParamVector::new(vec![0.0; 5], vec![vec![2, 3]]).is_err());
        assert!(ParamVector::new(vec![0.0; 6], vec![vec![2], vec![2, 2]]).is_ok());
    }

    #[test]
    fn direction_blocks_match_base_norms() {
        // Two equal-shaped blocks with norms 1 and 10.
        let mut values = vec![0.0; 8];
        values[0] = 1.0;
        values[4] = 10.0;
        let w0 = ParamVector::new(values, vec![vec![4], vec![4]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = sample_direction(&w0, &mut rng);
        let block = |s: usize| d.values()[s..s + 4].iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_abs_diff_eq!(block(0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(block(4), 10.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_norm_block_gets_zero_direction() {
        let mut values = vec![0.0; 6];
        values[0] = 5.0;
        let w0 = ParamVector::new(values, vec![vec![3], vec![3]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = sample_direction(&w0, &mut rng);
        let first: f64 = d.values()[0..3].iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_abs_diff_eq!(first, 5.0, epsilon = 1e-12);
        assert_eq!(&d.values()[3..6], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn orthogonalize_two_dimensional_example() {
        let x = ParamVector::flat(vec![1.0, 0.0]).unwrap();
        let y = ParamVector::flat(vec![1.0, 1.0]).unwrap();
        let out = orthogonalize(&y, &x).unwrap();
        assert_eq!(out.values(), &[0.0, 1.0]);
    }

    #[test]
    fn already_orthogonal_input_is_unchanged() {
        let x = ParamVector::flat(vec![2.0, 0.0, 0.0]).unwrap();
        let y = ParamVector::flat(vec![0.0, 3.0, -1.0]).unwrap();
        let out = orthogonalize(&y, &x).unwrap();
        assert_eq!(out.values(), y.values());
    }

    #[test]
    fn parallel_directions_are_degenerate() {
        let x = ParamVector::flat(vec![1.0, 2.0, 3.0]).unwrap();
        let err = orthogonalize(&x, &x).unwrap_err();
        assert!(matches!(err, Error::DegenerateDirection(_)));
    }

    #[test]
    fn projected_directions_are_orthogonal_on_random_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w0 = ParamVector::new(
            (0..50).map(|i| (i as f64 * 0.7).sin() + 0.2).collect(),
            vec![vec![5, 5], vec![25]],
        )
        .unwrap();
        let dx = sample_direction(&w0, &mut rng);
        let dy_raw = sample_direction(&w0, &mut rng);
        let dy = orthogonalize(&dy_raw, &dx).unwrap();
        let rel = dot(&dy, &dx).unwrap().abs() / (dx.norm() * dy.norm());
        assert!(rel < 1e-10, "relative inner product {rel}");
    }

    #[test]
    fn quadratic_grid_obeys_pythagoras() {
        // Around w0 = 0, the squared-norm loss at (alpha, beta) with
        // orthogonal directions is alpha^2 |dx|^2 + beta^2 |dy|^2.
        let w0 = ParamVector::flat(vec![0.0; 4]).unwrap();
        let dx = ParamVector::flat(vec![2.0, 0.0, 0.0, 0.0]).unwrap();
        let dy = ParamVector::flat(vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let loss = |w: &ParamVector| BuiltinLoss::Quadratic.eval(w);
        let grid = evaluate_grid(&w0, &dx, &dy, 1.0, 11, &loss).unwrap();
        for i in 0..11 {
            for j in 0..11 {
                let (a, b) = (grid.coefficient(i), grid.coefficient(j));
                let expected = a * a * 4.0 + b * b * 2.0;
                assert_abs_diff_eq!(grid.value(i, j), expected, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn constant_loss_grid_is_flat_and_center_is_exact() {
        let w0 = ParamVector::flat(vec![1.0, -2.0, 0.5]).unwrap();
        let dx = ParamVector::flat(vec![1.0, 0.0, 0.0]).unwrap();
        let dy = ParamVector::flat(vec![0.0, 1.0, 0.0]).unwrap();
        let constant = |_: &ParamVector| 3.0;
        let grid = evaluate_grid(&w0, &dx, &dy, 1.0, 5, &constant).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(grid.value(i, j), 3.0);
            }
        }
        // Odd step count: the center cell evaluates at exactly w0.
        assert_eq!(grid.coefficient(2), 0.0);
        let quad = |w: &ParamVector| BuiltinLoss::Quadratic.eval(w);
        let grid = evaluate_grid(&w0, &dx, &dy, 1.0, 5, &quad).unwrap();
        assert_eq!(grid.value(2, 2), quad(&w0));
    }

    #[test]
    fn non_finite_cells_are_recorded_and_the_sweep_continues() {
        let w0 = ParamVector::flat(vec![0.0, 0.0]).unwrap();
        let dx = ParamVector::flat(vec![1.0, 0.0]).unwrap();
        let dy = ParamVector::flat(vec![0.0, 1.0]).unwrap();
        let spiky = |w: &ParamVector| {
            if w.values()[0] > 0.5 {
                f64::NAN
            } else {
                w.values()[0] + w.values()[1]
            }
        };
        let grid = evaluate_grid(&w0, &dx, &dy, 1.0, 5, &spiky).unwrap();
        assert!(grid.value(4, 0).is_nan());
        assert!(!grid.value(0, 0).is_nan());
        let csv = grid.to_csv();
        assert!(csv.contains("nan"));
        assert!(csv.starts_with("alpha,beta,loss\n"));
    }

    #[test]
    fn even_functional_grids_are_centrally_symmetric() {
        // With w0 = 0 the perturbations at mirrored cells are exact
        // negations, so an even functional produces bitwise-equal values.
        let w0 = ParamVector::flat(vec![0.0; 6]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let base = ParamVector::flat((0..6).map(|i| 1.0 + i as f64).collect()).unwrap();
        let dx = sample_direction(&base, &mut rng);
        let dy = orthogonalize(&sample_direction(&base, &mut rng), &dx).unwrap();
        let even = |w: &ParamVector| w.values().iter().map(|v| v * v * (1.0 + v * v)).sum();
        let steps = 9;
        let grid = evaluate_grid(&w0, &dx, &dy, 0.8, steps, &even).unwrap();
        for i in 0..steps {
            for j in 0..steps {
                let a = grid.value(i, j);
                let b = grid.value(steps - 1 - i, steps - 1 - j);
                assert_eq!(a.to_bits(), b.to_bits(), "asymmetry at ({i},{j})");
            }
        }
    }

    #[test]
    fn grid_is_deterministic() {
        let w0 = ParamVector::flat(vec![0.2, -0.4, 0.6]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dx = sample_direction(&w0, &mut rng);
        let dy = orthogonalize(&sample_direction(&w0, &mut rng), &dx).unwrap();
        let loss = |w: &ParamVector| BuiltinLoss::Rosenbrock.eval(w);
        let a = evaluate_grid(&w0, &dx, &dy, 1.0, 7, &loss).unwrap();
        let b = evaluate_grid(&w0, &dx, &dy, 1.0, 7, &loss).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn builtin_losses_spot_values() {
        let w = ParamVector::flat(vec![1.0, 1.0]).unwrap();
        assert_eq!(BuiltinLoss::Quadratic.eval(&w), 2.0);
        // Rosenbrock minimum at all-ones.
        assert_eq!(BuiltinLoss::Rosenbrock.eval(&w), 0.0);
        assert_eq!(BuiltinLoss::Constant(3.0).eval(&w), 3.0);
        let off = ParamVector::flat(vec![0.0, 0.0]).unwrap();
        assert_eq!(BuiltinLoss::Rosenbrock.eval(&off), 1.0);
    }
}
