//! Random digital shifts and the shifted-QMC experiment harness: apply a
//! shift, average an integrand over the shifted net, and estimate the root
//! mean square error over independent shifts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::criterion::KahanSum;
use crate::error::{HodnError, Result};
use crate::pointset::{checked_pow, digitwise_add, PointSet};

/// Generator identifier recorded in reports for provenance.
pub const RNG_ALGORITHM: &str = "chacha12";

/// Largest digit count P with b^P exactly representable in an f64 mantissa
/// (and in a u64).
pub fn default_precision(b: u32) -> u32 {
    if b == 2 {
        53
    } else {
        (52.0 / (b as f64).log2()).floor() as u32
    }
}

/// A digital shift: one P-digit base-b fixed point per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitalShift {
    pub b: u32,
    pub precision: u32,
    /// Fixed-point shift per coordinate, each in `[0, b^precision)`.
    pub coords: Vec<u64>,
}

impl DigitalShift {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Uniform random shift; digits i.i.d. uniform over {0..b-1}. Each (seed,
/// stream) pair gives an independent reproducible stream, so per-shift
/// results do not depend on evaluation order.
pub fn random_shift(b: u32, s: usize, precision: u32, seed: u64, stream: u64) -> Result<DigitalShift> {
    let cap = checked_pow(b, precision)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let coords = (0..s)
        .map(|_| if cap == 1 { 0 } else { rng.gen_range(0..cap) })
        .collect();
    Ok(DigitalShift { b, precision, coords })
}

/// Digitwise addition of the shift to every point; output precision is the
/// shift precision (points are padded with zero digits below their own).
pub fn apply_shift(points: &PointSet, shift: &DigitalShift) -> Result<PointSet> {
    if shift.b != points.b {
        return Err(HodnError::BaseMismatch(shift.b, points.b));
    }
    if shift.dim() != points.dim {
        return Err(HodnError::DimensionMismatch(format!(
            "shift dim {} vs point dim {}",
            shift.dim(),
            points.dim
        )));
    }
    if shift.precision < points.m {
        return Err(HodnError::InvalidParameter(
            "shift precision below point precision".into(),
        ));
    }
    let pad = checked_pow(points.b, shift.precision - points.m)?;
    let s = points.dim;
    let digits = points
        .digits
        .iter()
        .enumerate()
        .map(|(i, &x)| digitwise_add(points.b, x * pad, shift.coords[i % s]))
        .collect();
    PointSet::new(points.b, shift.precision, s, digits)
}

/// Equal-weight average of `f` over the point set.
pub fn qmc_estimate<F: Fn(&[f64]) -> f64>(points: &PointSet, f: F) -> f64 {
    let n = points.n_points();
    let s = points.dim;
    let scale = (points.b as f64).powi(points.m as i32);
    let mut x = vec![0.0f64; s];
    let mut acc = KahanSum::default();
    for row in 0..n {
        for (j, xj) in x.iter_mut().enumerate() {
            *xj = points.get(row, j) as f64 / scale;
        }
        acc.add(f(&x));
    }
    acc.value() / n as f64
}

/// Test integrand `f(x) = (1 + sum_j x_j / j^2)^-1`; for s=1 the exact
/// integral is ln 2.
pub fn test_function(s: usize) -> impl Fn(&[f64]) -> f64 {
    let inv_j2: Vec<f64> = (1..=s).map(|j| 1.0 / (j as f64 * j as f64)).collect();
    move |x: &[f64]| {
        let mut t = 1.0;
        for (xj, c) in x.iter().zip(&inv_j2) {
            t += xj * c;
        }
        1.0 / t
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RmseReport {
    pub r: usize,
    pub q_bar: f64,
    pub rmse: f64,
    pub per_shift: Vec<f64>,
    pub seed: u64,
    pub rng: String,
    pub shift_precision: u32,
}

impl RmseReport {
    /// CSV row matching `csv_header`.
    pub fn csv_row(&self, m: u32, s: usize, alpha: u32, d: u32, weights: &str) -> String {
        format!(
            "{m},{s},{alpha},{d},{weights},{},{:.17e},{:.17e},{}",
            self.r, self.q_bar, self.rmse, self.seed
        )
    }

    pub fn csv_header() -> &'static str {
        "m,s,alpha,d,weights,r,q_bar,rmse,seed"
    }
}

/// `r` independently shifted estimates of the integral of `f`, with the
/// unbiased rmse estimator `sqrt(sum (Q_l - Qbar)^2 / (r(r-1)))`.
pub fn rmse_experiment<F: Fn(&[f64]) -> f64>(
    points: &PointSet,
    f: F,
    r: usize,
    seed: u64,
) -> Result<RmseReport> {
    if r < 2 {
        return Err(HodnError::InvalidParameter(format!(
            "rmse needs at least 2 shifts, got {r}"
        )));
    }
    let precision = default_precision(points.b).max(points.m);
    let mut per_shift = Vec::with_capacity(r);
    for l in 0..r {
        let shift = random_shift(points.b, points.dim, precision, seed, l as u64)?;
        let shifted = apply_shift(points, &shift)?;
        per_shift.push(qmc_estimate(&shifted, &f));
    }
    let mut mean = KahanSum::default();
    for &q in &per_shift {
        mean.add(q);
    }
    let q_bar = mean.value() / r as f64;
    let mut ss = KahanSum::default();
    for &q in &per_shift {
        ss.add((q - q_bar) * (q - q_bar));
    }
    let rmse = (ss.value() / (r as f64 * (r as f64 - 1.0))).sqrt();
    Ok(RmseReport {
        r,
        q_bar,
        rmse,
        per_shift,
        seed,
        rng: RNG_ALGORITHM.into(),
        shift_precision: precision,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointset::{digitwise_sub, walsh_char};

    fn small_net() -> PointSet {
        use crate::galois::{smallest_irreducible, GFPoly};
        use crate::pointset::{generate_points, PolyLattice};
        let p = smallest_irreducible(2, 4);
        let q = [1u64, 7].iter().map(|&e| GFPoly::from_int(2, e)).collect();
        generate_points(&PolyLattice::new(2, 4, p, q).unwrap()).unwrap()
    }

    #[test]
    fn zero_shift_is_identity_up_to_padding() {
        let pts = small_net();
        let shift = DigitalShift { b: 2, precision: 6, coords: vec![0, 0] };
        let shifted = apply_shift(&pts, &shift).unwrap();
        assert_eq!(shifted.m, 6);
        for (a, b) in pts.digits.iter().zip(&shifted.digits) {
            assert_eq!(a * 4, *b);
        }
    }

    #[test]
    fn base2_shift_is_involution() {
        let pts = small_net();
        let shift = random_shift(2, 2, 10, 42, 0).unwrap();
        let once = apply_shift(&pts, &shift).unwrap();
        let shift_padded = DigitalShift { b: 2, precision: 10, coords: shift.coords.clone() };
        let twice = apply_shift(&once, &shift_padded).unwrap();
        for (i, &x) in pts.digits.iter().enumerate() {
            assert_eq!(twice.digits[i], x << 6);
        }
    }

    #[test]
    fn shift_determinism_and_stream_independence() {
        let a = random_shift(3, 4, 8, 7, 1).unwrap();
        let b = random_shift(3, 4, 8, 7, 1).unwrap();
        let c = random_shift(3, 4, 8, 7, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(random_shift(2, 3, 0, 7, 0).unwrap().coords, vec![0, 0, 0]);
    }

    #[test]
    fn shift_digit_histogram_uniform() {
        // chi-square over base-3 digits; 10^5 digits, 2 dof
        let mut counts = [0u64; 3];
        for stream in 0..125u64 {
            let sh = random_shift(3, 100, 8, 99, stream).unwrap();
            for &c in &sh.coords {
                let mut v = c;
                for _ in 0..8 {
                    counts[(v % 3) as usize] += 1;
                    v /= 3;
                }
            }
        }
        let total: u64 = counts.iter().sum();
        let expect = total as f64 / 3.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
        assert!(chi2 < 20.0, "chi2 = {chi2}, counts {counts:?}");
    }

    #[test]
    fn qmc_estimate_basics() {
        let pts = small_net();
        assert!((qmc_estimate(&pts, |_| 3.5) - 3.5).abs() < 1e-15);
        // mean of first coordinate over the full one-dim lattice
        let mean = qmc_estimate(&pts, |x| x[0]);
        assert!((mean - 15.0 / 32.0).abs() < 1e-14);
    }

    #[test]
    fn test_function_values_and_integral() {
        let f1 = test_function(1);
        assert_eq!(f1(&[0.0]), 1.0);
        assert!((f1(&[1.0]) - 0.5).abs() < 1e-15);
        // one-dim Riemann midpoint estimate of ln 2
        let n = 1 << 16;
        let mut acc = KahanSum::default();
        for i in 0..n {
            acc.add(f1(&[(i as f64 + 0.5) / n as f64]));
        }
        assert!((acc.value() / n as f64 - std::f64::consts::LN_2).abs() < 1e-9);
        // QMC on the lattice should also approach ln 2
        use crate::galois::{smallest_irreducible, GFPoly};
        use crate::pointset::{generate_points, PolyLattice};
        let p = smallest_irreducible(2, 10);
        let lat = PolyLattice::new(2, 10, p, vec![GFPoly::from_int(2, 1)]).unwrap();
        let pts = generate_points(&lat).unwrap();
        assert!((qmc_estimate(&pts, &f1) - std::f64::consts::LN_2).abs() < 1e-3);
    }

    #[test]
    fn rmse_constant_function_is_zero() {
        let pts = small_net();
        let rep = rmse_experiment(&pts, |_| 2.0, 10, 1).unwrap();
        assert_eq!(rep.rmse, 0.0);
        assert!((rep.q_bar - 2.0).abs() < 1e-15);
        assert!(rmse_experiment(&pts, |_| 2.0, 1, 1).is_err());
    }

    #[test]
    fn rmse_reproducible_and_serializable() {
        let pts = small_net();
        let f = test_function(2);
        let a = rmse_experiment(&pts, &f, 8, 123).unwrap();
        let b = rmse_experiment(&pts, &f, 8, 123).unwrap();
        assert_eq!(a.per_shift, b.per_shift);
        assert_eq!(a.rmse, b.rmse);
        let js = serde_json::to_string(&a).unwrap();
        let back: RmseReport = serde_json::from_str(&js).unwrap();
        assert_eq!(back.per_shift, a.per_shift);
        assert!(a.csv_row(4, 2, 2, 2, "j^-2").starts_with("4,2,2,2,j^-2,8,"));
    }

    #[test]
    fn shift_walsh_orthogonality() {
        // averaging wal_k(x1 (+) sigma) conj(wal_l(x2 (+) sigma)) over all
        // P-digit shifts gives wal_k(x1 (-) x2) when k = l, else 0
        let (b, p_digits) = (2u32, 4u32);
        let cap = checked_pow(b, p_digits).unwrap();
        for &(x1, x2) in &[(3u64, 9u64), (0, 13), (7, 7)] {
            for k in 0..6u64 {
                for l in 0..6u64 {
                    let mut acc = num_complex::Complex64::new(0.0, 0.0);
                    for sigma in 0..cap {
                        let z1 = digitwise_add(b, x1, sigma);
                        let z2 = digitwise_add(b, x2, sigma);
                        acc += walsh_char(b, k, z1, p_digits)
                            * walsh_char(b, l, z2, p_digits).conj();
                    }
                    acc /= cap as f64;
                    let want = if k == l {
                        walsh_char(b, k, digitwise_sub(b, x1, x2), p_digits)
                    } else {
                        num_complex::Complex64::new(0.0, 0.0)
                    };
                    assert!((acc - want).norm() < 1e-12, "k={k} l={l}");
                }
            }
        }
    }
}
