//! Reproducing-kernel worst-case-error oracles: pairwise kernel sums for the
//! weighted unanchored Sobolev space of smoothness `alpha`, plain and
//! averaged over digital shifts. These are the slow reference quantities the
//! fast criterion is checked against.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::criterion::KahanSum;
use crate::error::{HodnError, Result};
use crate::pointset::{checked_pow, digitwise_add, digitwise_sub, PointSet};
use crate::weights::Weights;

/// Pairwise kernel sums are O(N^2 s); keep the oracle at desk scale.
pub const MAX_ORACLE_POINTS: usize = 1 << 12;

/// Bernoulli polynomial `B_r(x)`, exact coefficients, degrees 1..=6.
pub fn bernoulli_poly(r: u32, x: f64) -> f64 {
    match r {
        1 => x - 0.5,
        2 => (x - 1.0) * x + 1.0 / 6.0,
        3 => ((x - 1.5) * x + 0.5) * x,
        4 => (((x - 2.0) * x + 1.0) * x) * x - 1.0 / 30.0,
        5 => ((((x - 2.5) * x + 5.0 / 3.0) * x) * x - 1.0 / 6.0) * x,
        6 => ((((x - 3.0) * x + 2.5) * x) * x - 0.5) * x * x + 1.0 / 42.0,
        _ => panic!("Bernoulli polynomial degree {r} not tabulated"),
    }
}

fn check_alpha(alpha: u32) -> Result<()> {
    if !(2..=3).contains(&alpha) {
        return Err(HodnError::InvalidParameter(format!(
            "kernel oracle supports alpha in {{2, 3}}, got {alpha}"
        )));
    }
    Ok(())
}

/// One-dimensional kernel
/// `sum_r B_r(x) B_r(y) / (r!)^2 + (-1)^(alpha+1) B_2alpha(|x-y|) / (2alpha)!`.
pub fn kernel_k(alpha: u32, x: f64, y: f64) -> f64 {
    let mut acc = 0.0;
    let mut fact = 1.0f64;
    for r in 1..=alpha {
        fact *= r as f64;
        acc += bernoulli_poly(r, x) * bernoulli_poly(r, y) / (fact * fact);
    }
    let mut fact2a = 1.0f64;
    for r in 1..=2 * alpha {
        fact2a *= r as f64;
    }
    let sign = if alpha % 2 == 0 { -1.0 } else { 1.0 };
    acc + sign * bernoulli_poly(2 * alpha, (x - y).abs()) / fact2a
}

/// Squared worst-case error from float coordinates (row-major `n x s`):
/// `-gamma_0 + (1/N^2) sum_(n,n') K_gamma`, organized so the empty-set term
/// cancels symbolically.
fn wce_squared_from_coords(
    coords: &[f64],
    s: usize,
    weights: &Weights,
    alpha: u32,
) -> Result<f64> {
    check_alpha(alpha)?;
    let n = coords.len() / s;
    if n > MAX_ORACLE_POINTS {
        return Err(HodnError::BudgetExceeded(format!(
            "kernel oracle limited to {MAX_ORACLE_POINTS} points, got {n}"
        )));
    }
    let mut acc = KahanSum::default();
    let mut k = vec![0.0f64; s];
    for a in 0..n {
        for b in 0..n {
            for j in 0..s {
                k[j] = kernel_k(alpha, coords[a * s + j], coords[b * s + j]);
            }
            acc.add(weighted_sum_nonempty(weights, &k));
        }
    }
    Ok(acc.value() / (n as f64 * n as f64))
}

/// `sum_(u nonempty) gamma_u prod_(j in u) k_j`, in deviation form for
/// product weights.
fn weighted_sum_nonempty(weights: &Weights, k: &[f64]) -> f64 {
    match weights {
        Weights::Product(gamma) => {
            let mut t = 0.0;
            for (j, &kj) in k.iter().enumerate() {
                let x = gamma[j] * kj;
                t = t + x + t * x;
            }
            t
        }
        Weights::General { .. } => {
            let mut sum = 0.0;
            for mask in 1u64..(1 << k.len()) {
                let g = weights.gamma_subset(mask);
                if g == 0.0 {
                    continue;
                }
                let mut term = g;
                let mut mm = mask;
                while mm != 0 {
                    let j = mm.trailing_zeros() as usize;
                    term *= k[j];
                    mm &= mm - 1;
                }
                sum += term;
            }
            sum
        }
    }
}

/// Squared worst-case error of a point set, unshifted.
pub fn kernel_wce_squared(points: &PointSet, weights: &Weights, alpha: u32) -> Result<f64> {
    if weights.dim() < points.dim {
        return Err(HodnError::DimensionMismatch(format!(
            "weights cover dim {} < {}",
            weights.dim(),
            points.dim
        )));
    }
    let scale = (points.b as f64).powi(points.m as i32);
    let coords: Vec<f64> = points.digits.iter().map(|&d| d as f64 / scale).collect();
    wce_squared_from_coords(&coords, points.dim, weights, alpha)
}

/// Mean of the squared worst-case error over the given digital shifts.
/// Shifts are fixed points at `shift_m` digits (`shift_m >= points.m`);
/// points are padded with zero digits, so the shifted coordinate is
/// `(x * b^(shift_m - m) xor sigma) / b^shift_m`.
pub fn wce_squared_shifted_by(
    points: &PointSet,
    weights: &Weights,
    alpha: u32,
    shifts: &[Vec<u64>],
    shift_m: u32,
) -> Result<f64> {
    if shift_m < points.m {
        return Err(HodnError::InvalidParameter(
            "shift precision below point precision".into(),
        ));
    }
    let pad = checked_pow(points.b, shift_m - points.m)?;
    let scale = (points.b as f64).powi(shift_m as i32);
    let n = points.n_points();
    let s = points.dim;
    let mut acc = KahanSum::default();
    let mut coords = vec![0.0f64; n * s];
    for shift in shifts {
        if shift.len() != s {
            return Err(HodnError::DimensionMismatch(
                "shift dimension mismatch".into(),
            ));
        }
        for i in 0..n * s {
            let padded = points.digits[i] * pad;
            coords[i] = digitwise_add(points.b, padded, shift[i % s]) as f64 / scale;
        }
        acc.add(wce_squared_from_coords(&coords, s, weights, alpha)?);
    }
    Ok(acc.value() / shifts.len() as f64)
}

/// Monte Carlo estimate of the shift-averaged squared worst-case error,
/// using uniformly random digital shifts at `shift_m` digits.
pub fn shifted_mean_square_wce(
    points: &PointSet,
    weights: &Weights,
    alpha: u32,
    n_shifts: usize,
    shift_m: u32,
    seed: u64,
) -> Result<f64> {
    if n_shifts == 0 {
        return Err(HodnError::InvalidParameter("need at least one shift".into()));
    }
    let cap = checked_pow(points.b, shift_m)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let shifts: Vec<Vec<u64>> = (0..n_shifts)
        .map(|_| (0..points.dim).map(|_| rng.gen_range(0..cap)).collect())
        .collect();
    wce_squared_shifted_by(points, weights, alpha, &shifts, shift_m)
}

/// 8-node Gauss-Legendre rule on [0, 1]; exact for polynomials of degree
/// <= 15, well past the degree-2alpha integrands here.
const GL8_NODES: [f64; 8] = [
    0.019855071751231884,
    0.10166676129318664,
    0.2372337950418355,
    0.40828267875217505,
    0.591717321247825,
    0.7627662049581645,
    0.8983332387068134,
    0.9801449282487681,
];
const GL8_WEIGHTS: [f64; 8] = [
    0.05061426814518813,
    0.11119051722668723,
    0.15685332293894363,
    0.18134189168918097,
    0.18134189168918097,
    0.15685332293894363,
    0.11119051722668723,
    0.05061426814518813,
];

/// Exact shift-averaged squared worst-case error.
///
/// A uniform shift splits into a uniform `m`-digit head and a uniform tail
/// `tau in [0, b^-m)` shared by both points of every pair, so `|x - y|` is
/// constant in `tau` and the head average reduces, per coordinate, to a
/// function of the digitwise difference only. The tail average of the
/// polynomial part is done by Gauss-Legendre, which is exact here.
pub fn shifted_mean_square_wce_exhaustive(
    points: &PointSet,
    weights: &Weights,
    alpha: u32,
) -> Result<f64> {
    check_alpha(alpha)?;
    if weights.dim() < points.dim {
        return Err(HodnError::DimensionMismatch(format!(
            "weights cover dim {} < {}",
            weights.dim(),
            points.dim
        )));
    }
    let bp = checked_pow(points.b, points.m)?;
    if bp > 1 << 9 {
        return Err(HodnError::BudgetExceeded(format!(
            "exhaustive shift table is O(b^2m) = {bp}^2 kernel integrals"
        )));
    }
    let scale = bp as f64;
    let inv_scale = 1.0 / scale;

    // tau-averaged kernel of two m-digit heads
    let kbar = |z: u64, zp: u64| -> f64 {
        let (x0, y0) = (z as f64 * inv_scale, zp as f64 * inv_scale);
        let mut fact = 1.0f64;
        let mut acc = 0.0;
        for r in 1..=alpha {
            fact *= r as f64;
            let inv = 1.0 / (fact * fact);
            let mut integral = 0.0;
            for (node, w) in GL8_NODES.iter().zip(&GL8_WEIGHTS) {
                let tau = node * inv_scale;
                integral += w * bernoulli_poly(r, x0 + tau) * bernoulli_poly(r, y0 + tau);
            }
            acc += integral * inv; // weights already average over [0, b^-m)
        }
        let mut fact2a = 1.0f64;
        for r in 1..=2 * alpha {
            fact2a *= r as f64;
        }
        let sign = if alpha % 2 == 0 { -1.0 } else { 1.0 };
        acc + sign * bernoulli_poly(2 * alpha, (x0 - y0).abs()) / fact2a
    };

    // mbar[delta] = head-average of kbar over pairs at digitwise difference
    // delta: heads w and w (+) delta
    let mut mbar = vec![0.0f64; bp as usize];
    for delta in 0..bp {
        let mut acc = KahanSum::default();
        for w in 0..bp {
            acc.add(kbar(w, digitwise_add(points.b, w, delta)));
        }
        mbar[delta as usize] = acc.value() / bp as f64;
    }

    let n = points.n_points();
    let s = points.dim;
    let mut acc = KahanSum::default();
    let mut k = vec![0.0f64; s];
    for a in 0..n {
        for b in 0..n {
            for (j, kj) in k.iter_mut().enumerate() {
                let delta = digitwise_sub(points.b, points.get(b, j), points.get(a, j));
                *kj = mbar[delta as usize];
            }
            acc.add(weighted_sum_nonempty(weights, &k));
        }
    }
    Ok(acc.value() / (n as f64 * n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_reference_values() {
        // closed forms at 0: B_r(0) are the Bernoulli numbers
        assert_eq!(bernoulli_poly(1, 0.0), -0.5);
        assert!((bernoulli_poly(2, 0.0) - 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(bernoulli_poly(3, 0.0), 0.0);
        assert!((bernoulli_poly(4, 0.0) + 1.0 / 30.0).abs() < 1e-16);
        assert_eq!(bernoulli_poly(5, 0.0), 0.0);
        assert!((bernoulli_poly(6, 0.0) - 1.0 / 42.0).abs() < 1e-16);
        // symmetry B_r(1-x) = (-1)^r B_r(x)
        for r in 1..=6u32 {
            for &x in &[0.1, 0.35, 0.71] {
                let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
                assert!(
                    (bernoulli_poly(r, 1.0 - x) - sign * bernoulli_poly(r, x)).abs() < 1e-14,
                    "r={r} x={x}"
                );
            }
        }
        // difference equation B_r(x+1) - B_r(x) = r x^(r-1)
        for r in 1..=6u32 {
            for &x in &[0.0, 0.2, 0.9] {
                let lhs = poly_at(r, x + 1.0) - poly_at(r, x);
                assert!((lhs - r as f64 * x.powi(r as i32 - 1)).abs() < 1e-12);
            }
        }
    }

    // same polynomials evaluated without the nested form, as a cross-check
    fn poly_at(r: u32, x: f64) -> f64 {
        match r {
            1 => x - 0.5,
            2 => x * x - x + 1.0 / 6.0,
            3 => x.powi(3) - 1.5 * x * x + 0.5 * x,
            4 => x.powi(4) - 2.0 * x.powi(3) + x * x - 1.0 / 30.0,
            5 => x.powi(5) - 2.5 * x.powi(4) + 5.0 / 3.0 * x.powi(3) - x / 6.0,
            6 => {
                x.powi(6) - 3.0 * x.powi(5) + 2.5 * x.powi(4) - 0.5 * x * x + 1.0 / 42.0
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn nested_and_plain_bernoulli_agree() {
        for r in 1..=6u32 {
            for i in 0..50 {
                let x = i as f64 / 50.0;
                assert!((bernoulli_poly(r, x) - poly_at(r, x)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn kernel_at_origin() {
        // alpha=2: B1(0)^2 + B2(0)^2/4 - B4(0)/24 = 1/4 + 1/144 + 1/720
        let want = 0.25 + 1.0 / 144.0 + 1.0 / 720.0;
        assert!((kernel_k(2, 0.0, 0.0) - want).abs() < 1e-15);
    }

    #[test]
    fn kernel_mean_is_zero() {
        // integral of K(x, y) dx = 0 for fixed y; midpoint rule converges
        for alpha in [2u32, 3] {
            for &y in &[0.0, 0.3, 0.77] {
                let n = 20000;
                let mut acc = KahanSum::default();
                for i in 0..n {
                    let x = (i as f64 + 0.5) / n as f64;
                    acc.add(kernel_k(alpha, x, y));
                }
                assert!(
                    (acc.value() / n as f64).abs() < 1e-8,
                    "alpha={alpha} y={y}"
                );
            }
        }
    }

    #[test]
    fn single_point_wce() {
        let pts = PointSet::new(2, 4, 1, vec![0]).unwrap();
        let w = Weights::product(vec![1.0]).unwrap();
        let e2 = kernel_wce_squared(&pts, &w, 2).unwrap();
        let want = 0.25 + 1.0 / 144.0 + 1.0 / 720.0; // gamma_1 K(0,0)
        assert!((e2 - want).abs() < 1e-14);
    }

    #[test]
    fn zero_weights_give_zero_error() {
        let pts = PointSet::new(2, 3, 2, vec![0, 0, 4, 2]).unwrap();
        let w = Weights::product(vec![0.0, 0.0]).unwrap();
        assert_eq!(kernel_wce_squared(&pts, &w, 2).unwrap(), 0.0);
    }

    #[test]
    fn zero_shift_reduces_to_plain_wce() {
        let pts = PointSet::new(2, 3, 2, vec![0, 0, 4, 2, 6, 1]).unwrap();
        let w = Weights::product(vec![1.0, 0.5]).unwrap();
        let plain = kernel_wce_squared(&pts, &w, 2).unwrap();
        let shifted =
            wce_squared_shifted_by(&pts, &w, 2, &[vec![0, 0]], 3).unwrap();
        assert!((plain - shifted).abs() < 1e-15);
    }

    #[test]
    fn mc_estimate_stabilizes_near_exhaustive() {
        use crate::galois::{smallest_irreducible, GFPoly};
        use crate::pointset::{generate_points, PolyLattice};
        let p = smallest_irreducible(2, 3);
        let lat =
            PolyLattice::new(2, 3, p, vec![GFPoly::from_int(2, 1), GFPoly::from_int(2, 5)])
                .unwrap();
        let base = generate_points(&lat).unwrap();
        let net = crate::interlace::interlace_net(&base, 2).unwrap();
        let w = Weights::product(vec![1.0]).unwrap();
        let exact = shifted_mean_square_wce_exhaustive(&net, &w, 2).unwrap();
        // estimate with many high-precision shifts; also gather spread
        let n_shifts = 400;
        let per: Vec<f64> = (0..n_shifts)
            .map(|i| shifted_mean_square_wce(&net, &w, 2, 1, 30, 1000 + i).unwrap())
            .collect();
        let mean: f64 = per.iter().sum::<f64>() / n_shifts as f64;
        let var: f64 = per.iter().map(|e| (e - mean).powi(2)).sum::<f64>()
            / (n_shifts as f64 - 1.0);
        let sigma_mean = (var / n_shifts as f64).sqrt();
        assert!(
            (mean - exact).abs() < 3.0 * sigma_mean + 1e-12,
            "mean {mean}, exact {exact}, sigma {sigma_mean}"
        );
    }

    #[test]
    fn exhaustive_shift_bounded_by_criterion() {
        use crate::criterion::{criterion_b, CriterionParams};
        use crate::galois::{smallest_irreducible, GFPoly};
        use crate::pointset::{generate_points, PolyLattice};
        let m = 3;
        let p = smallest_irreducible(2, m);
        let q = [1u64, 5].iter().map(|&e| GFPoly::from_int(2, e)).collect();
        let lat = PolyLattice::new(2, m, p, q).unwrap();
        let base = generate_points(&lat).unwrap();
        let net = crate::interlace::interlace_net(&base, 2).unwrap();
        let w = Weights::product(vec![1.0]).unwrap();
        let tilde_e2 = shifted_mean_square_wce_exhaustive(&net, &w, 2).unwrap();
        let params = CriterionParams::new(2, 2, 2).unwrap();
        let b_val = criterion_b(&params, &base, &w).unwrap();
        assert!(tilde_e2 > 0.0);
        assert!(
            tilde_e2 <= b_val * (1.0 + 1e-10),
            "tilde-e2 {tilde_e2} vs B {b_val}"
        );
    }

    #[test]
    fn unsupported_alpha_rejected() {
        let pts = PointSet::new(2, 2, 1, vec![0]).unwrap();
        let w = Weights::product(vec![1.0]).unwrap();
        assert!(kernel_wce_squared(&pts, &w, 4).is_err());
        assert!(kernel_wce_squared(&pts, &w, 1).is_err());
    }
}
