//! The mean-square worst-case-error criterion B for interlaced polynomial
//! lattice point sets, its per-point computable form, a dual-space oracle,
//! and the closed-form sums used for truncation control.

use crate::error::{HodnError, Result};
use crate::galois::GFPoly;
use crate::interlace::mu_weight;
use crate::pointset::{checked_pow, PointSet, PolyLattice};
use crate::weights::Weights;

/// Compensated (Kahan) accumulator for long float sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Decay constant of Walsh coefficients of smooth functions: `C_(1,b)` is
/// `1/(2 sin(pi/b))`, higher orders pick up a factor per derivative.
pub fn walsh_decay_constant(b: u32, tau: u32) -> f64 {
    let bf = b as f64;
    let s = 2.0 * (std::f64::consts::PI / bf).sin();
    if tau == 1 {
        1.0 / s
    } else {
        (1.0 + 1.0 / bf + 1.0 / (bf * (bf + 1.0))).powi(tau as i32 - 2) / s.powi(tau as i32)
    }
}

fn c_tilde(b: u32, alpha: u32) -> f64 {
    let bf = b as f64;
    let s = 2.0 * (std::f64::consts::PI / bf).sin();
    2.0 * (1.0 + 1.0 / bf + 1.0 / (bf * (bf + 1.0))).powi(2 * alpha as i32 - 2)
        / s.powi(2 * alpha as i32)
}

/// `D_(alpha,b)`: constant in the kernel-coefficient bound
/// `|K^hat(k)| <= D * b^(-2 mu_alpha(k))`.
pub fn d_constant(b: u32, alpha: u32) -> f64 {
    let bf = b as f64;
    let ct = c_tilde(b, alpha);
    (1..=alpha)
        .map(|nu| {
            let c_prime: f64 = (nu..=alpha)
                .map(|tau| {
                    let c = walsh_decay_constant(b, tau);
                    c * c * bf.powi(-2 * (tau as i32 - nu as i32))
                })
                .sum();
            c_prime + ct * bf.powi(-2 * (alpha as i32 - nu as i32))
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Parameters of the criterion: base, smoothness `alpha >= 2`, interlacing
/// factor `d >= 1`, with the derived constants cached.
#[derive(Debug, Clone)]
pub struct CriterionParams {
    pub b: u32,
    pub alpha: u32,
    pub d: u32,
    pub min_ad: u32,
    /// `D_(alpha,b)`.
    pub d_const: f64,
    /// `D~ = b^((2d-1) alpha) * D_(alpha,b)`.
    pub dtilde: f64,
}

impl CriterionParams {
    pub fn new(b: u32, alpha: u32, d: u32) -> Result<Self> {
        if alpha < 2 {
            return Err(HodnError::InvalidParameter(format!(
                "criterion requires alpha >= 2, got {alpha}"
            )));
        }
        if d == 0 {
            return Err(HodnError::InvalidParameter("interlacing factor d >= 1".into()));
        }
        let d_const = d_constant(b, alpha);
        let dtilde = (b as f64).powi(((2 * d - 1) * alpha) as i32) * d_const;
        Ok(CriterionParams {
            b,
            alpha,
            d,
            min_ad: alpha.min(d),
            d_const,
            dtilde,
        })
    }

    /// `r_(alpha,d)(l)`: 1 at zero, else `b^(-2 min(alpha,d) mu_1(l) - alpha)`.
    pub fn r_weight(&self, l: u64) -> f64 {
        if l == 0 {
            1.0
        } else {
            let mu1 = mu_weight(self.b, l, 1);
            (self.b as f64).powi(-((2 * self.min_ad * mu1 + self.alpha) as i32))
        }
    }

    /// `chi(y)` for `y` an m-digit fixed point. Only depends on the position
    /// of the most significant nonzero digit: `y in [b^-a, b^(-a+1))` gives
    /// `floor(log_b y) = -a`, and `y = 0` drops the second numerator term.
    pub fn chi_fixed(&self, y: u64, m: u32) -> f64 {
        let bf = self.b as f64;
        let two_min = 2 * self.min_ad as i32;
        let denom = bf.powi(self.alpha as i32) * (bf.powi(two_min) - bf);
        let top = if y == 0 {
            0.0
        } else {
            let a = m as i32 - ilog(self.b, y) as i32; // floor(log_b y) = -a
            bf.powi(-(two_min - 1) * a) * (bf.powi(two_min) - 1.0)
        };
        (bf - 1.0 - top) / denom
    }

    /// `chi` takes only `m+1` distinct values on m-digit fixed points;
    /// `table[0]` is `chi(0)` and `table[a]` covers `y in [b^-a, b^(-a+1))`.
    pub fn chi_table(&self, m: u32) -> Vec<f64> {
        let mut t = Vec::with_capacity(m as usize + 1);
        t.push(self.chi_fixed(0, m));
        for a in 1..=m {
            t.push(self.chi_fixed(checked_pow(self.b, m - a).unwrap(), m));
        }
        t
    }

    /// Index into [`Self::chi_table`] for a fixed point `y`.
    pub fn chi_index(&self, y: u64, m: u32) -> usize {
        if y == 0 {
            0
        } else {
            (m - ilog(self.b, y)) as usize
        }
    }
}

fn ilog(b: u32, y: u64) -> u32 {
    debug_assert!(y > 0);
    let mut t = 0;
    let mut v = y;
    while v >= b as u64 {
        v /= b as u64;
        t += 1;
    }
    t
}

/// Criterion value for the first `r` columns of a non-interlaced point set
/// (`r = d (j1 - 1) + d1` with partial last block `d1`), evaluated point by
/// point. `r = points.dim` gives the full criterion.
pub fn criterion_b_partial(
    params: &CriterionParams,
    points: &PointSet,
    weights: &Weights,
    r: usize,
) -> Result<f64> {
    if points.b != params.b {
        return Err(HodnError::BaseMismatch(points.b, params.b));
    }
    if r == 0 || r > points.dim {
        return Err(HodnError::DimensionMismatch(format!(
            "component count {r} out of range 1..={}",
            points.dim
        )));
    }
    let d = params.d as usize;
    let j1 = (r + d - 1) / d;
    if weights.dim() < j1 {
        return Err(HodnError::DimensionMismatch(format!(
            "weights cover dim {} < {j1} interlaced coordinates",
            weights.dim()
        )));
    }
    let chi = params.chi_table(points.m);
    let n_points = points.n_points();
    let dtilde = params.dtilde;

    if r == 1 {
        if let Some(v) = criterion_b_single_exact(params, points, weights) {
            return Ok(v);
        }
    }

    let mut acc = KahanSum::default();
    let mut blocks = vec![0.0f64; j1];
    for n in 0..n_points {
        let row = points.row(n);
        // blocks[j] = prod over digits in block j of (1 + chi(y)); the last
        // block may be partial
        for (j, blk) in blocks.iter_mut().enumerate() {
            let lo = j * d;
            let hi = ((j + 1) * d).min(r);
            let mut prod = 1.0;
            for &y in &row[lo..hi] {
                prod *= 1.0 + chi[params.chi_index(y, points.m)];
            }
            *blk = prod;
        }
        match weights {
            Weights::Product(gamma) => {
                // running prod_j (1 + x_j) - 1 with x_j = gamma_j D~ (block_j - 1),
                // kept in deviation form to avoid cancellation for small B
                let mut t = 0.0;
                for (j, blk) in blocks.iter().enumerate() {
                    let x = gamma[j] * dtilde * (blk - 1.0);
                    t = t + x + t * x;
                }
                acc.add(t);
            }
            Weights::General { .. } => {
                // sum over nonempty subsets of the j1 active interlaced
                // coordinates; block factor is (-1 + prod(1 + chi))
                let mut inner = KahanSum::default();
                for mask in 1u64..(1 << j1) {
                    let gamma_u = weights.gamma_subset(mask);
                    if gamma_u == 0.0 {
                        continue;
                    }
                    let mut term = gamma_u;
                    let mut mm = mask;
                    while mm != 0 {
                        let j = mm.trailing_zeros() as usize;
                        term *= dtilde * (blocks[j] - 1.0);
                        mm &= mm - 1;
                    }
                    inner.add(term);
                }
                acc.add(inner.value());
            }
        }
    }
    Ok(acc.value() / n_points as f64)
}

/// One-component criterion `B = gamma_1 D~ mean_n chi(y_n1)` with the chi
/// sum done exactly: over a common denominator `b^alpha (b^(2min) - b)
/// b^((2min-1)m)` every chi value has an integer numerator, so the heavy
/// cancellation in the mean costs no precision. Returns `None` when the
/// integer range would overflow; the caller falls back to the float path.
fn criterion_b_single_exact(
    params: &CriterionParams,
    points: &PointSet,
    weights: &Weights,
) -> Option<f64> {
    let b = points.b as i128;
    let m = points.m;
    let two_min = 2 * params.min_ad;
    let shift = ((two_min - 1) * m) as u32;
    let pow = |e: u32| -> Option<i128> { b.checked_pow(e) };
    let top = pow(shift)?;
    // guard the worst case: n_points * max|numerator|
    let max_num = top.checked_mul((b - 1).max(b.checked_pow(two_min)? - 1))?;
    max_num.checked_mul(points.n_points() as i128)?;

    // numerators[idx] over the common denominator, idx as in chi_table
    let mut numer = Vec::with_capacity(m as usize + 1);
    numer.push((b - 1) * top);
    for a in 1..=m {
        let high = (b - 1) * pow((two_min - 1) * a)? - (pow(two_min)? - 1);
        numer.push(high * pow((two_min - 1) * (m - a))?);
    }
    let mut sum: i128 = 0;
    for n in 0..points.n_points() {
        sum += numer[params.chi_index(points.get(n, 0), m)];
    }
    let denom = (params.b as f64).powi(params.alpha as i32)
        * ((params.b as f64).powi(two_min as i32) - params.b as f64)
        * top as f64;
    let gamma_1 = weights.gamma_subset(1);
    Some(gamma_1 * params.dtilde * (sum as f64 / denom) / points.n_points() as f64)
}

/// Criterion value over all columns of `points`.
pub fn criterion_b(params: &CriterionParams, points: &PointSet, weights: &Weights) -> Result<f64> {
    criterion_b_partial(params, points, weights, points.dim)
}

/// Closed form of the criterion for the one-component rule `q_1 = 1`:
/// only frequencies divisible by `b^m` survive in the dual space.
pub fn criterion_b_base_case(params: &CriterionParams, m: u32, gamma_1: f64) -> f64 {
    let bf = params.b as f64;
    let two_min = 2 * params.min_ad;
    gamma_1 * params.dtilde * (bf - 1.0)
        / (bf.powi((two_min * m + params.alpha) as i32) * (bf.powi(two_min as i32) - bf))
}

/// `sum_(l >= 1) r(l)^lambda` in closed form.
pub fn r_weight_sum(params: &CriterionParams, lambda: f64) -> f64 {
    let bf = params.b as f64;
    let two_min = 2.0 * params.min_ad as f64;
    (bf - 1.0) / (bf.powf(lambda * params.alpha as f64) * (bf.powf(lambda * two_min) - bf))
}

/// `sum_(l >= 1, b^m | l) r(l)^lambda` in closed form.
pub fn r_weight_sum_divisible(params: &CriterionParams, lambda: f64, m: u32) -> f64 {
    let bf = params.b as f64;
    let two_min = 2.0 * params.min_ad as f64;
    (bf - 1.0)
        / (bf.powf(lambda * (two_min * m as f64 + params.alpha as f64))
            * (bf.powf(lambda * two_min) - bf))
}

/// Criterion value via literal dual-space enumeration, for cross-checking
/// the per-point formula on tiny instances.
///
/// Frequencies are capped at `b^digit_cap` per component; the enumeration is
/// reorganized so the cap costs nothing extra: `l = a + b^m t` with
/// `a < b^m`, and dual membership depends only on `a`, while the tail over
/// `t >= 1` has `mu_1(a + b^m t) = m + mu_1(t)` independent of `a`.
///
/// Returns `(value, truncation_bound)` where the bound dominates the mass of
/// all frequency vectors with any component `>= b^digit_cap`.
pub fn criterion_b_dual_oracle(
    params: &CriterionParams,
    lat: &PolyLattice,
    weights: &Weights,
    digit_cap: u32,
) -> Result<(f64, f64)> {
    if lat.b != params.b {
        return Err(HodnError::BaseMismatch(lat.b, params.b));
    }
    let ds = lat.dim();
    let d = params.d as usize;
    if digit_cap < lat.m {
        return Err(HodnError::InvalidParameter(
            "digit cap below point precision".into(),
        ));
    }
    if ds > 20 {
        return Err(HodnError::InvalidParameter(
            "dual-space oracle limited to ds <= 20 components".into(),
        ));
    }
    let bm = checked_pow(lat.b, lat.m)?;
    let bf = params.b as f64;
    let two_min = 2 * params.min_ad;

    // per-component tail over t = 1 .. b^(cap - m) - 1, summed literally
    let t_cap = checked_pow(lat.b, digit_cap - lat.m)?;
    let mut tail_acc = KahanSum::default();
    for t in 1..t_cap {
        let mu = lat.m + mu_weight(lat.b, t, 1);
        tail_acc.add(bf.powi(-((two_min * mu + params.alpha) as i32)));
    }
    let tail_const = tail_acc.value();

    // remaining mass beyond the cap: frequencies with mu_1 >= digit_cap,
    // (b-1) b^(mu-1) of them at each mu, geometric in mu
    let rem_per_coord = (bf - 1.0)
        * bf.powi(digit_cap as i32 - 1 - (2 * params.min_ad * digit_cap) as i32)
        / (bf.powi(params.alpha as i32) * (1.0 - bf.powi(1 - 2 * params.min_ad as i32)));
    let s_cap_per_coord: f64 = {
        // sum over 1 <= l < b^cap of r(l): same grouping by msd position
        let mut s = KahanSum::default();
        for mu in 1..=digit_cap {
            let count = (bf - 1.0) * bf.powi(mu as i32 - 1);
            s.add(count * bf.powi(-((two_min * mu + params.alpha) as i32)));
        }
        s.value()
    };
    let s_full_per_coord = s_cap_per_coord + rem_per_coord;

    let mut value = KahanSum::default();
    let mut trunc = KahanSum::default();
    for w in 1u64..(1 << ds) {
        let members: Vec<usize> = (0..ds).filter(|j| (w >> j) & 1 == 1).collect();
        let k = members.len();
        // phi(w): interlaced coordinates touched by w
        let mut phi_mask = 0u64;
        for &j in &members {
            phi_mask |= 1 << (j / d);
        }
        let gamma = weights.gamma_subset(phi_mask);
        if gamma == 0.0 {
            continue;
        }
        let scale = gamma * params.dtilde.powi(phi_mask.count_ones() as i32);

        // enumerate truncated parts a_j in [0, b^m)^k, keep dual vectors
        let mut inner = KahanSum::default();
        let mut a = vec![0u64; k];
        loop {
            // dual check: sum a_j(x) q_j(x) mod p == 0
            let mut acc_poly = GFPoly::zero(lat.b);
            for (&aj, &j) in a.iter().zip(&members) {
                let t = GFPoly::from_int(lat.b, aj);
                acc_poly = acc_poly.add(&t.mul(&lat.q[j])?)?;
            }
            if acc_poly.rem(&lat.p)?.is_zero() {
                let mut prod = 1.0;
                for &aj in &a {
                    let head = if aj >= 1 { params.r_weight(aj) } else { 0.0 };
                    prod *= head + tail_const;
                }
                inner.add(prod);
            }
            // odometer
            let mut pos = 0;
            loop {
                if pos == k {
                    break;
                }
                a[pos] += 1;
                if a[pos] < bm {
                    break;
                }
                a[pos] = 0;
                pos += 1;
            }
            if pos == k {
                break;
            }
        }
        value.add(scale * inner.value());
        trunc.add(scale * (s_full_per_coord.powi(k as i32) - s_cap_per_coord.powi(k as i32)));
    }
    Ok((value.value(), trunc.value()))
}
