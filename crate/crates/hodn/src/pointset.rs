//! Polynomial lattice point sets, Walsh characters, dual-net membership,
//! and ingestion/export of digital nets.
//!
//! Points are kept as exact base-b fixed-point integers: an entry `y` with
//! precision `m` encodes the value `y * b^-m`. Walsh characters and the
//! quality criterion stay bit-exact this way; floats appear only at the
//! integration boundary.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{HodnError, Result};
use crate::galois::{self, GFPoly};

/// A polynomial lattice rule specification: modulus `p` of degree `m` and a
/// generating vector of nonzero polynomials of degree < `m`.
#[derive(Debug, Clone)]
pub struct PolyLattice {
    pub b: u32,
    pub m: u32,
    pub p: GFPoly,
    pub q: Vec<GFPoly>,
}

impl PolyLattice {
    pub fn new(b: u32, m: u32, p: GFPoly, q: Vec<GFPoly>) -> Result<Self> {
        if p.base() != b {
            return Err(HodnError::BaseMismatch(p.base(), b));
        }
        if p.degree() != Some(m as usize) {
            return Err(HodnError::InvalidPoly(format!(
                "modulus degree {:?} != m = {m}",
                p.degree()
            )));
        }
        for qj in &q {
            if qj.base() != b {
                return Err(HodnError::BaseMismatch(qj.base(), b));
            }
            if qj.is_zero() || qj.degree().unwrap() >= m as usize {
                return Err(HodnError::InvalidPoly(format!(
                    "generating component {qj} not in R_(b,m)"
                )));
            }
        }
        Ok(PolyLattice { b, m, p, q })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn n_points(&self) -> u64 {
        (self.b as u64).pow(self.m)
    }
}

/// A point set in `[0,1)^dim` stored as fixed-point digit integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    pub b: u32,
    /// Digits of precision per coordinate; entries live in `[0, b^m)`.
    pub m: u32,
    pub dim: usize,
    /// Row-major `n_points x dim`.
    pub digits: Vec<u64>,
}

impl PointSet {
    pub fn new(b: u32, m: u32, dim: usize, digits: Vec<u64>) -> Result<Self> {
        if dim == 0 || digits.len() % dim != 0 {
            return Err(HodnError::DimensionMismatch(format!(
                "digit matrix of length {} is not a multiple of dim {dim}",
                digits.len()
            )));
        }
        let cap = checked_pow(b, m)?;
        if digits.iter().any(|&y| y >= cap) {
            return Err(HodnError::InvalidParameter(
                "fixed-point entry >= b^m".into(),
            ));
        }
        Ok(PointSet { b, m, dim, digits })
    }

    pub fn n_points(&self) -> usize {
        self.digits.len() / self.dim
    }

    pub fn get(&self, n: usize, j: usize) -> u64 {
        self.digits[n * self.dim + j]
    }

    pub fn row(&self, n: usize) -> &[u64] {
        &self.digits[n * self.dim..(n + 1) * self.dim]
    }

    /// Coordinate value as f64 (`digits * b^-m`).
    pub fn value(&self, n: usize, j: usize) -> f64 {
        self.get(n, j) as f64 / (self.b as f64).powi(self.m as i32)
    }
}

pub fn checked_pow(b: u32, m: u32) -> Result<u64> {
    (b as u64).checked_pow(m).ok_or_else(|| {
        HodnError::InvalidParameter(format!("b^m overflows 64 bits: {b}^{m}"))
    })
}

/// Generate the `b^m` lattice points: point `n`, coordinate `j` is
/// `v_m(n(x) q_j(x) / p(x))`.
pub fn generate_points(lat: &PolyLattice) -> Result<PointSet> {
    let n_points = lat.n_points();
    let dim = lat.dim();
    let mut digits = Vec::with_capacity(n_points as usize * dim);
    for n in 0..n_points {
        let n_poly = GFPoly::from_int(lat.b, n);
        for qj in &lat.q {
            let prod = galois::poly_mulmod(&n_poly, qj, &lat.p)?;
            digits.push(galois::laurent_fixed_point(&prod, &lat.p, lat.m)?);
        }
    }
    PointSet::new(lat.b, lat.m, dim, digits)
}

/// Truncation `tr_m(k)`: keep only the lowest `m` base-b digits of `k` as a
/// polynomial.
pub fn truncate_poly(b: u32, k: u64, m: u32) -> GFPoly {
    GFPoly::from_int(b, k % checked_pow(b, m).unwrap_or(u64::MAX))
}

/// Dual-net membership: `tr_m(k) . q == 0 mod p`.
pub fn dual_contains(lat: &PolyLattice, k: &[u64]) -> Result<bool> {
    if k.len() != lat.dim() {
        return Err(HodnError::DimensionMismatch(format!(
            "frequency vector length {} != dim {}",
            k.len(),
            lat.dim()
        )));
    }
    let mut acc = GFPoly::zero(lat.b);
    for (kj, qj) in k.iter().zip(&lat.q) {
        let t = truncate_poly(lat.b, *kj, lat.m);
        acc = acc.add(&t.mul(qj)?)?;
    }
    Ok(acc.rem(&lat.p)?.is_zero())
}

/// One-dimensional Walsh character `wal_k(y)` for `y` given as an m-digit
/// fixed point. Digits of `k` beyond the precision are treated as zero.
pub fn walsh_char(b: u32, k: u64, y: u64, m: u32) -> Complex64 {
    let e = walsh_exponent(b, k, y, m);
    unit_root(b, e)
}

fn walsh_exponent(b: u32, mut k: u64, y: u64, m: u32) -> u32 {
    // digit a of y (a = 1..m, most significant first) pairs with digit a-1 of k
    let bb = b as u64;
    let mut e = 0u64;
    let mut scale = checked_pow(b, m).unwrap() / bb; // b^(m-1)
    let mut a = 0;
    while k > 0 && a < m {
        let kappa = k % bb;
        let xi = (y / scale) % bb;
        e += kappa * xi;
        k /= bb;
        scale /= bb.max(1);
        a += 1;
    }
    (e % bb) as u32
}

fn unit_root(b: u32, e: u32) -> Complex64 {
    if b == 2 {
        return Complex64::new(if e == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    let theta = 2.0 * std::f64::consts::PI * e as f64 / b as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// Multi-dimensional character: product over coordinates.
pub fn walsh_char_vec(points: &PointSet, n: usize, k: &[u64]) -> Complex64 {
    let mut e = 0u32;
    for (j, &kj) in k.iter().enumerate() {
        e = (e + walsh_exponent(points.b, kj, points.get(n, j), points.m)) % points.b;
    }
    unit_root(points.b, e)
}

/// `(1/N) sum_n wal_k(x_n)`; exactly 0 or 1 for digital nets up to rounding.
pub fn character_sum(points: &PointSet, k: &[u64]) -> Result<Complex64> {
    if k.len() != points.dim {
        return Err(HodnError::DimensionMismatch(format!(
            "frequency vector length {} != dim {}",
            k.len(),
            points.dim
        )));
    }
    let n = points.n_points();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        acc += walsh_char_vec(points, i, k);
    }
    Ok(acc / n as f64)
}

/// Digitwise addition mod b of two fixed points with the same precision;
/// for b=2 this is XOR.
pub fn digitwise_add(b: u32, x: u64, y: u64) -> u64 {
    if b == 2 {
        return x ^ y;
    }
    let bb = b as u64;
    let mut out = 0u64;
    let mut place = 1u64;
    let (mut x, mut y) = (x, y);
    while x > 0 || y > 0 {
        out += ((x + y) % bb) * place;
        x /= bb;
        y /= bb;
        place *= bb;
    }
    out
}

/// Digitwise subtraction mod b (`x` minus `y`); the inverse of
/// [`digitwise_add`] in its second argument.
pub fn digitwise_sub(b: u32, x: u64, y: u64) -> u64 {
    if b == 2 {
        return x ^ y;
    }
    let bb = b as u64;
    let mut out = 0u64;
    let mut place = 1u64;
    let (mut x, mut y) = (x, y);
    while x > 0 || y > 0 {
        out += ((bb + x % bb - y % bb) % bb) * place;
        x /= bb;
        y /= bb;
        place *= bb;
    }
    out
}

/// Direction numbers in the Joe-Kuo layout: rows `d s a m_1 .. m_s`.
/// Dimension 1 (van der Corput / identity matrices) is implicit.
#[derive(Debug, Clone)]
pub struct SobolDirections {
    rows: Vec<JoeKuoRow>,
}

#[derive(Debug, Clone)]
struct JoeKuoRow {
    s: u32,
    a: u64,
    m_init: Vec<u64>,
}

impl SobolDirections {
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') || t.starts_with('d') {
                continue; // header or comment
            }
            let fields: Vec<u64> = t
                .split_whitespace()
                .map(|f| {
                    f.parse::<u64>().map_err(|_| {
                        HodnError::MalformedFile(format!(
                            "direction-number line {}: bad field {f:?}",
                            lineno + 1
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            if fields.len() < 4 {
                return Err(HodnError::MalformedFile(format!(
                    "direction-number line {} has {} fields, need >= 4",
                    lineno + 1,
                    fields.len()
                )));
            }
            let s = fields[1] as u32;
            if fields.len() != 3 + s as usize {
                return Err(HodnError::MalformedFile(format!(
                    "direction-number line {}: s={} but {} m_i given",
                    lineno + 1,
                    s,
                    fields.len() - 3
                )));
            }
            rows.push(JoeKuoRow {
                s,
                a: fields[2],
                m_init: fields[3..].to_vec(),
            });
        }
        Ok(SobolDirections { rows })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    /// Dimensions available (including the implicit first dimension).
    pub fn max_dim(&self) -> usize {
        self.rows.len() + 1
    }

    /// m-bit direction integers `v_1..v_m` for 1-based dimension `j`.
    fn direction_integers(&self, j: usize, m: u32) -> Result<Vec<u64>> {
        let m = m as usize;
        if j == 1 {
            return Ok((1..=m).map(|i| 1u64 << (m - i)).collect());
        }
        let row = self.rows.get(j - 2).ok_or_else(|| {
            HodnError::MalformedFile(format!(
                "requested dimension {j} exceeds direction-number file ({} dims)",
                self.max_dim()
            ))
        })?;
        let s = row.s as usize;
        let mut mi = row.m_init.clone();
        for i in s..m {
            // m_i = 2 a_1 m_(i-1) ^ ... ^ 2^(s-1) a_(s-1) m_(i-s+1)
            //       ^ 2^s m_(i-s) ^ m_(i-s)
            let mut v = mi[i - s] ^ (mi[i - s] << s);
            for k in 1..s {
                let a_k = (row.a >> (s - 1 - k)) & 1;
                if a_k == 1 {
                    v ^= mi[i - k] << k;
                }
            }
            mi.push(v);
        }
        Ok((0..m).map(|i| mi[i] << (m - 1 - i)).collect())
    }

    /// First `2^m` Sobol' points in `dim` dimensions (natural order, base 2).
    pub fn points(&self, dim: usize, m: u32) -> Result<PointSet> {
        if m >= 63 {
            return Err(HodnError::InvalidParameter("m too large".into()));
        }
        let dirs: Vec<Vec<u64>> = (1..=dim)
            .map(|j| self.direction_integers(j, m))
            .collect::<Result<_>>()?;
        let n_points = 1usize << m;
        let mut digits = Vec::with_capacity(n_points * dim.max(1));
        for n in 0..n_points {
            for v in dirs.iter() {
                let mut y = 0u64;
                for (i, &vi) in v.iter().enumerate() {
                    if (n >> i) & 1 == 1 {
                        y ^= vi;
                    }
                }
                digits.push(y);
            }
        }
        if dim == 0 {
            return Err(HodnError::DimensionMismatch("dim must be >= 1".into()));
        }
        PointSet::new(2, m, dim, digits)
    }
}

/// Plain generating-matrix file, base 2: first line `matrix <dim> <m>`,
/// then for each dimension `m` lines of `m` bits (rows of the matrix).
/// Point `n` coordinate `j` has digit vector `C_j * (n_1,..,n_m)^T` where
/// `n_i` is the i-th least significant bit of `n`.
pub fn load_generating_matrices<R: Read>(reader: R, dim: usize, m: u32) -> Result<PointSet> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines
        .next()
        .ok_or_else(|| HodnError::MalformedFile("empty matrix file".into()))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "matrix" {
        return Err(HodnError::MalformedFile(
            "matrix file header must be `matrix <dim> <m>`".into(),
        ));
    }
    let file_dim: usize = fields[1]
        .parse()
        .map_err(|_| HodnError::MalformedFile("bad dim in matrix header".into()))?;
    let file_m: u32 = fields[2]
        .parse()
        .map_err(|_| HodnError::MalformedFile("bad m in matrix header".into()))?;
    if dim > file_dim || m > file_m {
        return Err(HodnError::MalformedFile(format!(
            "requested ({dim}, {m}) exceeds file contents ({file_dim}, {file_m})"
        )));
    }
    // matrices[j][row][col], all bits
    let mut matrices = Vec::with_capacity(file_dim);
    for _ in 0..file_dim {
        let mut mat = Vec::with_capacity(file_m as usize);
        for _ in 0..file_m {
            let line = lines
                .next()
                .ok_or_else(|| HodnError::MalformedFile("truncated matrix file".into()))??;
            let row: Vec<u8> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<u8>()
                        .map_err(|_| HodnError::MalformedFile(format!("bad bit {t:?}")))
                })
                .collect::<Result<_>>()?;
            if row.len() != file_m as usize {
                return Err(HodnError::MalformedFile("matrix row length mismatch".into()));
            }
            mat.push(row);
        }
        matrices.push(mat);
    }
    let n_points = 1usize << m;
    let mut digits = Vec::with_capacity(n_points * dim);
    for n in 0..n_points {
        for mat in matrices.iter().take(dim) {
            let mut y = 0u64;
            for (r, row) in mat.iter().take(m as usize).enumerate() {
                let mut bit = 0u8;
                for (c, &entry) in row.iter().take(m as usize).enumerate() {
                    bit ^= entry & ((n >> c) & 1) as u8;
                }
                y |= (bit as u64) << (m as usize - 1 - r);
            }
            digits.push(y);
        }
    }
    PointSet::new(2, m, dim, digits)
}

/// Load an external base-2 digital net from either supported file format,
/// keyed by extension-free sniffing of the first line.
pub fn load_external_net(path: &Path, dim: usize, m: u32) -> Result<PointSet> {
    let content = std::fs::read_to_string(path)?;
    if content.trim_start().starts_with("matrix") {
        load_generating_matrices(content.as_bytes(), dim, m)
    } else {
        SobolDirections::from_reader(content.as_bytes())?.points(dim, m)
    }
}

/// CSV export: decimal fractions with enough digits to round-trip exactly.
pub fn write_csv<W: Write>(points: &PointSet, mut w: W) -> Result<()> {
    let frac_digits = ((points.m as f64) * (points.b as f64).log10()).ceil() as usize + 2;
    let scale = (points.b as f64).powi(points.m as i32);
    for n in 0..points.n_points() {
        let row: Vec<String> = (0..points.dim)
            .map(|j| format!("{:.*}", frac_digits, points.get(n, j) as f64 / scale))
            .collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Re-read a CSV produced by [`write_csv`], recovering exact fixed points.
pub fn read_csv<R: Read>(reader: R, b: u32, m: u32) -> Result<PointSet> {
    let scale = checked_pow(b, m)? as f64;
    let mut digits = Vec::new();
    let mut dim = None;
    for line in BufReader::new(reader).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| HodnError::MalformedFile(format!("bad CSV value {t:?}")))
            })
            .collect::<Result<_>>()?;
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(HodnError::MalformedFile("ragged CSV".into()))
            }
            _ => {}
        }
        digits.extend(row.into_iter().map(|v| (v * scale).round() as u64));
    }
    PointSet::new(b, m, dim.unwrap_or(1), digits)
}

const BIN_MAGIC: &[u8; 8] = b"HODNPTS1";

/// Binary columnar format: magic, then b, m, dim, n_points as u64 LE,
/// then row-major fixed-point integers as u64 LE.
pub fn write_binary<W: Write>(points: &PointSet, mut w: W) -> Result<()> {
    w.write_all(BIN_MAGIC)?;
    for v in [
        points.b as u64,
        points.m as u64,
        points.dim as u64,
        points.n_points() as u64,
    ] {
        w.write_all(&v.to_le_bytes())?;
    }
    for &d in &points.digits {
        w.write_all(&d.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<PointSet> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)
        .map_err(|_| HodnError::MalformedFile("truncated point file".into()))?;
    if &magic != BIN_MAGIC {
        return Err(HodnError::MalformedFile("bad point-file magic".into()));
    }
    let mut word = [0u8; 8];
    let mut header = [0u64; 4];
    for h in header.iter_mut() {
        r.read_exact(&mut word)
            .map_err(|_| HodnError::MalformedFile("truncated header".into()))?;
        *h = u64::from_le_bytes(word);
    }
    let [b, m, dim, n_points] = header;
    let count = (dim as usize)
        .checked_mul(n_points as usize)
        .ok_or_else(|| HodnError::MalformedFile("oversized point file".into()))?;
    let mut digits = Vec::with_capacity(count);
    for _ in 0..count {
        r.read_exact(&mut word)
            .map_err(|_| HodnError::MalformedFile("truncated digit matrix".into()))?;
        digits.push(u64::from_le_bytes(word));
    }
    PointSet::new(b as u32, m as u32, dim as usize, digits)
}
