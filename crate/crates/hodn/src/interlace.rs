//! Digit interlacing: fold `d` consecutive coordinates of a point set into
//! one by interleaving their base-b digits, and the matching map on
//! nonnegative integers (Walsh frequencies).
//!
//! With inputs at `m` digits of precision the interlaced output has `d*m`
//! digits: digit `a` (1-based, most significant first) of input `r` lands at
//! digit `(a-1)*d + r` of the output.

use crate::error::{HodnError, Result};
use crate::pointset::{checked_pow, PointSet};

/// Interlace one block of `d` fixed-point coordinates, each with `m` digits,
/// into a single `d*m`-digit fixed point.
pub fn interlace_point(b: u32, m: u32, coords: &[u64]) -> Result<u64> {
    let d = coords.len() as u32;
    checked_pow(b, d * m)?; // output must fit
    let bb = b as u64;
    let mut out = 0u64;
    // walk digits most significant first: output digit index grows as
    // (a-1)*d + (r-1), a = 1..m, r = 1..d
    for a in 0..m {
        for &y in coords {
            // digit a+1 of y (msf) = (y / b^(m-1-a)) % b
            let digit = (y / bb.pow(m - 1 - a)) % bb;
            out = out * bb + digit;
        }
    }
    Ok(out)
}

/// Interlace an `s*d`-dimensional point set blockwise into `s` dimensions.
pub fn interlace_net(points: &PointSet, d: u32) -> Result<PointSet> {
    if d == 0 || points.dim % d as usize != 0 {
        return Err(HodnError::DimensionMismatch(format!(
            "dim {} is not a multiple of interlacing factor {d}",
            points.dim
        )));
    }
    let s = points.dim / d as usize;
    let n = points.n_points();
    let mut digits = Vec::with_capacity(n * s);
    for i in 0..n {
        let row = points.row(i);
        for j in 0..s {
            digits.push(interlace_point(
                points.b,
                points.m,
                &row[j * d as usize..(j + 1) * d as usize],
            )?);
        }
    }
    PointSet::new(points.b, d * points.m, s, digits)
}

/// Integer interlacing `E_d(l_1,..,l_d)`: digit `a` (1-based, least
/// significant first here, since integers extend upward) of input `r` lands
/// at digit `(a-1)*d + r` of the output. Inverse on frequencies of the point
/// map above.
pub fn interlace_int(b: u32, ls: &[u64]) -> Result<u64> {
    let d = ls.len() as u32;
    let bb = b as u64;
    let mut out = 0u64;
    for (r, &l) in ls.iter().enumerate() {
        let mut l = l;
        let mut a = 0u32;
        while l > 0 {
            let digit = l % bb;
            let pos = a * d + r as u32;
            let place = bb.checked_pow(pos).and_then(|p| p.checked_mul(digit));
            out = place
                .and_then(|p| out.checked_add(p))
                .ok_or_else(|| HodnError::InvalidParameter("interlaced integer overflows u64".into()))?;
            l /= bb;
            a += 1;
        }
    }
    Ok(out)
}

/// Split an interlaced integer back into its `d` strands.
pub fn deinterlace_int(b: u32, k: u64, d: u32) -> Vec<u64> {
    let bb = b as u64;
    let mut ls = vec![0u64; d as usize];
    let mut k = k;
    let mut pos = 0u32;
    while k > 0 {
        let digit = k % bb;
        let r = (pos % d) as usize;
        let a = pos / d;
        ls[r] += digit * bb.pow(a);
        k /= bb;
        pos += 1;
    }
    ls
}

/// Dick weight of order `alpha`: sum of the positions (1-based from the most
/// significant end, i.e. `a_i` where digit `a_i` counted from position 1 is
/// nonzero... concretely, for k = kappa_1 b^(a_1 - 1) + ... with
/// a_1 > a_2 > ..., the sum of the `min(nu, alpha)` largest exponents plus
/// one each). `mu_alpha(0) = 0`.
pub fn mu_weight(b: u32, k: u64, alpha: u32) -> u32 {
    let bb = b as u64;
    let mut positions = Vec::new(); // exponents of nonzero digits, ascending
    let mut k = k;
    let mut e = 1u32;
    while k > 0 {
        if k % bb != 0 {
            positions.push(e);
        }
        k /= bb;
        e += 1;
    }
    positions.iter().rev().take(alpha as usize).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interlace_point_two_coords() {
        // b=2, m=2: y1 = 0.10, y2 = 0.01 -> 0.1001 = 9/16
        assert_eq!(interlace_point(2, 2, &[0b10, 0b01]).unwrap(), 0b1001);
        // d=1 is the identity
        assert_eq!(interlace_point(2, 4, &[0b1011]).unwrap(), 0b1011);
    }

    #[test]
    fn interlace_point_base3() {
        // b=3, m=2, digits y1 = (1,2), y2 = (0,1) -> (1,0,2,1)
        let y1 = 1 * 3 + 2;
        let y2 = 1;
        let want = ((1 * 3 + 0) * 3 + 2) * 3 + 1;
        assert_eq!(interlace_point(3, 2, &[y1, y2]).unwrap(), want);
    }

    #[test]
    fn interlace_int_examples() {
        // b=2, l1 = 1 (digit at a=1, strand 1) -> output digit position 1
        assert_eq!(interlace_int(2, &[1, 0]).unwrap(), 1);
        // l2 = 1 -> position 2 -> value 2
        assert_eq!(interlace_int(2, &[0, 1]).unwrap(), 2);
        // l1 = 2 = digit at a=2 -> position (2-1)*2+1 -> value 4
        assert_eq!(interlace_int(2, &[2, 0]).unwrap(), 4);
        assert_eq!(interlace_int(2, &[1, 1]).unwrap(), 3);
        assert_eq!(interlace_int(2, &[0]).unwrap(), 0);
    }

    #[test]
    fn deinterlace_inverts() {
        for d in 1..=3u32 {
            for k in 0..3000u64 {
                let ls = deinterlace_int(2, k, d);
                assert_eq!(interlace_int(2, &ls).unwrap(), k);
            }
            for k in 0..2000u64 {
                let ls = deinterlace_int(3, k, d);
                assert_eq!(interlace_int(3, &ls).unwrap(), k);
            }
        }
    }

    #[test]
    fn interlace_then_deinterlace() {
        for l1 in 0..40u64 {
            for l2 in 0..40u64 {
                let k = interlace_int(2, &[l1, l2]).unwrap();
                assert_eq!(deinterlace_int(2, k, 2), vec![l1, l2]);
            }
        }
    }

    #[test]
    fn mu_weight_examples() {
        assert_eq!(mu_weight(2, 0, 2), 0);
        assert_eq!(mu_weight(2, 1, 2), 1); // single digit at position 1
        assert_eq!(mu_weight(2, 2, 2), 2); // 10
        assert_eq!(mu_weight(2, 3, 2), 3); // 11 -> 2 + 1
        assert_eq!(mu_weight(2, 3, 1), 2); // only the top digit
        assert_eq!(mu_weight(2, 0b10110, 2), 5 + 3);
        assert_eq!(mu_weight(2, 0b10110, 3), 5 + 3 + 2);
        assert_eq!(mu_weight(3, 9, 2), 3); // 100 base 3
    }

    #[test]
    fn interlace_net_blocks() {
        use crate::galois::{smallest_irreducible, GFPoly};
        use crate::pointset::{generate_points, PolyLattice};
        let p = smallest_irreducible(2, 3);
        let q = vec![
            GFPoly::from_int(2, 1),
            GFPoly::from_int(2, 3),
            GFPoly::from_int(2, 5),
            GFPoly::from_int(2, 7),
        ];
        let lat = PolyLattice::new(2, 3, p, q).unwrap();
        let pts = generate_points(&lat).unwrap();
        let folded = interlace_net(&pts, 2).unwrap();
        assert_eq!(folded.dim, 2);
        assert_eq!(folded.m, 6);
        for n in 0..pts.n_points() {
            let row = pts.row(n);
            assert_eq!(
                folded.get(n, 0),
                interlace_point(2, 3, &row[0..2]).unwrap()
            );
            assert_eq!(
                folded.get(n, 1),
                interlace_point(2, 3, &row[2..4]).unwrap()
            );
        }
        // non-divisible dim rejected
        assert!(interlace_net(&pts, 3).is_err());
    }
}
