//! Exact convex-hull membership by a phase-one simplex over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub(crate) enum Membership {
    /// Convex weights, one per point.
    Inside(Vec<BigRational>),
    /// `(z, s)` with `z·p + s <= 0` for every point and `z·x + s > 0`.
    Outside { z: Vec<BigRational>, s: BigRational },
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Decides whether `x` is a convex combination of `points`.
///
/// Solves `Σ λ_k p_k = x`, `Σ λ_k = 1`, `λ >= 0` by minimizing the sum of
/// artificial variables with Bland's rule. At a positive optimum the simplex
/// multipliers are a Farkas certificate, returned as a separating hyperplane.
pub(crate) fn hull_membership(points: &[Vec<i64>], x: &[i64]) -> Membership {
    let d = x.len();
    let m = d + 1;
    let k = points.len();
    // Column j < k is (p_j, 1); column k + r is the r-th artificial.
    let column = |j: usize| -> Vec<BigRational> {
        if j < k {
            points[j].iter().map(|&v| q(v)).chain(std::iter::once(BigRational::one())).collect()
        } else {
            (0..m).map(|r| if r == j - k { BigRational::one() } else { BigRational::zero() }).collect()
        }
    };
    let cost = |j: usize| if j < k { BigRational::zero() } else { BigRational::one() };
    // Right-hand sides are nonnegative: exponent counts and the convexity row.
    let mut basis: Vec<usize> = (k..k + m).collect();
    let mut binv: Vec<Vec<BigRational>> = (0..m)
        .map(|r| (0..m).map(|c| if r == c { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    let mut xb: Vec<BigRational> = x.iter().map(|&v| q(v)).chain(std::iter::once(BigRational::one())).collect();
    loop {
        let y: Vec<BigRational> = (0..m)
            .map(|c| (0..m).fold(BigRational::zero(), |acc, r| acc + cost(basis[r]) * &binv[r][c]))
            .collect();
        // Price structural columns with integers: y scaled by its common denominator.
        let scale = y.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let scaled: Vec<BigInt> = y.iter().map(|v| v.numer() * (&scale / v.denom())).collect();
        let small: Option<Vec<i128>> = scaled.iter().map(|v| v.to_i128()).collect();
        let negative_reduced = |j: usize| -> bool {
            if j >= k {
                return (BigRational::one() - &y[j - k]).is_negative();
            }
            // Reduced cost is -(y·p_j + y_d).
            if let Some(ys) = &small {
                let dot = points[j].iter().zip(ys).try_fold(ys[d], |acc, (&p, &yr)| acc.checked_add(yr.checked_mul(p as i128)?));
                if let Some(dot) = dot {
                    return dot > 0;
                }
            }
            let dot = points[j].iter().zip(&scaled).fold(scaled[d].clone(), |acc, (&p, yr)| acc + yr * p);
            dot.is_positive()
        };
        let Some(enter) = (0..k + m).find(|&j| !basis.contains(&j) && negative_reduced(j)) else {
            let objective = (0..m).fold(BigRational::zero(), |acc, r| acc + cost(basis[r]) * &xb[r]);
            if objective.is_zero() {
                let mut lambda = vec![BigRational::zero(); k];
                for (r, &j) in basis.iter().enumerate() {
                    if j < k {
                        lambda[j] = xb[r].clone();
                    }
                }
                return Membership::Inside(lambda);
            }
            return Membership::Outside { z: y[..d].to_vec(), s: y[d].clone() };
        };
        let col = column(enter);
        let dir: Vec<BigRational> =
            (0..m).map(|r| (0..m).fold(BigRational::zero(), |acc, c| acc + &binv[r][c] * &col[c])).collect();
        let mut leave: Option<(usize, BigRational)> = None;
        for r in 0..m {
            if !dir[r].is_positive() {
                continue;
            }
            let ratio = &xb[r] / &dir[r];
            let better = match &leave {
                None => true,
                Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        let (lr, _) = leave.expect("phase one is bounded below");
        let pivot = dir[lr].clone();
        for c in 0..m {
            binv[lr][c] = &binv[lr][c] / &pivot;
        }
        xb[lr] = &xb[lr] / &pivot;
        for r in 0..m {
            if r == lr || dir[r].is_zero() {
                continue;
            }
            let f = dir[r].clone();
            for c in 0..m {
                let delta = &f * &binv[lr][c];
                binv[r][c] -= delta;
            }
            let delta = &f * &xb[lr];
            xb[r] -= delta;
        }
        basis[lr] = enter;
    }
}
