//! Reference oracles shared by the integration suites. Each one is computed
//! independently of the library code it checks.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::Ratio;
use resonance_core::model::{PotentialSpec, Well, WellShape};
use resonance_core::operator::{assemble, DiscreteOperator, Grid};

pub type Q = Ratio<i128>;

pub fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

/// Rungs from `q₀ = 2` of `1/q_{i+1} = 1/q_i - c` until a rung reaches
/// `N/2`, written in reciprocal form.
pub fn reciprocal_ladder(dim: i128, c: Q) -> Vec<Q> {
    let half = q(dim, 2);
    let mut out = vec![q(2, 1)];
    while *out.last().unwrap() < half {
        let r = out.last().unwrap().recip() - c;
        assert!(r > q(0, 1), "reciprocal ladder left the positive range");
        out.push(r.recip());
    }
    out
}

/// `c` for the three recurrences.
pub fn step_zero_v1(dim: i128) -> Q {
    q(2, dim)
}

pub fn step_high_p(dim: i128, p: Q) -> Q {
    q(1, dim) - p.recip()
}

pub fn step_mid_p(dim: i128, p: Q) -> Q {
    q(2, dim) - p.recip()
}

/// Floor rule for `j₀` from a critical ratio.
pub fn floor_rule(ratio: Q) -> Option<u32> {
    if ratio <= q(0, 1) {
        return None;
    }
    let l = ratio.floor().to_integer();
    Some(if ratio.is_integer() { l - 1 } else { l } as u32)
}

/// `(N - 4) p / (2(p - N))`
pub fn ratio_high_p(dim: i128, p: Q) -> Q {
    Q::from_integer(dim - 4) * p / ((p - Q::from_integer(dim)) * 2)
}

/// `(N - 4) p / (4p - 2N)`
pub fn ratio_mid_p(dim: i128, p: Q) -> Q {
    Q::from_integer(dim - 4) * p / (p * 4 - Q::from_integer(2 * dim))
}

/// Parity table for `V₁ = 0`: `(p_j, p_{j+1})` as fractions of `N`.
pub fn parity_prediction(dim: i128) -> (Q, Q) {
    let n = Q::from_integer(dim);
    if dim % 2 == 0 {
        let k = dim / 2;
        if k % 2 == 0 {
            (n / 4, n / 2)
        } else {
            (n / 3, n)
        }
    } else {
        let k = (dim - 1) / 2;
        if k % 2 == 0 {
            (n * 2 / 5, n * 2)
        } else {
            (n * 2 / 7, n * 2 / 3)
        }
    }
}

/// Bound-state energies of `-u'' - depth·1_{|x|<r} u = μu` on `(-L, L)`
/// with Dirichlet ends, from the matching conditions of `cos`/`sin` inside
/// and `sinh(κ(L - |x|))` outside. Returns the `count` lowest levels in
/// `(-depth, 0)`.
pub fn box_square_well_levels(depth: f64, radius: f64, half_width: f64, count: usize) -> Vec<f64> {
    let s = half_width - radius;
    let even = |mu: f64| {
        let qv = ((mu + depth).max(0.0)).sqrt() * radius;
        let kappa = (-mu).sqrt();
        -kappa * qv.cos() + (qv / radius) * qv.sin() * (kappa * s).tanh()
    };
    let odd = |mu: f64| {
        let qv = ((mu + depth).max(0.0)).sqrt() * radius;
        let kappa = (-mu).sqrt();
        -kappa * qv.sin() - (qv / radius) * qv.cos() * (kappa * s).tanh()
    };
    let mut roots = Vec::new();
    for f in [&even as &dyn Fn(f64) -> f64, &odd] {
        let steps = 200_000;
        let lo = -depth + 1e-12;
        let hi = -1e-12;
        let mut a = lo;
        let mut fa = f(a);
        for i in 1..=steps {
            let b = lo + (hi - lo) * i as f64 / steps as f64;
            let fb = f(b);
            if fa == 0.0 || fa.signum() != fb.signum() {
                let (mut x0, mut x1, mut f0) = (a, b, fa);
                for _ in 0..200 {
                    let m = 0.5 * (x0 + x1);
                    let fm = f(m);
                    if fm.signum() == f0.signum() {
                        x0 = m;
                        f0 = fm;
                    } else {
                        x1 = m;
                    }
                }
                roots.push(0.5 * (x0 + x1));
            }
            a = b;
            fa = fb;
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.truncate(count);
    roots
}

/// Dense matrix of `-Δ_h + diag(v)` in 1D, assembled here from scratch.
pub fn dense_1d(v: &[f64], h: f64) -> DMatrix<f64> {
    let n = v.len();
    let c = 1.0 / (h * h);
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * c + v[i]
        } else if i.abs_diff(j) == 1 {
            -c
        } else {
            0.0
        }
    })
}

pub fn dense_eigs(m: DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix with
/// diagonal `d` and constant off-diagonal `e` (Sturm sequence).
pub fn sturm_count(d: &[f64], e: f64, x: f64) -> usize {
    let mut count = 0;
    let mut p = 1.0;
    for (i, di) in d.iter().enumerate() {
        let off = if i == 0 { 0.0 } else { e * e };
        let mut next = di - x - off / p;
        if next == 0.0 {
            next = -1e-300;
        }
        if next < 0.0 {
            count += 1;
        }
        p = next;
    }
    count
}

/// The `j`-th (1-based) eigenvalue by bisection on the Sturm count.
pub fn sturm_eigenvalue(d: &[f64], e: f64, j: usize) -> f64 {
    let lo0 = d.iter().copied().fold(f64::INFINITY, f64::min) - 2.0 * e.abs();
    let hi0 = d.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 2.0 * e.abs();
    let (mut lo, mut hi) = (lo0, hi0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(d, e, mid) >= j {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn square_well(sigma0: f64, depth: f64, radius: f64) -> PotentialSpec {
    PotentialSpec {
        sigma0,
        wells: vec![Well { shape: WellShape::Square, depth, radius, center: vec![0.0] }],
    }
}

/// The three-bound-state scenario: depth 14, radius 1, `σ₀ = 0`, `L = 12`.
pub fn branch_operator(points: usize) -> DiscreteOperator {
    assemble(Grid::new(1, 12.0, points).unwrap(), &square_well(0.0, 14.0, 1.0), 0.0).unwrap()
}
