use std::fmt;
use std::sync::Arc;

use super::ScalarFn;

/// `h(a) - h(a - b) - h(b)` with `h(s) = r(s)·s`.
///
/// Writing `r(a)a = r(a)(a - b) + r(a)b` splits the gap into
/// `(r(a) - r(a-b))(a-b) + (r(a) - r(b))b`, and each term is at most
/// `β|a - b||b|` when `r` is `β`-Lipschitz.
pub fn brezis_lieb_pointwise_gap(r: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = |s: f64| r(s) * s;
    h(a) - h(a - b) - h(b)
}

/// The bound `2β|a - b||b|` on the gap.
pub fn brezis_lieb_bound(beta: f64, a: f64, b: f64) -> f64 {
    2.0 * beta * (a - b).abs() * b.abs()
}

/// `f(s) = a·min(s, 0) + b·max(s, 0) + r(s)`, an asymmetric linear part
/// plus a Lipschitz remainder with `r(0) = 0`.
#[derive(Clone)]
pub struct FucikForm {
    pub a: f64,
    pub b: f64,
    r: ScalarFn,
    pub beta_r: f64,
}

impl fmt::Debug for FucikForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FucikForm")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("beta_r", &self.beta_r)
            .finish_non_exhaustive()
    }
}

impl FucikForm {
    pub fn new(a: f64, b: f64, r: impl Fn(f64) -> f64 + Send + Sync + 'static, beta_r: f64) -> Self {
        Self { a, b, r: Arc::new(r), beta_r }
    }

    pub fn linear(a: f64, b: f64) -> Self {
        Self::new(a, b, |_| 0.0, 0.0)
    }

    pub fn r(&self, s: f64) -> f64 {
        (self.r)(s)
    }

    /// `(max(|a|, |b|) + β_r)(1 + |s|)`
    pub fn growth_bound(&self, s: f64) -> f64 {
        (self.a.abs().max(self.b.abs()) + self.beta_r) * (1.0 + s.abs())
    }
}

pub fn fucik_f(form: &FucikForm, s: f64) -> f64 {
    form.a * s.min(0.0) + form.b * s.max(0.0) + form.r(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_example51;

    #[test]
    fn gap_vanishes_at_b_zero() {
        for a in [-3.0, 0.0, 0.7, 12.0] {
            assert_eq!(brezis_lieb_pointwise_gap(|s: f64| s.sin(), a, 0.0), 0.0);
        }
    }

    #[test]
    fn gap_attains_bound_for_minus_identity() {
        let gap = brezis_lieb_pointwise_gap(|s| -s, 3.0, 1.0);
        assert_eq!(gap, -4.0);
        assert_eq!(brezis_lieb_bound(1.0, 3.0, 1.0), 4.0);
    }

    #[test]
    fn fucik_branches() {
        let f = FucikForm::linear(2.0, 3.0);
        assert_eq!(fucik_f(&f, -1.0), -2.0);
        assert_eq!(fucik_f(&f, 1.0), 3.0);
        assert_eq!(fucik_f(&f, 0.0), 0.0);
    }

    #[test]
    fn fucik_symmetric_reduces_to_equation_rhs() {
        let g = build_example51(1.0).unwrap();
        let lambda = -0.3;
        let g2 = g.clone();
        let f = FucikForm::new(lambda, lambda, move |s| g2.g(s), g.beta);
        for s in [-5.0, -0.2, 0.0, 0.4, 9.0] {
            assert!((fucik_f(&f, s) - (lambda * s + g.g(s))).abs() < 1e-15);
            assert!(fucik_f(&f, s).abs() <= f.growth_bound(s));
        }
    }
}
