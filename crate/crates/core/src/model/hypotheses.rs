//! Sampled checks of the growth hypotheses on `g`.
//!
//! Limits are probed at finite thresholds (`|t| ≥ 10³` stands for infinity,
//! `|t| ≤ 10⁻³` for zero) and strict pointwise inequalities exclude a band
//! `|t| ≤ 10⁻⁹` around the origin. The thresholds travel with every report.

use serde::{Deserialize, Serialize};

use super::NonlinearitySpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub large_t: f64,
    pub small_t: f64,
    pub ratio_tol: f64,
    pub zero_band: f64,
    /// Relative slack on the Lipschitz inequality, for round-off in `g`.
    pub lipschitz_slack: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { large_t: 1e3, small_t: 1e-3, ratio_tol: 1e-2, zero_band: 1e-9, lipschitz_slack: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    /// Sorted ascending.
    pub points: Vec<f64>,
}

impl SampleGrid {
    /// `n` log-spaced magnitudes in `[lo, hi]`, mirrored to both signs.
    pub fn symmetric_log(lo: f64, hi: f64, n: usize) -> Self {
        assert!(lo > 0.0 && hi > lo && n >= 2);
        let (a, b) = (lo.ln(), hi.ln());
        let pos: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
        let mut points: Vec<f64> = pos.iter().rev().map(|t| -t).collect();
        points.extend(pos);
        Self { points }
    }

    /// 10⁴ points: 5000 per sign, log-spaced over `[10⁻⁶, 10⁶]`.
    pub fn standard() -> Self {
        Self::symmetric_log(1e-6, 1e6, 5000)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub pass: bool,
    /// Worst value of the checked quantity (meaning depends on the check).
    pub worst: f64,
    pub witness: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct G6Report {
    pub lambda: f64,
    pub g0: f64,
    pub k: usize,
    /// `λ + g₀ ≤ μᵢ` for some `i ≤ k`.
    pub some_i: bool,
    /// `λ + g₀ ≤ μᵢ` for every `i ≤ k`.
    pub all_i: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub thresholds: Thresholds,
    pub checks: Vec<HypothesisCheck>,
    pub g6: Option<G6Report>,
}

impl HypothesisReport {
    pub fn get(&self, name: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.get(name).is_some_and(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }
}

/// Tracks the largest value of a quantity and where it occurred.
struct Worst {
    value: f64,
    at: Option<f64>,
}

impl Worst {
    fn new() -> Self {
        Self { value: f64::NEG_INFINITY, at: None }
    }

    fn offer(&mut self, value: f64, t: f64) {
        if value > self.value || value.is_nan() {
            self.value = value;
            self.at = Some(t);
        }
    }
}

fn check(name: &str, worst: Worst, pass: impl Fn(f64) -> bool, detail: String) -> HypothesisCheck {
    match worst.at {
        None => HypothesisCheck {
            name: name.into(),
            pass: false,
            worst: f64::NAN,
            witness: None,
            detail: format!("grid does not probe this hypothesis ({detail})"),
        },
        Some(t) => HypothesisCheck {
            name: name.into(),
            pass: pass(worst.value),
            worst: worst.value,
            witness: Some(t),
            detail,
        },
    }
}

/// Evaluates (g₁)–(g₅), (g₇), (g₈) on `grid`. (g₆) depends on `λ` and the
/// spectrum; see [`check_g6`].
pub fn check_hypotheses(spec: &NonlinearitySpec, grid: &SampleGrid, th: &Thresholds) -> HypothesisReport {
    let mut g1 = Worst::new();
    let mut g2 = Worst::new();
    let mut g3 = Worst::new();
    // For g4 and g8 track the worst margin of the strict/weak inequality.
    let mut g4 = Worst::new();
    let mut g7 = Worst::new();
    let mut g8 = Worst::new();
    let mut g5 = Worst::new();

    for &t in &grid.points {
        let a = t.abs();
        let gt = spec.g(t);
        if a >= th.large_t {
            g1.offer((gt / t).abs(), t);
            g7.offer((spec.G(t) / (t * t)).abs(), t);
        }
        if a > 0.0 && a <= th.small_t {
            g2.offer((gt / t - spec.g0).abs(), t);
        }
        if a > th.zero_band {
            let ratio = gt / t;
            let gp = spec.gprime(t);
            g3.offer(ratio, t);
            // g4 requires ratio - g' < 0 strictly
            g4.offer(ratio - gp, t);
            g8.offer(gp, t);
        }
    }
    for w in grid.points.windows(2) {
        let (s1, s2) = (w[0], w[1]);
        let dt = (s2 - s1).abs();
        if dt == 0.0 {
            continue;
        }
        let dg = (spec.g(s2) - spec.g(s1)).abs();
        let allowed = spec.beta * dt * (1.0 + th.lipschitz_slack) + f64::EPSILON * (spec.g(s1).abs() + spec.g(s2).abs());
        g5.offer(dg - allowed, 0.5 * (s1 + s2));
    }

    let tol = th.ratio_tol;
    let checks = vec![
        check("g1", g1, |v| v <= tol, format!("max |g(t)/t| over |t| >= {} must be <= {tol}", th.large_t)),
        check(
            "g2",
            g2,
            |v| v <= tol,
            format!("max |g(t)/t - g0| over 0 < |t| <= {} must be <= {tol}, g0 = {}", th.small_t, spec.g0),
        ),
        check("g3", g3, |v| v <= 0.0, format!("max g(t)/t over |t| > {} must be <= 0", th.zero_band)),
        check(
            "g4",
            g4,
            |v| v < 0.0,
            format!("max g(t)/t - g'(t) over |t| > {} must be < 0", th.zero_band),
        ),
        check(
            "g5",
            g5,
            |v| v <= 0.0,
            format!("consecutive pairs must satisfy |g(s1) - g(s2)| <= beta |s1 - s2|, beta = {}", spec.beta),
        ),
        check("g7", g7, |v| v <= tol, format!("max |G(t)/t^2| over |t| >= {} must be <= {tol}", th.large_t)),
        check("g8", g8, |v| v <= 0.0, format!("max g'(t) over |t| > {} must be <= 0", th.zero_band)),
    ];
    HypothesisReport { thresholds: *th, checks, g6: None }
}

/// (g₆) `λ + g₀ ≤ μᵢ` for `i ≤ k`, reported under both readings of the
/// quantifier. `mus` holds `μ₁ ≤ … ≤ μ_k`.
pub fn check_g6(g0: f64, lambda: f64, mus: &[f64]) -> G6Report {
    let level = lambda + g0;
    G6Report {
        lambda,
        g0,
        k: mus.len(),
        some_i: mus.iter().any(|&m| level <= m),
        all_i: !mus.is_empty() && mus.iter().all(|&m| level <= m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_grid_shape() {
        let grid = SampleGrid::standard();
        assert_eq!(grid.points.len(), 10_000);
        assert!(grid.points.windows(2).all(|w| w[0] < w[1]));
        assert!(grid.points.iter().any(|t| t.abs() >= 1e3));
        assert!(grid.points.iter().any(|t| t.abs() <= 1e-3));
    }

    #[test]
    fn minus_identity_fails_g1() {
        let g = NonlinearitySpec::linear(-1.0);
        let r = check_hypotheses(&g, &SampleGrid::standard(), &Thresholds::default());
        let g1 = r.get("g1").unwrap();
        assert!(!g1.pass);
        assert!(g1.witness.unwrap().abs() >= 1e3);
    }

    #[test]
    fn zero_fails_only_g4() {
        let g = NonlinearitySpec::zero();
        let r = check_hypotheses(&g, &SampleGrid::standard(), &Thresholds::default());
        assert_eq!(r.failed(), vec!["g4"]);
    }

    #[test]
    fn unprobed_limits_fail() {
        let g = NonlinearitySpec::zero();
        let grid = SampleGrid::symmetric_log(0.1, 10.0, 50);
        let r = check_hypotheses(&g, &grid, &Thresholds::default());
        assert!(!r.passed("g1"));
        assert!(!r.passed("g2"));
        assert!(r.get("g1").unwrap().detail.contains("does not probe"));
    }

    #[test]
    fn g6_readings() {
        let r = check_g6(-1.0, 0.0, &[-3.0, -2.0, -0.5]);
        assert!(r.some_i);
        assert!(!r.all_i);
        let r = check_g6(-4.0, 0.0, &[-3.0, -2.0]);
        assert!(r.some_i && r.all_i);
        let r = check_g6(0.0, 0.0, &[-3.0]);
        assert!(!r.some_i && !r.all_i);
    }
}
