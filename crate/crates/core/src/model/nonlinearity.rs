use std::fmt;
use std::sync::Arc;

use super::hypotheses::{check_hypotheses, HypothesisReport, SampleGrid, Thresholds};
use super::ModelError;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An autonomous nonlinearity `g` together with `g'`, the antiderivative
/// `G(t) = ∫₀ᵗ g`, the slope `g₀ = lim_{t→0} g(t)/t` and a global Lipschitz
/// constant `β`.
#[derive(Clone)]
pub struct NonlinearitySpec {
    pub name: String,
    g: ScalarFn,
    gprime: ScalarFn,
    big_g: ScalarFn,
    pub g0: f64,
    pub beta: f64,
    pub flags: Option<HypothesisReport>,
}

impl fmt::Debug for NonlinearitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearitySpec")
            .field("name", &self.name)
            .field("g0", &self.g0)
            .field("beta", &self.beta)
            .finish_non_exhaustive()
    }
}

impl NonlinearitySpec {
    pub fn custom(
        name: impl Into<String>,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        gprime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        big_g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g0: f64,
        beta: f64,
    ) -> Self {
        Self {
            name: name.into(),
            g: Arc::new(g),
            gprime: Arc::new(gprime),
            big_g: Arc::new(big_g),
            g0,
            beta,
            flags: None,
        }
    }

    pub fn zero() -> Self {
        Self::custom("zero", |_| 0.0, |_| 0.0, |_| 0.0, 0.0, 0.0)
    }

    /// `g(t) = c·t`.
    pub fn linear(c: f64) -> Self {
        Self::custom("linear", move |t| c * t, move |_| c, move |t| 0.5 * c * t * t, c, c.abs())
    }

    /// Runs the hypothesis battery on the standard grid and stores it.
    pub fn with_checked_flags(mut self) -> Self {
        self.flags = Some(check_hypotheses(&self, &SampleGrid::standard(), &Thresholds::default()));
        self
    }

    pub fn g(&self, t: f64) -> f64 {
        (self.g)(t)
    }

    pub fn gprime(&self, t: f64) -> f64 {
        (self.gprime)(t)
    }

    #[allow(non_snake_case)]
    pub fn G(&self, t: f64) -> f64 {
        (self.big_g)(t)
    }
}

/// `g(t) = -α·sign(t)·ln(1 + |t|)`: odd, `g₀ = -α`, `g(t)/t → 0` at
/// infinity, Lipschitz with `β = α`.
pub fn build_example51(alpha: f64) -> Result<NonlinearitySpec, ModelError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(ModelError::Domain(format!("alpha must be positive and finite, got {alpha}")));
    }
    let spec = NonlinearitySpec::custom(
        "example51",
        move |t: f64| -alpha * t.signum() * t.abs().ln_1p(),
        move |t: f64| -alpha / (1.0 + t.abs()),
        move |t: f64| {
            let a = t.abs();
            -alpha * ((1.0 + a) * a.ln_1p() - a)
        },
        -alpha,
        alpha,
    );
    Ok(spec.with_checked_flags())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example51_values() {
        let g = build_example51(1.0).unwrap();
        assert!((g.g(1.0) - 0.5f64.ln()).abs() < 1e-15);
        assert!((g.g(1.0) + std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(g.g0, -1.0);
        assert_eq!(g.gprime(1.0), -0.5);
        assert!(g.gprime(1.0) > g.g(1.0));
        assert_eq!(g.g(0.0), 0.0);
        assert_eq!(g.G(0.0), 0.0);
        assert_eq!(g.beta, 1.0);
    }

    #[test]
    fn example51_symmetry() {
        let g = build_example51(2.5).unwrap();
        for t in [1e-8, 0.3, 1.0, 17.0, 1e5] {
            assert_eq!(g.g(-t), -g.g(t));
            assert_eq!(g.G(-t), g.G(t));
            assert_eq!(g.gprime(-t), g.gprime(t));
        }
    }

    #[test]
    fn example51_flags_all_pass() {
        let g = build_example51(1.0).unwrap();
        let flags = g.flags.as_ref().unwrap();
        assert!(flags.failed().is_empty(), "failed: {:?}", flags.failed());
    }

    #[test]
    fn example51_rejects_bad_alpha() {
        assert!(build_example51(0.0).is_err());
        assert!(build_example51(-1.0).is_err());
        assert!(build_example51(f64::NAN).is_err());
    }

    #[test]
    fn linear_and_zero() {
        let l = NonlinearitySpec::linear(-3.0);
        assert_eq!(l.g(2.0), -6.0);
        assert_eq!(l.G(2.0), -6.0);
        assert_eq!(l.beta, 3.0);
        let z = NonlinearitySpec::zero();
        assert_eq!(z.g(5.0), 0.0);
    }
}
