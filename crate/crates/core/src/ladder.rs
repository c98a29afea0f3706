//! Bootstrap exponent schedules for the `W^{2,q}` regularity iteration of
//! `-Δu + (V₁ + V₂)u = λu + g(u)` on `ℝᴺ`, with `|g(t)| ≤ C|t|`.
//!
//! Starting from `u ∈ H² = W^{2,2}`, each step feeds an `L^{q_i}` bound back
//! through the equation and a Sobolev embedding to reach `W^{2,q_{i+1}}`.
//! Once `q` passes `N/2` the solution is bounded. Everything here is exact
//! rational arithmetic: the case splits hinge on equalities such as
//! `q_{j₀+1} = N/2`, which floating point cannot decide.
//!
//! In reciprocal form all three recurrences are arithmetic progressions:
//!
//! | case                      | `1/q_{i+1} - 1/q_i` |
//! |---------------------------|---------------------|
//! | `V₁ = 0`                  | `-2/N`              |
//! | `p > N ≥ 4`               | `1/p - 1/N`         |
//! | `N/2 < p ≤ N`, `N ≥ 4`    | `1/p - 2/N`         |

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};
use thiserror::Error;

/// Exact exponent arithmetic. Exponents, dimensions and `p` stay far below
/// the `i128` range for any admissible input.
pub type Rational = Ratio<i128>;

/// Integrability of the unbounded part `V₁` of the potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrability {
    /// `V₁ = 0` a.e.; the `p = ∞` sentinel.
    Vanishing,
    /// `V₁ ∈ L^p` with `‖V₁‖_p > 0`.
    Lp(Rational),
}

impl fmt::Display for Integrability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Integrability::Vanishing => f.write_str("inf"),
            Integrability::Lp(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LadderCase {
    /// `V₁ = 0`: pure Sobolev chain `p_{i+1} = p_i N / (N - 2p_i)`.
    ZeroV1,
    /// `‖V₁‖_p > 0`, `p > N ≥ 4`.
    IntegrableHighP,
    /// `‖V₁‖_p > 0`, `N/2 < p ≤ N`, `N ≥ 4`.
    IntegrableMidP,
    /// `‖V₁‖_p > 0`, `N ≤ 3`, `p = 2`: no iteration, `H²` embeds directly.
    LowDim,
}

impl LadderCase {
    pub fn as_str(self) -> &'static str {
        match self {
            LadderCase::ZeroV1 => "ZeroV1",
            LadderCase::IntegrableHighP => "IntegrableHighP",
            LadderCase::IntegrableMidP => "IntegrableMidP",
            LadderCase::LowDim => "LowDim",
        }
    }

    /// Selects the case for `(N, p)`, rejecting inputs outside the
    /// Kato–Rellich range (`p = 2` for `N ≤ 3`, `p > 2` for `N = 4`,
    /// `p > N/2` for `N ≥ 5`).
    pub fn classify(dim: u32, v1: Integrability) -> Result<Self, LadderError> {
        if dim == 0 {
            return Err(LadderError::Domain("dimension must be at least 1".into()));
        }
        let n = int(dim);
        let p = match v1 {
            Integrability::Vanishing => return Ok(LadderCase::ZeroV1),
            Integrability::Lp(p) => p,
        };
        if dim <= 3 {
            if p != int(2) {
                return Err(LadderError::Domain(format!(
                    "N = {dim} requires p = 2 for the L^p part of the potential, got p = {p}"
                )));
            }
            return Ok(LadderCase::LowDim);
        }
        if dim == 4 && p <= int(2) {
            return Err(LadderError::Domain(format!("N = 4 requires p > 2, got p = {p}")));
        }
        if p <= n / int(2) {
            return Err(LadderError::Domain(format!(
                "N = {dim} requires p > N/2 = {}, got p = {p}",
                n / int(2)
            )));
        }
        Ok(if p > n {
            LadderCase::IntegrableHighP
        } else {
            LadderCase::IntegrableMidP
        })
    }
}

/// Regularity reached at the end of the ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegularityClass {
    /// `u ∈ C_B¹(ℝᴺ)`: bounded with bounded gradient.
    CB1,
    /// `u ∈ C_B⁰(ℝᴺ)`: bounded and continuous.
    CB0,
    /// `u ∈ L^q(ℝᴺ)` for every `q ∈ [2, ∞)`; no pointwise bound.
    LqAll,
}

impl RegularityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RegularityClass::CB1 => "CB1",
            RegularityClass::CB0 => "CB0",
            RegularityClass::LqAll => "LqAll",
        }
    }

    /// Whether the class carries an `L^∞` bound.
    pub fn is_bounded(self) -> bool {
        !matches!(self, RegularityClass::LqAll)
    }
}

/// The step count `j₀`: the unique index with `q_{j₀} < N/2 ≤ q_{j₀+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepCount {
    /// `q₀ = 2 ≥ N/2` already; no iteration is needed.
    Trivial,
    Steps(u32),
}

impl Serialize for StepCount {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            StepCount::Trivial => serializer.serialize_str("trivial"),
            StepCount::Steps(j) => serializer.serialize_u32(*j),
        }
    }
}

impl fmt::Display for StepCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepCount::Trivial => f.write_str("trivial"),
            StepCount::Steps(j) => write!(f, "{j}"),
        }
    }
}

/// Symbolic constants appearing in the `L^∞` estimate chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactorKind {
    Gamma,
    Rho,
    Theta,
    ThetaStar,
    RhoTilde,
    Beta,
    C,
    C0,
    CTilde,
    L,
    K,
}

impl FactorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FactorKind::Gamma => "gamma",
            FactorKind::Rho => "rho",
            FactorKind::Theta => "theta",
            FactorKind::ThetaStar => "theta*",
            FactorKind::RhoTilde => "rho~",
            FactorKind::Beta => "beta",
            FactorKind::C => "C",
            FactorKind::C0 => "C0",
            FactorKind::CTilde => "C~",
            FactorKind::L => "L",
            FactorKind::K => "K",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainFactor {
    pub kind: FactorKind,
    pub args: Vec<Rational>,
    pub value: Option<f64>,
}

impl ChainFactor {
    fn new(kind: FactorKind, args: Vec<Rational>) -> Self {
        Self { kind, args, value: None }
    }

    /// Binding key, e.g. `rho(2, 30/13, 6)`.
    pub fn label(&self) -> String {
        let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
        format!("{}({})", self.kind.as_str(), args.join(", "))
    }
}

/// Product of embedding and estimate constants, one factor per inequality
/// applied along the ladder. `λ` and `ε` are left implicit: `ε` is the
/// minimum of the `1/(2K(2, q, N))` bounds over every exponent in the ladder.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstantChain {
    pub factors: Vec<ChainFactor>,
}

impl ConstantChain {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn count(&self, kind: FactorKind) -> usize {
        self.factors.iter().filter(|f| f.kind == kind).count()
    }

    pub fn labels(&self) -> Vec<String> {
        self.factors.iter().map(ChainFactor::label).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentLadder {
    pub dim: u32,
    pub integrability: Integrability,
    pub case: LadderCase,
    /// `q₀ = 2, q₁, …, q_{j₀+1}` (just `[2]` when `j₀` is trivial).
    pub exponents: Vec<Rational>,
    pub j0: StepCount,
    /// Extra exponent used when the last rung lands exactly on `N/2`.
    pub tail: Option<Rational>,
    pub terminal: RegularityClass,
    pub chain: ConstantChain,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LadderError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("ladder overflow: exponent {q} is outside the range of the {} recurrence", .case.as_str())]
    Overflow { q: Rational, case: LadderCase },
    #[error("unbound constant(s): {}", .missing.join(", "))]
    Unbound { missing: Vec<String> },
    #[error("inconsistent ladder: {0}")]
    Inconsistent(String),
}

fn int(v: u32) -> Rational {
    Rational::from_integer(v as i128)
}

fn expect_p(p: Integrability, case: LadderCase) -> Result<Rational, LadderError> {
    match p {
        Integrability::Lp(p) => Ok(p),
        Integrability::Vanishing => Err(LadderError::Domain(format!(
            "case {} needs a finite p",
            case.as_str()
        ))),
    }
}

/// One rung of the ladder: the exact successor of `q`.
pub fn next_exponent(
    q: Rational,
    p: Integrability,
    dim: u32,
    case: LadderCase,
) -> Result<Rational, LadderError> {
    if q < int(2) {
        return Err(LadderError::Domain(format!("exponent {q} is below 2")));
    }
    let n = int(dim);
    let overflow = || LadderError::Overflow { q, case };
    let (numerator, denominator) = match case {
        LadderCase::ZeroV1 => {
            if p != Integrability::Vanishing {
                return Err(LadderError::Domain("case ZeroV1 needs V₁ = 0".into()));
            }
            if q >= n / int(2) {
                return Err(overflow());
            }
            (q * n, n - q * int(2))
        }
        LadderCase::IntegrableHighP => {
            let p = expect_p(p, case)?;
            if q >= n {
                return Err(overflow());
            }
            (q * p * n, (n - q) * p + q * n)
        }
        LadderCase::IntegrableMidP => {
            let p = expect_p(p, case)?;
            if q > n / int(2) {
                return Err(overflow());
            }
            (q * p * n, (n - q * int(2)) * p + q * n)
        }
        LadderCase::LowDim => {
            return Err(LadderError::Domain(
                "no iteration for N ≤ 3: H² embeds directly".into(),
            ))
        }
    };
    if !denominator.is_positive() {
        return Err(overflow());
    }
    Ok(numerator / denominator)
}

/// Closed form of the `i`-th rung from `q₀ = 2`, or `None` past the point
/// where the formula's denominator turns non-positive.
pub fn closed_form(
    i: u32,
    p: Integrability,
    dim: u32,
    case: LadderCase,
) -> Result<Option<Rational>, LadderError> {
    let n = int(dim);
    let i = int(i);
    let (numerator, denominator) = match case {
        LadderCase::ZeroV1 => (n * int(2), n - i * int(4)),
        LadderCase::IntegrableHighP => {
            let p = expect_p(p, case)?;
            (p * n * int(2), (n - i * int(2)) * p + i * n * int(2))
        }
        LadderCase::IntegrableMidP => {
            let p = expect_p(p, case)?;
            (p * n * int(2), (n - i * int(4)) * p + i * n * int(2))
        }
        LadderCase::LowDim => return Err(LadderError::Domain("no closed form for N ≤ 3".into())),
    };
    Ok(denominator.is_positive().then(|| numerator / denominator))
}

/// The quantity whose position between integers fixes `j₀`:
/// `q_j < N/2 ⇔ j < ratio`.
pub fn critical_ratio(p: Integrability, dim: u32, case: LadderCase) -> Result<Rational, LadderError> {
    let n = int(dim);
    match case {
        LadderCase::ZeroV1 => Ok(n / int(4) - int(1)),
        LadderCase::IntegrableHighP => {
            let p = expect_p(p, case)?;
            Ok((n - int(4)) * p / ((p - n) * int(2)))
        }
        LadderCase::IntegrableMidP => {
            let p = expect_p(p, case)?;
            Ok((n - int(4)) * p / (p * int(4) - n * int(2)))
        }
        LadderCase::LowDim => Err(LadderError::Domain("no step count for N ≤ 3".into())),
    }
}

/// Floor rule: `j₀ = l` if the ratio lies in `(l, l+1)`, `j₀ = l - 1` if it
/// equals `l`; trivial when the ratio is not positive.
pub fn j0_from_ratio(ratio: Rational) -> StepCount {
    if !ratio.is_positive() {
        return StepCount::Trivial;
    }
    let l = ratio.to_integer();
    let l = if ratio.is_integer() { l - 1 } else { l };
    StepCount::Steps(l as u32)
}

/// Iterates the recurrence from `q₀ = 2` until a rung reaches `N/2`.
fn iterate_rungs(p: Integrability, dim: u32, case: LadderCase) -> Result<Vec<Rational>, LadderError> {
    let half = int(dim) / int(2);
    let mut rungs = vec![int(2)];
    let mut q = int(2);
    while q < half {
        q = next_exponent(q, p, dim, case)?;
        rungs.push(q);
        if rungs.len() > 100_000 {
            return Err(LadderError::Inconsistent("recurrence failed to reach N/2".into()));
        }
    }
    Ok(rungs)
}

fn check_case_inputs(dim: u32, p: Integrability, case: LadderCase) -> Result<(), LadderError> {
    let n = int(dim);
    match case {
        LadderCase::ZeroV1 => {
            if p != Integrability::Vanishing {
                return Err(LadderError::Domain("case ZeroV1 needs V₁ = 0".into()));
            }
        }
        LadderCase::IntegrableHighP | LadderCase::IntegrableMidP => {
            if dim < 4 {
                return Err(LadderError::Domain(format!(
                    "case {} needs N ≥ 4, got N = {dim}",
                    case.as_str()
                )));
            }
            let p = expect_p(p, case)?;
            let ok = if case == LadderCase::IntegrableHighP {
                p > n
            } else {
                p > n / int(2) && p <= n
            };
            if !ok {
                return Err(LadderError::Domain(format!(
                    "p = {p} is outside the range of case {} at N = {dim}",
                    case.as_str()
                )));
            }
        }
        LadderCase::LowDim => {
            return Err(LadderError::Domain("no step count for N ≤ 3".into()));
        }
    }
    Ok(())
}

/// `j₀` computed twice, by the floor rule and by iterating the recurrence;
/// the two must agree.
pub fn compute_j0(dim: u32, p: Integrability, case: LadderCase) -> Result<StepCount, LadderError> {
    check_case_inputs(dim, p, case)?;
    let by_rule = j0_from_ratio(critical_ratio(p, dim, case)?);
    let rungs = iterate_rungs(p, dim, case)?;
    let by_iteration = match rungs.len() {
        1 => StepCount::Trivial,
        len => StepCount::Steps((len - 2) as u32),
    };
    if by_rule != by_iteration {
        return Err(LadderError::Inconsistent(format!(
            "floor rule gives j0 = {by_rule}, iteration gives j0 = {by_iteration} (N = {dim}, p = {p})"
        )));
    }
    Ok(by_rule)
}

/// Upper bound `⌈Np / (2(p - N))⌉` on the number of rungs in case `p > N`:
/// past that index the closed form turns negative.
pub fn high_p_step_bound(dim: u32, p: Rational) -> Result<u32, LadderError> {
    let n = int(dim);
    if p <= n {
        return Err(LadderError::Domain(format!("step bound needs p > N, got p = {p}")));
    }
    Ok((n * p / ((p - n) * int(2))).ceil().to_integer() as u32)
}

/// Builds the complete schedule for one `(N, p)` input.
pub fn plan_ladder(dim: u32, v1: Integrability) -> Result<ExponentLadder, LadderError> {
    let case = LadderCase::classify(dim, v1)?;
    if case == LadderCase::LowDim {
        let terminal = match dim {
            1 => RegularityClass::CB1,
            2 => RegularityClass::LqAll,
            _ => RegularityClass::CB0,
        };
        let factor = if terminal.is_bounded() {
            ChainFactor::new(FactorKind::C0, vec![int(2), int(2), int(dim)])
        } else {
            ChainFactor::new(FactorKind::CTilde, vec![int(2), int(2), int(dim)])
        };
        return Ok(ExponentLadder {
            dim,
            integrability: v1,
            case,
            exponents: vec![int(2)],
            j0: StepCount::Trivial,
            tail: None,
            terminal,
            chain: ConstantChain { factors: vec![factor] },
        });
    }

    let j0 = compute_j0(dim, v1, case)?;
    let exponents = iterate_rungs(v1, dim, case)?;
    for (i, q) in exponents.iter().enumerate() {
        let expected = closed_form(i as u32, v1, dim, case)?;
        if expected != Some(*q) {
            return Err(LadderError::Inconsistent(format!(
                "rung {i} is {q}, closed form gives {expected:?}"
            )));
        }
    }
    let last = *exponents.last().expect("ladder has a first rung");
    let tail = (last == int(dim) / int(2)).then(|| match v1 {
        // Unbounded admissible interval (q, ∞): use the midpoint of (q, 2q).
        Integrability::Vanishing => last * Rational::new(3, 2),
        Integrability::Lp(p) => (last + p) / int(2),
    });
    let terminal = match case {
        LadderCase::IntegrableMidP => RegularityClass::CB0,
        _ => RegularityClass::CB1,
    };
    let chain = build_chain(dim, v1, case, &exponents, tail);
    Ok(ExponentLadder {
        dim,
        integrability: v1,
        case,
        exponents,
        j0,
        tail,
        terminal,
        chain,
    })
}

fn build_chain(
    dim: u32,
    v1: Integrability,
    case: LadderCase,
    exponents: &[Rational],
    tail: Option<Rational>,
) -> ConstantChain {
    let n = int(dim);
    let two = int(2);
    let last = *exponents.last().expect("non-empty ladder");
    let top = tail.unwrap_or(last);
    let mut factors = vec![ChainFactor::new(FactorKind::C0, vec![two, top, n])];
    match case {
        LadderCase::ZeroV1 if dim <= 3 => {}
        LadderCase::ZeroV1 => {
            if let Some(q) = tail {
                factors.push(ChainFactor::new(FactorKind::CTilde, vec![two, last, q, n]));
            }
            for q in &exponents[..exponents.len() - 1] {
                factors.push(ChainFactor::new(FactorKind::C, vec![two, *q, n]));
            }
            if let Some(q) = tail {
                factors.push(ChainFactor::new(FactorKind::Gamma, vec![q, n]));
            }
            for q in exponents {
                factors.push(ChainFactor::new(FactorKind::Gamma, vec![*q, n]));
            }
        }
        LadderCase::IntegrableHighP => {
            if let (Some(q), Integrability::Lp(p)) = (tail, v1) {
                // Hölder conjugate of p/q.
                let beta = p / (p - q);
                factors.push(ChainFactor::new(FactorKind::RhoTilde, vec![last, q, beta, n]));
            }
            for w in exponents.windows(2) {
                factors.push(ChainFactor::new(FactorKind::Rho, vec![w[0], w[1], n]));
            }
        }
        LadderCase::IntegrableMidP => {
            if let (Some(q), Integrability::Lp(p)) = (tail, v1) {
                factors.push(ChainFactor::new(FactorKind::ThetaStar, vec![last, p, q, n]));
            }
            for w in exponents.windows(2) {
                factors.push(ChainFactor::new(FactorKind::Theta, vec![w[0], w[1], n]));
            }
        }
        LadderCase::LowDim => unreachable!("handled by plan_ladder"),
    }
    ConstantChain { factors }
}

/// Numeric value of the chain. Each factor takes its value from `bindings`
/// (keyed by [`ChainFactor::label`]) or from its stored `value`.
pub fn evaluate_chain(chain: &ConstantChain, bindings: &BTreeMap<String, f64>) -> Result<f64, LadderError> {
    let mut missing = Vec::new();
    let mut product = 1.0;
    for factor in &chain.factors {
        let label = factor.label();
        match bindings.get(&label).copied().or(factor.value) {
            Some(v) if v > 0.0 && v.is_finite() => product *= v,
            Some(v) => {
                return Err(LadderError::Domain(format!(
                    "constant {label} must be positive and finite, got {v}"
                )))
            }
            None => missing.push(label),
        }
    }
    if !missing.is_empty() {
        return Err(LadderError::Unbound { missing });
    }
    Ok(product)
}

/// Parses `"21/2"`, `"10.25"` or `"7"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, LadderError> {
    let text = text.trim();
    let bad = || LadderError::Domain(format!("cannot parse {text:?} as a rational"));
    if let Some((num, den)) = text.split_once('/') {
        let num: i128 = num.trim().parse().map_err(|_| bad())?;
        let den: i128 = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole: i128 = if whole.is_empty() || whole == "-" { 0 } else { whole.parse().map_err(|_| bad())? };
        let scale = 10i128.pow(frac.len() as u32);
        let frac: i128 = frac.parse().map_err(|_| bad())?;
        let magnitude = whole.abs() * scale + frac;
        let signed = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(signed, scale));
    }
    text.parse::<i128>().map(Rational::from_integer).map_err(|_| bad())
}

struct RationalPair(Rational);

impl Serialize for RationalPair {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let reduced = self.0.reduced();
        let (n, d) = (*reduced.numer(), *reduced.denom());
        let g = n.gcd(&d).max(1);
        [n / g, d / g].serialize(serializer)
    }
}

struct FactorJson<'a>(&'a ChainFactor);

impl Serialize for FactorJson<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ChainFactor", 3)?;
        s.serialize_field("kind", self.0.kind.as_str())?;
        let args: Vec<RationalPair> = self.0.args.iter().copied().map(RationalPair).collect();
        s.serialize_field("args", &args)?;
        s.serialize_field("value", &self.0.value)?;
        s.end()
    }
}

/// JSON layout: `{case, exponents: [[num, den], …], j0, tail, terminal, chain}`.
impl Serialize for ExponentLadder {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ExponentLadder", 6)?;
        s.serialize_field("case", self.case.as_str())?;
        let exponents: Vec<RationalPair> = self.exponents.iter().copied().map(RationalPair).collect();
        s.serialize_field("exponents", &exponents)?;
        s.serialize_field("j0", &self.j0)?;
        s.serialize_field("tail", &self.tail.map(RationalPair))?;
        s.serialize_field("terminal", self.terminal.as_str())?;
        let chain: Vec<FactorJson<'_>> = self.chain.factors.iter().map(FactorJson).collect();
        s.serialize_field("chain", &chain)?;
        s.end()
    }
}
