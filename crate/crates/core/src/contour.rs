//! Contour regions, quadrature rules and the rational filter they induce.
//!
//! Weights absorb the `1/(2πi)` factor, so `Σ ω_j g(z_j)` approximates
//! `(1/2πi) ∮ g(z) dz` directly.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dense::{C64, ONE, ZERO};

/// Distance below which an evaluation point counts as sitting on a node.
pub const POLE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("a rule needs at least {min} points, got {n}")]
    TooFewPoints { n: usize, min: usize },

    #[error("{kind} quadrature is not available on {region} regions")]
    UnsupportedRule { kind: RuleKind, region: &'static str },

    #[error("Gauss-Legendre on a circle needs N divisible by 4, got {n}")]
    BadPointCount { n: usize },

    #[error("evaluation point {index} ({point}) coincides with a quadrature node")]
    PoleCollision { index: usize, point: C64 },

    #[error("cannot parse {what} from `{input}`")]
    Parse { what: &'static str, input: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    Circle,
    Ellipse,
}

/// Disk or axis-aligned ellipse `((x−γ_x)/a)² + ((y−γ_y)/b)² < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourRegion {
    kind: RegionKind,
    center: C64,
    semi_major: f64,
    semi_minor: f64,
}

impl ContourRegion {
    pub fn circle(center: C64, radius: f64) -> Result<Self, QuadratureError> {
        check_axis(radius, "radius")?;
        check_center(center)?;
        Ok(Self {
            kind: RegionKind::Circle,
            center,
            semi_major: radius,
            semi_minor: radius,
        })
    }

    /// `a` is the horizontal semi-axis, `b` the vertical one.
    pub fn ellipse(center: C64, a: f64, b: f64) -> Result<Self, QuadratureError> {
        check_axis(a, "semi-axis a")?;
        check_axis(b, "semi-axis b")?;
        check_center(center)?;
        Ok(Self {
            kind: RegionKind::Ellipse,
            center,
            semi_major: a,
            semi_minor: b,
        })
    }

    pub fn unit_circle() -> Self {
        Self::circle(ZERO, 1.0).expect("unit circle is valid")
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn center(&self) -> C64 {
        self.center
    }

    pub fn semi_major(&self) -> f64 {
        self.semi_major
    }

    pub fn semi_minor(&self) -> f64 {
        self.semi_minor
    }

    /// Strict interior test; boundary points are outside.
    pub fn contains(&self, lambda: C64) -> bool {
        self.level(lambda) < 1.0
    }

    /// Membership with both axes scaled by `1 + margin` (negative shrinks).
    pub fn contains_with_margin(&self, lambda: C64, margin: f64) -> bool {
        let s = 1.0 + margin;
        self.level(lambda) < s * s
    }

    /// `((x−γ_x)/a)² + ((y−γ_y)/b)²`; equals 1 on the boundary.
    pub fn level(&self, lambda: C64) -> f64 {
        let d = lambda - self.center;
        (d.re / self.semi_major).powi(2) + (d.im / self.semi_minor).powi(2)
    }

    pub fn point(&self, theta: f64) -> C64 {
        self.center + C64::new(self.semi_major * theta.cos(), self.semi_minor * theta.sin())
    }

    pub fn derivative(&self, theta: f64) -> C64 {
        C64::new(-self.semi_major * theta.sin(), self.semi_minor * theta.cos())
    }

    /// Whether the region maps to itself under complex conjugation.
    pub fn is_symmetric_about_real_axis(&self) -> bool {
        self.center.im == 0.0
    }
}

fn check_axis(x: f64, name: &str) -> Result<(), QuadratureError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(QuadratureError::InvalidRegion(format!("{name} must be positive and finite, got {x}")))
    }
}

fn check_center(c: C64) -> Result<(), QuadratureError> {
    if c.re.is_finite() && c.im.is_finite() {
        Ok(())
    } else {
        Err(QuadratureError::InvalidRegion(format!("center must be finite, got {c}")))
    }
}

impl fmt::Display for ContourRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RegionKind::Circle => write!(f, "circle:{},{},{}", self.center.re, self.center.im, self.semi_major),
            RegionKind::Ellipse => write!(
                f,
                "ellipse:{},{},{},{}",
                self.center.re, self.center.im, self.semi_major, self.semi_minor
            ),
        }
    }
}

/// Parses `circle:cx,cy,r` or `ellipse:cx,cy,a,b`.
impl FromStr for ContourRegion {
    type Err = QuadratureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || QuadratureError::Parse {
            what: "region",
            input: s.to_string(),
        };
        let (kind, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let nums: Vec<f64> = rest
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        match (kind.trim(), nums.as_slice()) {
            ("circle", [cx, cy, r]) => Self::circle(C64::new(*cx, *cy), *r),
            ("ellipse", [cx, cy, a, b]) => Self::ellipse(C64::new(*cx, *cy), *a, *b),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RuleKind {
    /// Nodes at `θ_j = 2π(j−½)/N`.
    #[default]
    Trapezoidal,
    /// Nodes at `θ_j = 2π(j−1)/N`; on a circle centred on the real axis two
    /// nodes are real.
    TrapezoidalUnshifted,
    /// Gauss–Legendre on each quarter arc of a circle.
    GaussLegendre,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleKind::Trapezoidal => "trapezoidal",
            RuleKind::TrapezoidalUnshifted => "trapezoidal-unshifted",
            RuleKind::GaussLegendre => "gauss-legendre",
        })
    }
}

impl FromStr for RuleKind {
    type Err = QuadratureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "trapezoidal" | "trapz" => Ok(RuleKind::Trapezoidal),
            "trapezoidal-unshifted" => Ok(RuleKind::TrapezoidalUnshifted),
            "gauss-legendre" | "gl" => Ok(RuleKind::GaussLegendre),
            _ => Err(QuadratureError::Parse {
                what: "rule kind",
                input: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    region: ContourRegion,
    kind: RuleKind,
    points: Vec<C64>,
    weights: Vec<C64>,
}

impl QuadratureRule {
    pub fn region(&self) -> &ContourRegion {
        &self.region
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn weights(&self) -> &[C64] {
        &self.weights
    }

    /// The same nodes with replaced weights. Used for fault injection.
    pub fn with_weights(mut self, weights: Vec<C64>) -> Self {
        assert_eq!(weights.len(), self.points.len(), "one weight per node");
        self.weights = weights;
        self
    }

    /// Largest `|z_j − γ|`-relative deviation of a node from the boundary.
    pub fn boundary_residual(&self) -> f64 {
        self.points
            .iter()
            .map(|&z| (self.region.level(z) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Pairs `(j, j')` with `z_j' = conj(z_j)` and `ω_j' = conj(ω_j)`, j in the
    /// upper half plane, plus the self-conjugate nodes. `None` if some node
    /// has no partner.
    pub fn conjugate_pairs(&self) -> Option<ConjugatePairing> {
        if !self.region.is_symmetric_about_real_axis() {
            return None;
        }
        let scale = self.region.semi_major.max(self.region.semi_minor) + self.region.center.norm();
        let tol = 1e-13 * scale;
        let mut used = vec![false; self.points.len()];
        let mut pairs = Vec::new();
        let mut real_nodes = Vec::new();
        for (j, &z) in self.points.iter().enumerate() {
            if used[j] {
                continue;
            }
            if z.im.abs() <= tol {
                if self.weights[j].im.abs() > 1e-13 * self.weights[j].norm().max(f64::MIN_POSITIVE) {
                    return None;
                }
                used[j] = true;
                real_nodes.push(j);
                continue;
            }
            let partner = (0..self.points.len()).find(|&p| {
                !used[p] && p != j && (self.points[p] - z.conj()).norm() <= tol
                    && (self.weights[p] - self.weights[j].conj()).norm() <= 1e-13 * self.weights[j].norm()
            })?;
            used[j] = true;
            used[partner] = true;
            if z.im > 0.0 {
                pairs.push((j, partner));
            } else {
                pairs.push((partner, j));
            }
        }
        Some(ConjugatePairing { pairs, real_nodes })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugatePairing {
    /// `(upper, lower)` node indices.
    pub pairs: Vec<(usize, usize)>,
    pub real_nodes: Vec<usize>,
}

pub fn build_rule(region: ContourRegion, kind: RuleKind, n: usize) -> Result<QuadratureRule, QuadratureError> {
    if n < 2 {
        return Err(QuadratureError::TooFewPoints { n, min: 2 });
    }
    let (points, weights) = match kind {
        RuleKind::Trapezoidal | RuleKind::TrapezoidalUnshifted => {
            let offset = if kind == RuleKind::Trapezoidal { 0.5 } else { 1.0 };
            let nf = n as f64;
            let i_n = C64::new(0.0, nf);
            (1..=n)
                .map(|j| {
                    let theta = 2.0 * PI * (j as f64 - offset) / nf;
                    (region.point(theta), region.derivative(theta) / i_n)
                })
                .unzip()
        }
        RuleKind::GaussLegendre => {
            if region.kind != RegionKind::Circle {
                return Err(QuadratureError::UnsupportedRule {
                    kind,
                    region: "ellipse",
                });
            }
            if n % 4 != 0 {
                return Err(QuadratureError::BadPointCount { n });
            }
            let (nodes, wts) = gauss_legendre(n / 4);
            let rho = region.semi_major;
            let mut points = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            for q in 0..4 {
                let start = q as f64 * PI / 2.0;
                for (&t, &w) in nodes.iter().zip(&wts) {
                    let theta = start + (t + 1.0) * PI / 4.0;
                    let e = C64::from_polar(1.0, theta);
                    points.push(region.center + e * rho);
                    // w·(π/4)·iρe^{iθ}/(2πi)
                    weights.push(e * (rho * w / 8.0));
                }
            }
            (points, weights)
        }
    };
    Ok(QuadratureRule {
        region,
        kind,
        points,
        weights,
    })
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightConditionReport {
    /// `Σ_j ω_j z_j^k` for `k = −1, 0, …, N−2` (index 0 holds k = −1).
    pub sums: Vec<C64>,
    /// The k ≥ 0 index with the largest scaled violation.
    pub max_violation_k: usize,
    /// `|Σ ω_j z_j^k|` at that index.
    pub max_abs: f64,
    /// `|Σ ω_j z_j^k| / max_j |ω_j z_j^k|` at that index.
    pub max_ratio: f64,
    pub k_minus1_value: C64,
    pub passes: bool,
}

/// Checks `Σ ω_j z_j^k = 0` for `k = 0..N−2` and `Σ ω_j z_j^{−1} ≠ 0`.
///
/// The k = −1 sum is the winding number of Γ around the origin, so this
/// clause fails for regions that exclude 0.
pub fn check_weight_condition(rule: &QuadratureRule, tol: f64) -> WeightConditionReport {
    let n = rule.len();
    let mut sums = Vec::with_capacity(n);
    let k_minus1 = compensated_sum(rule.points.iter().zip(&rule.weights).map(|(&z, &w)| w / z));
    sums.push(k_minus1);

    let mut powers: Vec<C64> = vec![ONE; n];
    let mut max_violation_k = 0;
    let mut max_abs = 0.0;
    let mut max_ratio = 0.0;
    let mut passes = k_minus1.norm() > tol && k_minus1.norm().is_finite();
    for k in 0..n.saturating_sub(1) {
        let terms: Vec<C64> = rule.weights.iter().zip(&powers).map(|(&w, &p)| w * p).collect();
        let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
        let s = compensated_sum(terms.iter().copied());
        sums.push(s);
        let ratio = if scale > 0.0 { s.norm() / scale } else { 0.0 };
        if k == 0 || ratio > max_ratio {
            max_ratio = ratio;
            max_abs = s.norm();
            max_violation_k = k;
        }
        if s.norm() > tol * scale || !s.norm().is_finite() {
            passes = false;
        }
        for (p, &z) in powers.iter_mut().zip(&rule.points) {
            *p *= z;
        }
    }
    WeightConditionReport {
        sums,
        max_violation_k,
        max_abs,
        max_ratio,
        k_minus1_value: k_minus1,
        passes,
    }
}

/// Neumaier summation applied to real and imaginary parts separately.
pub fn compensated_sum(terms: impl IntoIterator<Item = C64>) -> C64 {
    let mut re = Neumaier::default();
    let mut im = Neumaier::default();
    for t in terms {
        re.add(t.re);
        im.add(t.im);
    }
    C64::new(re.total(), im.total())
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

fn check_pole(rule: &QuadratureRule, lambda: C64, index: usize) -> Result<(), QuadratureError> {
    if rule.points.iter().any(|&z| (z - lambda).norm() <= POLE_TOL) {
        return Err(QuadratureError::PoleCollision { index, point: lambda });
    }
    Ok(())
}

/// `f(λ) = Σ_j ω_j / (z_j − λ)`.
pub fn filter_eval(rule: &QuadratureRule, lambda: C64) -> Result<C64, QuadratureError> {
    check_pole(rule, lambda, 0)?;
    Ok(rule
        .points
        .iter()
        .zip(&rule.weights)
        .map(|(&z, &w)| w / (z - lambda))
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterProfile {
    pub samples: Vec<C64>,
    pub magnitudes: Vec<f64>,
}

pub fn filter_profile(rule: &QuadratureRule, samples: &[C64]) -> Result<FilterProfile, QuadratureError> {
    let magnitudes = samples
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            filter_eval(rule, s)
                .map(|f| f.norm())
                .map_err(|_| QuadratureError::PoleCollision { index: i, point: s })
        })
        .collect::<Result<_, _>>()?;
    Ok(FilterProfile {
        samples: samples.to_vec(),
        magnitudes,
    })
}

/// `[Σ_j ω_j z_j^k / (z_j − λ)^p]` for `p = 1..=block_size`.
pub fn fk_vector(rule: &QuadratureRule, lambda: C64, block_size: usize, k: usize) -> Result<Vec<C64>, QuadratureError> {
    check_pole(rule, lambda, 0)?;
    let mut out = vec![ZERO; block_size];
    for (&z, &w) in rule.points.iter().zip(&rule.weights) {
        let inv = ONE / (z - lambda);
        let mut term = w * z.powu(k as u32) * inv;
        for o in out.iter_mut() {
            *o += term;
            term *= inv;
        }
    }
    Ok(out)
}
