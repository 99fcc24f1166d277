use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::contour::{ContourRegion, RuleKind};
use crate::error::{Error, Result};
use crate::forge::{JordanSpec, SymmetricSpec, Transform};
use crate::solvers::{Method, SolverConfig};

/// Where an experiment's pencil comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    /// `jordan:(0.3,0,2);INF,2`
    Jordan(JordanSpec),
    /// `symmetric:n,m` or `symmetric:n,m,lo,hi,out_lo,out_hi`
    Symmetric(SymmetricSpec),
    /// `file:path/to/problem.txt`
    File(PathBuf),
}

impl fmt::Display for ProblemSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSource::Jordan(s) => write!(f, "jordan:{s}"),
            ProblemSource::Symmetric(s) => write!(
                f,
                "symmetric:{},{},{},{},{},{}",
                s.n, s.inside_count, s.inside.0, s.inside.1, s.outside_spread.0, s.outside_spread.1
            ),
            ProblemSource::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for ProblemSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::BadSpec(format!("expected `kind:...`, got `{s}`")))?;
        let rest = rest.trim().trim_matches('"');
        match kind.trim().to_ascii_lowercase().as_str() {
            "jordan" => Ok(ProblemSource::Jordan(rest.parse()?)),
            "symmetric" => {
                let nums: Vec<&str> = rest.split(',').map(str::trim).collect();
                let bad = || Error::BadSpec(format!("cannot parse symmetric problem `{rest}`"));
                let int = |t: &str| t.parse::<usize>().map_err(|_| bad());
                let real = |t: &str| t.parse::<f64>().map_err(|_| bad());
                let (n, m) = match nums.as_slice() {
                    [n, m, ..] => (int(n)?, int(m)?),
                    _ => return Err(bad()),
                };
                let mut spec = SymmetricSpec::standard(n, m);
                match nums.len() {
                    2 => {}
                    6 => {
                        spec.inside = (real(nums[2])?, real(nums[3])?);
                        spec.outside_spread = (real(nums[4])?, real(nums[5])?);
                    }
                    _ => return Err(bad()),
                }
                Ok(ProblemSource::Symmetric(spec))
            }
            "file" if !rest.is_empty() => Ok(ProblemSource::File(PathBuf::from(rest))),
            _ => Err(Error::BadSpec(format!("unknown problem `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimingMode {
    #[default]
    Wall,
    /// Report zeros; makes CSV output reproducible byte for byte.
    Off,
}

/// Everything `bench` and `solve` need. Parsed from `key = value` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: Option<ProblemSource>,
    pub region: ContourRegion,
    pub rule: RuleKind,
    pub n: usize,
    /// `(L, M)` cells, all with the same product.
    pub sweep: Vec<(usize, usize)>,
    pub methods: Vec<Method>,
    pub delta: f64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub half_contour: bool,
    pub timing: TimingMode,
    /// Transform used for `jordan:` problems.
    pub conditioning: Transform,
    /// Distance within which a computed eigenvalue matches an oracle one.
    pub match_tol: f64,
    pub refine: usize,
    pub max_feast_iters: usize,
    pub feast_tol: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let solver = SolverConfig::default();
        Self {
            problem: None,
            region: ContourRegion::unit_circle(),
            rule: RuleKind::Trapezoidal,
            n: 32,
            sweep: vec![(solver.l, solver.m)],
            methods: vec![Method::SsHankel, Method::SsRr, Method::SsArnoldi, Method::SsBeyn],
            delta: solver.rank_cutoff,
            seed: 0,
            output: None,
            half_contour: false,
            timing: TimingMode::Wall,
            conditioning: Transform::default(),
            match_tol: 1e-6,
            refine: 1,
            max_feast_iters: solver.max_feast_iters,
            feast_tol: solver.feast_tol,
        }
    }
}

fn config_err(line: usize, field: &str, message: impl fmt::Display) -> Error {
    Error::Config {
        line,
        field: field.to_string(),
        message: message.to_string(),
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}

/// `64x1,32x2` → `[(64, 1), (32, 2)]`.
pub fn parse_sweep(v: &str) -> std::result::Result<Vec<(usize, usize)>, String> {
    let mut out = Vec::new();
    for cell in v.split(',').map(str::trim).filter(|c| !c.is_empty()) {
        let (l, m) = cell
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("cell `{cell}` is not `LxM`"))?;
        let l: usize = l.trim().parse().map_err(|_| format!("bad L in `{cell}`"))?;
        let m: usize = m.trim().parse().map_err(|_| format!("bad M in `{cell}`"))?;
        if l == 0 || m == 0 {
            return Err(format!("cell `{cell}` has a zero entry"));
        }
        out.push((l, m));
    }
    if out.is_empty() {
        return Err("empty sweep".into());
    }
    let lm = out[0].0 * out[0].1;
    if let Some(&(l, m)) = out.iter().find(|&&(l, m)| l * m != lm) {
        return Err(format!("every cell needs L*M = {lm}, but {l}x{m} gives {}", l * m));
    }
    Ok(out)
}

fn parse_methods(v: &str) -> Result<Vec<Method>> {
    v.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

impl ExperimentConfig {
    /// Parses a config file's text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config_err(i + 1, line, "expected `key = value`"))?;
            self.set(k.trim(), v.trim(), i + 1)?;
        }
        Ok(())
    }

    /// Sets one field. `line` is 0 for command-line values.
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let err = |m: &dyn fmt::Display| config_err(line, key, m);
        let num = |v: &str| v.parse::<f64>().map_err(|e| err(&e));
        let count = |v: &str| v.parse::<usize>().map_err(|e| err(&e));
        match key.to_ascii_lowercase().as_str() {
            "problem" => self.problem = Some(value.parse().map_err(|e: Error| err(&e))?),
            "region" => self.region = value.parse().map_err(|e| err(&e))?,
            "rule" => self.rule = value.parse().map_err(|e| err(&e))?,
            "n" => self.n = count(value)?,
            "sweep" => self.sweep = parse_sweep(value).map_err(|e| err(&e))?,
            "methods" | "method" => self.methods = parse_methods(value).map_err(|e| err(&e))?,
            "delta" => {
                let d = num(value)?;
                if !(0.0..1.0).contains(&d) {
                    return Err(err(&"must lie in [0, 1)"));
                }
                self.delta = d;
            }
            "seed" => self.seed = value.parse().map_err(|e| err(&e))?,
            "output" => self.output = (!value.is_empty()).then(|| PathBuf::from(value)),
            "half_contour" => self.half_contour = parse_bool(value).ok_or_else(|| err(&"expected true/false"))?,
            "timing" => {
                self.timing = match value.to_ascii_lowercase().as_str() {
                    "wall" => TimingMode::Wall,
                    "off" => TimingMode::Off,
                    _ => return Err(err(&"expected `wall` or `off`")),
                }
            }
            "conditioning" => {
                self.conditioning = if value.eq_ignore_ascii_case("identity") {
                    Transform::Identity
                } else {
                    let c = num(value)?;
                    if c < 1.0 {
                        return Err(err(&"condition number must be at least 1"));
                    }
                    Transform::Random { cond: c }
                }
            }
            "match_tol" => self.match_tol = num(value)?,
            "refine" => self.refine = count(value)?,
            "feast_iters" => self.max_feast_iters = count(value)?,
            "feast_tol" => self.feast_tol = num(value)?,
            _ => return Err(err(&"unknown key")),
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<&ProblemSource> {
        self.problem
            .as_ref()
            .ok_or_else(|| config_err(0, "problem", "no problem given"))
    }

    pub fn lm(&self) -> usize {
        self.sweep.first().map_or(0, |&(l, m)| l * m)
    }

    /// Solver settings for one sweep cell.
    pub fn solver_config(&self, method: Method, l: usize, m: usize) -> SolverConfig {
        SolverConfig {
            method,
            l,
            m,
            n: self.n,
            rule: self.rule,
            rank_cutoff: self.delta,
            max_feast_iters: self.max_feast_iters,
            feast_tol: self.feast_tol,
            seed: self.seed,
            refine: self.refine,
            half_contour: self.half_contour,
            ..SolverConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::C64;

    #[test]
    fn parses_full_file() {
        let text = "\
# desk sweep
problem = symmetric:500,40
region = ellipse:0,0,1,0.1   # thin ellipse
rule = trapezoidal
N = 32
sweep = 64x1, 32x2,16x4,8x8,4x16
methods = ss_hankel,ss_rr,ss_arnoldi,ss_beyn
delta = 1e-14
seed = 7
half_contour = true
timing = off
";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.sweep.len(), 5);
        assert_eq!(c.lm(), 64);
        assert_eq!(c.methods.len(), 4);
        assert_eq!(c.seed, 7);
        assert!(c.half_contour);
        assert_eq!(c.timing, TimingMode::Off);
        assert_eq!(c.region, ContourRegion::ellipse(C64::new(0.0, 0.0), 1.0, 0.1).unwrap());
        assert!(matches!(c.problem, Some(ProblemSource::Symmetric(s)) if s.n == 500 && s.inside_count == 40));
    }

    #[test]
    fn errors_carry_line_and_field() {
        let e = ExperimentConfig::parse("seed = 1\n\nN = many\n").unwrap_err();
        assert!(matches!(&e, Error::Config { line: 3, field, .. } if field == "N"), "{e}");
        let e = ExperimentConfig::parse("sweep = 4x2,4x4").unwrap_err();
        assert!(matches!(&e, Error::Config { line: 1, field, .. } if field == "sweep"));
        assert!(e.to_string().contains("line 1"));
        let e = ExperimentConfig::parse("colour = red").unwrap_err();
        assert!(e.to_string().contains("unknown key"));
        assert!(ExperimentConfig::parse("just text").is_err());
        assert!(ExperimentConfig::parse("delta = 1.5").is_err());
        let e = ExperimentConfig::default().problem().unwrap_err();
        assert!(e.to_string().starts_with("command line"));
    }

    #[test]
    fn empty_method_list_is_allowed() {
        let c = ExperimentConfig::parse("methods =").unwrap();
        assert!(c.methods.is_empty());
    }

    #[test]
    fn problem_sources_round_trip() {
        for s in ["jordan:(0.3,0,2);INF,2", "symmetric:50,10,-1,1,1.5,5", "file:/tmp/p.txt"] {
            let p: ProblemSource = s.parse().unwrap();
            assert_eq!(p.to_string().parse::<ProblemSource>().unwrap(), p);
        }
        assert!("jordan:\"(0.3,0,2)\"".parse::<ProblemSource>().is_ok());
        assert!("symmetric:5".parse::<ProblemSource>().is_err());
        assert!("matrix:5".parse::<ProblemSource>().is_err());
    }

    #[test]
    fn conditioning_key() {
        let c = ExperimentConfig::parse("conditioning = identity").unwrap();
        assert_eq!(c.conditioning, Transform::Identity);
        let c = ExperimentConfig::parse("conditioning = 100").unwrap();
        assert_eq!(c.conditioning, Transform::Random { cond: 100.0 });
        assert!(ExperimentConfig::parse("conditioning = 0.5").is_err());
    }
}
