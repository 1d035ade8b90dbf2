//! Run configuration: a flat `key = value` text format.
//!
//! ```text
//! model = snakeboard
//! integrator = gni
//! N = 128
//! T = 10
//! r0 = [pi/2, pi/3]      # psi, phi
//! u0 = [2.5, -0.02]
//! p0 = -1
//! control.psi = cos(20*pi*t)
//! control.phi = sin(2*pi*t)
//! ```

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use nalgebra::DVector;

use super::expr::{parse_scalar, parse_signal, ExprError};
use crate::control::{ControlSpec, Signal};
use crate::error::{Error, Result};
use crate::models::{SleighParams, SnakeboardParams};
use crate::rdp::RdpConfig;
use crate::se2::{DtauInverse, Retraction};

/// Largest admissible initial constraint residual.
pub const INITIAL_RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Sleigh,
    Snakeboard,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Sleigh => "sleigh",
            ModelKind::Snakeboard => "snakeboard",
        }
    }

    /// Names of the control channels, in input order.
    pub fn control_channels(self) -> &'static [&'static str] {
        match self {
            ModelKind::Sleigh => &[],
            ModelKind::Snakeboard => &["psi", "phi"],
        }
    }

    fn param_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::Sleigh => &["I", "m", "a"],
            ModelKind::Snakeboard => &["m", "l", "I", "J"],
        }
    }

    pub fn dim(self) -> usize {
        match self {
            ModelKind::Sleigh => 3,
            ModelKind::Snakeboard => 5,
        }
    }

    pub fn shape_dim(self) -> usize {
        self.dim() - 3
    }

    pub fn sym_dim(self) -> usize {
        match self {
            ModelKind::Sleigh => 2,
            ModelKind::Snakeboard => 1,
        }
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sleigh" => Ok(ModelKind::Sleigh),
            "snakeboard" => Ok(ModelKind::Snakeboard),
            _ => Err(format!("unknown model '{s}' (expected sleigh or snakeboard)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IntegratorKind {
    Gni,
    Rdp,
    Rattle,
    Rk2,
    Rk4,
}

impl IntegratorKind {
    pub fn name(self) -> &'static str {
        match self {
            IntegratorKind::Gni => "gni",
            IntegratorKind::Rdp => "rdp",
            IntegratorKind::Rattle => "rattle",
            IntegratorKind::Rk2 => "rk2",
            IntegratorKind::Rk4 => "rk4",
        }
    }

    /// Whether the integrator enforces the constraints on node momenta.
    pub fn is_structure_preserving(self) -> bool {
        matches!(self, IntegratorKind::Gni | IntegratorKind::Rdp | IntegratorKind::Rattle)
    }
}

impl FromStr for IntegratorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gni" => Ok(IntegratorKind::Gni),
            "rdp" => Ok(IntegratorKind::Rdp),
            "rattle" => Ok(IntegratorKind::Rattle),
            "rk2" => Ok(IntegratorKind::Rk2),
            "rk4" => Ok(IntegratorKind::Rk4),
            _ => Err(format!(
                "unknown integrator '{s}' (expected gni, rdp, rattle, rk2 or rk4)"
            )),
        }
    }
}

/// Initial conditions in full coordinates or on the reduced space.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Full {
        q0: DVector<f64>,
        v0: DVector<f64>,
    },
    /// Shape `r0`, shape velocity `u0`, nonholonomic momentum `p0` and group
    /// element `g0 = (θ, x, y)`.
    Reduced {
        r0: DVector<f64>,
        u0: DVector<f64>,
        p0: DVector<f64>,
        g0: [f64; 3],
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub integrator: IntegratorKind,
    pub h: f64,
    pub steps: usize,
    pub sleigh: SleighParams,
    pub snakeboard: SnakeboardParams,
    pub initial: InitialData,
    pub controls: ControlSpec,
    pub rdp: RdpConfig,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn horizon(&self) -> f64 {
        self.h * self.steps as f64
    }
}

struct Entry {
    line: usize,
    key_col: usize,
    value_col: usize,
    value: String,
}

impl Entry {
    fn err(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.value_col + offset,
            message: message.into(),
        }
    }

    fn expr_err(&self, e: ExprError) -> Error {
        self.err(e.offset, e.message)
    }

    fn scalar(&self) -> Result<f64> {
        parse_scalar(&self.value).map_err(|e| self.expr_err(e))
    }

    fn vector(&self) -> Result<DVector<f64>> {
        let v = self.value.as_str();
        let Some(inner) = v.strip_prefix('[') else {
            // a bare scalar is a vector of length one
            return Ok(DVector::from_element(1, self.scalar()?));
        };
        let Some(inner) = inner.strip_suffix(']') else {
            return Err(self.err(v.chars().count(), "expected ']'"));
        };
        if inner.trim().is_empty() {
            return Ok(DVector::zeros(0));
        }
        let mut out = Vec::new();
        let mut offset = 1;
        for part in inner.split(',') {
            out.push(parse_scalar(part).map_err(|e| self.err(offset + e.offset, e.message))?);
            offset += part.chars().count() + 1;
        }
        Ok(DVector::from_vec(out))
    }

    fn count(&self) -> Result<usize> {
        let x = self.scalar()?;
        if x < 0.0 || x.fract() != 0.0 || x > u32::MAX as f64 {
            return Err(self.err(0, format!("expected a non-negative integer, got {x}")));
        }
        Ok(x as usize)
    }

    fn word<T: FromStr<Err = String>>(&self) -> Result<T> {
        self.value.parse().map_err(|m| self.err(0, m))
    }
}

const KEYS: &[&str] = &[
    "model",
    "integrator",
    "h",
    "T",
    "N",
    "q0",
    "v0",
    "r0",
    "u0",
    "p0",
    "g0",
    "tau",
    "dtau_order",
    "alpha",
    "out",
];

fn split_lines(text: &str) -> Result<HashMap<String, Entry>> {
    let mut entries: HashMap<String, Entry> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            let col = content.chars().take_while(|c| c.is_whitespace()).count() + 1;
            return Err(Error::Parse {
                line,
                column: col,
                message: "expected 'key = value'".into(),
            });
        };
        let (lhs, rhs) = (&content[..eq], &content[eq + 1..]);
        let key = lhs.trim();
        let key_col = lhs.chars().take_while(|c| c.is_whitespace()).count() + 1;
        if key.is_empty() {
            return Err(Error::Parse {
                line,
                column: key_col,
                message: "missing key".into(),
            });
        }
        let value = rhs.trim();
        let value_col = lhs.chars().count() + 2 + rhs.chars().take_while(|c| c.is_whitespace()).count();
        if value.is_empty() {
            return Err(Error::Parse {
                line,
                column: value_col,
                message: format!("missing value for '{key}'"),
            });
        }
        if let Some(prev) = entries.get(key) {
            return Err(Error::Parse {
                line,
                column: key_col,
                message: format!("duplicate key '{key}' (first set on line {})", prev.line),
            });
        }
        entries.insert(
            key.to_string(),
            Entry {
                line,
                key_col,
                value_col,
                value: value.to_string(),
            },
        );
    }
    Ok(entries)
}

fn check_len(name: &str, v: &DVector<f64>, n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::Validation(format!(
            "{name} must have {n} entries, got {}",
            v.len()
        )));
    }
    Ok(())
}

/// Resolves the step size and count from any two of `h`, `T`, `N`; all
/// three must agree when given.
fn resolve_grid(h: Option<f64>, t: Option<f64>, n: Option<usize>) -> Result<(f64, usize)> {
    let agree = |h: f64, t: f64, n: usize| (h * n as f64 - t).abs() <= 1e-9 * t.abs().max(h);
    let (h, n) = match (h, t, n) {
        (Some(h), Some(t), Some(n)) => {
            if !agree(h, t, n) {
                return Err(Error::Validation(format!(
                    "h = {h}, T = {t} and N = {n} are inconsistent"
                )));
            }
            (h, n)
        }
        (Some(h), None, Some(n)) => (h, n),
        (Some(h), Some(t), None) => {
            if !(h > 0.0) || !(t >= 0.0) {
                return Err(Error::Validation("h must be positive and T non-negative".into()));
            }
            let n = (t / h).round();
            if !agree(h, t, n as usize) {
                return Err(Error::Validation(format!(
                    "T = {t} is not a whole number of steps h = {h}"
                )));
            }
            (h, n as usize)
        }
        (None, Some(t), Some(n)) => {
            if n == 0 {
                return Err(Error::Validation("h is required when N = 0".into()));
            }
            (t / n as f64, n)
        }
        _ => return Err(Error::Validation("two of h, T and N are required".into())),
    };
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Validation(format!("step size must be positive, got {h}")));
    }
    Ok((h, n))
}

/// Parses and validates a run configuration. Unknown keys are errors;
/// everything not given takes its documented default.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let entries = split_lines(text)?;
    let model: ModelKind = match entries.get("model") {
        Some(e) => e.word()?,
        None => return Err(Error::Validation("missing required key 'model'".into())),
    };

    // reject unknown keys first, in line order, so the error points at the
    // earliest offender
    let mut ordered: Vec<(&String, &Entry)> = entries.iter().collect();
    ordered.sort_by_key(|(_, e)| e.line);
    for (key, e) in &ordered {
        let known = KEYS.contains(&key.as_str())
            || key
                .strip_prefix("param.")
                .is_some_and(|p| model.param_names().contains(&p))
            || key
                .strip_prefix("control.")
                .is_some_and(|c| model.control_channels().contains(&c));
        if !known {
            return Err(Error::Parse {
                line: e.line,
                column: e.key_col,
                message: format!("unknown key '{key}' for model {}", model.name()),
            });
        }
    }

    let integrator = match entries.get("integrator") {
        Some(e) => e.word()?,
        None => IntegratorKind::Gni,
    };
    let h = entries.get("h").map(Entry::scalar).transpose()?;
    let t = entries.get("T").map(Entry::scalar).transpose()?;
    let n = entries.get("N").map(Entry::count).transpose()?;
    let (h, steps) = resolve_grid(h, t, n)?;

    let param = |name: &str, default: f64| -> Result<f64> {
        entries
            .get(&format!("param.{name}"))
            .map(Entry::scalar)
            .transpose()
            .map(|v| v.unwrap_or(default))
    };
    let sd = SleighParams::default();
    let bd = SnakeboardParams::default();
    let (sleigh, snakeboard) = match model {
        ModelKind::Sleigh => (
            SleighParams {
                inertia: param("I", sd.inertia)?,
                mass: param("m", sd.mass)?,
                offset: param("a", sd.offset)?,
            },
            bd,
        ),
        ModelKind::Snakeboard => (
            sd,
            SnakeboardParams {
                mass: param("m", bd.mass)?,
                half_length: param("l", bd.half_length)?,
                inertia: param("I", bd.inertia)?,
                rotor_inertia: param("J", bd.rotor_inertia)?,
            },
        ),
    };
    let invalid = |e: Error| Error::Validation(e.to_string());
    match model {
        ModelKind::Sleigh => sleigh.validate().map_err(invalid)?,
        ModelKind::Snakeboard => snakeboard.validate().map_err(invalid)?,
    }

    let vec = |k: &str| entries.get(k).map(Entry::vector).transpose();
    let (q0, v0) = (vec("q0")?, vec("v0")?);
    let (r0, u0, p0, g0) = (vec("r0")?, vec("u0")?, vec("p0")?, vec("g0")?);
    let full_given = q0.is_some() || v0.is_some();
    let reduced_given = r0.is_some() || u0.is_some() || p0.is_some() || g0.is_some();
    let initial = match (full_given, reduced_given) {
        (true, true) => {
            return Err(Error::Validation(
                "give initial data either as q0, v0 or as r0, u0, p0, g0, not both".into(),
            ))
        }
        (false, false) => return Err(Error::Validation("missing initial data (q0, v0 or r0, u0, p0)".into())),
        (true, false) => {
            let (Some(q0), Some(v0)) = (q0, v0) else {
                return Err(Error::Validation("q0 and v0 must be given together".into()));
            };
            check_len("q0", &q0, model.dim())?;
            check_len("v0", &v0, model.dim())?;
            InitialData::Full { q0, v0 }
        }
        (false, true) => {
            let s = model.shape_dim();
            let r0 = r0.unwrap_or_else(|| DVector::zeros(s));
            let u0 = u0.unwrap_or_else(|| DVector::zeros(s));
            let Some(p0) = p0 else {
                return Err(Error::Validation("reduced initial data needs p0".into()));
            };
            let g0 = g0.unwrap_or_else(|| DVector::zeros(3));
            check_len("r0", &r0, s)?;
            check_len("u0", &u0, s)?;
            check_len("p0", &p0, model.sym_dim())?;
            check_len("g0", &g0, 3)?;
            InitialData::Reduced {
                r0,
                u0,
                p0,
                g0: [g0[0], g0[1], g0[2]],
            }
        }
    };

    let mut channels = Vec::new();
    for name in model.control_channels() {
        channels.push(match entries.get(&format!("control.{name}")) {
            Some(e) => parse_signal(&e.value).map_err(|x| e.expr_err(x))?,
            None => Signal::Zero,
        });
    }

    let tau: Retraction = match entries.get("tau") {
        Some(e) => e.value.parse().map_err(|m: String| e.err(0, m))?,
        None => Retraction::Exp,
    };
    let dtau = match entries.get("dtau_order") {
        Some(e) => e.value.parse().map_err(|m: String| e.err(0, m))?,
        None if tau == Retraction::Ccsk => DtauInverse::Exact,
        None => DtauInverse::Series(1),
    };
    let alpha = entries.get("alpha").map(Entry::scalar).transpose()?.unwrap_or(0.0);
    let rdp = RdpConfig {
        alpha,
        tau,
        dtau,
        ..RdpConfig::default()
    };
    rdp.validate().map_err(invalid)?;

    let cfg = RunConfig {
        model,
        integrator,
        h,
        steps,
        sleigh,
        snakeboard,
        initial,
        controls: ControlSpec::new(channels),
        rdp,
        out: entries.get("out").map(|e| PathBuf::from(&e.value)),
    };
    // admissibility needs the model
    super::run::Model::from_config(&cfg)?.initial(&cfg.initial)?;
    Ok(cfg)
}

fn write_vec(f: &mut fmt::Formatter<'_>, key: &str, v: &[f64]) -> fmt::Result {
    let items: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    writeln!(f, "{key} = [{}]", items.join(", "))
}

/// Canonical text form: every key explicit, values printed so that parsing
/// the text gives back the same configuration.
impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model = {}", self.model.name())?;
        writeln!(f, "integrator = {}", self.integrator.name())?;
        writeln!(f, "h = {:?}", self.h)?;
        writeln!(f, "N = {}", self.steps)?;
        match self.model {
            ModelKind::Sleigh => {
                let p = &self.sleigh;
                writeln!(
                    f,
                    "param.I = {:?}\nparam.m = {:?}\nparam.a = {:?}",
                    p.inertia, p.mass, p.offset
                )?;
            }
            ModelKind::Snakeboard => {
                let p = &self.snakeboard;
                writeln!(
                    f,
                    "param.m = {:?}\nparam.l = {:?}\nparam.I = {:?}\nparam.J = {:?}",
                    p.mass, p.half_length, p.inertia, p.rotor_inertia
                )?;
            }
        }
        match &self.initial {
            InitialData::Full { q0, v0 } => {
                write_vec(f, "q0", q0.as_slice())?;
                write_vec(f, "v0", v0.as_slice())?;
            }
            InitialData::Reduced { r0, u0, p0, g0 } => {
                write_vec(f, "r0", r0.as_slice())?;
                write_vec(f, "u0", u0.as_slice())?;
                write_vec(f, "p0", p0.as_slice())?;
                write_vec(f, "g0", g0)?;
            }
        }
        for (name, s) in self.model.control_channels().iter().zip(&self.controls.channels) {
            writeln!(f, "control.{name} = {s}")?;
        }
        writeln!(f, "tau = {}", self.rdp.tau.name())?;
        writeln!(f, "dtau_order = {}", self.rdp.dtau)?;
        writeln!(f, "alpha = {:?}", self.rdp.alpha)?;
        if let Some(out) = &self.out {
            writeln!(f, "out = {}", out.display())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // spinning in place needs the sideways velocity a*omega at the center of mass
    const SLEIGH: &str = "model = sleigh\nintegrator = gni\nh = 0.01\nT = 10\nq0 = [0,0,0]\nv0 = [1,0,1]";

    pub(crate) const FIG3: &str = "\
model = snakeboard
integrator = gni
N = 128
T = 10
r0 = [pi/2, pi/3]   # psi, phi
u0 = [2.5, -0.02]
p0 = -1
g0 = [0, 0, 0]
control.psi = cos(20*pi*t)
control.phi = sin(2*pi*t)
";

    fn parse_err(text: &str) -> (usize, usize, String) {
        match parse_config(text).unwrap_err() {
            Error::Parse { line, column, message } => (line, column, message),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_sleigh() {
        let cfg = parse_config(SLEIGH).unwrap();
        assert_eq!(cfg.model, ModelKind::Sleigh);
        assert_eq!(cfg.integrator, IntegratorKind::Gni);
        assert_eq!(cfg.steps, 1000);
        assert_eq!(cfg.h, 0.01);
        assert_eq!(cfg.sleigh, SleighParams::default());
        assert_eq!(cfg.rdp, RdpConfig::default());
        assert!(cfg.controls.channels.is_empty());
    }

    #[test]
    fn figure_three() {
        let cfg = parse_config(FIG3).unwrap();
        assert_eq!(cfg.steps, 128);
        assert!((cfg.h - 10.0 / 128.0).abs() < 1e-16);
        match &cfg.initial {
            InitialData::Reduced { r0, u0, p0, g0 } => {
                assert_eq!(r0.as_slice(), &[PI / 2.0, PI / 3.0]);
                assert_eq!(u0.as_slice(), &[2.5, -0.02]);
                assert_eq!(p0.as_slice(), &[-1.0]);
                assert_eq!(g0, &[0.0; 3]);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(cfg.controls.eval(0.0).as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn inadmissible_velocity_is_rejected() {
        let text = SLEIGH.replace("v0 = [1,0,1]", "v0 = [1,0,1.1]");
        assert!(matches!(parse_config(&text), Err(Error::Validation(_))));
        let ok = SLEIGH.replace("v0 = [1,0,1]", "v0 = [1,0,1.0000001]");
        assert!(parse_config(&ok).is_ok());
        // pure rotation is admissible only with the skate at the center of mass
        let spin = SLEIGH.replace("v0 = [1,0,1]", "v0 = [1,0,0]");
        assert!(matches!(parse_config(&spin), Err(Error::Validation(_))));
        assert!(parse_config(&format!("{spin}\nparam.a = 0")).is_ok());
    }

    #[test]
    fn unknown_keys_point_at_the_key() {
        let (line, col, msg) = parse_err("model = sleigh\n  speed = 3\nh=0.1\nN=1\nq0=[0,0,0]\nv0=[0,0,0]");
        assert_eq!((line, col), (2, 3));
        assert!(msg.contains("speed"));
        // a snakeboard-only parameter on the sleigh
        let (line, _, _) = parse_err(&format!("{SLEIGH}\nparam.J = 2"));
        assert_eq!(line, 7);
        let (line, _, _) = parse_err(&format!("{SLEIGH}\ncontrol.psi = zero"));
        assert_eq!(line, 7);
    }

    #[test]
    fn value_errors_carry_columns() {
        let (line, col, _) = parse_err("model = sleigh\nh = 0.1 +\nN = 1\nq0=[0,0,0]\nv0=[0,0,0]");
        assert_eq!((line, col), (2, 10));
        let (line, col, _) = parse_err("model = sleigh\nh = 0.1\nN = 1\nq0 = [0, x, 0]\nv0=[0,0,0]");
        assert_eq!((line, col), (4, 10));
        let (line, col, _) = parse_err("model = sleigh\nintegrator = euler\nh=0.1\nN=1\nq0=[0,0,0]\nv0=[0,0,0]");
        assert_eq!((line, col), (2, 14));
        let (line, _, _) = parse_err("model = sleigh\nh = 0.1\nh = 0.2");
        assert_eq!(line, 3);
        let (line, col, _) = parse_err("model = sleigh\noops");
        assert_eq!((line, col), (2, 1));
    }

    #[test]
    fn grid_resolution() {
        assert_eq!(resolve_grid(Some(0.1), Some(1.0), None).unwrap(), (0.1, 10));
        assert_eq!(resolve_grid(Some(0.25), None, Some(3)).unwrap(), (0.25, 3));
        assert_eq!(resolve_grid(None, Some(1.0), Some(4)).unwrap(), (0.25, 4));
        assert!(resolve_grid(Some(0.3), Some(1.0), None).is_err());
        assert!(resolve_grid(Some(0.1), Some(1.0), Some(11)).is_err());
        assert!(resolve_grid(Some(0.1), None, None).is_err());
        assert!(resolve_grid(Some(-0.1), None, Some(2)).is_err());
        assert_eq!(resolve_grid(Some(0.1), None, Some(0)).unwrap(), (0.1, 0));
    }

    #[test]
    fn missing_pieces() {
        assert!(matches!(parse_config("h = 1\nN = 1"), Err(Error::Validation(_))));
        assert!(matches!(
            parse_config("model = sleigh\nh = 0.1\nN = 1\nq0 = [0,0,0]"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_config("model = sleigh\nh = 0.1\nN = 1\nq0 = [0,0]\nv0 = [0,0,0]"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_config(&format!("{SLEIGH}\nparam.m = -1")),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_config(&format!("{SLEIGH}\ntau = ccsk\ndtau_order = 1")),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn defaults_follow_the_retraction() {
        let cfg = parse_config(&format!("{SLEIGH}\ntau = ccsk")).unwrap();
        assert_eq!(cfg.rdp.dtau, DtauInverse::Exact);
        let cfg = parse_config(&format!("{SLEIGH}\ntau = cay\nalpha = 0.5")).unwrap();
        assert_eq!(cfg.rdp.dtau, DtauInverse::Series(1));
        assert_eq!(cfg.rdp.alpha, 0.5);
    }

    #[test]
    fn display_round_trips() {
        for text in [
            SLEIGH.to_string(),
            FIG3.to_string(),
            format!("{SLEIGH}\nout = run.csv\ntau = cay"),
        ] {
            let cfg = parse_config(&text).unwrap();
            let again = parse_config(&cfg.to_string()).unwrap();
            assert_eq!(again, cfg, "{cfg}");
        }
    }
}
