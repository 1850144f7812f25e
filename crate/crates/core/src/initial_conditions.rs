//! Initial data `(u₀, u₁)` on `[0, L]`.
//!
//! The closed-form families are the smooth cubic profile, the `C¹` arc
//! profile built from the constants `b` and `c(x)` (and its shifted
//! variants), the mollified kink, constants, and tabulated data read from
//! CSV.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Closed-form or tabulated initial data family.
#[derive(Debug, Clone, PartialEq)]
pub enum IcFamily<F> {
    /// `u₀ = ξ₀ (x³/3 - L x²/2)`, `u₁ = ξ₁`.
    C2Cubic { xi0: F, xi1: F },
    /// `u₀ = ξ₀ b c(x)`, `u₁ = ξ₁`.
    C1Arc { xi0: F, xi1: F, a: F },
    /// `u₀ = ξ₀ (b c(x) - 1/2) + 1`, `u₁ = ξ₁`; the kink at `L/2` sits on the threshold.
    C1ArcShiftMiddle { xi0: F, xi1: F, a: F },
    /// `u₀ = ξ₀ (b c(x) + 1/2)`, `u₁ = ξ₁`.
    C1ArcShiftHalf { xi0: F, xi1: F, a: F },
    /// `u₀` as in the shifted-middle family, `u₁ = ξ₁ b c'(x)`.
    C1ArcVelocity { xi0: F, xi1: F, a: F },
    /// `u₀ = ξ₀ f_η(x)`, `u₁ = ξ₁`.
    MollifiedQuadratic { xi0: F, xi1: F, eta: F },
    Uniform { u0: F, u1: F },
    /// Piecewise-linear data through the given nodes.
    Tabulated { x: Vec<F>, u0: Vec<F>, u1: Vec<F> },
}

/// Initial data on the interval `[0, length]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition<F> {
    pub family: IcFamily<F>,
    pub length: F,
}

/// `b = 1 / (-L √(4a² - L²)/4 - a² atan(L / √(4a² - L²)) + a L)`.
pub fn eval_b<F: Real>(a: F, length: F) -> Result<F> {
    check_arc_params(a, length)?;
    Ok(F::one() / arc_total(a, length))
}

/// `c(L) = 1/b`, the constant part of the right branch of `c`.
fn arc_total<F: Real>(a: F, l: F) -> F {
    let root = (F::lit(4.0) * a * a - l * l).sqrt();
    -l * root / F::lit(4.0) - a * a * (l / root).atan() + a * l
}

fn check_arc_params<F: Real>(a: F, l: F) -> Result<()> {
    if !(l > F::zero()) {
        return Err(Error::ParameterDomain(format!("length must be positive, got {l}")));
    }
    if !(a > l / F::lit(2.0)) {
        return Err(Error::ParameterDomain(format!(
            "arc parameter a = {a} must exceed L/2 = {}",
            l / F::lit(2.0)
        )));
    }
    Ok(())
}

fn check_in_interval<F: Real>(x: F, l: F) -> Result<()> {
    let slack = l * F::lit(1e-12);
    if x < -slack || x > l + slack || x.is_nan() {
        return Err(Error::Domain(format!("x = {x} outside [0, {l}]")));
    }
    Ok(())
}

/// Arc profile `c(x)`; the branch split at `x = L/2` uses the left formula.
///
/// On the left branch `atan(x√(a²-x²)/(x²-a²))` is evaluated as
/// `-atan2(x√(a²-x²), a²-x²)`: for `x ≤ L/2 < a` the denominator keeps one
/// sign, so this is the continuous branch with `c(0) = 0`.
pub fn eval_c<F: Real>(x: F, a: F, length: F) -> Result<F> {
    check_arc_params(a, length)?;
    check_in_interval(x, length)?;
    let x = x.max(F::zero()).min(length);
    let half = F::lit(0.5);
    let a2 = a * a;
    if x <= length * half {
        let s = (a2 - x * x).sqrt();
        Ok(-half * x * s - half * a2 * (x * s).atan2(a2 - x * x) + a * x)
    } else {
        let y = length - x;
        let s = (a2 - y * y).sqrt();
        let root = (F::lit(4.0) * a2 - length * length).sqrt();
        let k = -length * root / F::lit(4.0) - a2 * (length / root).atan();
        Ok(k + half * (y * s + a2 * (y / s).atan() + F::lit(2.0) * a * x))
    }
}

/// Closed-form `c'(x)`: `a - √(a² - x²)` on the left branch and
/// `a - √(a² - (L-x)²)` on the right one.
pub fn eval_c_prime<F: Real>(x: F, a: F, length: F) -> Result<F> {
    check_arc_params(a, length)?;
    check_in_interval(x, length)?;
    let x = x.max(F::zero()).min(length);
    let y = if x <= length * F::lit(0.5) { x } else { length - x };
    Ok(a - (a * a - y * y).sqrt())
}

/// Mollified kink profile `f_η` (peak value 1 at `x = 0` and `x = L`).
fn f_eta<F: Real>(x: F, eta: F, l: F) -> F {
    let half_l = l * F::lit(0.5);
    let m = half_l - eta;
    let scale = F::lit(2.0) / (m * l);
    let body = if x < m {
        x * x
    } else if x < half_l + eta {
        let r = m / eta;
        -r * x * x + l * r * x - l * m * m / (F::lit(2.0) * eta)
    } else {
        (x - l) * (x - l)
    };
    scale * body
}

impl<F: Real> InitialCondition<F> {
    pub fn new(family: IcFamily<F>, length: F) -> Result<Self> {
        let ic = Self { family, length };
        ic.validate()?;
        Ok(ic)
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.length;
        if !(l > F::zero()) || !l.is_finite() {
            return Err(Error::ParameterDomain(format!("length must be positive, got {l}")));
        }
        match &self.family {
            IcFamily::C1Arc { a, .. }
            | IcFamily::C1ArcShiftMiddle { a, .. }
            | IcFamily::C1ArcShiftHalf { a, .. }
            | IcFamily::C1ArcVelocity { a, .. } => check_arc_params(*a, l),
            IcFamily::MollifiedQuadratic { eta, .. } => {
                if *eta > F::zero() && *eta < l * F::lit(0.5) {
                    Ok(())
                } else {
                    Err(Error::ParameterDomain(format!("eta = {eta} must lie in (0, L/2)")))
                }
            }
            IcFamily::Tabulated { x, u0, u1 } => {
                if x.len() < 2 || x.len() != u0.len() || x.len() != u1.len() {
                    return Err(Error::ParameterDomain(
                        "tabulated data needs at least two rows of equal length".into(),
                    ));
                }
                if x.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::ParameterDomain("tabulated x must be strictly increasing".into()));
                }
                let slack = l * F::lit(1e-9);
                if x[0].abs() > slack || (x[x.len() - 1] - l).abs() > slack {
                    return Err(Error::ParameterDomain(format!(
                        "tabulated x must cover [0, {l}], got [{}, {}]",
                        x[0],
                        x[x.len() - 1]
                    )));
                }
                Ok(())
            }
            IcFamily::C2Cubic { .. } | IcFamily::Uniform { .. } => Ok(()),
        }
    }

    /// `(u₀(x), u₁(x))` at a single point.
    pub fn eval(&self, x: F) -> Result<(F, F)> {
        check_in_interval(x, self.length)?;
        let l = self.length;
        let half = F::lit(0.5);
        Ok(match &self.family {
            IcFamily::C2Cubic { xi0, xi1 } => {
                (*xi0 * (x * x * x / F::lit(3.0) - l * x * x * half), *xi1)
            }
            IcFamily::C1Arc { xi0, xi1, a } => (*xi0 * eval_b(*a, l)? * eval_c(x, *a, l)?, *xi1),
            IcFamily::C1ArcShiftMiddle { xi0, xi1, a } => {
                let bc = eval_b(*a, l)? * eval_c(x, *a, l)?;
                (*xi0 * (bc - half) + F::one(), *xi1)
            }
            IcFamily::C1ArcShiftHalf { xi0, xi1, a } => {
                let bc = eval_b(*a, l)? * eval_c(x, *a, l)?;
                (*xi0 * (bc + half), *xi1)
            }
            IcFamily::C1ArcVelocity { xi0, xi1, a } => {
                let b = eval_b(*a, l)?;
                let bc = b * eval_c(x, *a, l)?;
                (*xi0 * (bc - half) + F::one(), *xi1 * b * eval_c_prime(x, *a, l)?)
            }
            IcFamily::MollifiedQuadratic { xi0, xi1, eta } => (*xi0 * f_eta(x, *eta, l), *xi1),
            IcFamily::Uniform { u0, u1 } => (*u0, *u1),
            IcFamily::Tabulated { x: xs, u0, u1 } => {
                let x = x.max(xs[0]).min(xs[xs.len() - 1]);
                let k = match xs.iter().position(|&xk| xk > x) {
                    Some(0) => 0,
                    Some(k) => k - 1,
                    None => xs.len() - 2,
                };
                let theta = (x - xs[k]) / (xs[k + 1] - xs[k]);
                let lerp = |v: &[F]| v[k] + theta * (v[k + 1] - v[k]);
                (lerp(u0), lerp(u1))
            }
        })
    }

    /// Samples `u₀` and `u₁` on the given points.
    pub fn sample(&self, xs: &[F]) -> Result<(Vec<F>, Vec<F>)> {
        self.validate()?;
        let mut u0 = Vec::with_capacity(xs.len());
        let mut u1 = Vec::with_capacity(xs.len());
        for &x in xs {
            let (a, b) = self.eval(x)?;
            u0.push(a);
            u1.push(b);
        }
        Ok((u0, u1))
    }

    /// Points of `[0, L]` where the data fails to be `C²`.
    ///
    /// These are the sources of characteristics that exist without any
    /// debonding. For tabulated data every interior node counts.
    pub fn singular_points(&self) -> Vec<F> {
        let half_l = self.length * F::lit(0.5);
        match &self.family {
            IcFamily::C1Arc { .. }
            | IcFamily::C1ArcShiftMiddle { .. }
            | IcFamily::C1ArcShiftHalf { .. }
            | IcFamily::C1ArcVelocity { .. } => vec![half_l],
            IcFamily::MollifiedQuadratic { eta, .. } => vec![half_l - *eta, half_l + *eta],
            IcFamily::Tabulated { x, .. } => x[1..x.len() - 1].to_vec(),
            IcFamily::C2Cubic { .. } | IcFamily::Uniform { .. } => Vec::new(),
        }
    }
}

/// Convenience wrapper matching [`InitialCondition::sample`].
pub fn sample_ic<F: Real>(ic: &InitialCondition<F>, xs: &[F]) -> Result<(Vec<F>, Vec<F>)> {
    ic.sample(xs)
}

/// Boundary behaviour of initial data against the compatibility conditions
/// `u₀'(0) = u₀'(L) = u₁(0) = u₁(L) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeumannReport<F> {
    pub u0_slope_left: F,
    pub u0_slope_right: F,
    pub u1_left: F,
    pub u1_right: F,
    pub tolerance: F,
}

impl<F: Real> NeumannReport<F> {
    pub fn displacement_compliant(&self) -> bool {
        self.u0_slope_left.abs() <= self.tolerance && self.u0_slope_right.abs() <= self.tolerance
    }

    pub fn velocity_compliant(&self) -> bool {
        self.u1_left.abs() <= self.tolerance && self.u1_right.abs() <= self.tolerance
    }

    pub fn compliant(&self) -> bool {
        self.displacement_compliant() && self.velocity_compliant()
    }
}

/// Estimates the boundary slopes of `u₀` by second-order one-sided
/// differences and reads `u₁` at both ends. Never fails on non-compliance.
pub fn neumann_compatibility<F: Real>(ic: &InitialCondition<F>, tolerance: F) -> Result<NeumannReport<F>> {
    ic.validate()?;
    let l = ic.length;
    let h = match &ic.family {
        IcFamily::Tabulated { x, .. } => (x[1] - x[0]).min(x[x.len() - 1] - x[x.len() - 2]) * F::lit(0.5),
        _ => l * F::lit(1e-5),
    };
    let u0 = |x: F| ic.eval(x).map(|p| p.0);
    let two_h = F::lit(2.0) * h;
    let (three, four) = (F::lit(3.0), F::lit(4.0));
    let left = (-three * u0(F::zero())? + four * u0(h)? - u0(two_h)?) / two_h;
    let right = (three * u0(l)? - four * u0(l - h)? + u0(l - two_h)?) / two_h;
    Ok(NeumannReport {
        u0_slope_left: left,
        u0_slope_right: right,
        u1_left: ic.eval(F::zero())?.1,
        u1_right: ic.eval(l)?.1,
        tolerance,
    })
}

// ---------------------------------------------------------------------------
// Config syntax.

/// Initial data as written in a config: a closed-form family or a CSV file.
///
/// Kept separate from [`InitialCondition`] so that a `file:PATH` entry
/// survives a parse/serialize round trip without being expanded.
#[derive(Debug, Clone, PartialEq)]
pub enum IcSpec {
    Family(IcFamily<f64>),
    File(PathBuf),
}

impl IcSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let malformed = |why: &str| Error::ParameterDomain(format!("malformed initial condition `{s}`: {why}"));
        let (name, args) = s.split_once(':').ok_or_else(|| malformed("missing `:`"))?;
        let name = name.trim();
        if name == "file" {
            let path = args.trim();
            if path.is_empty() {
                return Err(malformed("empty path"));
            }
            return Ok(IcSpec::File(PathBuf::from(path)));
        }
        let nums: Vec<f64> = args
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| malformed("expected comma-separated numbers"))?;
        let want = |n: usize| {
            if nums.len() == n {
                Ok(())
            } else {
                Err(malformed(&format!("expected {n} numbers, got {}", nums.len())))
            }
        };
        let family = match name {
            "c2" => {
                want(2)?;
                IcFamily::C2Cubic { xi0: nums[0], xi1: nums[1] }
            }
            "c1" | "c1mid" | "c1half" | "c1vel" => {
                want(3)?;
                let (xi0, xi1, a) = (nums[0], nums[1], nums[2]);
                match name {
                    "c1" => IcFamily::C1Arc { xi0, xi1, a },
                    "c1mid" => IcFamily::C1ArcShiftMiddle { xi0, xi1, a },
                    "c1half" => IcFamily::C1ArcShiftHalf { xi0, xi1, a },
                    _ => IcFamily::C1ArcVelocity { xi0, xi1, a },
                }
            }
            "moll" => {
                want(3)?;
                IcFamily::MollifiedQuadratic { xi0: nums[0], xi1: nums[1], eta: nums[2] }
            }
            "uniform" => {
                want(2)?;
                IcFamily::Uniform { u0: nums[0], u1: nums[1] }
            }
            _ => return Err(malformed("unknown family")),
        };
        Ok(IcSpec::Family(family))
    }

    /// Builds the initial condition on `[0, length]`, reading the CSV if needed.
    pub fn build(&self, length: f64) -> Result<InitialCondition<f64>> {
        match self {
            IcSpec::Family(f) => InitialCondition::new(f.clone(), length),
            IcSpec::File(path) => InitialCondition::new(read_tabulated(path)?, length),
        }
    }
}

impl fmt::Display for IcSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IcSpec::File(p) => write!(f, "file:{}", p.display()),
            IcSpec::Family(fam) => match fam {
                IcFamily::C2Cubic { xi0, xi1 } => write!(f, "c2:{xi0},{xi1}"),
                IcFamily::C1Arc { xi0, xi1, a } => write!(f, "c1:{xi0},{xi1},{a}"),
                IcFamily::C1ArcShiftMiddle { xi0, xi1, a } => write!(f, "c1mid:{xi0},{xi1},{a}"),
                IcFamily::C1ArcShiftHalf { xi0, xi1, a } => write!(f, "c1half:{xi0},{xi1},{a}"),
                IcFamily::C1ArcVelocity { xi0, xi1, a } => write!(f, "c1vel:{xi0},{xi1},{a}"),
                IcFamily::MollifiedQuadratic { xi0, xi1, eta } => write!(f, "moll:{xi0},{xi1},{eta}"),
                IcFamily::Uniform { u0, u1 } => write!(f, "uniform:{u0},{u1}"),
                IcFamily::Tabulated { x, .. } => write!(f, "tabulated[{}]", x.len()),
            },
        }
    }
}

/// Reads a three-column `x,u0,u1` CSV with a header row.
pub fn read_tabulated(path: &Path) -> Result<IcFamily<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data { path: path.into(), message: e.to_string() })?;
    let (mut x, mut u0, mut u1) = (Vec::new(), Vec::new(), Vec::new());
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Data { path: path.into(), message: e.to_string() })?;
        if rec.len() != 3 {
            return Err(Error::Data {
                path: path.into(),
                message: format!("row {}: expected 3 columns, got {}", row + 2, rec.len()),
            });
        }
        let num = |k: usize| -> Result<f64> {
            rec[k].parse().map_err(|_| Error::Data {
                path: path.into(),
                message: format!("row {}: `{}` is not a number", row + 2, &rec[k]),
            })
        };
        x.push(num(0)?);
        u0.push(num(1)?);
        u1.push(num(2)?);
    }
    Ok(IcFamily::Tabulated { x, u0, u1 })
}
