//! The delocalized-phase lower bound `g(n, 𝔱, 𝔣)` on the cleansed subsystem
//! entropy, its large-t limit, the tabulated curve, and Monte Carlo
//! estimates of the quantity it bounds.
//!
//! The closed form contains terms up to `2^{6n𝔱} · 2^{4n}`, far past the
//! `f64` range for moderate `n`. The working path therefore uses a float
//! mantissa with a separate integer exponent; an exact rational path
//! serves as a self-check when `n𝔱` and `n𝔣` are integers.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::doped::{build_doped_circuit_nf, cleansed_se_e};
use crate::error::{Error, Result};
use crate::moments::McEstimate;
use crate::rng;

/// `(n, 𝔱, 𝔣)` with `t = n𝔱` doped gates and `n_F = n𝔣`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub n: usize,
    pub t_density: f64,
    pub f_density: f64,
}

impl PhasePoint {
    pub fn new(n: usize, t_density: f64, f_density: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if !(0.0..=1.0).contains(&t_density) {
            return Err(Error::InvalidArgument(format!("t density {t_density}")));
        }
        if !(f_density > 0.0 && f_density < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "f density {f_density} must lie in (0, 1/2)"
            )));
        }
        Ok(PhasePoint {
            n,
            t_density,
            f_density,
        })
    }

    /// From integer counts.
    pub fn from_counts(n: usize, t: usize, n_f: usize) -> Result<Self> {
        Self::new(n, t as f64 / n as f64, n_f as f64 / n as f64)
    }

    pub fn nt(&self) -> f64 {
        self.n as f64 * self.t_density
    }

    pub fn nf(&self) -> f64 {
        self.n as f64 * self.f_density
    }

    /// `𝔱/𝔣`.
    pub fn ratio(&self) -> f64 {
        self.t_density / self.f_density
    }
}

/// `(f₋, f₊, g)` helper values at exponent `nt ≥ 1`.
pub fn helper_fg(nt: f64) -> Result<(f64, f64, f64)> {
    if nt < 1.0 {
        return Err(Error::InvalidArgument(format!("n𝔱 = {nt} < 1")));
    }
    // divided through by 4^{nt} so large exponents stay finite
    let a = (-nt).exp2();
    let a2 = a * a;
    let den = 1.0 - a2;
    Ok((
        (3.0 - 3.0 * a - 4.0 * a2) / den,
        (3.0 + 3.0 * a - 4.0 * a2) / den,
        (3.0 - 4.0 * a2) / den,
    ))
}

/// Field operations the closed form needs.
trait Scalar:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn int(i: i64) -> Self;
}

/// `m · 2^e` with `|m|` in `[0.5, 1)` or `m = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Scaled {
    m: f64,
    e: i64,
}

impl Scaled {
    fn new(m: f64, e: i64) -> Self {
        if m == 0.0 || !m.is_finite() {
            return Scaled { m, e: 0 };
        }
        let k = m.abs().log2().floor() as i64 + 1;
        let mut s = Scaled {
            m: m * (-k as f64).exp2(),
            e: e + k,
        };
        // guard against log2 rounding at exact powers of two
        if s.m.abs() >= 1.0 {
            s.m *= 0.5;
            s.e += 1;
        } else if s.m.abs() < 0.5 {
            s.m *= 2.0;
            s.e -= 1;
        }
        s
    }

    /// `2^x` for real `x`.
    fn pow2(x: f64) -> Self {
        let fl = x.floor();
        Scaled::new((x - fl).exp2(), fl as i64)
    }

    /// `b^x` for `b > 0`.
    fn powf(b: f64, x: f64) -> Self {
        Scaled::pow2(x * b.log2())
    }

    fn log2(self) -> f64 {
        self.m.log2() + self.e as f64
    }

    fn is_positive(self) -> bool {
        self.m > 0.0
    }
}

impl Add for Scaled {
    type Output = Scaled;
    fn add(self, o: Scaled) -> Scaled {
        if self.m == 0.0 {
            return o;
        }
        if o.m == 0.0 {
            return self;
        }
        let (hi, lo) = if self.e >= o.e { (self, o) } else { (o, self) };
        let shift = lo.e - hi.e;
        if shift < -1100 {
            return hi;
        }
        Scaled::new(hi.m + lo.m * (shift as f64).exp2(), hi.e)
    }
}

impl Neg for Scaled {
    type Output = Scaled;
    fn neg(self) -> Scaled {
        Scaled {
            m: -self.m,
            e: self.e,
        }
    }
}

impl Sub for Scaled {
    type Output = Scaled;
    fn sub(self, o: Scaled) -> Scaled {
        self + (-o)
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, o: Scaled) -> Scaled {
        Scaled::new(self.m * o.m, self.e + o.e)
    }
}

impl Div for Scaled {
    type Output = Scaled;
    fn div(self, o: Scaled) -> Scaled {
        Scaled::new(self.m / o.m, self.e - o.e)
    }
}

impl Scalar for Scaled {
    fn int(i: i64) -> Self {
        Scaled::new(i as f64, 0)
    }
}

impl Scalar for BigRational {
    fn int(i: i64) -> Self {
        BigRational::from_integer(BigInt::from(i))
    }
}

/// The closed form. `d = 2^n`, `a = 2^{n𝔱}`, `de2 = 2^{2n(1-𝔣)}`,
/// `fm, fp, gg` the helpers raised to `n𝔱`, `t = n𝔱`.
#[allow(clippy::too_many_arguments)]
fn g_expression<T: Scalar>(d: T, a: T, de2: T, fm: T, fp: T, gg: T, t: T) -> T {
    let c = |i: i64| T::int(i);
    let a2 = a.clone() * a.clone();
    let a3 = a2.clone() * a.clone();
    let a4 = a2.clone() * a2.clone();
    let a5 = a4.clone() * a.clone();
    let a6 = a3.clone() * a3.clone();
    let d2 = d.clone() * d.clone();
    let d3 = d2.clone() * d.clone();
    let d4 = d2.clone() * d2.clone();
    let diff = fm.clone() - fp.clone();
    let sum = fm.clone() + fp.clone();

    let pre = c(1)
        / (c(3)
            * (d.clone() + c(2))
            * (d.clone() + c(4))
            * (d.clone() + de2.clone())
            * (a2.clone() - c(9)));

    let term1 = de2.clone()
        * a4.clone()
        * c(2)
        * (a.clone()
            * (c(3) * a2.clone() * fm.clone() + a3.clone() * fm.clone()
                - c(10) * a.clone() * fm.clone()
                - c(24) * fm.clone()
                + (a.clone() - c(4)) * (a.clone() - c(2)) * (a.clone() + c(3)) * fp.clone()
                - c(144) * a.clone()
                + c(18) * a3.clone())
            - c(2) * (a4.clone() - c(13) * a2.clone() + c(36)) * gg.clone());

    let term2 = d2.clone()
        * a2.clone()
        * (a4.clone()
            * (de2.clone() * (sum.clone() + c(18)) - c(2) * (sum.clone() - c(2) * gg.clone()))
            - c(2)
                * a2.clone()
                * (de2.clone() * (c(5) * sum.clone() + c(24) * gg.clone() + c(72))
                    - c(10) * sum.clone()
                    + c(26) * gg.clone()
                    + c(228))
            + c(3) * (de2.clone() - c(2)) * a3.clone() * diff.clone()
            - c(24) * (de2.clone() - c(2)) * a.clone() * diff.clone()
            + c(144) * (de2.clone() + c(1)) * gg.clone()
            + c(36) * a6.clone());

    let term3 = d4
        * (a.clone()
            * (c(24) * diff.clone()
                + a.clone()
                    * (-(c(3) * a.clone() * diff.clone())
                        - a2.clone() * (sum.clone() + c(72))
                        + c(2) * (c(5) * sum.clone() + c(72))
                        + c(6) * a4.clone()))
            + c(48) * (a2.clone() - c(3)) * gg.clone());

    let term4 = c(3)
        * (c(24) * sum.clone()
            + a.clone()
                * (-(c(3) * a.clone() * fm.clone()) - a2.clone() * fm.clone()
                    + c(10) * fm.clone()
                    + (a.clone() - c(5)) * (a.clone() + c(2)) * fp.clone()
                    - c(60) * a.clone()
                    + c(2) * a5))
        * d3
        * a2.clone();

    let term5 = c(3)
        * d
        * a4.clone()
        * t
        * (-(c(10) * diff.clone() * de2.clone() * a.clone())
            + diff * de2.clone() * a3
            - c(24) * de2.clone() * sum.clone()
            + c(3) * a2 * (de2.clone() * (sum - c(20)) - c(48))
            + c(2) * (c(3) * de2 + c(8)) * a4);

    pre * (term1 + term2 + term3 + term4 + term5) / (c(2) * a6)
}

fn check_point(n: f64, nt: f64, nf: f64) -> Result<()> {
    if nt < 1.0 {
        return Err(Error::InvalidArgument(format!("n𝔱 = {nt} < 1")));
    }
    if !(nf > 0.0 && nf < n) {
        return Err(Error::InvalidArgument(format!("n𝔣 = {nf} outside (0, n)")));
    }
    Ok(())
}

/// The closed-form expression itself (the bound is `-log2` of it), scaled path.
fn g_argument_scaled(n: f64, nt: f64, nf: f64) -> Result<Scaled> {
    check_point(n, nt, nf)?;
    let (fm, fp, gg) = helper_fg(nt)?;
    Ok(g_expression(
        Scaled::pow2(n),
        Scaled::pow2(nt),
        Scaled::pow2(2.0 * (n - nf)),
        Scaled::powf(fm, nt),
        Scaled::powf(fp, nt),
        Scaled::powf(gg, nt),
        Scaled::new(nt, 0),
    ))
}

fn finish(arg_log2: f64, positive: bool) -> Result<f64> {
    if !positive {
        return Err(Error::InvalidState(
            "closed-form argument is not positive".into(),
        ));
    }
    Ok(-arg_log2)
}

/// `g(n, 𝔱, 𝔣)` in bits: 0 for `𝔱/𝔣 ≤ 1`, the closed form otherwise.
pub fn g_value(p: &PhasePoint) -> Result<f64> {
    if p.t_density <= p.f_density {
        return Ok(0.0);
    }
    let v = g_argument_scaled(p.n as f64, p.nt(), p.nf())?;
    finish(v.log2(), v.is_positive())
}

/// The closed form evaluated at any point, including `𝔱/𝔣 ≤ 1` (used to
/// inspect the behaviour at criticality).
pub fn g_formula(n: usize, nt: f64, nf: f64) -> Result<f64> {
    let v = g_argument_scaled(n as f64, nt, nf)?;
    finish(v.log2(), v.is_positive())
}

fn big_log2(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().unwrap_or(f64::NAN).log2()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().unwrap_or(f64::NAN).log2() + shift as f64
    }
}

/// Exact rational evaluation for integer `t = n𝔱` and `n_F = n𝔣`; `-log2`
/// is taken only at the end.
pub fn g_formula_exact(n: usize, t: usize, n_f: usize) -> Result<f64> {
    check_point(n as f64, t as f64, n_f as f64)?;
    let one = BigInt::one();
    let a = &one << t;
    let a2 = &a * &a;
    let den = &a2 - &one;
    let pw = |num: BigInt| BigRational::new(num.pow(t as u32), den.pow(t as u32));
    let fm = pw(BigInt::from(3) * &a2 - BigInt::from(3) * &a - 4);
    let fp = pw(BigInt::from(3) * &a2 + BigInt::from(3) * &a - 4);
    let gg = pw(BigInt::from(3) * &a2 - 4);
    let r = |x: BigInt| BigRational::from_integer(x);
    let v = g_expression(
        r(&one << n),
        r(a),
        r(&one << (2 * (n - n_f))),
        fm,
        fp,
        gg,
        r(BigInt::from(t)),
    );
    if v.is_zero() || v.is_negative() {
        return finish(0.0, false);
    }
    finish(big_log2(v.numer()) - big_log2(v.denom()), true)
}

/// `g∞ = n(1 - 2𝔣)`.
pub fn g_infinity(n: usize, f_density: f64) -> Result<f64> {
    if !(f_density > 0.0 && f_density <= 0.5) {
        return Err(Error::InvalidArgument(format!("f density {f_density}")));
    }
    Ok(n as f64 * (1.0 - 2.0 * f_density))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub t_over_f: f64,
    pub g: f64,
    pub g_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseCurve {
    pub n: usize,
    pub f_density: f64,
    pub points: Vec<CurvePoint>,
}

/// Tabulates `g` and `g/g∞` on a grid of `𝔱/𝔣` values. Every grid point must
/// correspond to an integer number of doped gates.
pub fn phase_curve(n: usize, f_density: f64, grid: &[f64]) -> Result<PhaseCurve> {
    let g_inf = g_infinity(n, f_density)?;
    if f_density >= 0.5 {
        return Err(Error::InvalidArgument(
            "f density must be below 1/2".into(),
        ));
    }
    let nf = n as f64 * f_density;
    if (nf - nf.round()).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("n𝔣 = {nf} is not an integer")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
    }
    let mut points = Vec::with_capacity(grid.len());
    for &x in grid {
        if !(0.0..=1.0 / f_density + 1e-12).contains(&x) {
            return Err(Error::InvalidArgument(format!(
                "grid value {x} outside [0, 1/𝔣]"
            )));
        }
        let t = x * nf;
        if (t - t.round()).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "grid value {x} gives a non-integer t = {t}"
            )));
        }
        let p = PhasePoint::new(n, (t.round() / n as f64).min(1.0), f_density)?;
        let g = g_value(&p)?;
        points.push(CurvePoint {
            t_over_f: x,
            g,
            g_ratio: g / g_inf,
        });
    }
    Ok(PhaseCurve {
        n,
        f_density,
        points,
    })
}

pub const MAX_MC_QUBITS: usize = 12;

/// Per-sample cleansed entropies on E for `t` doped gates and `n_F` qubits in
/// F; sample `i` is built from stream `(seed, i)`.
pub fn mc_se_samples(n: usize, t: usize, n_f: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    if n > MAX_MC_QUBITS {
        return Err(Error::TooLarge {
            what: "Monte Carlo qubits",
            value: n,
            max: MAX_MC_QUBITS,
        });
    }
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            use rand::Rng;
            let s: u64 = rng::stream(seed, i).random();
            let (c, part) = build_doped_circuit_nf(n, t, n_f, s)?;
            cleansed_se_e(&c, &part)
        })
        .collect()
}

/// Monte Carlo mean of the cleansed entropy on E at a phase point.
pub fn mc_expected_se(p: &PhasePoint, samples: usize, seed: u64) -> Result<McEstimate> {
    let t = p.nt().round() as usize;
    let n_f = p.nf().round() as usize;
    let xs = mc_se_samples(p.n, t, n_f, samples, seed)?;
    McEstimate::from_values(&xs, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helper_values() {
        let (a, b, c) = helper_fg(2.0).unwrap();
        assert!((a - 32.0 / 15.0).abs() < 1e-14);
        assert!((b - 56.0 / 15.0).abs() < 1e-14);
        assert!((c - 44.0 / 15.0).abs() < 1e-14);
        let (a, _, _) = helper_fg(1.0).unwrap();
        assert!((a - 2.0 / 3.0).abs() < 1e-15);
        let (a, b, c) = helper_fg(200.0).unwrap();
        assert_eq!((a, b, c), (3.0, 3.0, 3.0));
        assert!(helper_fg(0.5).is_err());
    }

    #[test]
    fn scaled_arithmetic() {
        let a = Scaled::pow2(3000.0);
        let b = Scaled::pow2(2999.0);
        assert!(((a - b).log2() - 2999.0).abs() < 1e-12);
        assert!(((a * b / a).log2() - 2999.0).abs() < 1e-12);
        assert_eq!(Scaled::int(8).log2(), 3.0);
        assert!(!(Scaled::int(3) - Scaled::int(5)).is_positive());
    }

    #[test]
    fn localized_points_are_zero() {
        let p = PhasePoint::from_counts(9, 3, 3).unwrap();
        assert_eq!(g_value(&p).unwrap(), 0.0);
        let p = PhasePoint::from_counts(9, 1, 3).unwrap();
        assert_eq!(g_value(&p).unwrap(), 0.0);
    }

    #[test]
    fn g_infinity_values() {
        assert!((g_infinity(30, 1.0 / 3.0).unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(g_infinity(8, 0.5).unwrap(), 0.0);
    }
}
