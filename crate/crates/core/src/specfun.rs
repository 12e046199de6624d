//! Modified Bessel functions `I_n`, `K_n` of non-negative integer order.
//!
//! `K_0`, `K_1` come from Temme's series (`x < 2`) or Steed's continued
//! fraction (`x >= 2`); higher `K_n` by upward recurrence, which is stable.
//! `I_n` is never recurred: the continued fraction for `I_n'/I_n` together
//! with the Wronskian `I K' - I' K = -1/x` gives it directly.
//!
//! Values that leave the `f64` range (e.g. `K_120(1e-6)`) are carried in
//! [`ExtFloat`], a mantissa/binary-exponent pair. [`IkLadder`] evaluates the
//! products `I_nu(x_<) K_nu(x_>)` for a whole run of orders through ratios
//! only, so it never overflows regardless of order.

use std::f64::consts::{LN_2, PI};

use crate::error::SpecFunError;

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 200_000;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Extended-range positive float `mant * 2^exp2`, `mant` in `[0.5, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtFloat {
    mant: f64,
    exp2: i64,
}

impl ExtFloat {
    pub const ZERO: ExtFloat = ExtFloat { mant: 0.0, exp2: 0 };

    pub fn new(x: f64) -> Self {
        let (mant, exp2) = frexp(x);
        Self { mant, exp2 }
    }

    /// `e^x` for any finite `x`.
    pub fn exp(x: f64) -> Self {
        let k = (x / LN_2).floor();
        let frac = x - k * LN_2;
        let mut out = Self::new(frac.exp());
        out.exp2 += k as i64;
        out
    }

    pub fn mul(self, other: ExtFloat) -> Self {
        let mut out = Self::new(self.mant * other.mant);
        out.exp2 += self.exp2 + other.exp2;
        out
    }

    pub fn mul_f64(self, x: f64) -> Self {
        self.mul(Self::new(x))
    }

    pub fn recip(self) -> Self {
        let mut out = Self::new(1.0 / self.mant);
        out.exp2 -= self.exp2;
        out
    }

    pub fn ln(self) -> f64 {
        self.mant.ln() + self.exp2 as f64 * LN_2
    }

    /// `Some(value)` when representable as a normal or subnormal `f64` (or
    /// exactly zero), `None` on overflow or total underflow.
    pub fn to_f64(self) -> Option<f64> {
        if self.mant == 0.0 {
            return Some(0.0);
        }
        if self.exp2 > 1024 || self.exp2 < -1074 {
            return None;
        }
        Some(ldexp(self.mant, self.exp2))
    }
}

fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let mant = f64::from_bits((bits & !(0x7ff_u64 << 52)) | (1022_u64 << 52));
    (mant, biased - 1022)
}

fn ldexp(mut m: f64, mut e: i64) -> f64 {
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
    }
    m * 2f64.powi(e as i32)
}

/// One evaluation of `I_nu`, `K_nu` and their derivatives at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub order: u32,
    pub argument: f64,
    pub value_i: f64,
    pub value_k: f64,
    pub deriv_i: f64,
    pub deriv_k: f64,
}

/// Extended-range form of [`BesselEval`]: values as [`ExtFloat`], derivatives
/// as logarithmic derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtBessel {
    pub order: u32,
    pub argument: f64,
    pub i: ExtFloat,
    pub k: ExtFloat,
    /// `I'/I`
    pub dlog_i: f64,
    /// `K'/K`
    pub dlog_k: f64,
}

/// `I_n(x)`, `K_n(x)`, `I_n'(x)`, `K_n'(x)` to about 1e-15 relative accuracy.
///
/// Errors with [`SpecFunError::Overflow`]/[`SpecFunError::Underflow`] when a
/// value is outside the `f64` range; [`bessel_ik_ext`] never does.
pub fn bessel_ik(order: u32, x: f64) -> Result<BesselEval, SpecFunError> {
    let e = bessel_ik_ext(order, x)?;
    let value_k = e.k.to_f64().ok_or(SpecFunError::Overflow { order, x })?;
    let value_i = match e.i.to_f64() {
        Some(v) if v > 0.0 => v,
        Some(_) => return Err(SpecFunError::Underflow { order, x }),
        None => return Err(SpecFunError::Overflow { order, x }),
    };
    if value_k == 0.0 {
        return Err(SpecFunError::Underflow { order, x });
    }
    let deriv_i = value_i * e.dlog_i;
    let deriv_k = value_k * e.dlog_k;
    if !(deriv_i.is_finite() && deriv_k.is_finite()) {
        return Err(SpecFunError::Overflow { order, x });
    }
    Ok(BesselEval {
        order,
        argument: x,
        value_i,
        value_k,
        deriv_i,
        deriv_k,
    })
}

pub fn bessel_ik_ext(order: u32, x: f64) -> Result<ExtBessel, SpecFunError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecFunError::NonPositiveArgument(x));
    }
    let (k0, ratio1) = k0_and_ratio(x);
    // ratio_j = K_j / K_{j-1}; K_n = K_0 * prod ratio_j.
    let mut k = k0;
    let mut ratio = ratio1;
    for j in 1..=order {
        k = k.mul_f64(ratio);
        ratio = 2.0 * j as f64 / x + 1.0 / ratio;
    }
    // `ratio` is now K_{n+1}/K_n.
    let dlog_k = order as f64 / x - ratio;
    let dlog_i = cf1_dlog_i(order, x)?;
    let i = k.mul_f64(x * (dlog_i - dlog_k)).recip();
    Ok(ExtBessel {
        order,
        argument: x,
        i,
        k,
        dlog_i,
        dlog_k,
    })
}

/// Exponentially scaled pair `(e^{-x} I_n(x), e^{x} K_n(x))`.
pub fn bessel_ik_scaled(order: u32, x: f64) -> Result<(f64, f64), SpecFunError> {
    let e = bessel_ik_ext(order, x)?;
    let i = e
        .i
        .mul(ExtFloat::exp(-x))
        .to_f64()
        .ok_or(SpecFunError::Overflow { order, x })?;
    let k = e
        .k
        .mul(ExtFloat::exp(x))
        .to_f64()
        .ok_or(SpecFunError::Overflow { order, x })?;
    Ok((i, k))
}

/// `K_0(x)`; identical to `bessel_ik(0, x)?.value_k`.
pub fn bessel_k0(x: f64) -> Result<f64, SpecFunError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecFunError::NonPositiveArgument(x));
    }
    k0_and_ratio(x)
        .0
        .to_f64()
        .filter(|v| *v > 0.0)
        .ok_or(SpecFunError::Underflow { order: 0, x })
}

/// `(K_0(x), K_1(x))` in plain `f64` (zero once they underflow, past x ~ 745).
pub fn bessel_k0_k1(x: f64) -> Result<(f64, f64), SpecFunError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecFunError::NonPositiveArgument(x));
    }
    let (k0, ratio) = k0_and_ratio(x);
    let k0 = k0.to_f64().unwrap_or(0.0);
    Ok((k0, k0 * ratio))
}

/// `K_0(x)` and `K_1(x)/K_0(x)`.
fn k0_and_ratio(x: f64) -> (ExtFloat, f64) {
    if x < 2.0 {
        // Temme's series at order zero.
        let x2 = 0.5 * x;
        let d = -x2.ln();
        let mut ff = d - EULER_GAMMA;
        let mut sum = ff;
        let mut p = 0.5;
        let mut q = 0.5;
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi);
            c *= dd / fi;
            p /= fi;
            q /= fi;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - fi * ff);
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        (ExtFloat::new(sum), sum1 * 2.0 / x / sum)
    } else {
        // Steed's continued fraction.
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..MAXIT {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                break;
            }
        }
        h *= a1;
        let k0 = ExtFloat::exp(-x).mul_f64((PI / (2.0 * x)).sqrt() / s);
        (k0, (x + 0.5 - h) / x)
    }
}

/// `I_n'(x) / I_n(x)` by the modified Lentz method.
fn cf1_dlog_i(order: u32, x: f64) -> Result<f64, SpecFunError> {
    let nu = order as f64;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAXIT {
        b += xi2;
        d = 1.0 / (b + d);
        c = b + 1.0 / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(SpecFunError::NoConvergence { order, x })
}

/// Products `I_nu(x_<) K_nu(x_>)` and `I_nu'(x_<) K_nu'(x_>)` for
/// `nu = 0 ..= max_order`, built from order-to-order ratios.
#[derive(Debug, Clone)]
pub struct IkLadder {
    x_small: f64,
    x_large: f64,
    ik: Vec<f64>,
    dik: Vec<f64>,
}

impl IkLadder {
    pub fn new(x_small: f64, x_large: f64, max_order: usize) -> Result<Self, SpecFunError> {
        for x in [x_small, x_large] {
            if !(x > 0.0) || !x.is_finite() {
                return Err(SpecFunError::NonPositiveArgument(x));
            }
        }
        let mut ladder = Self {
            x_small,
            x_large,
            ik: Vec::new(),
            dik: Vec::new(),
        };
        ladder.build(max_order.max(1))?;
        Ok(ladder)
    }

    pub fn max_order(&self) -> usize {
        self.ik.len() - 1
    }

    /// `(I_nu(x_<) K_nu(x_>), I_nu'(x_<) K_nu'(x_>))`, extending the ladder
    /// when `order` is past its end.
    pub fn get(&mut self, order: usize) -> Result<(f64, f64), SpecFunError> {
        if order > self.max_order() {
            self.build(order.max(2 * self.max_order()))?;
        }
        Ok((self.ik[order], self.dik[order]))
    }

    fn build(&mut self, n: usize) -> Result<(), SpecFunError> {
        let (x1, x2) = (self.x_small, self.x_large);
        // kr[j] = K_j(x2) / K_{j-1}(x2), j = 1 ..= n+1
        let (k0_x2, kr1) = k0_and_ratio(x2);
        let mut kr = vec![0.0; n + 2];
        kr[1] = kr1;
        for j in 1..=n {
            kr[j + 1] = 2.0 * j as f64 / x2 + 1.0 / kr[j];
        }
        // ir[j] = I_j(x1) / I_{j-1}(x1), from the continued fraction at the top
        // order and backward recurrence (stable for the minimal solution I).
        let mut ir = vec![0.0; n + 2];
        ir[n + 1] = cf1_dlog_i(n as u32, x1)? - n as f64 / x1;
        for j in (1..=n).rev() {
            ir[j] = 1.0 / (2.0 * j as f64 / x1 + ir[j + 1]);
        }
        // I_0(x1) through the Wronskian with K_0(x1), K_1(x1).
        let (k0_x1, kr1_x1) = k0_and_ratio(x1);
        let i0_x1 = k0_x1.mul_f64(x1 * (ir[1] + kr1_x1)).recip();
        let p0 = i0_x1.mul(k0_x2).to_f64().unwrap_or(0.0);

        self.ik.clear();
        self.dik.clear();
        let mut p = p0;
        for nu in 0..=n {
            if nu > 0 {
                p *= ir[nu] * kr[nu];
            }
            let fnu = nu as f64;
            let dlog_i = fnu / x1 + ir[nu + 1];
            let dlog_k = fnu / x2 - kr[nu + 1];
            self.ik.push(p);
            self.dik.push(p * dlog_i * dlog_k);
        }
        Ok(())
    }
}
