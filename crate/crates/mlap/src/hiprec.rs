//! High-precision evaluation layer.
//!
//! The Λ-ratios of the tree constructions are differences of nearly equal
//! quantities: evaluating them at level `n` loses roughly `2·log2(n)` bits
//! to cancellation. Formulas are therefore written once, generically over
//! [`Real`], and instantiated either with `f64` (fast screening during
//! constant searches) or with [`BigReal`] (arbitrary precision, used by the
//! public Λ evaluators).

use std::cell::RefCell;
use std::rc::Rc;

use astro_float::{BigFloat, Consts, RoundingMode};

/// Minimal scalar interface shared by `f64` and [`BigReal`].
pub trait Real: Clone {
    /// A new value in the same context (precision, constants cache).
    fn with(&self, x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn powf(&self, e: &Self) -> Self;
    /// `ln(1 + self)`, accurate for small arguments.
    fn ln_1p(&self) -> Self;
    /// `exp(self) - 1`, accurate for small arguments.
    fn exp_m1(&self) -> Self;

    fn powf64(&self, e: f64) -> Self {
        self.powf(&self.with(e))
    }
    fn recip(&self) -> Self {
        self.with(1.0).div(self)
    }
}

impl Real for f64 {
    fn with(&self, x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn powf(&self, e: &Self) -> Self {
        f64::powf(*self, *e)
    }
    fn ln_1p(&self) -> Self {
        f64::ln_1p(*self)
    }
    fn exp_m1(&self) -> Self {
        f64::exp_m1(*self)
    }
}

/// Shared context for [`BigReal`] values: precision in bits plus the
/// constants cache astro-float uses for its transcendental functions.
#[derive(Debug)]
pub struct BigCtx {
    prec: usize,
    consts: RefCell<Consts>,
}

impl BigCtx {
    pub fn new(prec_bits: usize) -> Rc<Self> {
        Rc::new(BigCtx {
            prec: prec_bits.max(64),
            consts: RefCell::new(Consts::new().expect("constants cache")),
        })
    }
}

const RM: RoundingMode = RoundingMode::ToEven;

/// Arbitrary-precision scalar backed by `astro_float::BigFloat`.
#[derive(Debug, Clone)]
pub struct BigReal {
    v: BigFloat,
    ctx: Rc<BigCtx>,
}

impl BigReal {
    pub fn new(ctx: &Rc<BigCtx>, x: f64) -> Self {
        BigReal { v: BigFloat::from_f64(x, ctx.prec), ctx: Rc::clone(ctx) }
    }

    fn wrap(&self, v: BigFloat) -> Self {
        BigReal { v, ctx: Rc::clone(&self.ctx) }
    }
}

impl Real for BigReal {
    fn with(&self, x: f64) -> Self {
        BigReal::new(&self.ctx, x)
    }
    fn to_f64(&self) -> f64 {
        // astro-float has no direct f64 conversion in this version; go
        // through mantissa/exponent.
        big_to_f64(&self.v)
    }
    fn add(&self, o: &Self) -> Self {
        self.wrap(self.v.add(&o.v, self.ctx.prec, RM))
    }
    fn sub(&self, o: &Self) -> Self {
        self.wrap(self.v.sub(&o.v, self.ctx.prec, RM))
    }
    fn mul(&self, o: &Self) -> Self {
        self.wrap(self.v.mul(&o.v, self.ctx.prec, RM))
    }
    fn div(&self, o: &Self) -> Self {
        self.wrap(self.v.div(&o.v, self.ctx.prec, RM))
    }
    fn neg(&self) -> Self {
        self.wrap(self.v.neg())
    }
    fn ln(&self) -> Self {
        let mut cc = self.ctx.consts.borrow_mut();
        self.wrap(self.v.ln(self.ctx.prec, RM, &mut cc))
    }
    fn exp(&self) -> Self {
        let mut cc = self.ctx.consts.borrow_mut();
        self.wrap(self.v.exp(self.ctx.prec, RM, &mut cc))
    }
    fn sqrt(&self) -> Self {
        self.wrap(self.v.sqrt(self.ctx.prec, RM))
    }
    fn powf(&self, e: &Self) -> Self {
        let mut cc = self.ctx.consts.borrow_mut();
        self.wrap(self.v.pow(&e.v, self.ctx.prec, RM, &mut cc))
    }
    fn ln_1p(&self) -> Self {
        // with guard precision, forming 1 + x directly is accurate enough
        self.add(&self.with(1.0)).ln()
    }
    fn exp_m1(&self) -> Self {
        self.exp().sub(&self.with(1.0))
    }
}

fn big_to_f64(v: &BigFloat) -> f64 {
    if v.is_nan() {
        return f64::NAN;
    }
    if v.is_zero() {
        return 0.0;
    }
    if v.is_inf_pos() {
        return f64::INFINITY;
    }
    if v.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let (m, n, s, e, _inexact) = v.as_raw_parts().expect("finite bigfloat");
    // value = s * 0.m * 2^e with n significant bits in m (top word first)
    let mut mant = 0f64;
    let mut consumed = 0usize;
    for (i, word) in m.iter().rev().enumerate() {
        let shift = (i + 1) * 64;
        mant += (*word as f64) / (2f64).powi(shift as i32);
        consumed += 64;
        if consumed >= 128 {
            break;
        }
    }
    let _ = n;
    let sign = if s.is_negative() { -1.0 } else { 1.0 };
    sign * mant * (2f64).powi(e)
}

/// Precision policy for Λ evaluation at level `n`: the cancellation costs
/// about `2·log2(n)` bits, so `4·log2(n)` with a floor of 64 keeps at least
/// half the mantissa meaningful.
pub fn required_precision_bits(n: u64) -> usize {
    let lg = (n.max(2) as f64).log2();
    (4.0 * lg).ceil().max(64.0) as usize
}
