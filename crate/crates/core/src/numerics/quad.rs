//! Adaptive Gauss–Kronrod quadrature on `(0, ∞)`.
//!
//! The half line is split at `X = max(30, 30 / decay_rate)`. On `[0, X]` the
//! substitution `x = u²` removes `√x` behavior at the origin; on `[X, ∞)` the
//! substitution `x = X / w²` maps the tail onto `(0, 1]`, which keeps
//! integrands decaying like `x^{-3/2}` bounded. Both pieces share one global
//! error-driven bisection queue.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Values that can be integrated: complex scalars or fixed-size complex vectors.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn norm(&self) -> f64;
    fn components(&self) -> Vec<C64>;
    fn is_finite(&self) -> bool;
}

impl QuadValue for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn norm(&self) -> f64 {
        C64::norm(*self)
    }
    fn components(&self) -> Vec<C64> {
        vec![*self]
    }
    fn is_finite(&self) -> bool {
        C64::is_finite(*self)
    }
}

/// Fixed-length complex vector; lets several integrals share one set of nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVec<const N: usize>(pub [C64; N]);

impl<const N: usize> Add for CVec<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.0.iter_mut().zip(rhs.0).for_each(|(a, b)| *a += b);
        self
    }
}

impl<const N: usize> Sub for CVec<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.0.iter_mut().zip(rhs.0).for_each(|(a, b)| *a -= b);
        self
    }
}

impl<const N: usize> Mul<f64> for CVec<N> {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        self.0.iter_mut().for_each(|a| *a *= rhs);
        self
    }
}

impl<const N: usize> QuadValue for CVec<N> {
    fn zero() -> Self {
        CVec([C64::new(0.0, 0.0); N])
    }
    fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
    fn components(&self) -> Vec<C64> {
        self.0.to_vec()
    }
    fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<V = C64> {
    pub value: V,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Target accuracy, applied as `max(tol, tol * |value|)`.
    pub tol: f64,
    pub max_subdivisions: usize,
    /// Each initial panel is split into this many equal parts before adapting.
    pub initial_refinement: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_subdivisions: 4000,
            initial_refinement: 1,
        }
    }
}

impl QuadratureOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

// 21-point Kronrod extension of the 10-point Gauss rule.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// One GK21 panel: (kronrod estimate, |kronrod - gauss|).
fn gk21<V: QuadValue>(g: &impl Fn(f64) -> V, a: f64, b: f64) -> (V, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = V::zero();
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = g(center - dx) + g(center + dx);
        kronrod = kronrod + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).norm())
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Split point between the polynomially mapped body and the tail.
pub fn split_point(decay_rate: f64) -> f64 {
    if decay_rate > 0.0 {
        (30.0 / decay_rate).max(30.0)
    } else {
        30.0
    }
}

/// `∫₀^∞ f(x) dx` with the default options and the given tolerance.
pub fn integrate_semi_infinite<V, F>(f: F, decay_rate: f64, tol: f64) -> Result<QuadratureResult<V>>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    integrate_semi_infinite_with(f, decay_rate, &QuadratureOptions::with_tol(tol))
}

pub fn integrate_semi_infinite_with<V, F>(
    f: F,
    decay_rate: f64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult<V>>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    if !(decay_rate >= 0.0) || !(opts.tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "decay_rate must be >= 0 and tol > 0 (got {decay_rate}, {})",
            opts.tol
        )));
    }
    let x_split = split_point(decay_rate);
    let u_split = x_split.sqrt();

    // s in [0, u_split]: x = s²; s in (u_split, u_split + 1]: x = X / w², w = s - u_split.
    let g = |s: f64| -> V {
        if s <= u_split {
            f(s * s) * (2.0 * s)
        } else {
            let w = s - u_split;
            let x = x_split / (w * w);
            if !x.is_finite() {
                return V::zero();
            }
            let v = f(x) * (2.0 * x_split / (w * w * w));
            if v.is_finite() {
                v
            } else {
                V::zero()
            }
        }
    };

    let mut breaks = vec![0.0];
    let mut edge = 0.5f64.min(u_split);
    while edge < u_split {
        breaks.push(edge);
        edge *= 2.0;
    }
    breaks.push(u_split);
    breaks.push(u_split + 0.5);
    breaks.push(u_split + 1.0);

    let refine = opts.initial_refinement.max(1);
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    let mut total = V::zero();
    let mut total_err = 0.0;
    for w in breaks.windows(2) {
        let step = (w[1] - w[0]) / refine as f64;
        for k in 0..refine {
            let a = w[0] + step * k as f64;
            let b = if k + 1 == refine { w[1] } else { a + step };
            let (value, error) = gk21(&g, a, b);
            evaluations += 21;
            total = total + value;
            total_err += error;
            heap.push(Panel { a, b, value, error });
        }
    }

    let mut subdivisions = 0usize;
    loop {
        let target = opts.tol.max(opts.tol * total.norm());
        if total_err <= target {
            break;
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(Error::QuadratureFailure {
                context: format!("{subdivisions} subdivisions exhausted"),
                best: total.components(),
                error: total_err,
            });
        }
        let worst = heap.pop().expect("panel queue is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = gk21(&g, worst.a, mid);
        let (rv, re) = gk21(&g, mid, worst.b);
        evaluations += 42;
        subdivisions += 1;
        total = total - worst.value + lv + rv;
        total_err += le + re - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
    }

    // Re-sum to shed the drift of the running updates.
    let (value, error_estimate) = heap
        .iter()
        .fold((V::zero(), 0.0), |(v, e), p| (v + p.value, e + p.error));
    if !value.is_finite() {
        return Err(Error::QuadratureFailure {
            context: "non-finite integrand".into(),
            best: value.components(),
            error: error_estimate,
        });
    }
    Ok(QuadratureResult {
        value,
        error_estimate,
        evaluations,
    })
}
