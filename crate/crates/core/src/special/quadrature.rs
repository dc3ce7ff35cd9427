//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Intervals are refined worst-error-first until the summed error estimate
//! meets `max(absolute_tolerance, relative_tolerance * |I|)`. The refinement
//! order depends only on the integrand values, so repeated calls are
//! bit-identical.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and subdivision budget for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            relative_tolerance: 1e-10,
            absolute_tolerance: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(relative_tolerance: f64, absolute_tolerance: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = QuadratureSpec {
            relative_tolerance,
            absolute_tolerance,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Purely relative accuracy, for integrals whose value may be far below
    /// any fixed absolute floor (deep outage tails).
    pub fn relative(relative_tolerance: f64) -> Self {
        QuadratureSpec {
            relative_tolerance,
            absolute_tolerance: f64::MIN_POSITIVE,
            max_subdivisions: 2000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0) || !(self.absolute_tolerance > 0.0) {
            return Err(Error::invalid("quadrature tolerances must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::invalid("max_subdivisions must be at least 1"));
        }
        Ok(())
    }
}

/// Value of a definite integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kron += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::Accuracy {
            context: format!("non-finite integrand on [{a:e}, {b:e}]"),
            estimate: f64::NAN,
            error: f64::INFINITY,
        });
    }
    Ok(Segment { a, b, value, error })
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate_finite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral> {
    integrate_with_breaks(f, &[a, b], spec)
}

/// Adaptive integral over `[points[0], points[last]]`, seeded with the given
/// interior breakpoints. Points must be non-decreasing.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64], spec: &QuadratureSpec) -> Result<Integral> {
    spec.validate()?;
    if points.len() < 2 {
        return Err(Error::domain("integration needs at least two endpoints"));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::domain("integration limits must be finite"));
    }
    if points.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::domain(format!(
            "integration limits must be ordered, got {:?}",
            points
        )));
    }

    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod(&f, w[0], w[1])?);
        }
    }
    if heap.is_empty() {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            subdivisions: 0,
        });
    }

    let mut subdivisions = heap.len();
    let (mut running_total, mut running_err) = totals(&heap);
    loop {
        let target = spec
            .absolute_tolerance
            .max(spec.relative_tolerance * running_total.abs());
        if running_err <= target {
            // Re-sum exactly in a fixed order before reporting.
            let (total, err) = totals(&heap);
            let target = spec.absolute_tolerance.max(spec.relative_tolerance * total.abs());
            if err <= target {
                return Ok(Integral {
                    value: total,
                    abs_error: err,
                    subdivisions,
                });
            }
            running_total = total;
            running_err = err;
        }
        if subdivisions >= spec.max_subdivisions {
            let (total, err) = totals(&heap);
            return Err(Error::Accuracy {
                context: format!("adaptive quadrature after {subdivisions} subdivisions"),
                estimate: total,
                error: err,
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || worst.error == 0.0 {
            // Interval collapsed to adjacent floats; accept its contribution.
            running_err -= worst.error;
            heap.push(Segment { error: 0.0, ..worst });
            if heap.peek().is_none_or(|s| s.error == 0.0) {
                let (total, err) = totals(&heap);
                return Ok(Integral {
                    value: total,
                    abs_error: err,
                    subdivisions,
                });
            }
            continue;
        }
        let left = kronrod(&f, worst.a, mid)?;
        let right = kronrod(&f, mid, worst.b)?;
        running_total += left.value + right.value - worst.value;
        running_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }
}

fn totals(heap: &BinaryHeap<Segment>) -> (f64, f64) {
    // Sum in a fixed order (by left endpoint) so the result does not depend
    // on the heap's internal layout.
    let mut segs: Vec<&Segment> = heap.iter().collect();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut err = 0.0;
    for s in segs {
        let t = sum + s.value;
        if sum.abs() >= s.value.abs() {
            comp += (sum - t) + s.value;
        } else {
            comp += (s.value - t) + sum;
        }
        sum = t;
        err += s.error;
    }
    (sum + comp, err)
}

/// Integral of `f` over `[lower, inf)` for integrands that decay at least
/// exponentially.
///
/// Substitutes `u = exp(-(z - lower))`, which maps the half-line onto
/// `(0, 1]`, and seeds the refinement with geometrically spaced breakpoints
/// in `z` so narrow peaks far from `lower` are not missed.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, lower: f64, spec: &QuadratureSpec) -> Result<Integral> {
    if !lower.is_finite() {
        return Err(Error::domain("lower limit must be finite"));
    }
    let g = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let v = f(lower - u.ln());
        if v == 0.0 {
            0.0
        } else {
            v / u
        }
    };
    const OFFSETS: [f64; 9] = [512.0, 128.0, 64.0, 32.0, 16.0, 8.0, 4.0, 2.0, 1.0];
    let mut points = Vec::with_capacity(OFFSETS.len() + 2);
    points.push(0.0);
    points.extend(OFFSETS.iter().map(|d| (-d).exp()));
    points.push(1.0);
    integrate_with_breaks(g, &points, spec)
}
