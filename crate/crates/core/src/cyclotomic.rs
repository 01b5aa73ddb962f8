//! Exact arithmetic for roots of unity.
//!
//! Every phase that appears in the operator constructions is a root of unity,
//! so it is stored as an integer exponent `k` of `exp(2*pi*i*k/L)` for some
//! order `L`. Products, powers, and equality tests are then exact integer
//! arithmetic; conversion to `Complex64` happens only at the edges, where
//! dense-matrix cross-checks need floating point.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};

/// A unit phase `exp(2*pi*i*numerator/order)`.
///
/// Stored normalized: `0 <= numerator < order` and `order >= 1`. Two phases
/// compare equal when they denote the same complex number, regardless of the
/// order they were constructed at, e.g. `1/2 == 3/6`.
#[derive(Debug, Clone, Copy)]
pub struct PhaseExponent {
    numerator: u64,
    order: u64,
}

fn checked_lcm(a: u64, b: u64) -> Result<u64> {
    let g = a.gcd(&b);
    (a / g)
        .checked_mul(b)
        .ok_or(Error::PhaseOrderOverflow(a, b))
}

impl PhaseExponent {
    /// Builds `exp(2*pi*i*numerator/order)`; the numerator may be any integer
    /// and is reduced into `[0, order)`.
    pub fn new(numerator: i64, order: u64) -> Result<Self> {
        Self::from_exponent(i128::from(numerator), order)
    }

    /// Same as [`PhaseExponent::new`] with a wide numerator, for callers that
    /// accumulate exponent products before reducing.
    pub fn from_exponent(numerator: i128, order: u64) -> Result<Self> {
        if order == 0 {
            return Err(Error::ZeroPhaseOrder);
        }
        let m = i128::from(order);
        let reduced = numerator.rem_euclid(m) as u64;
        Ok(Self {
            numerator: reduced,
            order,
        })
    }

    /// The identity phase `1`.
    pub fn one() -> Self {
        Self {
            numerator: 0,
            order: 1,
        }
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_one(&self) -> bool {
        self.numerator == 0
    }

    /// Fraction in lowest terms; the canonical form behind `Eq` and `Hash`.
    pub fn reduced(&self) -> (u64, u64) {
        let g = self.numerator.gcd(&self.order);
        if self.numerator == 0 {
            (0, 1)
        } else {
            (self.numerator / g, self.order / g)
        }
    }

    /// Re-expresses the phase at a larger order; `target` must be a multiple
    /// of the current order.
    pub fn lift(&self, target: u64) -> Result<Self> {
        if target == 0 || !target.is_multiple_of(self.order) {
            return Err(Error::IncompatiblePhaseOrder {
                have: self.order,
                target,
            });
        }
        let factor = target / self.order;
        Ok(Self {
            numerator: self.numerator * factor,
            order: target,
        })
    }

    /// Product of two unit phases: exponents add over the lcm order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let order = checked_lcm(self.order, other.order)?;
        let a = u128::from(self.numerator) * u128::from(order / self.order);
        let b = u128::from(other.numerator) * u128::from(order / other.order);
        let numerator = ((a + b) % u128::from(order)) as u64;
        Ok(Self { numerator, order })
    }

    /// Integer power; negative exponents give the inverse phase.
    pub fn pow(&self, exponent: i64) -> Self {
        let m = i128::from(self.order);
        let n = (i128::from(exponent) * i128::from(self.numerator)).rem_euclid(m);
        Self {
            numerator: n as u64,
            order: self.order,
        }
    }

    /// Evaluates to `(cos, sin)` of the phase angle. Quarter-turn phases
    /// (1, i, -1, -i) are returned bit-exactly so that qubit reductions of the
    /// operator constructions produce exact Pauli matrices.
    pub fn to_complex(&self) -> Complex64 {
        let four_num = u128::from(self.numerator) * 4;
        let ord = u128::from(self.order);
        if four_num % ord == 0 {
            return match (four_num / ord) % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
        }
        let angle = TAU * self.numerator as f64 / self.order as f64;
        Complex64::new(angle.cos(), angle.sin())
    }
}

impl PartialEq for PhaseExponent {
    fn eq(&self, other: &Self) -> bool {
        self.reduced() == other.reduced()
    }
}

impl Eq for PhaseExponent {}

impl Hash for PhaseExponent {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.reduced().hash(state);
    }
}

/// Compensated (Kahan) accumulator for one float component.
#[derive(Debug, Default, Clone, Copy)]
struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// A multiset of unit phases sharing one order, representing their sum
/// `sum_i exp(2*pi*i*k_i/L)`.
///
/// Pushing a phase of an incompatible order lifts the whole sum to the lcm
/// order. Evaluation groups equal numerators and accumulates in ascending
/// numerator order with compensated summation, so the result does not depend
/// on insertion order.
#[derive(Debug, Clone)]
pub struct CyclotomicSum {
    order: u64,
    terms: Vec<u64>,
}

impl CyclotomicSum {
    pub fn new(order: u64) -> Result<Self> {
        if order == 0 {
            return Err(Error::ZeroPhaseOrder);
        }
        Ok(Self {
            order,
            terms: Vec::new(),
        })
    }

    /// An empty sum at the trivial order.
    pub fn empty() -> Self {
        Self {
            order: 1,
            terms: Vec::new(),
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, phase: PhaseExponent) -> Result<()> {
        if !self.order.is_multiple_of(phase.order()) {
            let target = checked_lcm(self.order, phase.order())?;
            let factor = target / self.order;
            for term in &mut self.terms {
                *term *= factor;
            }
            self.order = target;
        }
        self.terms.push(phase.lift(self.order)?.numerator());
        Ok(())
    }

    pub fn evaluate(&self) -> Complex64 {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for &term in &self.terms {
            *counts.entry(term).or_insert(0) += 1;
        }
        let mut re = KahanSum::default();
        let mut im = KahanSum::default();
        for (&numerator, &count) in &counts {
            let phase = PhaseExponent {
                numerator,
                order: self.order,
            }
            .to_complex();
            re.add(count as f64 * phase.re);
            im.add(count as f64 * phase.im);
        }
        Complex64::new(re.value(), im.value())
    }
}
