//! Local-hidden-variable analysis for tripartite scenarios.
//!
//! A deterministic local model assigns every party/setting pair an outcome
//! exponent `alpha(j, m)` in `Z_d`. The classical Bell value is `L*d - 1`
//! where `L` is the fraction of delta constraints the assignment satisfies,
//! each constraint demanding `alpha(1,e1) + alpha(2,e2) + alpha(3,e3) + e~/M`
//! to vanish mod `d` for a setting triple with `M | e~`.
//!
//! The hidden-variable average over mixed strategies is affine in the
//! distribution, so its optimum is attained at a deterministic assignment;
//! searching deterministic tables is therefore exact. The search pins
//! `alpha(1,0) = 0`, valid because shifting all of party 1's outcomes by a
//! constant while shifting party 2's by its negative leaves every constraint
//! sum unchanged.

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// The constraint family is tripartite throughout.
pub const PARTIES: usize = 3;

/// Default ceiling on the number of deterministic assignments (`d^(3M)`)
/// the exhaustive search will take on.
pub const DEFAULT_BRUTE_FORCE_BUDGET: u128 = 100_000_000;

/// Conventional variable name for a party/setting pair: setting letter and
/// 1-based party number, `a1`, `b2`, `c3`, ...
pub fn var_label(party: usize, setting: usize) -> String {
    if setting < 26 {
        format!("{}{}", (b'a' + setting as u8) as char, party + 1)
    } else {
        format!("s{}p{}", setting, party + 1)
    }
}

/// A deterministic outcome table: `alpha(party, setting)` in `[0, dim)` for
/// three parties and `settings` settings each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LhvAssignment {
    settings: usize,
    dim: usize,
    alpha: Vec<u32>,
}

impl LhvAssignment {
    pub fn zeros(settings: usize, dim: usize) -> Result<Self> {
        if settings < 2 {
            return Err(Error::InvalidSettings(settings));
        }
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            settings,
            dim,
            alpha: vec![0; PARTIES * settings],
        })
    }

    /// Builds a table from party-major flat values; entries are reduced
    /// mod `dim`.
    pub fn new(settings: usize, dim: usize, values: &[i64]) -> Result<Self> {
        let mut table = Self::zeros(settings, dim)?;
        if values.len() != PARTIES * settings {
            return Err(Error::ShapeMismatch(format!(
                "expected {} outcome entries, got {}",
                PARTIES * settings,
                values.len()
            )));
        }
        for (slot, &value) in table.alpha.iter_mut().zip(values) {
            *slot = value.rem_euclid(dim as i64) as u32;
        }
        Ok(table)
    }

    pub fn settings(&self) -> usize {
        self.settings
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, party: usize, setting: usize) -> u32 {
        self.alpha[party * self.settings + setting]
    }

    pub fn set(&mut self, party: usize, setting: usize, value: i64) {
        self.alpha[party * self.settings + setting] = value.rem_euclid(self.dim as i64) as u32;
    }

    /// Party-major flat view of the table.
    pub fn flat(&self) -> &[u32] {
        &self.alpha
    }

    /// Deterministic label/value listing, e.g. for report output.
    pub fn labeled(&self) -> Vec<(String, i64)> {
        let mut out = Vec::with_capacity(self.alpha.len());
        for party in 0..PARTIES {
            for setting in 0..self.settings {
                out.push((
                    var_label(party, setting),
                    i64::from(self.get(party, setting)),
                ));
            }
        }
        out
    }
}

/// One delta constraint: `sum_i coeff_i * alpha(var_i) + constant = 0 (mod
/// modulus)`. The generated family always has unit coefficients and one
/// variable per party.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaConstraint {
    pub vars: Vec<(usize, usize)>,
    pub coeffs: Vec<i64>,
    pub constant: i64,
    pub modulus: i64,
}

impl DeltaConstraint {
    pub fn satisfied_by(&self, assignment: &LhvAssignment) -> Result<bool> {
        if self.modulus != assignment.dim() as i64 {
            return Err(Error::ConstraintMismatch {
                constraint_settings: self.vars.iter().map(|v| v.1 + 1).max().unwrap_or(0),
                constraint_modulus: self.modulus,
                assignment_settings: assignment.settings(),
                assignment_dim: assignment.dim(),
            });
        }
        let mut sum = self.constant;
        for (&(party, setting), &coeff) in self.vars.iter().zip(&self.coeffs) {
            if party >= PARTIES || setting >= assignment.settings() {
                return Err(Error::ConstraintMismatch {
                    constraint_settings: setting + 1,
                    constraint_modulus: self.modulus,
                    assignment_settings: assignment.settings(),
                    assignment_dim: assignment.dim(),
                });
            }
            sum += coeff * i64::from(assignment.get(party, setting));
        }
        Ok(sum.rem_euclid(self.modulus) == 0)
    }

    /// Human-readable form, e.g. `a1 + b2 + c3 + 1 = 0 (mod 4)`.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self
            .vars
            .iter()
            .zip(&self.coeffs)
            .map(|(&(party, setting), &coeff)| {
                let label = var_label(party, setting);
                match coeff {
                    1 => label,
                    -1 => format!("-{label}"),
                    c => format!("{c}*{label}"),
                }
            })
            .collect();
        if self.constant != 0 {
            parts.push(self.constant.to_string());
        }
        format!("{} = 0 (mod {})", parts.join(" + "), self.modulus)
    }
}

/// The full delta-constraint family for a tripartite `(3, settings, dim)`
/// scenario: one constraint per setting triple with sum divisible by
/// `settings`, which is exactly `settings^2` constraints.
pub fn generate_constraints(settings: usize, dim: usize) -> Result<Vec<DeltaConstraint>> {
    if settings < 2 {
        return Err(Error::InvalidSettings(settings));
    }
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut constraints = Vec::with_capacity(settings * settings);
    for e1 in 0..settings {
        for e2 in 0..settings {
            for e3 in 0..settings {
                let sum = e1 + e2 + e3;
                if !sum.is_multiple_of(settings) {
                    continue;
                }
                constraints.push(DeltaConstraint {
                    vars: vec![(0, e1), (1, e2), (2, e3)],
                    coeffs: vec![1, 1, 1],
                    constant: (sum / settings) as i64,
                    modulus: dim as i64,
                });
            }
        }
    }
    debug_assert_eq!(constraints.len(), settings * settings);
    Ok(constraints)
}

/// The fraction of constraints an assignment satisfies; always in `[0, 1]`
/// with denominator `settings^2`.
pub fn evaluate_l(
    constraints: &[DeltaConstraint],
    assignment: &LhvAssignment,
) -> Result<Ratio<i64>> {
    let expected = assignment.settings() * assignment.settings();
    if constraints.len() != expected {
        return Err(Error::ConstraintMismatch {
            constraint_settings: constraints.len(),
            constraint_modulus: constraints.first().map_or(0, |c| c.modulus),
            assignment_settings: assignment.settings(),
            assignment_dim: assignment.dim(),
        });
    }
    let mut satisfied = 0i64;
    for constraint in constraints {
        if constraint.satisfied_by(assignment)? {
            satisfied += 1;
        }
    }
    Ok(Ratio::new(satisfied, expected as i64))
}

/// Outcome of the exhaustive deterministic search.
#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub l_max: Ratio<i64>,
    pub witness: LhvAssignment,
    pub assignments_scanned: u128,
}

/// Compiled form of one constraint for the scan loop: three flat table
/// indices plus the constant.
struct CompiledConstraint {
    idx: [usize; 3],
    constant: u32,
}

fn compile(
    constraints: &[DeltaConstraint],
    settings: usize,
    dim: usize,
) -> Vec<CompiledConstraint> {
    constraints
        .iter()
        .map(|c| {
            let mut idx = [0usize; 3];
            for (slot, &(party, setting)) in idx.iter_mut().zip(&c.vars) {
                *slot = party * settings + setting;
            }
            CompiledConstraint {
                idx,
                constant: c.constant.rem_euclid(dim as i64) as u32,
            }
        })
        .collect()
}

fn decode(index: u64, free_vars: usize, dim: usize) -> Vec<u32> {
    let mut digits = vec![0u32; free_vars];
    let mut rest = index;
    for slot in digits.iter_mut().rev() {
        *slot = (rest % dim as u64) as u32;
        rest /= dim as u64;
    }
    digits
}

fn satisfied_count(table: &[u32], compiled: &[CompiledConstraint], dim: u32) -> u32 {
    let mut count = 0;
    for c in compiled {
        let sum = table[c.idx[0]] + table[c.idx[1]] + table[c.idx[2]] + c.constant;
        if sum.is_multiple_of(dim) {
            count += 1;
        }
    }
    count
}

/// Exact maximum of `L` over all deterministic assignments, found by
/// exhaustive search with `alpha(1,0)` pinned to zero by the shift symmetry.
///
/// The space is split into disjoint index ranges scanned in parallel; ranges
/// combine by "higher count wins, ties go to the smaller index", so the
/// reported witness is the lexicographically smallest maximizer regardless of
/// scheduling.
pub fn brute_force_max(settings: usize, dim: usize, budget: u128) -> Result<BruteForceResult> {
    let constraints = generate_constraints(settings, dim)?;
    let space = (dim as u128)
        .checked_pow((PARTIES * settings) as u32)
        .ok_or(Error::BudgetExceeded {
            space: u128::MAX,
            budget,
        })?;
    if space > budget {
        return Err(Error::BudgetExceeded { space, budget });
    }
    let free_vars = PARTIES * settings - 1;
    let total =
        u64::try_from(space / dim as u128).map_err(|_| Error::BudgetExceeded { space, budget })?;
    let compiled = compile(&constraints, settings, dim);

    let chunk = 1u64 << 14;
    let starts: Vec<u64> = (0..total).step_by(chunk as usize).collect();
    let (best_count, best_index) = starts
        .par_iter()
        .map(|&start| {
            let end = (start + chunk).min(total);
            let mut table = vec![0u32; PARTIES * settings];
            let mut digits = decode(start, free_vars, dim);
            let mut best = (0u32, u64::MAX);
            for index in start..end {
                table[1..].copy_from_slice(&digits);
                let count = satisfied_count(&table, &compiled, dim as u32);
                if count > best.0 {
                    best = (count, index);
                }
                // odometer step on the free digits
                for slot in digits.iter_mut().rev() {
                    *slot += 1;
                    if *slot < dim as u32 {
                        break;
                    }
                    *slot = 0;
                }
            }
            best
        })
        .reduce(
            || (0u32, u64::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );

    let digits = decode(best_index, free_vars, dim);
    let mut witness = LhvAssignment::zeros(settings, dim)?;
    for (offset, &digit) in digits.iter().enumerate() {
        let flat = offset + 1;
        witness.set(flat / settings, flat % settings, i64::from(digit));
    }
    Ok(BruteForceResult {
        l_max: Ratio::new(i64::from(best_count), (settings * settings) as i64),
        witness,
        assignments_scanned: total as u128,
    })
}
