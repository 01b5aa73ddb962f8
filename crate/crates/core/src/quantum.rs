//! The multi-setting Bell operator, its GHZ expectation value, and the
//! eigenvalue check.
//!
//! The operator for a scenario of `N` parties, `M` settings, and `d` outcomes
//! is the quadruple sum over level `n`, selector `gamma`, and setting vector
//! `eta` of tensor products of raising operators `X^n(eta_j/M)`, weighted by
//! `Omega^(gamma*eta~) * omega^(n*eta~/M)` and normalized by `1/M^N`.
//!
//! Expectation values on the GHZ state reduce to pure phase bookkeeping: the
//! shift structure pairs `|k+n>` with `|k+n>` across parties, so each term
//! contributes an exact root of unity. The exact path exploits this; the dense
//! path materializes the operator for small state spaces and cross-checks it.

use num_complex::Complex64;
use num_rational::Ratio;

use crate::cyclotomic::{CyclotomicSum, PhaseExponent};
use crate::error::{Error, Result};
use crate::observables::{power_x_nu, DenseOperator, GenPermOperator, PhaseFraction};

/// Default cap on the number of state-vector amplitudes (`d^N`) for which the
/// dense cross-check path may run.
pub const DEFAULT_DENSE_AMPLITUDE_CAP: usize = 4096;

/// Joint phase order `M*d` must stay comfortably inside 64-bit arithmetic.
const MAX_JOINT_ORDER: u64 = 1 << 31;

/// A Bell scenario: `parties` subsystems, `settings` observables per
/// subsystem, `dim` outcomes per observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BellScenario {
    parties: usize,
    settings: usize,
    dim: usize,
}

impl BellScenario {
    pub fn new(parties: usize, settings: usize, dim: usize) -> Result<Self> {
        if parties < 2 {
            return Err(Error::InvalidParties(parties));
        }
        if settings < 2 {
            return Err(Error::InvalidSettings(settings));
        }
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        (settings as u64)
            .checked_mul(dim as u64)
            .filter(|&joint| joint <= MAX_JOINT_ORDER)
            .ok_or(Error::PhaseOrderOverflow(settings as u64, dim as u64))?;
        Ok(Self {
            parties,
            settings,
            dim,
        })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn settings(&self) -> usize {
        self.settings
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `omega = exp(2*pi*i/d)`.
    pub fn omega(&self) -> PhaseExponent {
        PhaseExponent::new(1, self.dim as u64).expect("dim >= 2")
    }

    /// `Omega = exp(2*pi*i/M)`.
    pub fn setting_root(&self) -> PhaseExponent {
        PhaseExponent::new(1, self.settings as u64).expect("settings >= 2")
    }

    /// Common order `M*d` at which every phase in the scenario lives.
    pub fn joint_order(&self) -> u64 {
        self.settings as u64 * self.dim as u64
    }

    /// The phase fraction `eta/M` selecting a party's observable.
    pub fn nu(&self, setting: usize) -> Result<PhaseFraction> {
        if setting >= self.settings {
            return Err(Error::SettingOutOfRange {
                value: setting,
                settings: self.settings,
            });
        }
        Ok(Ratio::new(setting as i64, self.settings as i64))
    }

    pub fn ghz(&self) -> GhzState {
        GhzState {
            parties: self.parties,
            dim: self.dim,
        }
    }

    /// Number of amplitudes `d^N` of the joint state space.
    pub fn amplitude_count(&self) -> u128 {
        (self.dim as u128).pow(self.parties as u32)
    }
}

/// One measurement setting per party, each in `[0, M)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SettingVector {
    eta: Vec<usize>,
}

impl SettingVector {
    pub fn new(scenario: &BellScenario, eta: Vec<usize>) -> Result<Self> {
        if eta.len() != scenario.parties() {
            return Err(Error::SettingVectorLength {
                got: eta.len(),
                expected: scenario.parties(),
            });
        }
        for &value in &eta {
            if value >= scenario.settings() {
                return Err(Error::SettingOutOfRange {
                    value,
                    settings: scenario.settings(),
                });
            }
        }
        Ok(Self { eta })
    }

    pub fn values(&self) -> &[usize] {
        &self.eta
    }

    /// The setting sum; the only derived quantity downstream code relies on.
    pub fn sum(&self) -> usize {
        self.eta.iter().sum()
    }
}

/// The maximally entangled state `(1/sqrt(d)) sum_k |k>^(x N)`, kept symbolic;
/// dense amplitudes exist for cross-checks only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GhzState {
    parties: usize,
    dim: usize,
}

impl GhzState {
    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dense_amplitudes(&self) -> Vec<Complex64> {
        let size = (self.dim as u128).pow(self.parties as u32) as usize;
        let mut state = vec![Complex64::new(0.0, 0.0); size];
        let weight = 1.0 / (self.dim as f64).sqrt();
        // |k>^(x N) sits at index k * (d^N - 1)/(d - 1)
        let stride = (size - 1) / (self.dim - 1);
        for k in 0..self.dim {
            state[k * stride] = Complex64::new(weight, 0.0);
        }
        state
    }
}

/// Visits every tuple in `[0, settings)^parties` in lexicographic order.
fn for_each_setting_tuple<F: FnMut(&[usize])>(parties: usize, settings: usize, mut f: F) {
    let mut eta = vec![0usize; parties];
    'outer: loop {
        f(&eta);
        for j in (0..parties).rev() {
            eta[j] += 1;
            if eta[j] < settings {
                continue 'outer;
            }
            eta[j] = 0;
        }
        break;
    }
}

/// Raising operators for every setting value at a fixed level.
fn operators_for_level(scenario: &BellScenario, level: usize) -> Result<Vec<GenPermOperator>> {
    (0..scenario.settings())
        .map(|s| power_x_nu(scenario.dim(), scenario.nu(s)?, level))
        .collect()
}

/// The level-`n` correlation function: the GHZ expectation value of the tensor
/// product of `X^n(eta_j/M)` across parties, computed exactly as
/// `(1/d) sum_k prod_j phase_j(k)`.
pub fn correlation(
    scenario: &BellScenario,
    level: usize,
    eta: &SettingVector,
) -> Result<Complex64> {
    if level < 1 || level > scenario.dim() - 1 {
        return Err(Error::LevelOutOfRange {
            level,
            max: scenario.dim() - 1,
        });
    }
    if eta.values().len() != scenario.parties() {
        return Err(Error::SettingVectorLength {
            got: eta.values().len(),
            expected: scenario.parties(),
        });
    }
    let ops = operators_for_level(scenario, level)?;
    let mut sum = CyclotomicSum::new(scenario.joint_order())?;
    for k in 0..scenario.dim() {
        let mut product = PhaseExponent::one();
        for &setting in eta.values() {
            product = product.mul(&ops[setting].phase(k))?;
        }
        sum.push(product)?;
    }
    Ok(sum.evaluate() / scenario.dim() as f64)
}

/// GHZ expectation value of the Bell operator, with the residual imaginary
/// magnitude the exact evaluation left behind.
#[derive(Debug, Clone, Copy)]
pub struct GhzExpectation {
    pub value: f64,
    pub imag_magnitude: f64,
}

/// Evaluates the GHZ expectation value of the Bell operator exactly:
/// `(1/M^(N-1)) sum_n sum_{eta: M | eta~} omega^(n*eta~/M) E^n(eta)`, every
/// term an exact root of unity. The result equals `d - 1` up to float
/// round-off in the final evaluation.
pub fn bell_expectation_ghz(scenario: &BellScenario) -> GhzExpectation {
    let d = scenario.dim();
    let m = scenario.settings();
    let n_parties = scenario.parties();
    let joint = scenario.joint_order();

    let mut total = CyclotomicSum::new(joint).expect("joint order >= 4");
    for level in 1..d {
        let ops = operators_for_level(scenario, level).expect("valid scenario settings");
        for_each_setting_tuple(n_parties, m, |eta| {
            let eta_sum: usize = eta.iter().sum();
            if !eta_sum.is_multiple_of(m) {
                return;
            }
            let prefactor = PhaseExponent::from_exponent(
                i128::from(level as u64) * i128::from(eta_sum as u64),
                joint,
            )
            .expect("joint order validated at construction");
            for k in 0..d {
                let mut product = prefactor;
                for &setting in eta {
                    product = product
                        .mul(&ops[setting].phase(k))
                        .expect("orders divide the joint order");
                }
                total.push(product).expect("orders divide the joint order");
            }
        });
    }
    let normalization = d as f64 * (m as f64).powi(n_parties as i32 - 1);
    let value = total.evaluate() / normalization;
    GhzExpectation {
        value: value.re,
        imag_magnitude: value.im.abs(),
    }
}

fn checked_state_size(scenario: &BellScenario, cap: usize) -> Result<usize> {
    let size = scenario.amplitude_count();
    if size > cap as u128 {
        return Err(Error::DenseCapExceeded { size, cap });
    }
    Ok(size as usize)
}

/// Digits of every joint basis index, party-major.
fn digit_table(size: usize, parties: usize, dim: usize) -> Vec<Vec<usize>> {
    let mut table = vec![vec![0usize; parties]; size];
    for (index, digits) in table.iter_mut().enumerate() {
        let mut rest = index;
        for j in (0..parties).rev() {
            digits[j] = rest % dim;
            rest /= dim;
        }
    }
    table
}

fn assemble_dense(scenario: &BellScenario, cap: usize, filtered: bool) -> Result<DenseOperator> {
    let size = checked_state_size(scenario, cap)?;
    let d = scenario.dim();
    let m = scenario.settings();
    let n_parties = scenario.parties();
    let joint = scenario.joint_order();
    let digits = digit_table(size, n_parties, d);

    let mut out = DenseOperator::zeros(size);
    for level in 1..d {
        let ops = operators_for_level(scenario, level)?;
        // row index after every party shifts by `level`
        let shifted: Vec<usize> = digits
            .iter()
            .map(|col_digits| {
                col_digits
                    .iter()
                    .fold(0usize, |acc, &digit| acc * d + (digit + level) % d)
            })
            .collect();
        let mut term = |eta: &[usize], coefficient: PhaseExponent| {
            let c = coefficient.to_complex();
            for (col, col_digits) in digits.iter().enumerate() {
                let mut product = PhaseExponent::one();
                for (j, &digit) in col_digits.iter().enumerate() {
                    product = product
                        .mul(&ops[eta[j]].phase(digit))
                        .expect("orders divide the joint order");
                }
                *out.entry_mut(shifted[col], col) += c * product.to_complex();
            }
        };
        if filtered {
            // analytic selector-sum collapse: only tuples with M | eta~ survive
            for_each_setting_tuple(n_parties, m, |eta| {
                let eta_sum: usize = eta.iter().sum();
                if !eta_sum.is_multiple_of(m) {
                    return;
                }
                let coefficient = PhaseExponent::from_exponent(
                    i128::from(level as u64) * i128::from(eta_sum as u64),
                    joint,
                )
                .expect("validated joint order");
                term(eta, coefficient);
            });
        } else {
            for gamma in 0..m {
                for_each_setting_tuple(n_parties, m, |eta| {
                    let eta_sum: usize = eta.iter().sum();
                    // Omega^(gamma*eta~) * omega^(level*eta~/M) over order M*d
                    let exponent = (i128::from(gamma as u64) * i128::from(d as u64)
                        + i128::from(level as u64))
                        * i128::from(eta_sum as u64);
                    let coefficient = PhaseExponent::from_exponent(exponent, joint)
                        .expect("validated joint order");
                    term(eta, coefficient);
                });
            }
        }
    }
    let power = if filtered {
        n_parties as i32 - 1
    } else {
        n_parties as i32
    };
    out.scale(Complex64::new(1.0 / (m as f64).powi(power), 0.0));
    Ok(out)
}

/// The Bell operator as a dense matrix on the `d^N`-dimensional joint space,
/// assembled as the literal sum over level, selector, and setting tuples.
pub fn bell_operator_dense(scenario: &BellScenario, cap: usize) -> Result<DenseOperator> {
    assemble_dense(scenario, cap, false)
}

/// Same operator assembled through the analytic setting-sum filter (the
/// selector sum collapses to `M` times the divisibility indicator); must agree
/// with [`bell_operator_dense`] to float precision.
pub fn bell_operator_dense_filtered(scenario: &BellScenario, cap: usize) -> Result<DenseOperator> {
    assemble_dense(scenario, cap, true)
}

/// Residual `|| B|psi> - (d-1)|psi> ||_2` of the eigenvalue equation on the
/// GHZ state, via the dense path.
pub fn ghz_eigencheck(scenario: &BellScenario, cap: usize) -> Result<f64> {
    let operator = bell_operator_dense(scenario, cap)?;
    let state = scenario.ghz().dense_amplitudes();
    let applied = operator.apply(&state);
    let eigenvalue = (scenario.dim() - 1) as f64;
    let residual = applied
        .iter()
        .zip(&state)
        .map(|(a, s)| (a - eigenvalue * s).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(residual)
}
