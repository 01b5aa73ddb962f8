//! Feasibility of linear congruence systems over `Z_d`.
//!
//! A single congruence `a*x = b (mod m)` is solvable iff `gcd(a, m)` divides
//! `b`. Systems are decided by diagonalizing the coefficient matrix over the
//! integers with unimodular row/column transforms (Smith normal form); each
//! transformed row is then an independent single congruence. `Z_d` is not a
//! field for composite `d`, so field Gaussian elimination would be invalid
//! here; the integer route is exact for every modulus.
//!
//! On top of the decision procedure sit the two subset searches: the largest
//! simultaneously satisfiable constraint subset, and all inclusion-minimal
//! unsolvable subsets, each paired with a certificate showing an integer row
//! combination collapsing to a single unsolvable congruence.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::lhv::{var_label, DeltaConstraint};

/// Cap on the constraint count for the exhaustive subset searches.
pub const MAX_SUBSET_CONSTRAINTS: usize = 24;

/// Whether `a*x = b (mod modulus)` has an integer solution. For `a = 0` this
/// is the explicit degenerate branch `b = 0 (mod modulus)`.
pub fn linear_congruence_solvable(a: i64, b: i64, modulus: i64) -> Result<bool> {
    if modulus < 1 {
        return Err(Error::InvalidModulus(modulus));
    }
    if a == 0 {
        return Ok(b.rem_euclid(modulus) == 0);
    }
    Ok(b.rem_euclid(a.gcd(&modulus)) == 0)
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

/// Unimodular decomposition `U * A * V = diag(s_1, ..., s_r)` with the
/// divisibility chain `s_1 | s_2 | ...` and non-negative diagonal.
#[derive(Debug, Clone)]
pub struct SmithNormalForm {
    pub diagonal: Vec<i64>,
    pub row_transform: Vec<Vec<i64>>,
    pub col_transform: Vec<Vec<i64>>,
}

pub fn smith_normal_form(matrix: &[Vec<i64>]) -> SmithNormalForm {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    let mut b: Vec<Vec<i64>> = matrix.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let bound = rows.min(cols);

    fn axpy_rows(rows: &mut [Vec<i64>], dst: usize, src: usize, c: i64) {
        debug_assert_ne!(dst, src);
        let (dst_row, src_row) = if dst < src {
            let (head, tail) = rows.split_at_mut(src);
            (&mut head[dst], &tail[0])
        } else {
            let (head, tail) = rows.split_at_mut(dst);
            (&mut tail[0], &head[src])
        };
        for (x, y) in dst_row.iter_mut().zip(src_row) {
            *x += c * *y;
        }
    }
    let row_axpy =
        |b: &mut Vec<Vec<i64>>, u: &mut Vec<Vec<i64>>, dst: usize, src: usize, c: i64| {
            axpy_rows(b, dst, src, c);
            axpy_rows(u, dst, src, c);
        };
    let col_axpy =
        |b: &mut Vec<Vec<i64>>, v: &mut Vec<Vec<i64>>, dst: usize, src: usize, c: i64| {
            for row in b.iter_mut() {
                row[dst] += c * row[src];
            }
            for row in v.iter_mut() {
                row[dst] += c * row[src];
            }
        };

    for k in 0..bound {
        'pivot: loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    if b[i][j] != 0 && pivot.is_none_or(|(pi, pj)| b[i][j].abs() < b[pi][pj].abs())
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                break 'pivot; // remaining submatrix is zero
            };
            if pi != k {
                b.swap(k, pi);
                u.swap(k, pi);
            }
            if pj != k {
                for row in b.iter_mut() {
                    row.swap(k, pj);
                }
                for row in v.iter_mut() {
                    row.swap(k, pj);
                }
            }

            let mut dirty = false;
            for i in k + 1..rows {
                if b[i][k] != 0 {
                    let q = b[i][k] / b[k][k];
                    if q != 0 {
                        row_axpy(&mut b, &mut u, i, k, -q);
                    }
                    if b[i][k] != 0 {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'pivot;
            }
            for j in k + 1..cols {
                if b[k][j] != 0 {
                    let q = b[k][j] / b[k][k];
                    if q != 0 {
                        col_axpy(&mut b, &mut v, j, k, -q);
                    }
                    if b[k][j] != 0 {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'pivot;
            }

            // divisibility chain: fold a non-divisible entry into row k and retry
            let mut chained = true;
            'scan: for i in k + 1..rows {
                for j in k + 1..cols {
                    if b[i][j] % b[k][k] != 0 {
                        row_axpy(&mut b, &mut u, k, i, 1);
                        chained = false;
                        break 'scan;
                    }
                }
            }
            if chained {
                break 'pivot;
            }
        }
        if b[k][k] < 0 {
            for entry in &mut b[k] {
                *entry = -*entry;
            }
            for entry in &mut u[k] {
                *entry = -*entry;
            }
        }
    }

    SmithNormalForm {
        diagonal: (0..bound).map(|k| b[k][k]).collect(),
        row_transform: u,
        col_transform: v,
    }
}

fn mod_inverse(a: i64, modulus: i64) -> Option<i64> {
    let (mut old_r, mut r) = (a.rem_euclid(modulus), modulus);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(modulus))
}

/// A system of linear congruences `A*x + c = 0 (mod modulus)` over a shared
/// variable namespace.
#[derive(Debug, Clone)]
pub struct CongruenceSystem {
    modulus: i64,
    labels: Vec<String>,
    matrix: Vec<Vec<i64>>,
    constants: Vec<i64>,
}

impl CongruenceSystem {
    pub fn new(
        matrix: Vec<Vec<i64>>,
        constants: Vec<i64>,
        modulus: i64,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if modulus < 1 {
            return Err(Error::InvalidModulus(modulus));
        }
        if matrix.len() != constants.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} rows vs {} constants",
                matrix.len(),
                constants.len()
            )));
        }
        let vars = matrix.first().map_or(0, Vec::len);
        if matrix.iter().any(|row| row.len() != vars) {
            return Err(Error::ShapeMismatch("ragged coefficient matrix".into()));
        }
        let labels = match labels {
            Some(labels) => {
                if labels.len() != vars {
                    return Err(Error::ShapeMismatch(format!(
                        "{} labels vs {} variables",
                        labels.len(),
                        vars
                    )));
                }
                labels
            }
            None => (0..vars).map(|j| format!("x{j}")).collect(),
        };
        Ok(Self {
            modulus,
            labels,
            matrix,
            constants,
        })
    }

    /// Assembles the matrix form of a delta-constraint family. Variables are
    /// the (party, setting) pairs that occur, ordered party-major.
    pub fn from_constraints(constraints: &[DeltaConstraint]) -> Result<Self> {
        let modulus = match constraints.first() {
            Some(c) => c.modulus,
            None => return Err(Error::ShapeMismatch("empty constraint family".into())),
        };
        if modulus < 1 {
            return Err(Error::InvalidModulus(modulus));
        }
        let mut vars: Vec<(usize, usize)> = constraints
            .iter()
            .flat_map(|c| c.vars.iter().copied())
            .collect();
        vars.sort_unstable();
        vars.dedup();
        let column_of = |var: (usize, usize)| vars.binary_search(&var).expect("var collected");

        let mut matrix = vec![vec![0i64; vars.len()]; constraints.len()];
        let mut constants = Vec::with_capacity(constraints.len());
        for (row, constraint) in matrix.iter_mut().zip(constraints) {
            if constraint.modulus != modulus {
                return Err(Error::ShapeMismatch(format!(
                    "mixed moduli {} and {}",
                    modulus, constraint.modulus
                )));
            }
            for (&var, &coeff) in constraint.vars.iter().zip(&constraint.coeffs) {
                row[column_of(var)] += coeff;
            }
            constants.push(constraint.constant);
        }
        let labels = vars
            .iter()
            .map(|&(party, setting)| var_label(party, setting))
            .collect();
        Ok(Self {
            modulus,
            labels,
            matrix,
            constants,
        })
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn num_constraints(&self) -> usize {
        self.matrix.len()
    }

    pub fn num_vars(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn constants(&self) -> &[i64] {
        &self.constants
    }

    /// The subsystem made of the given constraint rows (all variables kept).
    pub fn subsystem(&self, indices: &[usize]) -> Self {
        Self {
            modulus: self.modulus,
            labels: self.labels.clone(),
            matrix: indices.iter().map(|&i| self.matrix[i].clone()).collect(),
            constants: indices.iter().map(|&i| self.constants[i]).collect(),
        }
    }

    fn subsystem_of_mask(&self, mask: usize) -> Self {
        let indices: Vec<usize> = (0..self.num_constraints())
            .filter(|i| mask & (1 << i) != 0)
            .collect();
        self.subsystem(&indices)
    }

    /// Whether an assignment (one value per variable) satisfies every row.
    pub fn satisfied_by(&self, assignment: &[i64]) -> bool {
        assert_eq!(assignment.len(), self.num_vars(), "assignment length");
        self.matrix.iter().zip(&self.constants).all(|(row, &c)| {
            let sum: i64 = row.iter().zip(assignment).map(|(a, x)| a * x).sum::<i64>() + c;
            sum.rem_euclid(self.modulus) == 0
        })
    }
}

/// Transformed constants `beta = U * (-c)` of the diagonalized system.
fn transformed_constants(sys: &CongruenceSystem, snf: &SmithNormalForm) -> Vec<i64> {
    snf.row_transform
        .iter()
        .map(|u_row| {
            -u_row
                .iter()
                .zip(&sys.constants)
                .map(|(u, c)| u * c)
                .sum::<i64>()
        })
        .collect()
}

/// Exact solvability of `A*x + c = 0 (mod d)`: after diagonalization each row
/// demands `gcd(s_i, d)` divide its transformed constant (rows without a
/// diagonal entry act as `s_i = 0`, i.e. require divisibility by `d`).
pub fn system_solvable(sys: &CongruenceSystem) -> bool {
    if sys.num_constraints() == 0 {
        return true;
    }
    let snf = smith_normal_form(sys.matrix());
    let beta = transformed_constants(sys, &snf);
    beta.iter().enumerate().all(|(i, &beta_i)| {
        let s = snf.diagonal.get(i).copied().unwrap_or(0);
        beta_i.rem_euclid(s.gcd(&sys.modulus)) == 0
    })
}

/// A satisfying assignment mod `d`, or `None` when the system is unsolvable.
/// Free variables are pinned to zero, so the witness is deterministic.
pub fn solve_system(sys: &CongruenceSystem) -> Option<Vec<i64>> {
    let d = sys.modulus;
    if sys.num_constraints() == 0 {
        return Some(vec![0; sys.num_vars()]);
    }
    let snf = smith_normal_form(sys.matrix());
    let beta = transformed_constants(sys, &snf);
    let vars = sys.num_vars();
    let mut z = vec![0i64; vars];
    for (i, &beta_i) in beta.iter().enumerate() {
        let s = snf.diagonal.get(i).copied().unwrap_or(0);
        if s == 0 {
            if beta_i.rem_euclid(d) != 0 {
                return None;
            }
            continue; // free coordinate stays zero
        }
        let g = s.gcd(&d);
        if beta_i.rem_euclid(g) != 0 {
            return None;
        }
        let reduced_modulus = d / g;
        if reduced_modulus == 1 {
            continue;
        }
        let s_red = (s / g).rem_euclid(reduced_modulus);
        let b_red = (beta_i / g).rem_euclid(reduced_modulus);
        let inv =
            mod_inverse(s_red, reduced_modulus).expect("s/g and d/g are coprime by construction");
        z[i] = (i128::from(b_red) * i128::from(inv)).rem_euclid(i128::from(reduced_modulus)) as i64;
    }
    let mut x = vec![0i64; vars];
    for (j, slot) in x.iter_mut().enumerate() {
        let acc: i128 = snf.col_transform[j]
            .iter()
            .zip(&z)
            .map(|(&v, &zi)| i128::from(v) * i128::from(zi))
            .sum();
        *slot = acc.rem_euclid(i128::from(d)) as i64;
    }
    debug_assert!(sys.satisfied_by(&x), "witness must satisfy the system");
    Some(x)
}

/// Solvability of every constraint subset, indexed by bitmask.
///
/// Solvability is monotone (any subset of a solvable system is solvable), so
/// a mask is decided without diagonalization whenever removing one constraint
/// already gives an unsolvable set.
fn solvability_bitmap(sys: &CongruenceSystem) -> Result<Vec<bool>> {
    let count = sys.num_constraints();
    if count > MAX_SUBSET_CONSTRAINTS {
        return Err(Error::TooManyConstraints {
            count,
            cap: MAX_SUBSET_CONSTRAINTS,
        });
    }
    let size = 1usize << count;
    let mut map = vec![false; size];
    map[0] = true;
    for mask in 1..size {
        let mut candidate = true;
        let mut bits = mask;
        while bits != 0 {
            let bit = bits & bits.wrapping_neg();
            if !map[mask ^ bit] {
                candidate = false;
                break;
            }
            bits ^= bit;
        }
        map[mask] = candidate && system_solvable(&sys.subsystem_of_mask(mask));
    }
    Ok(map)
}

fn mask_indices(mask: usize, count: usize) -> Vec<usize> {
    (0..count).filter(|i| mask & (1 << i) != 0).collect()
}

/// Result of the maximum-satisfiable-subset search.
#[derive(Debug, Clone)]
pub struct MaxSatisfiable {
    pub size: usize,
    pub subset: Vec<usize>,
    pub witness: Vec<i64>,
}

/// The largest constraint subset that is simultaneously satisfiable, with a
/// witness assignment. Ties break to the lexicographically smallest index set.
pub fn max_satisfiable_subset(sys: &CongruenceSystem) -> Result<MaxSatisfiable> {
    let count = sys.num_constraints();
    let map = solvability_bitmap(sys)?;
    let mut best_mask = 0usize;
    let mut best_subset: Vec<usize> = Vec::new();
    for (mask, &solvable) in map.iter().enumerate() {
        if !solvable {
            continue;
        }
        let size = mask.count_ones() as usize;
        if size < best_subset.len() {
            continue;
        }
        let subset = mask_indices(mask, count);
        if size > best_subset.len() || subset < best_subset {
            best_mask = mask;
            best_subset = subset;
        }
    }
    let witness = solve_system(&sys.subsystem_of_mask(best_mask))
        .expect("subset marked solvable must have a witness");
    Ok(MaxSatisfiable {
        size: best_subset.len(),
        subset: best_subset,
        witness,
    })
}

/// Proof that a constraint subset is unsolvable: the recorded integer
/// combination of its rows collapses to `g*y + constant = 0 (mod modulus)`
/// with `gcd(g, modulus)` not dividing `constant`.
#[derive(Debug, Clone)]
pub struct InfeasibilityCertificate {
    /// Constraint indices of the (inclusion-minimal) unsolvable subset.
    pub subset: Vec<usize>,
    /// Integer multiplier per subset row.
    pub row_combination: Vec<i64>,
    /// The combined coefficient per variable, `lambda^T * A`.
    pub combined_coefficients: Vec<i64>,
    /// gcd of the combined coefficients (0 when they all vanish).
    pub coefficient_gcd: i64,
    /// The combined constant, `lambda^T * c`.
    pub constant: i64,
    pub modulus: i64,
}

impl InfeasibilityCertificate {
    /// Re-derives the combination from the parent system and checks that the
    /// reduced congruence indeed fails the divisibility test.
    pub fn verify(&self, sys: &CongruenceSystem) -> bool {
        if self.row_combination.len() != self.subset.len() {
            return false;
        }
        let vars = sys.num_vars();
        let mut combined = vec![0i64; vars];
        let mut constant = 0i64;
        for (&row, &lambda) in self.subset.iter().zip(&self.row_combination) {
            for (j, slot) in combined.iter_mut().enumerate() {
                *slot += lambda * sys.matrix()[row][j];
            }
            constant += lambda * sys.constants()[row];
        }
        if combined != self.combined_coefficients || constant != self.constant {
            return false;
        }
        let gcd = combined.iter().fold(0i64, |acc, &c| acc.gcd(&c));
        if gcd != self.coefficient_gcd {
            return false;
        }
        // the reduced congruence must be rejected
        constant.rem_euclid(gcd.gcd(&self.modulus)) != 0
    }
}

fn certificate_for(sys: &CongruenceSystem, subset: Vec<usize>) -> InfeasibilityCertificate {
    let subsystem = sys.subsystem(&subset);
    let snf = smith_normal_form(subsystem.matrix());
    let beta = transformed_constants(&subsystem, &snf);
    let d = subsystem.modulus();
    for (i, &beta_i) in beta.iter().enumerate() {
        let s = snf.diagonal.get(i).copied().unwrap_or(0);
        if beta_i.rem_euclid(s.gcd(&d)) == 0 {
            continue;
        }
        let lambda = snf.row_transform[i].clone();
        let vars = subsystem.num_vars();
        let mut combined = vec![0i64; vars];
        let mut constant = 0i64;
        for (r, &l) in lambda.iter().enumerate() {
            for (j, slot) in combined.iter_mut().enumerate() {
                *slot += l * subsystem.matrix()[r][j];
            }
            constant += l * subsystem.constants()[r];
        }
        let gcd = combined.iter().fold(0i64, |acc, &c| acc.gcd(&c));
        let certificate = InfeasibilityCertificate {
            subset,
            row_combination: lambda,
            combined_coefficients: combined,
            coefficient_gcd: gcd,
            constant,
            modulus: d,
        };
        debug_assert!(certificate.verify(sys));
        return certificate;
    }
    unreachable!("unsolvable subsystem must expose a failing reduced row")
}

/// All inclusion-minimal unsolvable subsets, each with its variable-elimination
/// certificate, ordered by size then lexicographically.
pub fn minimal_infeasible_subsets(sys: &CongruenceSystem) -> Result<Vec<InfeasibilityCertificate>> {
    let count = sys.num_constraints();
    let map = solvability_bitmap(sys)?;
    let mut minimal_masks = Vec::new();
    for (mask, &solvable) in map.iter().enumerate() {
        if solvable || mask == 0 {
            continue;
        }
        let mut minimal = true;
        let mut bits = mask;
        while bits != 0 {
            let bit = bits & bits.wrapping_neg();
            if !map[mask ^ bit] {
                minimal = false;
                break;
            }
            bits ^= bit;
        }
        if minimal {
            minimal_masks.push(mask);
        }
    }
    let mut certificates: Vec<InfeasibilityCertificate> = minimal_masks
        .into_iter()
        .map(|mask| certificate_for(sys, mask_indices(mask, count)))
        .collect();
    certificates.sort_by(|a, b| (a.subset.len(), &a.subset).cmp(&(b.subset.len(), &b.subset)));
    Ok(certificates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lhv::generate_constraints;

    fn family_system(settings: usize, dim: usize) -> CongruenceSystem {
        CongruenceSystem::from_constraints(&generate_constraints(settings, dim).unwrap()).unwrap()
    }

    /// Finds the row index of the constraint with the given setting triple.
    fn constraint_index(settings: usize, dim: usize, triple: (usize, usize, usize)) -> usize {
        generate_constraints(settings, dim)
            .unwrap()
            .iter()
            .position(|c| (c.vars[0].1, c.vars[1].1, c.vars[2].1) == triple)
            .expect("triple in family")
    }

    #[test]
    fn theorem_examples() {
        assert!(!linear_congruence_solvable(2, -1, 4).unwrap());
        assert!(linear_congruence_solvable(2, -1, 3).unwrap());
        assert!(!linear_congruence_solvable(3, -1, 9).unwrap());
        assert!(linear_congruence_solvable(0, 6, 3).unwrap());
        assert!(!linear_congruence_solvable(0, 5, 3).unwrap());
        assert!(linear_congruence_solvable(5, 2, 1).unwrap());
        assert!(matches!(
            linear_congruence_solvable(2, 1, 0),
            Err(Error::InvalidModulus(0))
        ));
    }

    #[test]
    fn theorem_matches_residue_search() {
        for a in -6i64..=6 {
            if a == 0 {
                continue;
            }
            for b in -6i64..=6 {
                for m in 1i64..=12 {
                    let expected = (0..m).any(|x| (a * x - b).rem_euclid(m) == 0);
                    assert_eq!(
                        linear_congruence_solvable(a, b, m).unwrap(),
                        expected,
                        "a={a} b={b} m={m}"
                    );
                }
            }
        }
    }

    fn unimodular_det(matrix: &[Vec<i64>]) -> i128 {
        // fraction-free (Bareiss) determinant
        let n = matrix.len();
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> = matrix
            .iter()
            .map(|row| row.iter().map(|&x| i128::from(x)).collect())
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                let swap = (k + 1..n).find(|&i| a[i][k] != 0);
                match swap {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
                a[i][k] = 0;
            }
            prev = a[k][k];
        }
        sign * a[n - 1][n - 1]
    }

    fn check_snf(matrix: &[Vec<i64>]) -> SmithNormalForm {
        let snf = smith_normal_form(matrix);
        let rows = matrix.len();
        let cols = matrix.first().map_or(0, Vec::len);
        // reconstruct U*A*V and compare against diag(s)
        for i in 0..rows {
            for j in 0..cols {
                let mut value = 0i64;
                for (r, matrix_row) in matrix.iter().enumerate() {
                    for (c, &entry) in matrix_row.iter().enumerate() {
                        value += snf.row_transform[i][r] * entry * snf.col_transform[c][j];
                    }
                }
                let expected = if i == j {
                    snf.diagonal.get(i).copied().unwrap_or(0)
                } else {
                    0
                };
                assert_eq!(value, expected, "entry ({i},{j})");
            }
        }
        // divisibility chain and sign
        for w in snf.diagonal.windows(2) {
            assert!(w[0] >= 0);
            if w[0] != 0 {
                assert_eq!(w[1] % w[0], 0, "chain {w:?}");
            } else {
                assert_eq!(w[1], 0);
            }
        }
        assert_eq!(unimodular_det(&snf.row_transform).abs(), 1);
        assert_eq!(unimodular_det(&snf.col_transform).abs(), 1);
        snf
    }

    #[test]
    fn snf_known_small_cases() {
        let snf = check_snf(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(snf.diagonal, vec![1, 6]);
        let snf = check_snf(&[vec![1, 0], vec![0, 1]]);
        assert_eq!(snf.diagonal, vec![1, 1]);
        let snf = check_snf(&[vec![0, 0], vec![0, 0]]);
        assert_eq!(snf.diagonal, vec![0, 0]);
        let snf = check_snf(&[vec![6, 4], vec![2, 8]]);
        assert_eq!(snf.diagonal, vec![2, 20]); // det = 40, content 2
        check_snf(&[vec![1, 1, 1, 0, 0, 0], vec![0, 1, 0, 1, 0, 1]]);
    }

    #[test]
    fn two_setting_system_solvable_only_for_odd_dims() {
        for d in [2usize, 4, 6, 8] {
            assert!(!system_solvable(&family_system(2, d)), "d={d}");
        }
        for d in [3usize, 5, 7, 9] {
            let sys = family_system(2, d);
            assert!(system_solvable(&sys), "d={d}");
            let witness = solve_system(&sys).unwrap();
            assert!(sys.satisfied_by(&witness));
        }
        // frozen witness at d=3: a=(0,0,0), b=(1,1,1) satisfies all four
        let sys = family_system(2, 3);
        assert!(sys.satisfied_by(&[0, 1, 0, 1, 0, 1])); // vars a1,b1,a2,b2,a3,b3
    }

    #[test]
    fn single_constraints_always_solvable() {
        for settings in 2..=4 {
            for d in 2..=6 {
                let sys = family_system(settings, d);
                for i in 0..sys.num_constraints() {
                    assert!(system_solvable(&sys.subsystem(&[i])));
                }
            }
        }
    }

    #[test]
    fn max_satisfiable_two_settings() {
        for d in [2usize, 4, 6, 8] {
            let sys = family_system(2, d);
            let result = max_satisfiable_subset(&sys).unwrap();
            assert_eq!(result.size, 3, "d={d}");
            assert!(sys.subsystem(&result.subset).satisfied_by(&result.witness));
        }
        for d in [3usize, 5] {
            assert_eq!(
                max_satisfiable_subset(&family_system(2, d)).unwrap().size,
                4
            );
        }
    }

    #[test]
    fn max_satisfiable_three_settings() {
        for d in [3usize, 6, 9] {
            let sys = family_system(3, d);
            let result = max_satisfiable_subset(&sys).unwrap();
            assert_eq!(result.size, 7, "d={d}");
            assert!(sys.subsystem(&result.subset).satisfied_by(&result.witness));
        }
        for d in [2usize, 4, 5] {
            assert_eq!(
                max_satisfiable_subset(&family_system(3, d)).unwrap().size,
                9
            );
        }
    }

    #[test]
    fn max_satisfiable_four_settings() {
        for d in [2usize, 4] {
            let sys = family_system(4, d);
            let result = max_satisfiable_subset(&sys).unwrap();
            assert_eq!(result.size, 12, "d={d}");
            assert!(sys.subsystem(&result.subset).satisfied_by(&result.witness));
        }
        assert_eq!(
            max_satisfiable_subset(&family_system(4, 3)).unwrap().size,
            16
        );
    }

    #[test]
    fn minimal_infeasible_two_settings_dim_four() {
        let sys = family_system(2, 4);
        let certificates = minimal_infeasible_subsets(&sys).unwrap();
        assert_eq!(certificates.len(), 1);
        let cert = &certificates[0];
        assert_eq!(cert.subset, vec![0, 1, 2, 3]);
        assert_eq!(cert.coefficient_gcd, 2);
        assert_eq!(cert.constant.rem_euclid(2), 1);
        assert!(cert.verify(&sys));
    }

    #[test]
    fn minimal_infeasible_three_settings_contains_six_loops() {
        let sys = family_system(3, 3);
        let certificates = minimal_infeasible_subsets(&sys).unwrap();
        for cert in &certificates {
            assert!(cert.verify(&sys));
        }
        let six_loops: Vec<&InfeasibilityCertificate> = certificates
            .iter()
            .filter(|c| c.subset.len() == 6)
            .collect();
        assert!(six_loops.len() >= 3, "got {}", six_loops.len());
        // the loop built from a1+a2+a3, c1+a2+b3+1, c1+b2+a3+1, b1+b2+b3+1,
        // b1+c2+a3+1, a1+c2+b3+1
        let loop_one: Vec<usize> = [
            (0, 0, 0),
            (2, 0, 1),
            (2, 1, 0),
            (1, 1, 1),
            (1, 2, 0),
            (0, 2, 1),
        ]
        .iter()
        .map(|&t| constraint_index(3, 3, t))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
        assert!(
            six_loops.iter().any(|c| c.subset == loop_one),
            "loop {loop_one:?} not found"
        );
        for cert in &six_loops {
            assert_eq!(cert.coefficient_gcd.rem_euclid(3), 0);
            assert_ne!(cert.constant.rem_euclid(3), 0);
        }
    }

    #[test]
    fn minimal_infeasible_four_settings_qubits_has_four_groups() {
        let sys = family_system(4, 2);
        let certificates = minimal_infeasible_subsets(&sys).unwrap();
        for cert in &certificates {
            assert!(cert.verify(&sys));
        }
        let groups: Vec<Vec<usize>> = [
            [(0, 0, 0), (2, 0, 2), (2, 2, 0), (0, 2, 2)],
            [(3, 0, 1), (3, 2, 3), (1, 2, 1), (1, 0, 3)],
            [(3, 3, 2), (1, 3, 0), (1, 1, 2), (3, 1, 0)],
            [(2, 3, 3), (2, 1, 1), (0, 1, 3), (0, 3, 1)],
        ]
        .iter()
        .map(|group| {
            group
                .iter()
                .map(|&t| constraint_index(4, 2, t))
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect()
        })
        .collect();
        for group in &groups {
            assert!(
                certificates.iter().any(|c| &c.subset == group),
                "group {group:?} missing"
            );
        }
        // the four groups partition the sixteen constraints
        let mut all: Vec<usize> = groups.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn subset_cap_enforced() {
        let constraints = generate_constraints(5, 2).unwrap();
        let sys = CongruenceSystem::from_constraints(&constraints).unwrap();
        assert_eq!(sys.num_constraints(), 25);
        assert!(matches!(
            max_satisfiable_subset(&sys),
            Err(Error::TooManyConstraints { count: 25, cap: 24 })
        ));
        assert!(minimal_infeasible_subsets(&sys).is_err());
    }

    fn exhaustive_solvable(sys: &CongruenceSystem) -> bool {
        let vars = sys.num_vars();
        let d = sys.modulus();
        let space = (d as u128).pow(vars as u32);
        assert!(space <= 1_000_000, "oracle too large");
        let mut assignment = vec![0i64; vars];
        for index in 0..space {
            let mut rest = index;
            for slot in assignment.iter_mut() {
                *slot = (rest % d as u128) as i64;
                rest /= d as u128;
            }
            if sys.satisfied_by(&assignment) {
                return true;
            }
        }
        false
    }

    #[test]
    fn family_solvability_matches_exhaustive_search() {
        for d in 2..=9usize {
            let sys = family_system(2, d);
            assert_eq!(
                system_solvable(&sys),
                exhaustive_solvable(&sys),
                "M=2 d={d}"
            );
        }
        for d in 2..=3usize {
            let sys = family_system(3, d);
            assert_eq!(
                system_solvable(&sys),
                exhaustive_solvable(&sys),
                "M=3 d={d}"
            );
        }
    }

    #[test]
    fn monotonicity_on_three_setting_family() {
        let sys = family_system(3, 3);
        let map = solvability_bitmap(&sys).unwrap();
        for (mask, &solvable) in map.iter().enumerate() {
            if !solvable && mask != 0 {
                // a superset of an unsolvable set stays unsolvable
                for extra in 0..sys.num_constraints() {
                    let superset = mask | (1 << extra);
                    assert!(!map[superset]);
                }
            }
        }
        let best = max_satisfiable_subset(&sys).unwrap();
        // every subset of the winning subset is solvable
        for drop in 0..best.subset.len() {
            let mut indices = best.subset.clone();
            indices.remove(drop);
            assert!(system_solvable(&sys.subsystem(&indices)));
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn snf_decomposition_holds(
                rows in 1usize..5,
                cols in 1usize..5,
                entries in proptest::collection::vec(-9i64..=9, 25),
            ) {
                let matrix: Vec<Vec<i64>> = (0..rows)
                    .map(|i| (0..cols).map(|j| entries[(i * cols + j) % entries.len()]).collect())
                    .collect();
                check_snf(&matrix);
            }

            #[test]
            fn solvability_matches_brute_force(
                rows in 1usize..5,
                vars in 1usize..5,
                modulus in 2i64..5,
                coeffs in proptest::collection::vec(-2i64..=2, 25),
                consts in proptest::collection::vec(-4i64..=4, 5),
            ) {
                let matrix: Vec<Vec<i64>> = (0..rows)
                    .map(|i| (0..vars).map(|j| coeffs[(i * vars + j) % coeffs.len()]).collect())
                    .collect();
                let constants: Vec<i64> = (0..rows).map(|i| consts[i % consts.len()]).collect();
                let sys = CongruenceSystem::new(matrix, constants, modulus, None).unwrap();
                let fast = system_solvable(&sys);
                prop_assert_eq!(fast, exhaustive_solvable(&sys));
                if fast {
                    let witness = solve_system(&sys).unwrap();
                    prop_assert!(sys.satisfied_by(&witness));
                } else {
                    prop_assert!(solve_system(&sys).is_none());
                }
            }
        }
    }
}
