//! Exact linear programming over the rationals.
//!
//! Dense two-phase tableau simplex with Bland's anti-cycling rule. Phase I
//! either yields a feasible basis or a Farkas-type dual vector proving that
//! no feasible point exists; phase II optimizes a linear objective when one
//! is requested.

use num_traits::{One, Signed, Zero};

use crate::arith::{ArithError, RVector, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

/// A linear feasibility problem over `num_vars` rational variables.
///
/// Variables are free unless flagged in `nonneg`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPProblem {
    pub num_vars: usize,
    pub equalities: Vec<(RVector, Rational)>,
    pub inequalities: Vec<(RVector, Rational, Sense)>,
    pub nonneg: Vec<bool>,
}

impl LPProblem {
    /// Problem with all variables free.
    pub fn new(num_vars: usize) -> Self {
        LPProblem {
            num_vars,
            equalities: Vec::new(),
            inequalities: Vec::new(),
            nonneg: vec![false; num_vars],
        }
    }

    /// Problem with all variables constrained to be nonnegative.
    pub fn nonnegative(num_vars: usize) -> Self {
        let mut p = Self::new(num_vars);
        p.nonneg = vec![true; num_vars];
        p
    }

    pub fn add_eq(&mut self, coeffs: RVector, rhs: Rational) -> &mut Self {
        self.equalities.push((coeffs, rhs));
        self
    }

    pub fn add_le(&mut self, coeffs: RVector, rhs: Rational) -> &mut Self {
        self.inequalities.push((coeffs, rhs, Sense::Le));
        self
    }

    pub fn add_ge(&mut self, coeffs: RVector, rhs: Rational) -> &mut Self {
        self.inequalities.push((coeffs, rhs, Sense::Ge));
        self
    }

    pub fn set_nonneg(&mut self, var: usize) -> &mut Self {
        self.nonneg[var] = true;
        self
    }

    pub fn validate(&self) -> Result<(), ArithError> {
        if self.nonneg.len() != self.num_vars {
            return Err(ArithError::DimensionMismatch {
                expected: self.num_vars,
                found: self.nonneg.len(),
            });
        }
        for (c, _) in &self.equalities {
            c.check_dim(self.num_vars)?;
        }
        for (c, _, _) in &self.inequalities {
            c.check_dim(self.num_vars)?;
        }
        Ok(())
    }

    /// Exact re-evaluation of every constraint at `x`.
    pub fn is_satisfied_by(&self, x: &RVector) -> bool {
        x.dim() == self.num_vars
            && self.nonneg.iter().zip(x.iter()).all(|(&nn, v)| !nn || !v.is_negative())
            && self.equalities.iter().all(|(c, b)| &c.dot(x) == b)
            && self.inequalities.iter().all(|(c, b, s)| match s {
                Sense::Le => &c.dot(x) <= b,
                Sense::Ge => &c.dot(x) >= b,
            })
    }
}

/// Dual multipliers proving infeasibility.
///
/// With `y` on the equalities (any sign) and `mu` on the inequalities
/// (`mu >= 0` on `<=` rows, `mu <= 0` on `>=` rows), the combined row
/// `c = sum y_i a_i + sum mu_i g_i` vanishes on free variables, is
/// nonnegative on nonnegative variables, and the combined right-hand side
/// is negative. Any feasible `x` would give `0 <= c.x <= rhs < 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub eq_multipliers: Vec<Rational>,
    pub ineq_multipliers: Vec<Rational>,
}

impl FarkasCertificate {
    /// Combined row and right-hand side.
    pub fn combination(&self, p: &LPProblem) -> (RVector, Rational) {
        let mut row = RVector::zeros(p.num_vars);
        let mut rhs = Rational::zero();
        for ((coeffs, b), y) in p.equalities.iter().zip(&self.eq_multipliers) {
            row = row.add(&coeffs.scale(y));
            rhs += b * y;
        }
        for ((coeffs, b, _), mu) in p.inequalities.iter().zip(&self.ineq_multipliers) {
            row = row.add(&coeffs.scale(mu));
            rhs += b * mu;
        }
        (row, rhs)
    }

    pub fn verify(&self, p: &LPProblem) -> bool {
        if self.eq_multipliers.len() != p.equalities.len()
            || self.ineq_multipliers.len() != p.inequalities.len()
        {
            return false;
        }
        let signs_ok = p.inequalities.iter().zip(&self.ineq_multipliers).all(|((_, _, s), mu)| {
            match s {
                Sense::Le => !mu.is_negative(),
                Sense::Ge => !mu.is_positive(),
            }
        });
        if !signs_ok {
            return false;
        }
        let (row, rhs) = self.combination(p);
        let row_ok = row
            .iter()
            .zip(&p.nonneg)
            .all(|(c, &nn)| if nn { !c.is_negative() } else { c.is_zero() });
        row_ok && rhs.is_negative()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(RVector),
    Infeasible(FarkasCertificate),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn witness(&self) -> Option<&RVector> {
        match self {
            Feasibility::Feasible(x) => Some(x),
            Feasibility::Infeasible(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Optimum {
    Optimal { point: RVector, value: Rational },
    Infeasible(FarkasCertificate),
    Unbounded,
}

/// Decides feasibility exactly, returning a witness or a certificate.
pub fn lp_feasible(p: &LPProblem) -> Result<Feasibility, ArithError> {
    p.validate()?;
    let mut tab = Tableau::build(p);
    Ok(match tab.phase_one(p) {
        Err(cert) => Feasibility::Infeasible(cert),
        Ok(()) => Feasibility::Feasible(tab.point(p)),
    })
}

/// Optimizes `objective . x` over the feasible region.
pub fn lp_optimize(
    p: &LPProblem,
    objective: &RVector,
    direction: Direction,
) -> Result<Optimum, ArithError> {
    p.validate()?;
    objective.check_dim(p.num_vars)?;
    let mut tab = Tableau::build(p);
    if let Err(cert) = tab.phase_one(p) {
        return Ok(Optimum::Infeasible(cert));
    }
    let cost = match direction {
        Direction::Minimize => objective.clone(),
        Direction::Maximize => objective.scale(&-Rational::one()),
    };
    if !tab.phase_two(&cost) {
        return Ok(Optimum::Unbounded);
    }
    let point = tab.point(p);
    let value = objective.dot(&point);
    Ok(Optimum::Optimal { point, value })
}

#[derive(Clone, Copy, Debug)]
enum Column {
    Pos(usize),
    Neg(usize),
    Slack,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs; the last entry holds minus the objective value.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    columns: Vec<Column>,
    row_sign: Vec<bool>,
}

impl Tableau {
    fn build(p: &LPProblem) -> Self {
        let mut columns = Vec::new();
        for j in 0..p.num_vars {
            columns.push(Column::Pos(j));
            if !p.nonneg[j] {
                columns.push(Column::Neg(j));
            }
        }
        let n_struct = columns.len();
        columns.extend(std::iter::repeat_n(Column::Slack, p.inequalities.len()));
        let n_real = columns.len();
        let m = p.equalities.len() + p.inequalities.len();
        let width = n_real + m + 1;

        let mut rows = Vec::with_capacity(m);
        let mut row_sign = Vec::with_capacity(m);
        let constraint_rows = p
            .equalities
            .iter()
            .map(|(c, b)| (c, b, None))
            .chain(p.inequalities.iter().map(|(c, b, s)| (c, b, Some(*s))));
        for (r, (coeffs, rhs, sense)) in constraint_rows.enumerate() {
            let mut row = vec![Rational::zero(); width];
            for (col, kind) in columns[..n_struct].iter().enumerate() {
                row[col] = match *kind {
                    Column::Pos(j) => coeffs[j].clone(),
                    Column::Neg(j) => -coeffs[j].clone(),
                    Column::Slack => unreachable!(),
                };
            }
            if let Some(s) = sense {
                let slack = n_struct + (r - p.equalities.len());
                row[slack] = match s {
                    Sense::Le => Rational::one(),
                    Sense::Ge => -Rational::one(),
                };
            }
            row[width - 1] = rhs.clone();
            let negate = rhs.is_negative();
            if negate {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
            }
            row[n_real + r] = Rational::one();
            rows.push(row);
            row_sign.push(!negate);
        }
        Tableau {
            rows,
            obj: vec![Rational::zero(); width],
            basis: (n_real..n_real + m).collect(),
            columns,
            row_sign,
        }
    }

    fn n_real(&self) -> usize {
        self.columns.len()
    }

    fn width(&self) -> usize {
        self.obj.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<Rational>| {
            if row[c].is_zero() {
                return;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
    }

    /// Bland's rule iterations; returns false when unbounded.
    fn run(&mut self, allowed: usize) -> bool {
        let rhs = self.width() - 1;
        loop {
            let Some(e) = (0..allowed).find(|&j| self.obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[e].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[e];
                let better = match &best {
                    None => true,
                    Some((br, bratio)) => {
                        ratio < *bratio || (ratio == *bratio && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, e),
                None => return false,
            }
        }
    }

    fn phase_one(&mut self, p: &LPProblem) -> Result<(), FarkasCertificate> {
        let n_real = self.n_real();
        let width = self.width();
        for j in (0..n_real).chain(std::iter::once(width - 1)) {
            self.obj[j] = -self.rows.iter().fold(Rational::zero(), |acc, row| acc + &row[j]);
        }
        // Phase I is bounded below by zero.
        let bounded = self.run(width - 1);
        debug_assert!(bounded);

        if !self.obj[width - 1].is_zero() {
            let n_eq = p.equalities.len();
            let mut eq_multipliers = Vec::with_capacity(n_eq);
            let mut ineq_multipliers = Vec::with_capacity(p.inequalities.len());
            for r in 0..self.rows.len() {
                // y_r = 1 - reduced cost of artificial r; certificate is -y.
                let y = Rational::one() - &self.obj[n_real + r];
                let w = if self.row_sign[r] { -y } else { y };
                if r < n_eq {
                    eq_multipliers.push(w);
                } else {
                    ineq_multipliers.push(w);
                }
            }
            let cert = FarkasCertificate { eq_multipliers, ineq_multipliers };
            debug_assert!(cert.verify(p), "phase I produced an invalid certificate");
            return Err(cert);
        }

        for r in 0..self.rows.len() {
            if self.basis[r] >= n_real {
                if let Some(j) = (0..n_real).find(|&j| !self.rows[r][j].is_zero()) {
                    self.pivot(r, j);
                }
            }
        }
        Ok(())
    }

    /// Minimizes `cost` (indexed by original variable); false if unbounded.
    fn phase_two(&mut self, cost: &RVector) -> bool {
        let n_real = self.n_real();
        let rhs = self.width() - 1;
        let col_cost: Vec<Rational> = self
            .columns
            .iter()
            .map(|c| match *c {
                Column::Pos(j) => cost[j].clone(),
                Column::Neg(j) => -cost[j].clone(),
                Column::Slack => Rational::zero(),
            })
            .collect();
        let basic_cost = |b: usize| if b < n_real { col_cost[b].clone() } else { Rational::zero() };
        for j in (0..n_real).chain(std::iter::once(rhs)) {
            let base = if j < n_real { col_cost[j].clone() } else { Rational::zero() };
            let shift = self
                .rows
                .iter()
                .zip(&self.basis)
                .fold(Rational::zero(), |acc, (row, &b)| acc + basic_cost(b) * &row[j]);
            self.obj[j] = base - shift;
        }
        for j in n_real..rhs {
            self.obj[j] = Rational::zero();
        }
        self.run(n_real)
    }

    fn point(&self, p: &LPProblem) -> RVector {
        let rhs = self.width() - 1;
        let mut x = RVector::zeros(p.num_vars).into_inner();
        for (r, &b) in self.basis.iter().enumerate() {
            match self.columns.get(b) {
                Some(Column::Pos(j)) => x[*j] += &self.rows[r][rhs],
                Some(Column::Neg(j)) => x[*j] -= &self.rows[r][rhs],
                _ => {}
            }
        }
        RVector::new(x)
    }
}
