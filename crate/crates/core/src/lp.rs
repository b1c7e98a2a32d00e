//! Dense two-phase primal simplex over exact rationals.
//!
//! Bland's rule (lowest-index entering column, lowest-index leaving basic
//! variable on ratio ties) guarantees termination. Duals are read from the
//! final basis, so every optimal answer comes with a certificate: the
//! primal is basic, the dual is feasible and their objective values agree.

use crate::rat::Rat;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<Rat>,
    pub relation: Relation,
    pub rhs: Rat,
}

/// `opt cᵀx` subject to the rows, `x ≥ 0` and optional upper bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rat>,
    pub rows: Vec<Row>,
    pub upper: Vec<Option<Rat>>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<Rat>) -> Self {
        let n = objective.len();
        LinearProgram { sense, objective, rows: Vec::new(), upper: vec![None; n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<Rat>, relation: Relation, rhs: Rat) {
        assert_eq!(coeffs.len(), self.num_vars(), "row dimension mismatch");
        self.rows.push(Row { coeffs, relation, rhs });
    }

    pub fn set_upper(&mut self, var: usize, bound: Rat) {
        self.upper[var] = Some(bound);
    }

    /// Rows followed by one `x_j ≤ u_j` row per bounded variable; this is
    /// the row order of [`LpSolution::dual`].
    pub fn expanded_rows(&self) -> Vec<Row> {
        let n = self.num_vars();
        let mut out = self.rows.clone();
        for (j, u) in self.upper.iter().enumerate() {
            if let Some(u) = u {
                let mut coeffs = vec![Rat::zero(); n];
                coeffs[j] = Rat::one();
                out.push(Row { coeffs, relation: Relation::Le, rhs: u.clone() });
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: Status,
    /// Basic optimal point (empty unless `Optimal`).
    pub primal: Vec<Rat>,
    /// One multiplier per expanded row (empty unless `Optimal`).
    pub dual: Vec<Rat>,
    pub value: Rat,
    /// Farkas multipliers over expanded rows when `Infeasible`; an
    /// improving ray over the variables when `Unbounded`.
    pub certificate: Vec<Rat>,
    pub pivots: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    reduced: Vec<Rat>,
    value: Rat,
    barred: Vec<bool>,
    costs: Vec<Rat>,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn set_costs(&mut self, costs: Vec<Rat>) {
        let ncols = costs.len();
        let mut reduced = costs.clone();
        let mut value = Rat::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..ncols {
                if !self.rows[i][j].is_zero() {
                    reduced[j] -= cb * &self.rows[i][j];
                }
            }
            value += cb * &self.rhs[i];
        }
        self.reduced = reduced;
        self.value = value;
        self.costs = costs;
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let inv = self.rows[r][e].recip();
        if !inv.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let support: Vec<usize> = (0..self.rows[r].len())
            .filter(|&j| !self.rows[r][j].is_zero())
            .collect();
        let (pivot_row, pivot_rhs) = (self.rows[r].clone(), self.rhs[r].clone());
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][e].is_zero() {
                continue;
            }
            let f = self.rows[i][e].clone();
            for &j in &support {
                let delta = &f * &pivot_row[j];
                self.rows[i][j] -= delta;
            }
            if !pivot_rhs.is_zero() {
                self.rhs[i] -= &f * &pivot_rhs;
            }
        }
        let f = self.reduced[e].clone();
        if !f.is_zero() {
            for &j in &support {
                let delta = &f * &pivot_row[j];
                self.reduced[j] -= delta;
            }
            self.value += &f * &pivot_rhs;
        }
        self.basis[r] = e;
        self.pivots += 1;
    }

    fn run(&mut self) -> Outcome {
        loop {
            let entering = (0..self.reduced.len())
                .find(|&j| !self.barred[j] && self.reduced[j].is_negative());
            let Some(e) = entering else {
                return Outcome::Optimal;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, e),
                None => return Outcome::Unbounded(e),
            }
        }
    }

    fn dump(&self, w: &mut dyn Write, label: &str) -> std::io::Result<()> {
        writeln!(w, "== tableau ({label}) pivots={} value={}", self.pivots, self.value)?;
        writeln!(w, "basis: {:?}", self.basis)?;
        let fmt_row = |row: &[Rat]| {
            row.iter().map(crate::rat::to_string).collect::<Vec<_>>().join(" ")
        };
        writeln!(w, "reduced: {}", fmt_row(&self.reduced))?;
        for (row, rhs) in self.rows.iter().zip(&self.rhs) {
            writeln!(w, "{} | {}", fmt_row(row), crate::rat::to_string(rhs))?;
        }
        Ok(())
    }
}

/// Solves `lp` exactly.
pub fn solve(lp: &LinearProgram) -> LpSolution {
    solve_inner(lp, None)
}

/// Like [`solve`], writing the final tableau and basis to `dump`.
pub fn solve_with_dump(lp: &LinearProgram, dump: &mut dyn Write) -> LpSolution {
    solve_inner(lp, Some(dump))
}

fn solve_inner(lp: &LinearProgram, mut dump: Option<&mut dyn Write>) -> LpSolution {
    let n = lp.num_vars();
    assert_eq!(lp.upper.len(), n, "bound dimension mismatch");
    for row in &lp.rows {
        assert_eq!(row.coeffs.len(), n, "row dimension mismatch");
    }
    let rows = lp.expanded_rows();
    let m = rows.len();

    // Normalize every row to a nonnegative rhs; rows with rhs 0 are written
    // as `≤` so their slack can start in the basis.
    let mut sign = vec![1i8; m];
    let mut rel = Vec::with_capacity(m);
    for (i, row) in rows.iter().enumerate() {
        let flip = row.rhs.is_negative() || (row.rhs.is_zero() && row.relation == Relation::Ge);
        if flip {
            sign[i] = -1;
        }
        rel.push(match (row.relation, flip) {
            (Relation::Eq, _) => Relation::Eq,
            (Relation::Le, false) | (Relation::Ge, true) => Relation::Le,
            (Relation::Ge, false) | (Relation::Le, true) => Relation::Ge,
        });
    }
    let slack_rows: Vec<usize> = (0..m).filter(|&i| rel[i] != Relation::Eq).collect();
    let art_rows: Vec<usize> = (0..m).filter(|&i| rel[i] != Relation::Le).collect();
    let ncols = n + slack_rows.len() + art_rows.len();
    let first_art = n + slack_rows.len();

    let mut t_rows = vec![vec![Rat::zero(); ncols]; m];
    let mut rhs = vec![Rat::zero(); m];
    let mut init_col = vec![0usize; m];
    for (i, row) in rows.iter().enumerate() {
        for j in 0..n {
            if !row.coeffs[j].is_zero() {
                t_rows[i][j] = if sign[i] < 0 { -row.coeffs[j].clone() } else { row.coeffs[j].clone() };
            }
        }
        rhs[i] = if sign[i] < 0 { -row.rhs.clone() } else { row.rhs.clone() };
    }
    for (s, &i) in slack_rows.iter().enumerate() {
        let col = n + s;
        t_rows[i][col] = if rel[i] == Relation::Le { Rat::one() } else { -Rat::one() };
        if rel[i] == Relation::Le {
            init_col[i] = col;
        }
    }
    for (a, &i) in art_rows.iter().enumerate() {
        let col = first_art + a;
        t_rows[i][col] = Rat::one();
        init_col[i] = col;
    }

    let mut tab = Tableau {
        rows: t_rows,
        rhs,
        basis: init_col.clone(),
        reduced: Vec::new(),
        value: Rat::zero(),
        barred: vec![false; ncols],
        costs: Vec::new(),
        pivots: 0,
    };

    let read_dual = |tab: &Tableau| -> Vec<Rat> {
        (0..m)
            .map(|i| {
                let c = init_col[i];
                let y = &tab.costs[c] - &tab.reduced[c];
                if sign[i] < 0 {
                    -y
                } else {
                    y
                }
            })
            .collect()
    };

    if !art_rows.is_empty() {
        let mut c1 = vec![Rat::zero(); ncols];
        for v in c1.iter_mut().skip(first_art) {
            *v = Rat::one();
        }
        tab.set_costs(c1);
        // Phase one is bounded below by zero.
        let _ = tab.run();
        if tab.value.is_positive() {
            if let Some(w) = dump.as_deref_mut() {
                let _ = tab.dump(w, "phase 1, infeasible");
            }
            let farkas = read_dual(&tab);
            return LpSolution {
                status: Status::Infeasible,
                primal: Vec::new(),
                dual: Vec::new(),
                value: Rat::zero(),
                certificate: farkas,
                pivots: tab.pivots,
            };
        }
        for i in 0..m {
            if tab.basis[i] >= first_art {
                if let Some(j) = (0..first_art).find(|&j| !tab.rows[i][j].is_zero()) {
                    tab.pivot(i, j);
                }
            }
        }
        for b in tab.barred.iter_mut().skip(first_art) {
            *b = true;
        }
    }

    let flip_obj = lp.sense == Sense::Maximize;
    let mut c2 = vec![Rat::zero(); ncols];
    for j in 0..n {
        c2[j] = if flip_obj { -lp.objective[j].clone() } else { lp.objective[j].clone() };
    }
    tab.set_costs(c2);
    let outcome = tab.run();
    if let Some(w) = dump.as_deref_mut() {
        let _ = tab.dump(w, "phase 2");
    }
    match outcome {
        Outcome::Unbounded(e) => {
            let mut ray = vec![Rat::zero(); n];
            if e < n {
                ray[e] = Rat::one();
            }
            for (i, &b) in tab.basis.iter().enumerate() {
                if b < n {
                    ray[b] = -tab.rows[i][e].clone();
                }
            }
            LpSolution {
                status: Status::Unbounded,
                primal: Vec::new(),
                dual: Vec::new(),
                value: Rat::zero(),
                certificate: ray,
                pivots: tab.pivots,
            }
        }
        Outcome::Optimal => {
            let mut primal = vec![Rat::zero(); n];
            for (i, &b) in tab.basis.iter().enumerate() {
                if b < n {
                    primal[b] = tab.rhs[i].clone();
                }
            }
            let mut dual = read_dual(&tab);
            let mut value = tab.value.clone();
            if flip_obj {
                value = -value;
                for y in dual.iter_mut() {
                    *y = -y.clone();
                }
            }
            LpSolution {
                status: Status::Optimal,
                primal,
                dual,
                value,
                certificate: Vec::new(),
                pivots: tab.pivots,
            }
        }
    }
}

pub fn objective_value(lp: &LinearProgram, x: &[Rat]) -> Rat {
    assert_eq!(x.len(), lp.num_vars());
    dot(&lp.objective, x)
}

pub(crate) fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter()
        .zip(b)
        .filter(|(p, q)| !p.is_zero() && !q.is_zero())
        .fold(Rat::zero(), |acc, (p, q)| acc + p * q)
}

fn holds(relation: Relation, lhs: &Rat, rhs: &Rat) -> bool {
    match relation {
        Relation::Ge => lhs >= rhs,
        Relation::Le => lhs <= rhs,
        Relation::Eq => lhs == rhs,
    }
}

pub fn is_feasible(lp: &LinearProgram, x: &[Rat]) -> bool {
    x.len() == lp.num_vars()
        && x.iter().all(|v| !v.is_negative())
        && lp.expanded_rows().iter().all(|r| holds(r.relation, &dot(&r.coeffs, x), &r.rhs))
}

/// Whether `x` is feasible and attains the exact optimum of `lp`.
pub fn is_optimal(lp: &LinearProgram, x: &[Rat]) -> bool {
    if !is_feasible(lp, x) {
        return false;
    }
    let sol = solve(lp);
    sol.is_optimal() && objective_value(lp, x) == sol.value
}

/// Exact verification of an optimality certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateReport {
    pub primal_feasible: bool,
    pub dual_feasible: bool,
    pub strong_duality: bool,
    pub complementary_slackness: bool,
    pub basic_support: bool,
}

impl CertificateReport {
    pub fn all(&self) -> bool {
        self.primal_feasible
            && self.dual_feasible
            && self.strong_duality
            && self.complementary_slackness
            && self.basic_support
    }
}

impl fmt::Display for CertificateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "primal={} dual={} duality={} slackness={} basic={}",
            self.primal_feasible,
            self.dual_feasible,
            self.strong_duality,
            self.complementary_slackness,
            self.basic_support
        )
    }
}

/// Checks primal/dual feasibility, strong duality, complementary slackness
/// and the basic-support bound for an optimal solution.
pub fn verify_certificate(lp: &LinearProgram, sol: &LpSolution) -> CertificateReport {
    let rows = lp.expanded_rows();
    let n = lp.num_vars();
    let x = &sol.primal;
    let y = &sol.dual;
    let min = lp.sense == Sense::Minimize;
    let primal_feasible = is_feasible(lp, x);
    let sign_ok = rows.iter().zip(y).all(|(r, yi)| match (r.relation, min) {
        (Relation::Eq, _) => true,
        (Relation::Ge, true) | (Relation::Le, false) => !yi.is_negative(),
        (Relation::Le, true) | (Relation::Ge, false) => !yi.is_positive(),
    });
    let mut col_ok = true;
    let mut slack_ok = true;
    for j in 0..n {
        let aty = rows
            .iter()
            .zip(y)
            .fold(Rat::zero(), |acc, (r, yi)| acc + &r.coeffs[j] * yi);
        let c = &lp.objective[j];
        let feasible = if min { &aty <= c } else { &aty >= c };
        col_ok &= feasible;
        if x[j].is_positive() && &aty != c {
            slack_ok = false;
        }
    }
    for (r, yi) in rows.iter().zip(y) {
        if !yi.is_zero() && dot(&r.coeffs, x) != r.rhs {
            slack_ok = false;
        }
    }
    let dual_value = rows.iter().zip(y).fold(Rat::zero(), |acc, (r, yi)| acc + &r.rhs * yi);
    let support = x.iter().filter(|v| !v.is_zero()).count();
    CertificateReport {
        primal_feasible,
        dual_feasible: sign_ok && col_ok && y.len() == rows.len(),
        strong_duality: dual_value == sol.value && objective_value(lp, x) == sol.value,
        complementary_slackness: slack_ok,
        basic_support: support <= rows.len(),
    }
}
