//! Lagrangian relaxation of the residual cover problem and the search for
//! a bi-point solution.
//!
//! `LP(λ)` has one variable per candidate ball `(i, r)` with `i ∈ X′` and
//! `r ≤ 2·R_m`, cost `rᵅ + λ`, and one covering row per point of `X′`.

use crate::audit::Audit;
use crate::lp::{self, LinearProgram, Relation, Sense, Status};
use crate::metric::{candidate_balls, cost, Ball, CostPower, Instance, PointId, PointSet};
use crate::rat::{self, int, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BipointError {
    #[error("no uncovered points remain")]
    EmptyXPrime,
    #[error("guess uses the whole budget")]
    NoBudget,
    #[error("auxiliary program infeasible: primal point was not optimal for any lambda")]
    AuxInfeasible,
    #[error("search window holds more than one break point")]
    WindowCollapse,
    #[error("LP(lambda) did not reach an optimum")]
    LpNotOptimal,
    #[error("upper endpoint rounds to {size} balls, budget is {budget}")]
    EndpointOverBudget { size: usize, budget: usize },
}

/// Residual problem left after fixing the guessed balls.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GuessContext {
    pub guessed: Vec<Ball>,
    pub x_prime: PointSet,
    pub r_m: Rat,
    pub k_prime: usize,
}

impl GuessContext {
    pub fn new(inst: &Instance, guessed: Vec<Ball>, k: usize) -> Result<Self, BipointError> {
        if guessed.len() >= k {
            return Err(BipointError::NoBudget);
        }
        let x_prime = inst
            .all_points()
            .into_iter()
            .filter(|&j| !guessed.iter().any(|b| inst.contains(b, j)))
            .collect();
        let r_m = guessed.iter().map(|b| b.radius.clone()).min().unwrap_or_else(Rat::zero);
        let k_prime = k - guessed.len();
        Ok(GuessContext { guessed, x_prime, r_m, k_prime })
    }

    /// Few enough points left to open a zero ball on each.
    pub fn is_direct(&self) -> bool {
        self.x_prime.len() <= self.k_prime
    }

    pub fn radius_cap(&self) -> Rat {
        &self.r_m * int(2)
    }
}

/// Candidate balls and their membership rows; `LP(λ)` for any `λ` is
/// built from this without recomputing distances.
#[derive(Debug, Clone)]
pub struct CoverLp {
    pub candidates: Vec<Ball>,
    pub costs: Vec<Rat>,
    pub rows: Vec<Vec<usize>>,
    pub members: Vec<Vec<usize>>,
    pub points: Vec<PointId>,
    pub power: CostPower,
}

impl CoverLp {
    pub fn new(inst: &Instance, ctx: &GuessContext, power: CostPower) -> Result<Self, BipointError> {
        if ctx.x_prime.is_empty() {
            return Err(BipointError::EmptyXPrime);
        }
        let candidates = candidate_balls(inst, &ctx.x_prime, &ctx.radius_cap());
        let points: Vec<PointId> = ctx.x_prime.iter().copied().collect();
        let members: Vec<Vec<usize>> = candidates
            .iter()
            .map(|b| (0..points.len()).filter(|&p| inst.contains(b, points[p])).collect())
            .collect();
        let mut rows = vec![Vec::new(); points.len()];
        for (c, m) in members.iter().enumerate() {
            for &p in m {
                rows[p].push(c);
            }
        }
        let costs = candidates.iter().map(|b| power.apply(&b.radius)).collect();
        Ok(CoverLp { candidates, costs, rows, members, points, power })
    }

    pub fn program(&self, lambda: &Rat) -> LinearProgram {
        let nv = self.candidates.len();
        let obj = self.costs.iter().map(|c| c + lambda).collect();
        let mut lp = LinearProgram::new(Sense::Minimize, obj);
        for row in &self.rows {
            let mut coeffs = vec![Rat::zero(); nv];
            for &c in row {
                coeffs[c] = Rat::one();
            }
            lp.add_row(coeffs, Relation::Ge, Rat::one());
        }
        lp
    }

    /// `Σ x·(rᵅ + λ)`.
    pub fn value(&self, x: &[Rat], lambda: &Rat) -> Rat {
        x.iter()
            .zip(&self.costs)
            .filter(|(v, _)| !v.is_zero())
            .fold(Rat::zero(), |acc, (v, c)| acc + v * (c + lambda))
    }
}

/// `LP(λ)` together with its candidate list.
pub fn build_primal(
    inst: &Instance,
    ctx: &GuessContext,
    lambda: &Rat,
    power: CostPower,
) -> Result<(LinearProgram, CoverLp), BipointError> {
    let cover = CoverLp::new(inst, ctx, power)?;
    Ok((cover.program(lambda), cover))
}

/// Greedy disjoint selection from the support of `x`, largest radius
/// first. Intersections are taken within `within`.
pub fn round(inst: &Instance, within: &PointSet, x: &[Rat], candidates: &[Ball]) -> Vec<Ball> {
    let mut support: Vec<&Ball> = candidates
        .iter()
        .zip(x)
        .filter(|(_, v)| v.is_positive())
        .map(|(b, _)| b)
        .collect();
    support.sort_by(|a, b| crate::metric::canonical_order(a, b));
    let mut kept: Vec<Ball> = Vec::new();
    for b in support {
        if kept.iter().all(|k| !inst.intersect_in(k, b, within)) {
            kept.push(b.clone());
        }
    }
    kept
}

/// Moves balls of `b1` that miss every ball of `b2` into `b2` while it has
/// room; if `b2` reaches `k′`, both sides become `b2`.
pub fn fill(
    inst: &Instance,
    within: &PointSet,
    b1: &[Ball],
    b2: &[Ball],
    k_prime: usize,
) -> (Vec<Ball>, Vec<Ball>) {
    let mut b2 = b2.to_vec();
    while b2.len() < k_prime {
        let lone = b1
            .iter()
            .find(|a| !b2.iter().any(|b| inst.intersect_in(a, b, within)));
        match lone {
            Some(a) => b2.push(a.clone()),
            None => break,
        }
    }
    b2.sort_by(crate::metric::canonical_order);
    if b2.len() == k_prime {
        (b2.clone(), b2)
    } else {
        (b1.to_vec(), b2)
    }
}

/// `Δ = 8·n²·n^(4n²)`; break points of `LP(λ)` are more than `1/Δ` apart.
pub fn delta(n: usize) -> Rat {
    let nb = BigInt::from(n);
    let e = 4 * n * n;
    Rat::from_integer(BigInt::from(8) * &nb * &nb * num_traits::pow(nb, e))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LambdaBound {
    Finite(Rat),
    Unbounded,
}

/// The auxiliary program over `(y, λ)` whose optimum is the largest `λ`
/// at which `x` is still optimal for `LP(λ)`.
pub fn max_lambda_program(cover: &CoverLp, x: &[Rat]) -> LinearProgram {
    let m = cover.points.len();
    let lam = m;
    let mut obj = vec![Rat::zero(); m + 1];
    obj[lam] = Rat::one();
    let mut lp = LinearProgram::new(Sense::Maximize, obj);
    for (c, mem) in cover.members.iter().enumerate() {
        let mut coeffs = vec![Rat::zero(); m + 1];
        for &p in mem {
            coeffs[p] = Rat::one();
        }
        coeffs[lam] = -Rat::one();
        lp.add_row(coeffs, Relation::Le, cover.costs[c].clone());
    }
    let total: Rat = x.iter().fold(Rat::zero(), |a, v| a + v);
    let mut coeffs = vec![Rat::one(); m + 1];
    coeffs[lam] = -total;
    lp.add_row(coeffs, Relation::Eq, cover.value(x, &Rat::zero()));
    lp
}

pub fn max_lambda_optimal(cover: &CoverLp, x: &[Rat]) -> Result<LambdaBound, BipointError> {
    let sol = lp::solve(&max_lambda_program(cover, x));
    match sol.status {
        Status::Optimal => Ok(LambdaBound::Finite(sol.value)),
        Status::Unbounded => Ok(LambdaBound::Unbounded),
        Status::Infeasible => Err(BipointError::AuxInfeasible),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Exit {
    /// Some rounding produced exactly `k′` balls.
    ExactBudget,
    /// The lower solution stayed optimal at the upper endpoint.
    Check,
    /// The single break point inside the window was computed.
    BreakPoint,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchStep {
    #[serde(with = "rat::serde_rat")]
    pub lambda1: Rat,
    #[serde(with = "rat::serde_rat")]
    pub lambda2: Rat,
    #[serde(with = "rat::serde_rat")]
    pub probe: Rat,
    pub round_size: usize,
    #[serde(with = "rat::serde_rat")]
    pub lp_value: Rat,
}

#[derive(Debug, Clone, Serialize)]
pub struct BiPoint {
    #[serde(with = "rat::serde_rat")]
    pub lambda: Rat,
    pub b1: Vec<Ball>,
    pub b2: Vec<Ball>,
    #[serde(with = "rat::serde_rat")]
    pub lp_value: Rat,
    pub exit: Exit,
    pub steps: Vec<SearchStep>,
    pub bisections: usize,
}

impl BiPoint {
    pub fn k1(&self) -> usize {
        self.b1.len()
    }

    pub fn k2(&self) -> usize {
        self.b2.len()
    }
}

/// Upper end of the initial window: `k′·(2R_m)ᵅ + 1`.
pub fn initial_upper(ctx: &GuessContext, power: CostPower) -> Rat {
    int(ctx.k_prime as i64) * power.apply(&ctx.radius_cap()) + Rat::one()
}

/// `⌈log₂((λ₂⁰)·Δ)⌉ + 2`, the bisection budget.
pub fn iteration_bound(ctx: &GuessContext, power: CostPower) -> usize {
    let q = initial_upper(ctx, power) * delta(ctx.x_prime.len());
    let c = q.ceil().to_integer();
    let bits = (c - BigInt::one()).bits() as usize;
    bits + 2
}

struct Probe {
    lambda: Rat,
    x: Vec<Rat>,
    value: Rat,
    round: Vec<Ball>,
}

struct Search<'a> {
    inst: &'a Instance,
    ctx: &'a GuessContext,
    cover: CoverLp,
    audit: &'a mut Audit,
    steps: Vec<SearchStep>,
}

impl Search<'_> {
    fn probe(&mut self, lambda: Rat) -> Result<Probe, BipointError> {
        let program = self.cover.program(&lambda);
        let sol = lp::solve(&program);
        if sol.status != Status::Optimal {
            return Err(BipointError::LpNotOptimal);
        }
        self.audit
            .holds("lp.certificate", lp::verify_certificate(&program, &sol).all());
        let round = round(self.inst, &self.ctx.x_prime, &sol.primal, &self.cover.candidates);
        self.audit.holds("round.disjoint", pairwise_disjoint(self.inst, &self.ctx.x_prime, &round));
        self.audit.holds("round.triple_cover", triple_covers(self.inst, &self.ctx.x_prime, &round));
        self.audit.holds("round.support", round.iter().all(|b| {
            let c = self.cover.candidates.iter().position(|c| c == b).unwrap();
            sol.primal[c].is_positive()
        }));
        let lmp = cost(&round, self.cover.power) + &lambda * int(round.len() as i64);
        self.audit.le("round.lmp", &lmp, &sol.value);
        Ok(Probe { lambda, x: sol.primal, value: sol.value, round })
    }

    fn log(&mut self, l1: &Rat, l2: &Rat, p: &Probe) {
        log::debug!(
            "bipoint: lambda1={} lambda2={} probe={} |ROUND|={} OPT_LP={}",
            rat::to_string(l1),
            rat::to_string(l2),
            rat::to_string(&p.lambda),
            p.round.len(),
            rat::to_string(&p.value)
        );
        self.steps.push(SearchStep {
            lambda1: l1.clone(),
            lambda2: l2.clone(),
            probe: p.lambda.clone(),
            round_size: p.round.len(),
            lp_value: p.value.clone(),
        });
    }

    fn finish(self, lambda: Rat, fill_pair: (Vec<Ball>, Vec<Ball>), lp_value: Rat, exit: Exit, bisections: usize) -> BiPoint {
        let (b1, b2) = fill_pair;
        BiPoint { lambda, b1, b2, lp_value, exit, steps: self.steps, bisections }
    }

    fn fill(&self, b1: &[Ball], b2: &[Ball]) -> (Vec<Ball>, Vec<Ball>) {
        fill(self.inst, &self.ctx.x_prime, b1, b2, self.ctx.k_prime)
    }
}

/// Runs the bisection on `λ` until an exact bi-point is found.
///
/// Besides the classic window test, every iteration computes the largest
/// `λ*` at which the lower solution stays optimal; once the upper solution
/// is also optimal there, `λ*` is the only break point left in the window
/// and the search ends at it.
pub fn find_bipoint(
    inst: &Instance,
    ctx: &GuessContext,
    power: CostPower,
    audit: &mut Audit,
) -> Result<BiPoint, BipointError> {
    let cover = CoverLp::new(inst, ctx, power)?;
    let kp = ctx.k_prime;
    let mut s = Search { inst, ctx, cover, audit, steps: Vec::new() };

    let mut l1 = Rat::zero();
    let mut l2 = initial_upper(ctx, power);
    let mut p1 = s.probe(l1.clone())?;
    s.log(&l1, &l2, &p1);
    s.audit.eq_count("endpoint.lower", p1.round.len(), ctx.x_prime.len());
    if p1.round.len() == kp {
        let b = p1.round.clone();
        return Ok(s.finish(l1, (b.clone(), b), p1.value, Exit::ExactBudget, 0));
    }
    let mut p2 = s.probe(l2.clone())?;
    s.log(&l1, &l2, &p2);
    if !s.audit.le_count("endpoint.upper", p2.round.len(), kp) {
        return Err(BipointError::EndpointOverBudget { size: p2.round.len(), budget: kp });
    }
    if p2.round.len() == kp {
        let b = p2.round.clone();
        return Ok(s.finish(l2, (b.clone(), b), p2.value, Exit::ExactBudget, 0));
    }

    let bound = iteration_bound(ctx, power);
    let gap = Rat::one() / delta(ctx.x_prime.len());
    let mut bisections = 0usize;
    loop {
        // Check: the lower solution is optimal at the upper endpoint.
        if s.cover.value(&p1.x, &l2) == p2.value {
            let pair = s.fill(&p1.round, &p2.round);
            return Ok(s.finish(l2, pair, p2.value, Exit::Check, bisections));
        }
        let star = match max_lambda_optimal(&s.cover, &p1.x)? {
            LambdaBound::Finite(v) if v < l2 => v,
            // Contradicts the failed check above.
            _ => return Err(BipointError::WindowCollapse),
        };
        if star < l1 {
            return Err(BipointError::WindowCollapse);
        }
        let ps = s.probe(star.clone())?;
        s.log(&l1, &l2, &ps);
        if ps.round.len() == kp {
            let b = ps.round.clone();
            return Ok(s.finish(star, (b.clone(), b), ps.value, Exit::ExactBudget, bisections));
        }
        if s.cover.value(&p2.x, &star) == ps.value {
            s.audit.eq("breakpoint.lower_optimal", &s.cover.value(&p1.x, &star), &ps.value);
            let pair = if ps.round.len() >= kp {
                s.fill(&ps.round, &p2.round)
            } else {
                s.fill(&p1.round, &ps.round)
            };
            s.audit.le_count("search.iterations", bisections, bound);
            return Ok(s.finish(star, pair, ps.value, Exit::BreakPoint, bisections));
        }
        if &l1 + &gap >= l2 {
            return Err(BipointError::WindowCollapse);
        }
        let mid = (&l1 + &l2) / int(2);
        let pm = s.probe(mid.clone())?;
        bisections += 1;
        s.log(&l1, &l2, &pm);
        if pm.round.len() == kp {
            let b = pm.round.clone();
            return Ok(s.finish(mid, (b.clone(), b), pm.value, Exit::ExactBudget, bisections));
        }
        if pm.round.len() > kp {
            l1 = mid;
            p1 = pm;
        } else {
            l2 = mid;
            p2 = pm;
        }
    }
}

pub fn pairwise_disjoint(inst: &Instance, within: &PointSet, balls: &[Ball]) -> bool {
    balls
        .iter()
        .enumerate()
        .all(|(i, a)| balls[i + 1..].iter().all(|b| !inst.intersect_in(a, b, within)))
}

pub fn triple_covers(inst: &Instance, within: &PointSet, balls: &[Ball]) -> bool {
    within
        .iter()
        .all(|&j| balls.iter().any(|b| inst.d(b.center, j) <= &(&b.radius * int(3))))
}

/// Records every structural property of a bi-point against a fresh solve
/// of `LP(λ)`.
pub fn verify_bipoint(
    inst: &Instance,
    ctx: &GuessContext,
    power: CostPower,
    bp: &BiPoint,
    audit: &mut Audit,
) -> Result<(), BipointError> {
    let w = &ctx.x_prime;
    let kp = ctx.k_prime;
    audit.le_count("bipoint.k2_le_kprime", bp.k2(), kp);
    audit.le_count("bipoint.kprime_le_k1", kp, bp.k1());
    audit.holds(
        "bipoint.intersects",
        bp.b1.iter().all(|a| bp.b2.iter().any(|b| inst.intersect_in(a, b, w))),
    );
    let cap = ctx.radius_cap();
    audit.holds(
        "bipoint.radius_cap",
        bp.b1.iter().chain(&bp.b2).all(|b| b.radius <= cap),
    );
    let (program, _) = build_primal(inst, ctx, &bp.lambda, power)?;
    let sol = lp::solve(&program);
    if sol.status != Status::Optimal {
        return Err(BipointError::LpNotOptimal);
    }
    audit.eq("bipoint.lp_value", &bp.lp_value, &sol.value);
    for (name, set) in [("b1", &bp.b1), ("b2", &bp.b2)] {
        audit.holds(&format!("bipoint.{name}.disjoint"), pairwise_disjoint(inst, w, set));
        audit.holds(&format!("bipoint.{name}.triple_cover"), triple_covers(inst, w, set));
        let lhs = cost(set, power) + &bp.lambda * int(set.len() as i64);
        audit.le(&format!("bipoint.{name}.lmp"), &lhs, &sol.value);
    }
    Ok(())
}

/// Probes both ends of the initial window: `λ = 0` must round to all of
/// `X′` and the upper end to at most `k′` balls.
pub fn check_endpoints(
    inst: &Instance,
    ctx: &GuessContext,
    power: CostPower,
    audit: &mut Audit,
) -> Result<(usize, usize), BipointError> {
    let cover = CoverLp::new(inst, ctx, power)?;
    let mut sizes = [0usize; 2];
    for (slot, lambda) in [Rat::zero(), initial_upper(ctx, power)].into_iter().enumerate() {
        let sol = lp::solve(&cover.program(&lambda));
        if sol.status != Status::Optimal {
            return Err(BipointError::LpNotOptimal);
        }
        sizes[slot] = round(inst, &ctx.x_prime, &sol.primal, &cover.candidates).len();
    }
    audit.eq_count("endpoint.lower", sizes[0], ctx.x_prime.len());
    audit.le_count("endpoint.upper", sizes[1], ctx.k_prime);
    Ok((sizes[0], sizes[1]))
}
