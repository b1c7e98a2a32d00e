//! Guess enumeration and the full pipeline for all three objectives.

use crate::audit::Audit;
use crate::bipoint::{find_bipoint, verify_bipoint, BiPoint, BipointError, GuessContext};
use crate::combine::{assign, clusters_cost, combine_solutions, Combined, CombineError, Piece, Residual};
use crate::kcenter::farthest_first;
use crate::metric::{candidate_balls, cost, Ball, Instance, Objective, PointSet};
use crate::oracle::{opt_ball_cover, opt_partition_msd, OracleError};
use crate::rat::{self, Rat};
use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("no guess produced a feasible solution")]
    NoFeasibleGuess,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Bipoint(#[from] BipointError),
    #[error(transparent)]
    Combine(#[from] CombineError),
}

/// Every candidate ball `(i, d(i,j))`, radius 0 included.
pub fn guess_balls(inst: &Instance) -> Vec<Ball> {
    let all = inst.all_points();
    let cap = inst.distinct_distances().last().cloned().unwrap_or_default();
    candidate_balls(inst, &all, &cap)
}

/// All size-`g` subsets of candidate balls as residual contexts.
pub fn enumerate_guesses(inst: &Instance, g: usize, k: usize) -> Vec<GuessContext> {
    assert!(g >= 1 && g < k, "guess size must satisfy 1 <= g < k");
    guess_balls(inst)
        .into_iter()
        .combinations(g)
        .map(|guess| GuessContext::new(inst, guess, k).expect("g < k"))
        .collect()
}

/// Greedy k-center on `X′` must stay within `2·R_m`.
pub fn precheck(inst: &Instance, ctx: &GuessContext) -> bool {
    if ctx.x_prime.is_empty() {
        return true;
    }
    let (_, r) = farthest_first(inst, &ctx.x_prime, ctx.k_prime);
    r <= ctx.radius_cap()
}

/// Result of the residual pipeline for one context.
#[derive(Debug, Clone)]
pub struct ResidualRun {
    pub residual: Residual,
    pub cost: Rat,
    pub bipoint: Option<BiPoint>,
    pub combined: Option<Combined>,
    pub audit: Audit,
}

fn zero_residual(objective: Objective, x_prime: &PointSet) -> Residual {
    match objective {
        Objective::Msd => Residual::Clusters(x_prime.iter().map(|&j| [j].into_iter().collect()).collect()),
        _ => Residual::Balls(x_prime.iter().map(|&j| Ball::new(j, Rat::default())).collect()),
    }
}

/// Bi-point plus combination on `X′`, or zero balls when `X′` is small.
pub fn solve_residual(
    inst: &Instance,
    objective: Objective,
    ctx: &GuessContext,
) -> Result<ResidualRun, SolveError> {
    let mut audit = Audit::new();
    if ctx.is_direct() {
        return Ok(ResidualRun {
            residual: zero_residual(objective, &ctx.x_prime),
            cost: Rat::default(),
            bipoint: None,
            combined: None,
            audit,
        });
    }
    let power = objective.power();
    let bp = find_bipoint(inst, ctx, power, &mut audit)?;
    verify_bipoint(inst, ctx, power, &bp, &mut audit)?;
    let combined = combine_solutions(objective, inst, ctx, &bp, &mut audit)?;
    Ok(ResidualRun {
        residual: combined.solution.clone(),
        cost: combined.cost.clone(),
        bipoint: Some(bp),
        combined: Some(combined),
        audit,
    })
}

/// Guessed objects followed by the residual solution, over all of X.
pub fn assemble(inst: &Instance, objective: Objective, guessed: &[Ball], residual: &Residual) -> Residual {
    match (objective, residual) {
        (Objective::Msd, Residual::Clusters(cs)) => {
            let pieces: Vec<Piece> = guessed
                .iter()
                .cloned()
                .map(Piece::Ball)
                .chain(cs.iter().cloned().map(Piece::Set))
                .collect();
            Residual::Clusters(assign(inst, &pieces, &inst.all_points()))
        }
        (_, Residual::Balls(bs)) => {
            Residual::Balls(guessed.iter().cloned().chain(bs.iter().cloned()).collect())
        }
        _ => unreachable!("objective and residual shape agree"),
    }
}

pub fn solution_cost(inst: &Instance, objective: Objective, s: &Residual) -> Rat {
    match s {
        Residual::Balls(b) => cost(b, objective.power()),
        Residual::Clusters(c) => clusters_cost(inst, c),
    }
}

/// Whether `s` is a valid answer for budget `k` on all of X.
pub fn is_feasible(inst: &Instance, k: usize, s: &Residual) -> bool {
    s.len() <= k && crate::combine::residual_covers(inst, &inst.all_points(), s)
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct GuessStats {
    pub enumerated: usize,
    pub distinct: usize,
    pub rejected: usize,
    pub direct: usize,
    pub searched: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Solved {
    pub objective: Objective,
    pub k: usize,
    pub g: usize,
    pub solution: Residual,
    #[serde(with = "rat::serde_rat")]
    pub cost: Rat,
    pub guess: Vec<Ball>,
    pub exact: bool,
    pub stats: GuessStats,
    pub audit: Audit,
    /// `(total, failed)` per check name over every context that was solved.
    pub checks: BTreeMap<String, (usize, usize)>,
}

type Signature = (PointSet, Rat, usize);

/// Cheapest solution over all guesses of size `g`; exact brute force when
/// `k ≤ g`.
pub fn solve(inst: &Instance, objective: Objective, g: usize) -> Result<Solved, SolveError> {
    let k = inst.k();
    if k <= g {
        return brute_small(inst, objective, g);
    }
    let contexts = enumerate_guesses(inst, g, k);
    let mut stats = GuessStats { enumerated: contexts.len(), ..Default::default() };
    let mut by_sig: BTreeMap<Signature, Vec<Vec<Ball>>> = BTreeMap::new();
    for ctx in contexts {
        by_sig
            .entry((ctx.x_prime, ctx.r_m, ctx.k_prime))
            .or_default()
            .push(ctx.guessed);
    }
    stats.distinct = by_sig.len();
    let work: Vec<(&Signature, GuessContext)> = by_sig
        .iter()
        .map(|(sig, guesses)| {
            let ctx = GuessContext {
                guessed: guesses[0].clone(),
                x_prime: sig.0.clone(),
                r_m: sig.1.clone(),
                k_prime: sig.2,
            };
            (sig, ctx)
        })
        .collect();
    let runs: Vec<Result<Option<ResidualRun>, SolveError>> = work
        .par_iter()
        .map(|(_, ctx)| {
            if !precheck(inst, ctx) {
                log::debug!("guess {:?} rejected by precheck", ctx.guessed);
                return Ok(None);
            }
            solve_residual(inst, objective, ctx).map(Some)
        })
        .collect();

    let mut best: Option<(Rat, Residual, Vec<Ball>, Audit)> = None;
    let mut checks = BTreeMap::new();
    for ((sig, _), run) in work.iter().zip(runs) {
        let Some(run) = run? else {
            stats.rejected += by_sig[*sig].len();
            continue;
        };
        tally_into(&mut checks, &run.audit);
        if run.bipoint.is_some() {
            stats.searched += 1;
        } else {
            stats.direct += 1;
        }
        for guessed in &by_sig[*sig] {
            let full = assemble(inst, objective, guessed, &run.residual);
            let c = solution_cost(inst, objective, &full);
            if best.as_ref().is_none_or(|(bc, ..)| c < *bc) {
                best = Some((c, full, guessed.clone(), run.audit.clone()));
            }
        }
    }
    let (cost, solution, guess, mut audit) = best.ok_or(SolveError::NoFeasibleGuess)?;
    audit.holds("solve.feasible", is_feasible(inst, k, &solution));
    log::info!("{objective}: cost {} with guess {:?}", rat::to_string(&cost), guess);
    Ok(Solved { objective, k, g, solution, cost, guess, exact: false, stats, audit, checks })
}

pub fn tally_into(into: &mut BTreeMap<String, (usize, usize)>, audit: &Audit) {
    for c in &audit.checks {
        let e = into.entry(c.name.clone()).or_default();
        e.0 += 1;
        e.1 += usize::from(!c.pass);
    }
}

/// Exact optimum through the subset oracles.
pub fn brute_small(inst: &Instance, objective: Objective, g: usize) -> Result<Solved, SolveError> {
    let k = inst.k();
    let (solution, cost) = match objective {
        Objective::Msd => {
            let p = opt_partition_msd(inst, k)?;
            (Residual::Clusters(p.clusters), p.value)
        }
        _ => {
            let c = opt_ball_cover(inst, k, objective.power())?;
            (Residual::Balls(c.balls), c.value)
        }
    };
    let mut audit = Audit::new();
    audit.holds("solve.feasible", is_feasible(inst, k, &solution));
    let mut checks = BTreeMap::new();
    tally_into(&mut checks, &audit);
    Ok(Solved {
        objective,
        k,
        g,
        solution,
        cost,
        guess: Vec::new(),
        exact: true,
        stats: GuessStats::default(),
        audit,
        checks,
    })
}

/// Cost of the guessed part of an assembled solution: the balls themselves,
/// or for MSD the diameters of the points they claim.
pub fn guessed_cost(inst: &Instance, objective: Objective, guessed: &[Ball]) -> Rat {
    match objective {
        Objective::Msd => {
            let claimed: PointSet = inst
                .all_points()
                .into_iter()
                .filter(|&j| guessed.iter().any(|b| inst.contains(b, j)))
                .collect();
            let pieces: Vec<Piece> = guessed.iter().cloned().map(Piece::Ball).collect();
            clusters_cost(inst, &assign(inst, &pieces, &claimed))
        }
        _ => cost(guessed, objective.power()),
    }
}
