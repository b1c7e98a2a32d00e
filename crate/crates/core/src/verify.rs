//! The guess an oracle optimum would make, and the exact guarantee chain
//! along it.

use crate::audit::Audit;
use crate::bipoint::GuessContext;
use crate::combine::beta;
use crate::metric::{canonical_order, diameter, Ball, Instance, Objective};
use crate::oracle::{opt_ball_cover, opt_partition_msd};
use crate::rat::{int, Rat};
use crate::solver::{assemble, guessed_cost, precheck, solution_cost, solve_residual, ResidualRun, SolveError};

#[derive(Debug, Clone)]
pub struct CorrectGuess {
    pub ctx: GuessContext,
    pub opt: Rat,
    /// Optimum minus the optimum's own cost on the guessed objects.
    pub opt_prime: Rat,
    /// Oracle optimum of the residual instance `(X′, k′)`.
    pub opt_sub: Rat,
    pub passed_precheck: bool,
    pub run: Option<ResidualRun>,
    pub final_cost: Option<Rat>,
    pub audit: Audit,
}

/// Top `g` balls of an oracle optimum, with the optimum's value and the
/// part of it those balls account for.
pub fn optimal_guess(inst: &Instance, objective: Objective, g: usize) -> Result<(Vec<Ball>, Rat, Rat), SolveError> {
    let k = inst.k();
    match objective {
        Objective::Msd => {
            let p = opt_partition_msd(inst, k)?;
            let mut ranked: Vec<(Rat, usize)> = p
                .clusters
                .iter()
                .map(|c| (diameter(inst, c).expect("nonempty"), *c.iter().next().unwrap()))
                .collect();
            ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            ranked.truncate(g);
            let top = ranked.iter().fold(Rat::default(), |a, (d, _)| a + d);
            let balls = ranked.into_iter().map(|(d, c)| Ball::new(c, d)).collect();
            Ok((balls, p.value, top))
        }
        _ => {
            let c = opt_ball_cover(inst, k, objective.power())?;
            let mut balls = c.balls;
            balls.sort_by(canonical_order);
            balls.truncate(g);
            let top = crate::metric::cost(&balls, objective.power());
            Ok((balls, c.value, top))
        }
    }
}

fn residual_opt(inst: &Instance, objective: Objective, ctx: &GuessContext) -> Result<Rat, SolveError> {
    if ctx.x_prime.is_empty() {
        return Ok(Rat::default());
    }
    let (sub, _) = inst.restrict(&ctx.x_prime, ctx.k_prime);
    Ok(match objective {
        Objective::Msd => opt_partition_msd(&sub, ctx.k_prime)?.value,
        _ => opt_ball_cover(&sub, ctx.k_prime, objective.power())?.value,
    })
}

/// Runs the pipeline on the correct guess and records the guarantee chain.
pub fn correct_guess(inst: &Instance, objective: Objective, g: usize) -> Result<CorrectGuess, SolveError> {
    let k = inst.k();
    assert!(g < k, "needs budget beyond the guess");
    let (guessed, opt, top) = optimal_guess(inst, objective, g)?;
    let ctx = GuessContext::new(inst, guessed, k)?;
    let opt_prime = &opt - &top;
    let opt_sub = residual_opt(inst, objective, &ctx)?;
    let mut audit = Audit::new();
    let passed_precheck = audit.holds("correct.precheck", precheck(inst, &ctx));
    let mut out = CorrectGuess {
        ctx,
        opt,
        opt_prime,
        opt_sub,
        passed_precheck,
        run: None,
        final_cost: None,
        audit,
    };
    if !passed_precheck {
        return Ok(out);
    }
    let run = solve_residual(inst, objective, &out.ctx)?;
    let a = &mut out.audit;
    let mut cap = Rat::default();
    if let (Some(bp), Some(c)) = (&run.bipoint, &run.combined) {
        let power = objective.power();
        let c1 = crate::metric::cost(&bp.b1, power);
        let c2 = crate::metric::cost(&bp.b2, power);
        let lp_part = &bp.lp_value - &bp.lambda * int(out.ctx.k_prime as i64);
        a.le("correct.lp_relaxation", &lp_part, &out.opt_prime);
        let mix = &c.a * &c1 + &c.b * &c2;
        a.le("correct.bipoint_bound", &mix, &out.opt_prime);
        a.le("correct.bipoint_bound_sub", &mix, &out.opt_sub);
        cap = c.plan.cap.clone();
    }
    let full = assemble(inst, objective, &out.ctx.guessed, &run.residual);
    let final_cost = solution_cost(inst, objective, &full);
    let guessed = guessed_cost(inst, objective, &out.ctx.guessed);
    let bound = &guessed + beta(objective) * &out.opt_prime + &cap;
    a.le("correct.final", &final_cost, &bound);
    let bound = guessed + beta(objective) * &out.opt_sub + cap;
    a.le("correct.final_sub", &final_cost, &bound);
    a.extend(run.audit.clone());
    out.final_cost = Some(final_cost);
    out.run = Some(run);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{line_metric, validate_instance};

    #[test]
    fn line5_chain() {
        let inst = validate_instance(line_metric(&[0, 1, 2, 10, 11]), 2).unwrap();
        for obj in Objective::ALL {
            let cg = correct_guess(&inst, obj, 1).unwrap();
            assert!(cg.passed_precheck);
            assert!(cg.audit.passed(), "{obj}: {:?}", cg.audit.failures().collect::<Vec<_>>());
        }
        let cg = correct_guess(&inst, Objective::Msr, 1).unwrap();
        assert_eq!(cg.opt, int(2));
        assert_eq!(cg.opt_prime, int(1));
        let cg = correct_guess(&inst, Objective::Msd, 1).unwrap();
        assert_eq!(cg.ctx.guessed, vec![Ball::new(0, int(2))]);
        assert_eq!(cg.opt_prime, int(1));
    }
}
