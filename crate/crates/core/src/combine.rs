//! Turning a bi-point solution into one feasible residual solution.
//!
//! Every `B₁` ball is grouped under an intersecting `B₂` anchor. Each group
//! is either kept as its tripled balls or replaced by one merged object,
//! chosen by a single-budget LP. The result competes against tripled `B₂`.

use crate::audit::Audit;
use crate::bipoint::{BiPoint, GuessContext};
use crate::lp::{LinearProgram, Relation, Sense};
use crate::metric::{cost, diameter, Ball, CostPower, Instance, Objective, PointId, PointSet};
use crate::rat::{frac, int, Rat};
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombineError {
    #[error("ball centered at {center} meets no anchor")]
    NoIntersectingAnchor { center: PointId },
    #[error("no target points to enclose")]
    EmptyTargets,
    #[error("merging every group still exceeds the budget")]
    InfeasibleBudget,
}

pub const BETA_MSR: (i64, i64) = (288, 85);
pub const BETA_MSD: (i64, i64) = (72, 11);
pub const BETA_MSSR: (i64, i64) = (144, 13);

pub fn beta(objective: Objective) -> Rat {
    let (n, d) = match objective {
        Objective::Msr => BETA_MSR,
        Objective::Msd => BETA_MSD,
        Objective::Mssr => BETA_MSSR,
    };
    frac(n, d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Group {
    pub anchor: Ball,
    pub members: Vec<Ball>,
    #[serde(with = "crate::rat::serde_rat")]
    pub r1: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub r2: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub r3: Rat,
    pub i2: PointId,
    pub i3: PointId,
    #[serde(with = "crate::rat::serde_rat")]
    pub c: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub c_sq: Rat,
}

/// Assigns each `B₁` ball to the lowest-centered `B₂` ball it meets.
pub fn form_groups(
    inst: &Instance,
    within: &PointSet,
    b1: &[Ball],
    b2: &[Ball],
) -> Result<Vec<Group>, CombineError> {
    let mut anchors: Vec<&Ball> = b2.iter().collect();
    anchors.sort_by_key(|b| b.center);
    let mut buckets: Vec<Vec<Ball>> = vec![Vec::new(); anchors.len()];
    for b in b1 {
        let a = anchors
            .iter()
            .position(|a| inst.intersect_in(a, b, within))
            .ok_or(CombineError::NoIntersectingAnchor { center: b.center })?;
        buckets[a].push(b.clone());
    }
    let mut groups = Vec::new();
    for (anchor, mut members) in anchors.into_iter().zip(buckets) {
        if members.is_empty() {
            continue;
        }
        members.sort_by(crate::metric::canonical_order);
        let top = &members[0];
        let r2 = top.radius.clone();
        let i2 = members
            .iter()
            .filter(|m| m.radius == r2)
            .map(|m| m.center)
            .min()
            .unwrap();
        let top = members.iter().find(|m| m.center == i2 && m.radius == r2).unwrap();
        let r3 = members
            .iter()
            .filter(|m| *m != top)
            .map(|m| m.radius.clone())
            .max()
            .unwrap_or_else(Rat::zero);
        let i3 = within
            .iter()
            .copied()
            .find(|&j| inst.contains(anchor, j) && inst.contains(top, j))
            .expect("grouped ball meets its anchor");
        let c = cost(&members, CostPower::Linear);
        let c_sq = cost(&members, CostPower::Squared);
        groups.push(Group {
            anchor: anchor.clone(),
            r1: anchor.radius.clone(),
            r2,
            r3,
            i2,
            i3,
            c,
            c_sq,
            members,
        });
    }
    Ok(groups)
}

/// Smallest ball centered in `centers` containing all of `targets`.
pub fn min_enclosing_ball(
    inst: &Instance,
    centers: &PointSet,
    targets: &PointSet,
) -> Result<Ball, CombineError> {
    if targets.is_empty() {
        return Err(CombineError::EmptyTargets);
    }
    let mut best: Option<Ball> = None;
    for &c in centers {
        let r = targets.iter().map(|&t| inst.d(c, t)).max().unwrap();
        if best.as_ref().is_none_or(|b| r < &b.radius) {
            best = Some(Ball::new(c, r.clone()));
        }
    }
    best.ok_or(CombineError::EmptyTargets)
}

/// Points of `within` covered by the tripled members.
pub fn tripled_union(inst: &Instance, within: &PointSet, members: &[Ball]) -> PointSet {
    let tripled: Vec<Ball> = members.iter().map(|b| b.scaled(3)).collect();
    within
        .iter()
        .copied()
        .filter(|&j| tripled.iter().any(|b| inst.contains(b, j)))
        .collect()
}

/// Case-selected radius bound for a single ball covering a tripled group.
pub fn merge_bound_msr(g: &Group) -> Rat {
    let (r1, r2, r3) = (&g.r1, &g.r2, &g.r3);
    let c1 = r1 + r2 * int(4);
    if r3 * int(3) > *r2 {
        return c1;
    }
    if *r2 >= r1 * frac(6, 5) {
        let a = r2 * int(3);
        let b = r1 * int(2) + r2 + r3 * int(4);
        return a.max(b);
    }
    if *r2 >= r1 * frac(3, 8) {
        let a = r2 * int(4);
        let b = r1 * int(2) + r3 * int(4);
        return a.max(b);
    }
    c1
}

fn record_msr_bounds(g: &Group, ctx: &GuessContext, audit: &mut Audit) -> Rat {
    let bound = merge_bound_msr(g);
    audit.le("merge.msr.table", &bound, &(&g.r1 * frac(11, 8) + &g.c * int(3)));
    audit.le("merge.msr.cap", &bound, &(&ctx.r_m * int(14)));
    bound
}

pub fn merge_ball_msr(
    inst: &Instance,
    ctx: &GuessContext,
    g: &Group,
    audit: &mut Audit,
) -> Result<Ball, CombineError> {
    let targets = tripled_union(inst, &ctx.x_prime, &g.members);
    let ball = min_enclosing_ball(inst, &ctx.x_prime, &targets)?;
    let bound = record_msr_bounds(g, ctx, audit);
    audit.le("merge.msr.radius", &ball.radius, &bound);
    Ok(ball)
}

pub fn merge_cluster_msd(inst: &Instance, ctx: &GuessContext, g: &Group, audit: &mut Audit) -> PointSet {
    let set = tripled_union(inst, &ctx.x_prime, &g.members);
    let d = diameter(inst, &set).expect("tripled members cover their centers");
    audit.le("merge.msd.diameter", &d, &(&g.r1 * int(2) + &g.c * int(6)));
    set
}

pub fn merge_bound_mssr(g: &Group) -> Rat {
    let r2sq = &g.r2 * &g.r2;
    if &g.r2 * int(2) >= g.r1 {
        r2sq * int(9)
    } else {
        &g.r1 * &g.r1 * frac(27, 4) + r2sq * int(9)
    }
}

pub fn merge_ball_mssr(
    inst: &Instance,
    ctx: &GuessContext,
    g: &Group,
    audit: &mut Audit,
) -> Result<Ball, CombineError> {
    let targets = tripled_union(inst, &ctx.x_prime, &g.members);
    let ball = min_enclosing_ball(inst, &ctx.x_prime, &targets)?;
    let bound = merge_bound_mssr(g);
    audit.le("merge.mssr.table", &bound, &(&g.r1 * &g.r1 * frac(27, 4) + &g.c_sq * int(9)));
    let cap = &ctx.r_m * int(14);
    audit.le("merge.mssr.cap", &bound, &(&cap * &cap));
    let rsq = &ball.radius * &ball.radius;
    audit.le("merge.mssr.radius", &rsq, &bound);
    audit.le("merge.mssr.general", &rsq, &(&g.r1 * &g.r1 * frac(27, 4) + &g.r2 * &g.r2 * int(9)));
    Ok(ball)
}

/// One LP-Choose item: keeping the group tripled costs `keep`, merging it
/// costs `merge`, and it occupies `size` slots unless merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceItem {
    pub keep: Rat,
    pub merge: Rat,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergePlan {
    #[serde(serialize_with = "ser_rats")]
    pub z: Vec<Rat>,
    pub merged: Vec<bool>,
    pub fractional: Option<usize>,
    #[serde(with = "crate::rat::serde_rat")]
    pub lp_value: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub value: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub cap: Rat,
}

fn ser_rats<S: serde::Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
    use serde::Serialize;
    v.iter().map(crate::rat::to_string).collect::<Vec<_>>().serialize(s)
}

fn plan_cost(items: &[ChoiceItem], z: &[Rat]) -> Rat {
    items.iter().zip(z).fold(Rat::zero(), |acc, (it, z)| {
        acc + (Rat::one() - z) * &it.keep + z * &it.merge
    })
}

/// Exact optimum of the single-budget LP by the fractional-knapsack rule,
/// then the lone fractional item rounded up.
pub fn choose_groups(items: &[ChoiceItem], k_prime: usize) -> Result<MergePlan, CombineError> {
    let mut z = vec![Rat::zero(); items.len()];
    let mut count: usize = 0;
    for (g, it) in items.iter().enumerate() {
        if it.merge <= it.keep {
            z[g] = Rat::one();
            count += 1;
        } else {
            count += it.size;
        }
    }
    let mut fractional = None;
    if count > k_prime {
        let mut rest: Vec<usize> = (0..items.len())
            .filter(|&g| z[g].is_zero() && items[g].size >= 2)
            .collect();
        let ratio = |g: usize| (&items[g].merge - &items[g].keep) / int(items[g].size as i64 - 1);
        rest.sort_by(|&a, &b| ratio(a).cmp(&ratio(b)).then(a.cmp(&b)));
        for g in rest {
            let save = items[g].size - 1;
            let excess = count - k_prime;
            if save <= excess {
                z[g] = Rat::one();
                count -= save;
            } else {
                z[g] = frac(excess as i64, save as i64);
                fractional = Some(g);
                count = k_prime;
            }
            if count == k_prime {
                break;
            }
        }
        if count > k_prime {
            return Err(CombineError::InfeasibleBudget);
        }
    }
    let lp_value = plan_cost(items, &z);
    let merged: Vec<bool> = z.iter().map(|v| !v.is_zero()).collect();
    let rounded: Vec<Rat> = merged.iter().map(|&m| if m { Rat::one() } else { Rat::zero() }).collect();
    let value = plan_cost(items, &rounded);
    let cap = fractional.map(|g| items[g].merge.clone()).unwrap_or_else(Rat::zero);
    Ok(MergePlan { z, merged, fractional, lp_value, value, cap })
}

/// The same LP in explicit form. Its optimum plus [`choice_offset`]
/// equals the plan's `lp_value`.
pub fn choice_program(items: &[ChoiceItem], k_prime: usize) -> LinearProgram {
    let obj = items.iter().map(|it| &it.merge - &it.keep).collect();
    let mut lp = LinearProgram::new(Sense::Minimize, obj);
    let coeffs = items.iter().map(|it| -int(it.size as i64 - 1)).collect();
    let total: usize = items.iter().map(|it| it.size).sum();
    lp.add_row(coeffs, Relation::Le, int(k_prime as i64) - int(total as i64));
    for g in 0..items.len() {
        lp.set_upper(g, Rat::one());
    }
    lp
}

pub fn choice_offset(items: &[ChoiceItem]) -> Rat {
    items.iter().fold(Rat::zero(), |a, it| a + &it.keep)
}

/// Residual solution on `X′`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Residual {
    Balls(Vec<Ball>),
    Clusters(Vec<PointSet>),
}

impl Residual {
    pub fn len(&self) -> usize {
        match self {
            Residual::Balls(b) => b.len(),
            Residual::Clusters(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A cover object used while assembling a partition.
#[derive(Debug, Clone)]
pub enum Piece {
    Ball(Ball),
    Set(PointSet),
}

/// Sends each point of `points` to the first piece containing it; empty
/// parts are dropped.
pub fn assign(inst: &Instance, pieces: &[Piece], points: &PointSet) -> Vec<PointSet> {
    let mut parts = vec![PointSet::new(); pieces.len()];
    for &j in points {
        let p = pieces
            .iter()
            .position(|p| match p {
                Piece::Ball(b) => inst.contains(b, j),
                Piece::Set(s) => s.contains(&j),
            })
            .expect("pieces cover every point");
        parts[p].insert(j);
    }
    parts.into_iter().filter(|p| !p.is_empty()).collect()
}

pub fn clusters_cost(inst: &Instance, clusters: &[PointSet]) -> Rat {
    clusters
        .iter()
        .fold(Rat::zero(), |a, c| a + diameter(inst, c).expect("nonempty cluster"))
}

pub fn residual_cost(inst: &Instance, objective: Objective, r: &Residual) -> Rat {
    match r {
        Residual::Balls(b) => cost(b, objective.power()),
        Residual::Clusters(c) => clusters_cost(inst, c),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Combined {
    pub solution: Residual,
    #[serde(with = "crate::rat::serde_rat")]
    pub cost: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub tripled_cost: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub merged_cost: Rat,
    pub groups: Vec<Group>,
    pub plan: MergePlan,
    #[serde(with = "crate::rat::serde_rat")]
    pub a: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub b: Rat,
}

/// Convex weights with `a + b = 1` and `a·k₁ + b·k₂ = k′`.
pub fn weights(k1: usize, k2: usize, k_prime: usize) -> (Rat, Rat) {
    if k1 == k2 {
        return (Rat::one(), Rat::zero());
    }
    let d = (k1 - k2) as i64;
    (frac((k_prime - k2) as i64, d), frac((k1 - k_prime) as i64, d))
}

/// Factor `t` with tripled cost `t·rᵅ`, and factor `s` on the anchor term
/// of the merge bound.
fn constants(objective: Objective) -> (Rat, Rat) {
    match objective {
        Objective::Msr => (int(3), frac(11, 8)),
        Objective::Msd => (int(6), int(2)),
        Objective::Mssr => (int(9), frac(27, 4)),
    }
}

pub fn combine_solutions(
    objective: Objective,
    inst: &Instance,
    ctx: &GuessContext,
    bp: &BiPoint,
    audit: &mut Audit,
) -> Result<Combined, CombineError> {
    let w = &ctx.x_prime;
    let kp = ctx.k_prime;
    let power = objective.power();
    let groups = form_groups(inst, w, &bp.b1, &bp.b2)?;
    audit.eq_count(
        "groups.partition",
        groups.iter().map(|g| g.members.len()).sum(),
        bp.b1.len(),
    );

    let tripled_b2: Vec<Ball> = bp.b2.iter().map(|b| b.scaled(3)).collect();
    let cand1 = match objective {
        Objective::Msd => {
            let pieces: Vec<Piece> = tripled_b2.iter().cloned().map(Piece::Ball).collect();
            Residual::Clusters(assign(inst, &pieces, w))
        }
        _ => Residual::Balls(tripled_b2.clone()),
    };

    let mut merged_objects: Vec<Piece> = Vec::new();
    let mut items = Vec::new();
    for g in &groups {
        let (piece, mcost) = match objective {
            Objective::Msr => {
                let b = merge_ball_msr(inst, ctx, g, audit)?;
                let c = b.radius.clone();
                (Piece::Ball(b), c)
            }
            Objective::Mssr => {
                let b = merge_ball_mssr(inst, ctx, g, audit)?;
                let c = &b.radius * &b.radius;
                (Piece::Ball(b), c)
            }
            Objective::Msd => {
                let s = merge_cluster_msd(inst, ctx, g, audit);
                let c = diameter(inst, &s).expect("nonempty");
                (Piece::Set(s), c)
            }
        };
        let (t, _) = constants(objective);
        let keep = t * cost(&g.members, power);
        items.push(ChoiceItem { keep, merge: mcost, size: g.members.len() });
        merged_objects.push(piece);
    }
    let plan = choose_groups(&items, kp)?;

    let mut pieces: Vec<Piece> = Vec::new();
    for (g, group) in groups.iter().enumerate() {
        if plan.merged[g] {
            pieces.push(merged_objects[g].clone());
        } else {
            pieces.extend(group.members.iter().map(|b| Piece::Ball(b.scaled(3))));
        }
    }
    let cand2 = match objective {
        Objective::Msd => Residual::Clusters(assign(inst, &pieces, w)),
        _ => Residual::Balls(
            pieces
                .into_iter()
                .map(|p| match p {
                    Piece::Ball(b) => b,
                    Piece::Set(_) => unreachable!("ball objectives merge into balls"),
                })
                .collect(),
        ),
    };

    let c1 = cost(&bp.b1, power);
    let c2 = cost(&bp.b2, power);
    let (a, b) = weights(bp.k1(), bp.k2(), kp);
    let (t, s) = constants(objective);
    let cost1 = residual_cost(inst, objective, &cand1);
    let cost2 = residual_cost(inst, objective, &cand2);
    audit.le("combine.tripled_cost", &cost1, &(&t * &c2));
    audit.le("combine.plan_lp", &plan.lp_value, &(&t * &c1 + &s * &b * &c2));
    audit.le("combine.plan_rounding", &plan.value, &(&plan.lp_value + &plan.cap));
    audit.le("combine.merged_cost", &cost2, &plan.value);
    let rounded_count: usize = groups
        .iter()
        .enumerate()
        .map(|(g, gr)| if plan.merged[g] { 1 } else { gr.members.len() })
        .sum();
    audit.le_count("combine.plan_count", rounded_count, kp);
    match objective {
        Objective::Msr => {
            audit.le("combine.cap_radius", &plan.cap, &(&ctx.r_m * int(14)));
        }
        Objective::Mssr => {
            let c = &ctx.r_m * int(14);
            audit.le("combine.cap_radius", &plan.cap, &(&c * &c));
        }
        Objective::Msd => {}
    }

    let (solution, best) = if cost2 < cost1 { (cand2, cost2.clone()) } else { (cand1, cost1.clone()) };
    audit.le_count("combine.count", solution.len(), kp);
    audit.holds("combine.covers", residual_covers(inst, w, &solution));
    audit.le("combine.beta", &best, &(beta(objective) * (&a * &c1 + &b * &c2) + &plan.cap));
    Ok(Combined {
        solution,
        cost: best,
        tripled_cost: cost1,
        merged_cost: cost2,
        groups,
        plan,
        a,
        b,
    })
}

pub fn residual_covers(inst: &Instance, within: &PointSet, r: &Residual) -> bool {
    match r {
        Residual::Balls(b) => within.iter().all(|&j| b.iter().any(|b| inst.contains(b, j))),
        Residual::Clusters(c) => {
            let mut seen = PointSet::new();
            for part in c {
                for &j in part {
                    if !seen.insert(j) {
                        return false;
                    }
                }
            }
            &seen == within
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp;
    use crate::metric::{line_metric, validate_instance};

    fn line5() -> Instance {
        validate_instance(line_metric(&[0, 1, 2, 10, 11]), 2).unwrap()
    }

    fn group(r1: Rat, r2: Rat, r3: Rat) -> Group {
        let c = &r2 + &r3;
        let c_sq = &r2 * &r2 + &r3 * &r3;
        Group {
            anchor: Ball::new(0, r1.clone()),
            members: vec![],
            r1,
            r2,
            r3,
            i2: 0,
            i3: 0,
            c,
            c_sq,
        }
    }

    #[test]
    fn group_errors_and_singletons() {
        let inst = line5();
        let all = inst.all_points();
        let a = Ball::new(1, int(1));
        let b = Ball::new(3, int(1));
        assert_eq!(
            form_groups(&inst, &all, &[a.clone(), b.clone()], &[a.clone()]).unwrap_err(),
            CombineError::NoIntersectingAnchor { center: 3 }
        );
        let gs = form_groups(&inst, &all, &[a.clone()], &[a.clone()]).unwrap();
        assert_eq!(gs.len(), 1);
        assert_eq!(gs[0].r3, int(0));
        assert_eq!(gs[0].i2, 1);
        assert_eq!(gs[0].i3, 0);
    }

    #[test]
    fn three_members_share_an_anchor() {
        // Line 0 2 4 6 8 12: anchor (p2, 2) covers p1..p3; members at p1,
        // p3 and p5 all touch it.
        let inst = validate_instance(line_metric(&[0, 2, 4, 6, 8, 12]), 3).unwrap();
        let all = inst.all_points();
        let anchor = Ball::new(2, int(2));
        let b1 = vec![Ball::new(1, int(0)), Ball::new(3, int(2)), Ball::new(5, int(6))];
        let gs = form_groups(&inst, &all, &b1, &[anchor]).unwrap();
        assert_eq!(gs.len(), 1);
        assert_eq!((gs[0].r2.clone(), gs[0].r3.clone()), (int(6), int(2)));
        assert_eq!(gs[0].i2, 5);
        assert_eq!(gs[0].c, int(8));
        assert!(inst.contains(&gs[0].anchor, gs[0].i3));
    }

    #[test]
    fn enclosing_ball_examples() {
        let inst = line5();
        let xp: PointSet = [3, 4].into_iter().collect();
        assert_eq!(min_enclosing_ball(&inst, &xp, &xp).unwrap(), Ball::new(3, int(1)));
        let one: PointSet = [2].into_iter().collect();
        assert_eq!(min_enclosing_ball(&inst, &inst.all_points(), &one).unwrap(), Ball::new(2, int(0)));
        let all = inst.all_points();
        assert_eq!(min_enclosing_ball(&inst, &all, &all).unwrap(), Ball::new(2, int(9)));
        assert_eq!(
            min_enclosing_ball(&inst, &all, &PointSet::new()).unwrap_err(),
            CombineError::EmptyTargets
        );
    }

    #[test]
    fn msr_case_table() {
        assert_eq!(merge_bound_msr(&group(int(2), int(1), int(0))), int(4));
        assert_eq!(merge_bound_msr(&group(int(1), int(1), int(1))), int(5));
        assert_eq!(merge_bound_msr(&group(int(8), int(1), int(0))), int(12));
        // R2 ≥ 6/5·R1 with a small R3: centered at i2.
        assert_eq!(merge_bound_msr(&group(int(1), int(3), frac(1, 2))), int(9));
        for (r1, r2, r3) in [(2, 1, 0), (1, 1, 1), (8, 1, 0), (1, 3, 0)] {
            let g = group(int(r1), int(r2), int(r3));
            assert!(merge_bound_msr(&g) <= &g.r1 * frac(11, 8) + &g.c * int(3));
        }
    }

    #[test]
    fn mssr_case_table() {
        assert_eq!(merge_bound_mssr(&group(int(1), int(1), int(0))), int(9));
        assert_eq!(merge_bound_mssr(&group(int(2), frac(1, 2), int(0))), frac(117, 4));
        assert_eq!(merge_bound_mssr(&group(int(0), int(3), int(0))), int(81));
    }

    #[test]
    fn merged_geometry_within_bounds() {
        // X′ = line 0 1 2 3 4 5 6; anchor (p3, 1); members (p1,1) and (p5,1).
        let inst = validate_instance(line_metric(&[0, 1, 2, 3, 4, 5, 6]), 2).unwrap();
        let ctx = GuessContext {
            guessed: vec![],
            x_prime: inst.all_points(),
            r_m: int(1),
            k_prime: 1,
        };
        let all = inst.all_points();
        let gs = form_groups(&inst, &all, &[Ball::new(1, int(1)), Ball::new(5, int(1))], &[Ball::new(3, int(1))])
            .unwrap();
        let mut audit = Audit::new();
        let b = merge_ball_msr(&inst, &ctx, &gs[0], &mut audit).unwrap();
        assert_eq!(b, Ball::new(3, int(3)));
        let s = merge_cluster_msd(&inst, &ctx, &gs[0], &mut audit);
        assert_eq!(s, all);
        // Diameter 6 sits inside 2r + 4C = 10.
        assert!(diameter(&inst, &s).unwrap() <= int(2) + int(4) * &gs[0].c);
        let sq = merge_ball_mssr(&inst, &ctx, &gs[0], &mut audit).unwrap();
        assert_eq!(sq.radius, int(3));
        assert!(audit.passed(), "{:?}", audit.failures().collect::<Vec<_>>());
    }

    #[test]
    fn msd_singleton_and_zero_groups() {
        let inst = validate_instance(line_metric(&[0, 1, 2, 3, 4, 5, 6]), 2).unwrap();
        let ctx = GuessContext { guessed: vec![], x_prime: inst.all_points(), r_m: int(3), k_prime: 1 };
        let all = inst.all_points();
        let mut audit = Audit::new();
        let gs = form_groups(&inst, &all, &[Ball::new(3, int(1))], &[Ball::new(2, int(1))]).unwrap();
        let s = merge_cluster_msd(&inst, &ctx, &gs[0], &mut audit);
        assert!(diameter(&inst, &s).unwrap() <= int(6));
        let gs = form_groups(&inst, &all, &[Ball::new(2, int(0)), Ball::new(3, int(0))], &[Ball::new(2, int(1))])
            .unwrap();
        let s = merge_cluster_msd(&inst, &ctx, &gs[0], &mut audit);
        assert!(diameter(&inst, &s).unwrap() <= int(2));
        assert!(audit.passed());
    }

    fn item(keep: i64, merge: i64, size: usize) -> ChoiceItem {
        ChoiceItem { keep: int(keep), merge: int(merge), size }
    }

    #[test]
    fn knapsack_example() {
        let items = vec![item(3, 6, 3), item(3, 5, 2)];
        let plan = choose_groups(&items, 3).unwrap();
        assert_eq!(plan.merged, vec![true, false]);
        assert_eq!(plan.value, int(9));
        assert_eq!(plan.fractional, None);
        // Integral assignments: (0,0) → 5 slots, (1,0) → 3, (0,1) → 4, (1,1) → 2.
        let feasible_best = [(true, false, 9), (true, true, 11)]
            .iter()
            .map(|t| t.2)
            .min()
            .unwrap();
        assert_eq!(plan.value, int(feasible_best));
        let lp = choice_program(&items, 3);
        let sol = lp::solve(&lp);
        assert_eq!(sol.value + choice_offset(&items), plan.lp_value);
    }

    #[test]
    fn knapsack_slack_and_dominance() {
        let items = vec![item(3, 6, 3), item(3, 5, 2)];
        let plan = choose_groups(&items, 5).unwrap();
        assert_eq!(plan.merged, vec![false, false]);
        let items = vec![item(6, 2, 3), item(3, 5, 2)];
        let plan = choose_groups(&items, 9).unwrap();
        assert_eq!(plan.merged, vec![true, false]);
    }

    #[test]
    fn knapsack_fractional_round_up() {
        let items = vec![item(3, 6, 4), item(3, 5, 1)];
        // Need to save 1 slot from a group of size 4 → z = 1/3.
        let plan = choose_groups(&items, 4).unwrap();
        assert_eq!(plan.z[0], frac(1, 3));
        assert_eq!(plan.fractional, Some(0));
        assert_eq!(plan.lp_value, int(3) * frac(2, 3) + int(6) * frac(1, 3) + int(3));
        assert_eq!(plan.lp_value, int(7));
        assert_eq!(plan.value, int(9));
        assert_eq!(plan.cap, int(6));
        assert_eq!(choose_groups(&[item(1, 2, 1), item(1, 2, 1)], 1).unwrap_err(), CombineError::InfeasibleBudget);
    }

    #[test]
    fn convex_weights() {
        assert_eq!(weights(3, 1, 2), (frac(1, 2), frac(1, 2)));
        assert_eq!(weights(2, 2, 2), (int(1), int(0)));
        assert_eq!(weights(5, 1, 2), (frac(1, 4), frac(3, 4)));
    }

    #[test]
    fn beta_constants() {
        assert_eq!(beta(Objective::Msr), frac(288, 85));
        assert_eq!(beta(Objective::Msd), frac(72, 11));
        assert!(beta(Objective::Msd) < beta(Objective::Msr) * int(2));
        // 9·d/(1−b) at b = 1/2 with d = 9(1−b)/((27/4)b² − (27/4)b + 9).
        let b = frac(1, 2);
        let d = int(9) * (int(1) - &b) / (frac(27, 4) * &b * &b - frac(27, 4) * &b + int(9));
        assert_eq!(d, frac(8, 13));
        assert_eq!(int(9) * d / (int(1) - b), beta(Objective::Mssr));
    }

    #[test]
    fn line5_combination() {
        use crate::bipoint::find_bipoint;
        let inst = line5();
        let ctx = GuessContext::new(&inst, vec![Ball::new(1, int(1))], 2).unwrap();
        for obj in Objective::ALL {
            let mut audit = Audit::new();
            let bp = find_bipoint(&inst, &ctx, obj.power(), &mut audit).unwrap();
            let c = combine_solutions(obj, &inst, &ctx, &bp, &mut audit).unwrap();
            assert_eq!(c.solution.len(), 1);
            assert!(residual_covers(&inst, &ctx.x_prime, &c.solution));
            assert!(audit.passed(), "{obj}: {:?}", audit.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn equal_sides_coincide() {
        let inst = line5();
        let ctx = GuessContext::new(&inst, vec![Ball::new(1, int(1))], 2).unwrap();
        let b = vec![Ball::new(3, int(1))];
        let bp = BiPoint {
            lambda: int(0),
            b1: b.clone(),
            b2: b.clone(),
            lp_value: int(1),
            exit: crate::bipoint::Exit::ExactBudget,
            steps: vec![],
            bisections: 0,
        };
        let mut audit = Audit::new();
        let c = combine_solutions(Objective::Msr, &inst, &ctx, &bp, &mut audit).unwrap();
        assert_eq!(c.tripled_cost, int(3));
        // Merging the lone group is cheaper than tripling it: (p3, 1) already
        // covers the tripled union {p3, p4}.
        assert_eq!(c.plan.merged, vec![true]);
        assert_eq!(c.solution, Residual::Balls(vec![Ball::new(3, int(1))]));
        assert!(audit.passed());
    }
}
