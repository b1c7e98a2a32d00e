//! A random-metric group on which the squared-radius case bound
//! `2*R2 >= R1 => r^2 <= 9*R2^2` is violated while the combined guarantee
//! still holds.

use sumradii::metric::{validate_instance, Ball, Objective};
use sumradii::bipoint::GuessContext;
use sumradii::rat::int;
use sumradii::solver::solve_residual;

const M: [[i64; 11]; 11] = [
    [0, 4, 4, 4, 8, 7, 8, 12, 10, 8, 7],
    [4, 0, 6, 2, 8, 7, 5, 9, 8, 6, 8],
    [4, 6, 0, 4, 4, 4, 7, 10, 8, 4, 3],
    [4, 2, 4, 0, 8, 6, 7, 11, 6, 8, 6],
    [8, 8, 4, 8, 0, 2, 11, 14, 4, 2, 7],
    [7, 7, 4, 6, 2, 0, 11, 14, 6, 4, 7],
    [8, 5, 7, 7, 11, 11, 0, 4, 13, 10, 8],
    [12, 9, 10, 11, 14, 14, 4, 0, 15, 12, 7],
    [10, 8, 8, 6, 4, 6, 13, 15, 0, 6, 8],
    [8, 6, 4, 8, 2, 4, 10, 12, 6, 0, 7],
    [7, 8, 3, 6, 7, 7, 8, 7, 8, 7, 0],
];

#[test]
fn case_bound_fails_general_bound_holds() {
    let raw = M.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
    let inst = validate_instance(raw, 4).unwrap();
    let ctx = GuessContext::new(&inst, vec![Ball::new(7, int(9))], 4).unwrap();
    let run = solve_residual(&inst, Objective::Mssr, &ctx).unwrap();
    let c = run.combined.as_ref().unwrap();
    let g = c.groups.iter().find(|g| g.members.len() > 1).unwrap();
    assert_eq!((g.r1.clone(), g.r2.clone(), g.r3.clone()), (int(4), int(2), int(0)));

    let failed: Vec<_> = run.audit.failures().map(|c| (c.name.as_str(), c.lhs.as_str(), c.rhs.as_str())).collect();
    assert_eq!(failed, vec![("merge.mssr.radius", "49", "36")]);
    assert_eq!(run.audit.tally("merge.mssr.general"), (2, 0));
    assert_eq!(run.audit.tally("combine.beta"), (1, 0));
}
