mod common;

use common::*;
use sumradii::metric::CostPower;
use sumradii::oracle::{opt_ball_cover, opt_kcenter, opt_partition_msd};

#[test]
fn dp_oracles_match_enumeration() {
    for idx in 0..60 {
        let inst = small_instance(idx);
        let k = inst.k();
        for power in [CostPower::Linear, CostPower::Squared] {
            assert_eq!(opt_ball_cover(&inst, k, power).unwrap().value, naive_ball_cover(&inst, k, power), "instance {idx}");
        }
        assert_eq!(opt_partition_msd(&inst, k).unwrap().value, naive_partition(&inst, k), "instance {idx}");
        assert_eq!(opt_kcenter(&inst, &inst.all_points(), k).unwrap(), naive_kcenter(&inst, k), "instance {idx}");
    }
}

#[test]
fn radius_diameter_sandwich() {
    for idx in 0..60 {
        let inst = small_instance(idx);
        let r = opt_ball_cover(&inst, inst.k(), CostPower::Linear).unwrap().value;
        let d = opt_partition_msd(&inst, inst.k()).unwrap().value;
        assert!(r <= d && d <= &r * sumradii::rat::int(2), "instance {idx}");
    }
}
