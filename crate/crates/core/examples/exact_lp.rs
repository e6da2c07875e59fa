//! Exact LP feasibility with witnesses and Farkas certificates.

use simplicial::lp::{lp_feasible, lp_optimize, Direction, Feasibility, LPProblem, Optimum};
use simplicial::{int, RVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // x + y = 1, x, y >= 0, x >= 2: a simplex cut off by a half-plane.
    let mut p = LPProblem::nonnegative(2);
    p.add_eq(RVector::from_ints(&[1, 1]), int(1));
    p.add_ge(RVector::from_ints(&[1, 0]), int(2));
    match lp_feasible(&p)? {
        Feasibility::Feasible(x) => println!("feasible at {x}"),
        Feasibility::Infeasible(cert) => {
            let (row, rhs) = cert.combination(&p);
            println!("infeasible: combined row {row} <= {rhs} (verified: {})", cert.verify(&p));
        }
    }

    // max x + 2y over the same simplex without the cut.
    let mut q = LPProblem::nonnegative(2);
    q.add_eq(RVector::from_ints(&[1, 1]), int(1));
    if let Optimum::Optimal { point, value } = lp_optimize(&q, &RVector::from_ints(&[1, 2]), Direction::Maximize)? {
        println!("max x + 2y = {value} at {point}");
    }
    Ok(())
}
