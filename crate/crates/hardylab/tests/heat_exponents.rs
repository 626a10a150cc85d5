//! Measured t-exponents of the boundary-strip heat mass on the square (high
//! eigenvalue multiplicity) and on a generic rectangle whose squared side
//! ratio is irrational (multiplicity-free spectrum). Both land well above the
//! chain bound's t^{-(1+1/(2α))-N/2} = t^{-5/2} scaling; which degeneracy
//! mechanism drives the bound's slack is left open, so only sanity ranges are
//! asserted and both values are reported side by side.

use std::sync::Arc;

use hardylab::geometry::{build_domain, distance_to_boundary, DomainSpec, Generator};
use hardylab::kernels::verify_ker2;
use hardylab::operator::{OperatorSpec, PotentialSpec, SigmaSpec};
use hardylab::spectral::{eigensolve, SolveCount};

#[test]
fn square_vs_generic_rectangle_t_exponent() {
    let h = 1.0 / 64.0;
    let golden = 0.5 * (5.0f64.sqrt() - 1.0); // ly² / lx² irrational
    let mut measured = Vec::new();
    for (label, gen) in [
        ("square", Generator::Rectangle { lx: 1.0, ly: 1.0 }),
        (
            "rectangle",
            Generator::Rectangle {
                lx: 1.0,
                ly: golden,
            },
        ),
    ] {
        let dom = Arc::new(
            build_domain(
                &DomainSpec {
                    generator: gen,
                    resolution: h,
                },
                20_000,
            )
            .unwrap(),
        );
        let op = OperatorSpec::WeightedLaplacian {
            sigma: SigmaSpec::One,
            potential: PotentialSpec::Zero,
        }
        .assemble(&dom, None, None)
        .unwrap();
        let eig = eigensolve(&op, SolveCount::All).unwrap();
        let dist = distance_to_boundary(&dom);
        let eps = 2.5 * h;
        let t_list = [0.005, 0.0079, 0.0126, 0.02];
        let out = verify_ker2(&eig, &dist, &[eps], &t_list, 8.0, 1.0, 0.0, 2, 1.0, 0.0).unwrap();
        for rep in &out.reports {
            assert!(rep.pass, "{label} chain ratio {}", rep.ratio);
        }
        let (_, fit) = &out.t_fits[0];
        // the desk-scale window mixes the free-boundary -3/2 scaling with
        // strip saturation and the onset of spectral-gap decay; the slope
        // stays well above the bound's -5/2 either way
        assert!(
            (-2.2..=-1.1).contains(&fit.exponent),
            "{label} t-exponent {}",
            fit.exponent
        );
        measured.push((label, fit.exponent));
    }
    println!(
        "strip heat-mass t-exponents (bound scales as -5/2): {} {:.4}, {} {:.4}",
        measured[0].0, measured[0].1, measured[1].0, measured[1].1
    );
}
