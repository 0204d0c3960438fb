//! Gaussian-weighted limits and the euclidean/torus pairing sequence.
//!
//! Under the convention `w_delta(x) = exp(-pi delta |x|^2)`, the scaled
//! integrals `eps^{1/2} int w_eps f` converge to the torus integral of
//! a periodic `f`, and pairing a euclidean multiplier against windowed
//! modes recovers the discrete pairing of its periodic restriction.
//!
//! ```bash
//! cargo run --release -p fso-lab --example gaussian_limits
//! ```

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use fso_lab::grid::bracket;
use fso_lab::lab::{gaussian_limit, gaussian_pairing, GaussianPairingConfig, PairingOperator};
use fso_lab::operator::FsoOperator;
use fso_lab::symbol::LatticeSymbol;
use fso_lab::{PeriodicFunction, TorusGrid};

fn main() -> fso_lab::Result<()> {
    let grid = TorusGrid::new(1, 16)?;
    let eps = vec![1e-1, 1e-2, 1e-3];

    // constants integrate to one exactly at every eps
    let one = PeriodicFunction::from_fn(grid, |_| Complex64::new(1.0, 0.0));
    println!("f = 1:        terms {:?}", realparts(&gaussian_limit(&one, &eps)?));

    // oscillation decays like the Gaussian transform
    let wave = PeriodicFunction::from_fn(grid, |x| Complex64::from_polar(1.0, TAU * x[0]));
    println!("f = e^(2pix): terms {:?}", realparts(&gaussian_limit(&wave, &eps)?));

    // 1 + cos converges to its mean
    let bump = PeriodicFunction::from_fn(grid, |x| Complex64::new(1.0 + (TAU * x[0]).cos(), 0.0));
    println!("f = 1 + cos:  terms {:?}", realparts(&gaussian_limit(&bump, &eps)?));

    // pairing: euclidean multiplier against windowed modes vs the
    // discrete pairing of the periodic operator
    let cube = grid.default_cube();
    let lattice = LatticeSymbol::from_freq_fn("bracket-inverse", 1, -1.0, |xi| {
        Complex64::new(1.0 / bracket(xi), 0.0)
    });
    let torus_op = FsoOperator::pseudo_differential(lattice, grid, cube)?;
    let euclid = PairingOperator::Multiplier {
        name: "bracket-inverse".into(),
        sigma: Arc::new(|xi: f64| Complex64::new(1.0 / (1.0 + xi * xi).sqrt(), 0.0)),
    };
    let cfg = GaussianPairingConfig::new(0.5, 0.5, eps, 2, 2)?;
    let out = gaussian_pairing(&euclid, &cfg, &torus_op)?;
    println!("\npairing of <xi>^-1 with P = Q = e^(4 pi i x):");
    for (e, t) in cfg.eps_sequence.iter().zip(&out.terms) {
        println!("  eps = {e:>6}: term {:.10}", t.re);
    }
    println!("  discrete pairing     {:.10}", out.discrete_pairing.re);
    println!("  measured constant    {:.10}", out.measured_constant.re);
    println!("  beta^(-1/2) constant {:.10}", out.claimed_constant);
    Ok(())
}

fn realparts(v: &[Complex64]) -> Vec<f64> {
    v.iter().map(|c| (c.re * 1e12).round() / 1e12).collect()
}
