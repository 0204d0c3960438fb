//! Difference calculus on the frequency lattice: forward and backward
//! differences, the binomial difference formula, class seminorms and
//! empirical order estimation.
//!
//! ```bash
//! cargo run -p fso-lab --example difference_calculus
//! ```

use num_complex::Complex64;

use fso_lab::grid::bracket;
use fso_lab::symbol::{
    backward_difference, difference_by_formula, estimate_order, forward_difference, seminorm,
    LatticeSymbol, SymbolClassSpec,
};
use fso_lab::FrequencyCube;

fn main() -> fso_lab::Result<()> {
    // polynomial sanity: Delta(xi^2) = 2 xi + 1
    let quad = LatticeSymbol::from_freq_fn("xi^2", 1, 2.0, |xi| {
        Complex64::new((xi[0] * xi[0]) as f64, 0.0)
    });
    let d = forward_difference(&quad, &[1])?;
    let db = backward_difference(&quad, &[1])?;
    println!(
        "Delta(xi^2) at 3: {} (expect 7); backward: {} (expect 5)",
        d.eval(&[0.0], &[3]).re,
        db.eval(&[0.0], &[3]).re
    );

    // the binomial formula agrees with the recursive route
    let formula = difference_by_formula(&quad, &[2], &[0])?;
    println!(
        "second difference via binomial formula: {} (expect 2)",
        formula.eval(&[0.0], &[0]).re
    );

    // seminorms of <xi>^m with rho = 1 witness class membership:
    // stable under cube doubling
    let m = -0.5;
    let sym = LatticeSymbol::from_freq_fn("bracket^-1/2", 1, m, move |xi| {
        Complex64::new(bracket(xi).powf(m), 0.0)
    });
    let spec = SymbolClassSpec::new(m, 1.0, 0.0, 3, 0)?;
    for cutoff in [128i64, 256] {
        let cube = FrequencyCube::new(1, cutoff)?;
        print!("Xi = {cutoff}:");
        for alpha in 0..=3usize {
            print!("  C_{alpha} = {:.6}", seminorm(&sym, &[alpha], &[0], &spec, &cube)?);
        }
        println!();
    }

    // dyadic-shell regression recovers the order
    let cube = FrequencyCube::new(1, 256)?;
    for m in [-1.0, -0.5, 0.0, 1.0] {
        let s = LatticeSymbol::from_freq_fn("powers", 1, m, move |xi| {
            Complex64::new(bracket(xi).powf(m), 0.0)
        });
        println!("declared order {m:>4}: estimated {:.4}", estimate_order(&s, &cube)?);
    }
    Ok(())
}
