//! Moving symbols between the lattice and the continuum: the smooth
//! cardinal kernel, extension, and restriction.
//!
//! ```bash
//! cargo run -p fso-lab --example extend_restrict
//! ```

use num_complex::Complex64;

use fso_lab::grid::bracket;
use fso_lab::symbol::{extend_symbol, restrict_symbol, CardinalKernel, LatticeSymbol};
use fso_lab::FrequencyCube;

fn main() -> fso_lab::Result<()> {
    let kernel = CardinalKernel;
    println!(
        "kernel: theta(0) = {}, theta(1/2) = {}, theta(1) = {}",
        kernel.eval(0.0),
        kernel.eval(0.5),
        kernel.eval(1.0)
    );
    let sum: f64 = (-4..=4).map(|k| kernel.eval(0.3 - k as f64)).sum();
    println!("partition of unity at 0.3: {sum:.15}");

    let cube = FrequencyCube::new(1, 8)?;
    let sym = LatticeSymbol::from_freq_fn("decay", 1, -1.0, |xi| {
        Complex64::new(1.0 / bracket(xi), 0.0)
    });
    let ext = extend_symbol(&sym, &cube)?;

    // cardinal interpolation: lattice values reproduce exactly
    for xi in [-8i64, -3, 0, 5] {
        let lattice = sym.eval(&[0.0], &[xi]).re;
        let continuum = ext.eval(&[0.0], &[xi as f64]).re;
        println!("xi = {xi:>3}: lattice {lattice:.10}, extension {continuum:.10}");
    }

    // between lattice points the extension blends smoothly
    for xi in [0.25, 0.5, 2.5] {
        println!("xi = {xi:>5}: extension {:.6}", ext.eval(&[0.0], &[xi]).re);
    }
    println!(
        "linear-reproduction defect bound of the kernel: {:.4}",
        ext.kernel().linear_defect_bound()
    );

    // restriction after extension is the identity on the lattice
    let back = restrict_symbol(ext.symbol(), &cube);
    let worst = (-8..=8)
        .map(|xi| (back.eval(&[0.0], &[xi]) - sym.eval(&[0.0], &[xi])).norm())
        .fold(0.0f64, f64::max);
    println!("restrict(extend(a)) identity defect: {worst:.2e}");
    Ok(())
}
