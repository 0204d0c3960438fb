//! Forward and backward difference operators on the frequency lattice,
//! the binomial difference formula, and x-derivatives of symbols.
//!
//! The single-axis operators are
//!
//! ```text
//! Delta_j  sigma(xi) = sigma(xi + e_j) - sigma(xi)
//! Delta'_j sigma(xi) = sigma(xi) - sigma(xi - e_j)
//! ```
//!
//! composed recursively for multi-indices. On tabulated symbols the
//! valid box shrinks by one layer per application; the result records
//! the shrunk box.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::fft_all_axes;

use super::{binomial, LatticeSymbol, SymbolData, SymbolHandle, SymbolTable};

/// Ceiling on `|alpha|` for difference requests; protects the recursive
/// handle path from runaway closure nesting.
pub const MAX_DIFFERENCE_ORDER: usize = 8;

/// Relative spectral-tail threshold above which x-differentiation of a
/// table is rejected as aliased.
pub const ALIASING_TAIL_THRESHOLD: f64 = 1e-6;

fn check_alpha(a: &LatticeSymbol, alpha: &[usize]) -> Result<()> {
    if alpha.len() != a.dimension() {
        return Err(Error::DimensionMismatch {
            axis: alpha.len().min(a.dimension()),
            left: alpha.len(),
            right: a.dimension(),
        });
    }
    let total: usize = alpha.iter().sum();
    if total > MAX_DIFFERENCE_ORDER {
        return Err(Error::Domain(format!(
            "difference order |alpha| = {total} exceeds the ceiling {MAX_DIFFERENCE_ORDER}"
        )));
    }
    Ok(())
}

/// One forward difference along `axis` applied to a handle.
fn shift_handle(h: SymbolHandle, axis: usize, sign: i64) -> SymbolHandle {
    Arc::new(move |x: &[f64], xi: &[i64]| {
        let mut shifted = xi.to_vec();
        shifted[axis] += sign;
        if sign > 0 {
            h(x, &shifted) - h(x, xi)
        } else {
            h(x, xi) - h(x, &shifted)
        }
    })
}

/// One difference along `axis` applied to a table; the box shrinks on
/// the side the shift points to.
fn diff_table(t: &SymbolTable, axis: usize, sign: i64) -> Result<SymbolTable> {
    let new_domain = if sign > 0 {
        let mut a = vec![0usize; t.domain.dimension()];
        a[axis] = 1;
        t.domain.shrink_hi(&a)
    } else {
        let mut a = vec![0usize; t.domain.dimension()];
        a[axis] = 1;
        t.domain.shrink_lo(&a)
    };
    if new_domain.is_empty() {
        return Err(Error::Boundary { axis });
    }
    let old_len = t.domain.len();
    let new_len = new_domain.len();
    let nodes = t.grid.len();
    let mut values = vec![Complex64::new(0.0, 0.0); nodes * new_len];
    for x_flat in 0..nodes {
        for f in 0..new_len {
            let xi = new_domain.freq(f);
            let mut shifted = xi.clone();
            shifted[axis] += sign;
            let here = t.domain.flat_index(&xi).expect("inside parent box");
            let there = t.domain.flat_index(&shifted).expect("inside parent box");
            let v = if sign > 0 {
                t.values[x_flat * old_len + there] - t.values[x_flat * old_len + here]
            } else {
                t.values[x_flat * old_len + here] - t.values[x_flat * old_len + there]
            };
            values[x_flat * new_len + f] = v;
        }
    }
    Ok(SymbolTable {
        grid: t.grid,
        domain: new_domain,
        values,
    })
}

fn difference(a: &LatticeSymbol, alpha: &[usize], sign: i64) -> Result<LatticeSymbol> {
    check_alpha(a, alpha)?;
    let direction = if sign > 0 { "forward" } else { "backward" };
    let mut out = a.clone();
    for (axis, &count) in alpha.iter().enumerate() {
        for _ in 0..count {
            out = match out.data() {
                SymbolData::Handle(h) => {
                    let mut next = LatticeSymbol::from_parts(
                        format!("{}_{}d{}", out.name(), direction, axis),
                        out.dimension(),
                        out.declared_order() - 1.0,
                        SymbolData::Handle(shift_handle(h.clone(), axis, sign)),
                    );
                    // differences commute with d_x, so the analytic
                    // x-derivative family shifts the same way
                    if let Some(xd) = out.x_derivative_handle() {
                        let xd = xd.clone();
                        next = next.with_x_derivative(move |x, xi, beta| {
                            let mut shifted = xi.to_vec();
                            shifted[axis] += sign;
                            if sign > 0 {
                                xd(x, &shifted, beta) - xd(x, xi, beta)
                            } else {
                                xd(x, xi, beta) - xd(x, &shifted, beta)
                            }
                        });
                    }
                    if let Some(modes) = out.x_modes() {
                        let shifted_modes = modes
                            .iter()
                            .map(|(eta, g)| {
                                let g = g.clone();
                                let h: super::FreqHandle = Arc::new(move |xi: &[i64]| {
                                    let mut s = xi.to_vec();
                                    s[axis] += sign;
                                    if sign > 0 {
                                        g(&s) - g(xi)
                                    } else {
                                        g(xi) - g(&s)
                                    }
                                });
                                (eta.clone(), h)
                            })
                            .collect();
                        next = next.with_x_modes(shifted_modes);
                    }
                    next
                }
                SymbolData::Table(t) => LatticeSymbol::from_parts(
                    format!("{}_{}d{}", out.name(), direction, axis),
                    out.dimension(),
                    out.declared_order() - 1.0,
                    SymbolData::Table(diff_table(t, axis, sign)?),
                ),
            };
        }
    }
    Ok(out)
}

/// `Delta_xi^alpha a`, by recursive application of the forward operator.
pub fn forward_difference(a: &LatticeSymbol, alpha: &[usize]) -> Result<LatticeSymbol> {
    difference(a, alpha, 1)
}

/// `Delta'_xi^alpha a`, by recursive application of the backward operator.
pub fn backward_difference(a: &LatticeSymbol, alpha: &[usize]) -> Result<LatticeSymbol> {
    difference(a, alpha, -1)
}

/// `d_x^beta a` using the analytic handle when present, otherwise
/// spectral differentiation of a tabulated symbol.
///
/// Handle symbols without an analytic derivative must be tabulated
/// first (the x-resolution is then explicit).
pub fn x_derivative(a: &LatticeSymbol, beta: &[usize]) -> Result<LatticeSymbol> {
    if beta.len() != a.dimension() {
        return Err(Error::DimensionMismatch {
            axis: beta.len().min(a.dimension()),
            left: beta.len(),
            right: a.dimension(),
        });
    }
    if beta.iter().all(|&b| b == 0) {
        return Ok(a.clone());
    }
    if let Some(xd) = a.x_derivative_handle() {
        let xd_eval = xd.clone();
        let xd_next = xd.clone();
        let beta_owned = beta.to_vec();
        let beta_next = beta.to_vec();
        let mut out = LatticeSymbol::from_parts(
            format!("{}_dx{:?}", a.name(), beta),
            a.dimension(),
            a.declared_order(),
            SymbolData::Handle(Arc::new(move |x: &[f64], xi: &[i64]| {
                xd_eval(x, xi, &beta_owned)
            })),
        )
        .with_x_derivative(move |x, xi, extra| {
            let combined: Vec<usize> = beta_next
                .iter()
                .zip(extra.iter())
                .map(|(&b, &e)| b + e)
                .collect();
            xd_next(x, xi, &combined)
        });
        if let Some(modes) = a.x_modes() {
            let factor_modes = modes
                .iter()
                .map(|(eta, g)| {
                    // d_x^beta exp(2 pi i x.eta) = (2 pi i eta)^beta * (...)
                    let mut factor = Complex64::new(1.0, 0.0);
                    for (j, &b) in beta.iter().enumerate() {
                        factor *= Complex64::new(0.0, TAU * eta[j] as f64).powu(b as u32);
                    }
                    let g = g.clone();
                    let h: super::FreqHandle = Arc::new(move |xi: &[i64]| factor * g(xi));
                    (eta.clone(), h)
                })
                .collect();
            out = out.with_x_modes(factor_modes);
        }
        return Ok(out);
    }
    match a.data() {
        SymbolData::Handle(_) => Err(Error::Domain(format!(
            "symbol '{}' has no analytic x-derivative; tabulate it on a grid first",
            a.name()
        ))),
        SymbolData::Table(t) => {
            let table = spectral_x_derivative(t, beta, a.name())?;
            Ok(LatticeSymbol::from_parts(
                format!("{}_dx{:?}", a.name(), beta),
                a.dimension(),
                a.declared_order(),
                SymbolData::Table(table),
            ))
        }
    }
}

/// Spectral differentiation in x for each frequency column of a table.
/// Rejects under-resolved data via the Nyquist-band tail mass.
fn spectral_x_derivative(t: &SymbolTable, beta: &[usize], name: &str) -> Result<SymbolTable> {
    let n = t.grid.points_per_axis();
    let dim = t.grid.dimension();
    let nodes = t.grid.len();
    let dlen = t.domain.len();

    // per-axis derivative factors by DFT bin; the Nyquist bin gets
    // factor zero (its sign is ambiguous for odd orders)
    let mut factors: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for &b in beta {
        let mut f = vec![Complex64::new(1.0, 0.0); n];
        for (bin, slot) in f.iter_mut().enumerate() {
            let eta = if bin <= n / 2 - 1 {
                bin as i64
            } else if bin == n / 2 {
                0
            } else {
                bin as i64 - n as i64
            };
            let nyquist = bin == n / 2;
            *slot = if b == 0 {
                Complex64::new(1.0, 0.0)
            } else if nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, TAU * eta as f64).powu(b as u32)
            };
        }
        factors.push(f);
    }

    let mut values = vec![Complex64::new(0.0, 0.0); nodes * dlen];
    let mut tail_num = 0.0f64;
    let mut tail_den = 0.0f64;
    let mut column = vec![Complex64::new(0.0, 0.0); nodes];
    for xi_flat in 0..dlen {
        for (x_flat, slot) in column.iter_mut().enumerate() {
            *slot = t.values[x_flat * dlen + xi_flat];
        }
        fft_all_axes(&mut column, dim, n, -1);
        // tail mass in the Nyquist-adjacent band, relative to the total
        for (flat, v) in column.iter().enumerate() {
            let mut rem = flat;
            let mut in_tail = false;
            for _ in 0..dim {
                let bin = rem % n;
                rem /= n;
                let eta = if bin <= n / 2 { bin } else { n - bin };
                if eta >= n / 2 - 1 {
                    in_tail = true;
                }
            }
            let mass = v.norm_sqr();
            tail_den += mass;
            if in_tail {
                tail_num += mass;
            }
        }
        for (flat, v) in column.iter_mut().enumerate() {
            let mut rem = flat;
            let mut factor = Complex64::new(1.0, 0.0);
            for axis in (0..dim).rev() {
                let bin = rem % n;
                rem /= n;
                factor *= factors[axis][bin];
            }
            *v *= factor;
        }
        fft_all_axes(&mut column, dim, n, 1);
        let scale = 1.0 / nodes as f64;
        for x_flat in 0..nodes {
            values[x_flat * dlen + xi_flat] = column[x_flat] * scale;
        }
    }
    if tail_den > 0.0 {
        let tail = tail_num / tail_den;
        if tail > ALIASING_TAIL_THRESHOLD {
            return Err(Error::Accuracy {
                context: format!("spectral x-derivative of '{name}'"),
                defect: tail,
                threshold: ALIASING_TAIL_THRESHOLD,
            });
        }
    }
    Ok(SymbolTable {
        grid: t.grid,
        domain: t.domain.clone(),
        values,
    })
}

/// `Delta_xi^alpha d_x^beta a` through the binomial identity
///
/// ```text
/// sum_{gamma <= alpha} (-1)^{|alpha - gamma|} C(alpha, gamma) d_x^beta a(x, xi + gamma),
/// ```
///
/// which must agree pointwise with `forward_difference(x_derivative(a))`.
pub fn difference_by_formula(
    a: &LatticeSymbol,
    alpha: &[usize],
    beta: &[usize],
) -> Result<LatticeSymbol> {
    check_alpha(a, alpha)?;
    let b = x_derivative(a, beta)?;

    // enumerate gamma <= alpha with sign and binomial weight
    let mut terms: Vec<(Vec<i64>, f64)> = vec![(vec![0i64; alpha.len()], 1.0)];
    for (axis, &amax) in alpha.iter().enumerate() {
        let mut next = Vec::with_capacity(terms.len() * (amax + 1));
        for (gamma, w) in &terms {
            for g in 0..=amax {
                let mut gg = gamma.clone();
                gg[axis] = g as i64;
                let sign = if (amax - g) % 2 == 0 { 1.0 } else { -1.0 };
                next.push((gg, w * sign * binomial(amax, g)));
            }
        }
        terms = next;
    }

    match b.data() {
        SymbolData::Handle(h) => {
            let h = h.clone();
            let terms = terms.clone();
            Ok(LatticeSymbol::from_parts(
                format!("{}_formula", a.name()),
                a.dimension(),
                a.declared_order() - alpha.iter().sum::<usize>() as f64,
                SymbolData::Handle(Arc::new(move |x: &[f64], xi: &[i64]| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (gamma, w) in &terms {
                        let shifted: Vec<i64> =
                            xi.iter().zip(gamma.iter()).map(|(&a, &b)| a + b).collect();
                        acc += h(x, &shifted) * *w;
                    }
                    acc
                })),
            ))
        }
        SymbolData::Table(t) => {
            let new_domain = t.domain.shrink_hi(alpha);
            if new_domain.is_empty() {
                let axis = alpha
                    .iter()
                    .enumerate()
                    .find(|(j, &a)| t.domain.side(*j) <= a)
                    .map(|(j, _)| j)
                    .unwrap_or(0);
                return Err(Error::Boundary { axis });
            }
            let old_len = t.domain.len();
            let new_len = new_domain.len();
            let nodes = t.grid.len();
            let mut values = vec![Complex64::new(0.0, 0.0); nodes * new_len];
            for x_flat in 0..nodes {
                for f in 0..new_len {
                    let xi = new_domain.freq(f);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (gamma, w) in &terms {
                        let shifted: Vec<i64> =
                            xi.iter().zip(gamma.iter()).map(|(&a, &b)| a + b).collect();
                        let idx = t.domain.flat_index(&shifted).expect("inside parent box");
                        acc += t.values[x_flat * old_len + idx] * *w;
                    }
                    values[x_flat * new_len + f] = acc;
                }
            }
            Ok(LatticeSymbol::from_parts(
                format!("{}_formula", a.name()),
                a.dimension(),
                a.declared_order() - alpha.iter().sum::<usize>() as f64,
                SymbolData::Table(SymbolTable {
                    grid: t.grid,
                    domain: new_domain,
                    values,
                }),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{bracket, FrequencyCube, TorusGrid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn xi_squared() -> LatticeSymbol {
        LatticeSymbol::from_freq_fn("xi2", 1, 2.0, |xi| Complex64::new((xi[0] * xi[0]) as f64, 0.0))
    }

    #[test]
    fn forward_difference_of_quadratic() {
        let d = forward_difference(&xi_squared(), &[1]).unwrap();
        for xi in -5..=5 {
            let v = d.eval(&[0.0], &[xi]);
            assert!((v.re - (2 * xi + 1) as f64).abs() < 1e-12);
        }
        let d2 = forward_difference(&xi_squared(), &[2]).unwrap();
        for xi in -5..=5 {
            assert!((d2.eval(&[0.0], &[xi]).re - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn backward_difference_of_quadratic() {
        let d = backward_difference(&xi_squared(), &[1]).unwrap();
        for xi in -5..=5 {
            assert!((d.eval(&[0.0], &[xi]).re - (2 * xi - 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn differences_annihilate_constants() {
        let c = LatticeSymbol::from_freq_fn("const", 1, 0.0, |_| Complex64::new(3.5, -1.0));
        for alpha in 1..=3usize {
            let d = forward_difference(&c, &[alpha]).unwrap();
            assert_eq!(d.eval(&[0.0], &[2]), Complex64::new(0.0, 0.0));
            let db = backward_difference(&c, &[alpha]).unwrap();
            assert_eq!(db.eval(&[0.0], &[2]), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn difference_of_bracket_at_origin() {
        let s = LatticeSymbol::from_freq_fn("bracket", 1, 1.0, |xi| {
            Complex64::new(bracket(xi), 0.0)
        });
        let d = forward_difference(&s, &[1]).unwrap();
        let v = d.eval(&[0.0], &[0]);
        assert!((v.re - (2.0_f64.sqrt() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn forward_and_backward_commute_on_tables() {
        let grid = TorusGrid::new(1, 8).unwrap();
        let cube = FrequencyCube::new(1, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let vals: Vec<Complex64> = (0..grid.len() * cube.len())
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let t = LatticeSymbol::from_table("rand", 0.0, grid, cube, vals).unwrap();
        let fb = backward_difference(&forward_difference(&t, &[1]).unwrap(), &[1]).unwrap();
        let bf = forward_difference(&backward_difference(&t, &[1]).unwrap(), &[1]).unwrap();
        for xi in -4..=4 {
            let d = (fb.eval(&[0.5], &[xi]) - bf.eval(&[0.5], &[xi])).norm();
            assert!(d < 1e-13, "commutator {d} at xi={xi}");
        }
    }

    #[test]
    fn boundary_shrink_errors_name_the_axis() {
        let grid = TorusGrid::new(2, 4).unwrap();
        let cube = FrequencyCube::new(2, 1).unwrap();
        let vals = vec![Complex64::new(1.0, 0.0); grid.len() * cube.len()];
        let t = LatticeSymbol::from_table("tiny", 0.0, grid, cube, vals).unwrap();
        let err = forward_difference(&t, &[0, 3]).unwrap_err();
        match err {
            Error::Boundary { axis } => assert_eq!(axis, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn formula_matches_recursive_route_on_handles() {
        let d1 = difference_by_formula(&xi_squared(), &[1], &[0]).unwrap();
        for xi in -4..=4 {
            assert!((d1.eval(&[0.1], &[xi]).re - (2 * xi + 1) as f64).abs() < 1e-12);
        }
        let d2 = difference_by_formula(&xi_squared(), &[2], &[0]).unwrap();
        for xi in -4..=4 {
            assert!((d2.eval(&[0.1], &[xi]).re - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn formula_matches_recursive_route_on_random_tables() {
        let grid = TorusGrid::new(1, 16).unwrap();
        let cube = FrequencyCube::new(1, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // x-band-limited random table so the spectral derivative is clean
        let coeffs: Vec<(i64, Complex64, Complex64)> = (-3..=3)
            .map(|m| {
                (
                    m,
                    Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
                    Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
                )
            })
            .collect();
        let handle = move |x: &[f64], xi: &[i64]| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, c0, c1) in &coeffs {
                let mode = Complex64::from_polar(1.0, TAU * *m as f64 * x[0]);
                acc += mode * (c0 + c1 * Complex64::new(xi[0] as f64 / 7.0, 0.0));
            }
            acc
        };
        let sym = LatticeSymbol::from_handle("rand-smooth", 1, 0.0, handle)
            .tabulate(grid, cube)
            .unwrap();

        let alpha = [2usize];
        let beta = [1usize];
        let via_formula = difference_by_formula(&sym, &alpha, &beta).unwrap();
        let via_recursion =
            forward_difference(&x_derivative(&sym, &beta).unwrap(), &alpha).unwrap();
        let mut worst = 0.0f64;
        for x_flat in 0..grid.len() {
            let x = grid.node(x_flat);
            for xi in -4..=4i64 {
                let d = (via_formula.eval(&x, &[xi]) - via_recursion.eval(&x, &[xi])).norm();
                worst = worst.max(d);
            }
        }
        assert!(worst < 1e-12, "max discrepancy {worst}");
    }

    #[test]
    fn x_derivative_spectral_on_cosine() {
        let grid = TorusGrid::new(1, 32).unwrap();
        let cube = FrequencyCube::new(1, 3).unwrap();
        let sym = LatticeSymbol::from_handle("cos", 1, 0.0, |x, _| {
            Complex64::new((TAU * x[0]).cos(), 0.0)
        })
        .tabulate(grid, cube)
        .unwrap();
        let d2 = x_derivative(&sym, &[2]).unwrap();
        let mut worst = 0.0f64;
        for x_flat in 0..grid.len() {
            let x = grid.node(x_flat);
            let expect = -TAU * TAU * (TAU * x[0]).cos();
            worst = worst.max((d2.eval(&x, &[1]).re - expect).abs());
        }
        assert!(worst < 1e-10, "max error {worst}");
    }

    #[test]
    fn x_derivative_uses_analytic_handle_and_composes() {
        let sym = LatticeSymbol::from_handle("mode", 1, 0.0, |x, xi| {
            Complex64::from_polar(1.0, TAU * x[0]) * Complex64::new(1.0 / bracket(xi), 0.0)
        })
        .with_x_derivative(|x, xi, beta| {
            Complex64::new(0.0, TAU).powu(beta[0] as u32)
                * Complex64::from_polar(1.0, TAU * x[0])
                * Complex64::new(1.0 / bracket(xi), 0.0)
        });
        let d = x_derivative(&sym, &[1]).unwrap();
        let v = d.eval(&[0.3], &[2]);
        let expect = Complex64::new(0.0, TAU)
            * Complex64::from_polar(1.0, TAU * 0.3)
            * Complex64::new(1.0 / bracket(&[2]), 0.0);
        assert!((v - expect).norm() < 1e-12);
        // second derivative via composition
        let dd = x_derivative(&d, &[1]).unwrap();
        let v2 = dd.eval(&[0.3], &[2]);
        assert!((v2 - expect * Complex64::new(0.0, TAU)).norm() < 1e-12);
    }

    #[test]
    fn x_independent_symbols_have_zero_derivative() {
        let s = LatticeSymbol::from_freq_fn("flat", 1, 0.0, |xi| {
            Complex64::new(bracket(xi), 0.0)
        });
        let d = x_derivative(&s, &[1]).unwrap();
        assert_eq!(d.eval(&[0.7], &[3]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn aliased_table_is_rejected() {
        let grid = TorusGrid::new(1, 8).unwrap();
        let cube = FrequencyCube::new(1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let vals: Vec<Complex64> = (0..grid.len() * cube.len())
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, 0.0))
            .collect();
        let t = LatticeSymbol::from_table("noise", 0.0, grid, cube, vals).unwrap();
        let err = x_derivative(&t, &[1]);
        assert!(matches!(err, Err(Error::Accuracy { .. })));
    }
}
