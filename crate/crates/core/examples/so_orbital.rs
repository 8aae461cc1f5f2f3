//! The so(N) orbital operator l, its spectrum on Fock space, and the
//! shift operators α_± that move l by one unit.

use qheis::soshift;
use qheis::{FockSpace, Sign, Statistics};

fn sci(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.1e}")).collect::<Vec<_>>().join(" ")
}

fn main() -> qheis::Result<()> {
    for n in [3, 4] {
        let space = FockSpace::new(n, Statistics::Bose, 6)?;
        let orb = soshift::build_orbital(&space)?;
        println!("so({n}), cutoff 6, dim {}", space.dim());
        for g in orb.spectral_grid.iter().take(8) {
            println!("    n={} l={:<4} multiplicity {}", g.n, g.l, g.multiplicity);
        }
        let inv = orb.invariant_residuals()?;
        println!("    invariants {}", sci(&inv));
        println!("    commutator formulas {:.1e}", orb.commutator_formula_residual()?);
        for sign in [Sign::Plus, Sign::Minus] {
            let ops = soshift::shift_operators(&orb, sign)?;
            println!(
                "    alpha_{}: ordering {:.1e}, shift relation {:.1e}",
                sign.symbol(),
                ops.ordering_residual,
                soshift::eige_residual(&orb, &ops)?
            );
        }
        for q in [0.7, 1.3] {
            let r = soshift::verify_y_son(&orb, q)?;
            println!("    q={q}: functional equations {} at {:?} points", sci(&r.residuals), r.evaluated);
        }
    }
    Ok(())
}
