//! The reduced KZ system: integrate from x ≈ 1 to x ≈ 0, compare with the
//! hypergeometric closed forms and extract the limits at 0.

use qheis::kz::{self, KzScalarParams};
use qheis::linalg::{c, re};
use qheis::Sign;

fn main() -> qheis::Result<()> {
    for (n, k) in [(2.0, re(0.05)), (3.0, c(0.0, 0.1))] {
        for sign in [Sign::Plus, Sign::Minus] {
            let p = KzScalarParams::new(n, k, sign)?;
            let a = kz::analyze_scalar(&p)?;
            println!(
                "n={n} K={k} {}: |traj - closed| {:.1e}, combination {:.1e}, steps {}",
                sign.symbol(),
                a.closed_form_deviation,
                a.combination,
                a.steps
            );
            for i in 0..3 {
                println!(
                    "    l{} closed {:.12}  trajectory {:.9}  expected {:.12}",
                    i + 1,
                    a.limits.closed_form[i],
                    a.limits.trajectory[i],
                    a.expected[i]
                );
            }
        }
    }
    Ok(())
}
