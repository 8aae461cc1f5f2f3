//! Braid matrices for sl(N) and so(N): Yang–Baxter, minimal polynomials,
//! spectral projectors and the q → 1 limit.

use qheis::braid;
use qheis::linalg;
use qheis::{Family, Statistics};

fn main() -> qheis::Result<()> {
    let q = 1.3;
    for (family, n) in [(Family::SlN, 2), (Family::SlN, 3), (Family::SoN, 3), (Family::SoN, 4)] {
        let r = braid::rhat(family, n, q)?;
        let rel = braid::build_relations(family, n, q, Statistics::Bose)?;
        let (complete, orth) = rel.projector_residuals();
        println!(
            "{family:?}({n}) q={q}: YB {:.1e}, char. poly {:.1e}, projectors {:.1e}/{:.1e}, ranks {:?}",
            braid::yang_baxter_residual(&r, n),
            braid::characteristic_residual(family, n, q)?,
            complete,
            orth,
            rel.projector_ranks(),
        );
        let near = braid::rhat(family, n, 1.0 + 1e-8)?;
        println!("    |R(1+1e-8) - P| = {:.1e}", linalg::max_abs(&(near - linalg::flip(n))));
    }
    println!("so(3) metric twist residual: {:.1e}", braid::metric_twist_residual(3, q)?);
    Ok(())
}
