//! Reconciling the sl(2) Weyl map with an earlier realization through an
//! inner automorphism α.

use qheis::deform;
use qheis::linalg;
use qheis::{DeformParams, FockSpace, Sign, Statistics};

fn main() -> qheis::Result<()> {
    let space = FockSpace::new(2, Statistics::Bose, 6)?;
    for q in [0.7, 1.3] {
        let params = DeformParams::from_q(q, Sign::Plus)?;
        let gens = deform::sl2_bose_map(&space, params)?;
        let alpha = deform::oleg_alpha_sl2(&space, params)?;
        let (conj, info) = deform::inner_automorphism(&gens, &alpha)?;
        let prior = deform::prior_work_generators(&space, params)?;
        let err = conj
            .a
            .iter()
            .zip(&prior.a)
            .chain(conj.aplus.iter().zip(&prior.aplus))
            .map(|(x, y)| linalg::max_abs(&(x.matrix() - y.matrix())))
            .fold(0.0, f64::max);
        println!(
            "q={q}: entrywise {err:.1e}, cond(alpha) {:.2}, earlier map *-compatible? residual {:.2}",
            info.condition_number,
            deform::hermiticity_check(&prior)?
        );
    }
    Ok(())
}
