//! Only one mode ordering of the sl(3) candidate map satisfies the relations.

use qheis::braid::build_relations;
use qheis::deform::{self, Ordering};
use qheis::verify;
use qheis::{DeformParams, FockSpace, Family, Sign, Statistics};

fn main() -> qheis::Result<()> {
    let q = 1.3;
    let space = FockSpace::new(3, Statistics::Bose, 5)?;
    let rel = build_relations(Family::SlN, 3, q, Statistics::Bose)?;
    for ordering in [Ordering::Above, Ordering::Below] {
        let gens = deform::slN_candidate_map(&space, DeformParams::from_q(q, Sign::Plus)?, ordering)?;
        let res = verify::dcr_residuals(&gens, &rel)?;
        println!("{ordering}: worst residual {:.3e} (dim {})", res.worst_accepted(), space.dim());
    }
    Ok(())
}
