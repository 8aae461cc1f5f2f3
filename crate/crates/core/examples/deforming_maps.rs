//! The sl(2) deforming maps on Fock space, judged by the relation oracle.

use qheis::braid::build_relations;
use qheis::deform;
use qheis::verify;
use qheis::{DeformParams, FockSpace, Family, Sign, Statistics};

fn main() -> qheis::Result<()> {
    for q in [0.7, 1.3] {
        let space = FockSpace::new(2, Statistics::Bose, 8)?;
        let params = DeformParams::from_q(q, Sign::Plus)?;
        let gens = deform::sl2_bose_map(&space, params)?;
        let rel = build_relations(Family::SlN, 2, q, Statistics::Bose)?;
        let res = verify::dcr_residuals(&gens, &rel)?;
        println!("Weyl q={q}: quadratic {:.1e}/{:.1e}", res.annihilators.spectral, res.creators.spectral);
        for cand in &res.cross {
            println!("    cross candidate {:>8}: {:.3e}", cand.name, cand.norms.spectral);
        }
        let (r1, r2) = verify::ncr_residuals(&gens)?;
        println!(
            "    N_h relations {r1:.1e}, {r2:.1e}; spectrum {:.1e}; hermiticity {:.1e}",
            verify::nh_spectrum_residual(&gens)?,
            deform::hermiticity_check(&gens)?
        );

        let fspace = FockSpace::new(2, Statistics::Fermi, 2)?;
        let fgens = deform::sl2_fermi_map(&fspace, DeformParams::from_q(q, Sign::Minus)?)?;
        let frel = build_relations(Family::SlN, 2, q, Statistics::Fermi)?;
        let fres = verify::dcr_residuals(&fgens, &frel)?;
        println!(
            "Clifford q={q}: worst accepted {:.1e} via {}",
            fres.worst_accepted(),
            fres.best_cross().name
        );
    }
    Ok(())
}
