//! The coassociator matrix M on C^2 ⊗ C^2 ⊗ Fock from the operator-valued
//! KZ equation, and the cross-relation identities it intertwines.

use qheis::kz::{self, Dressing, KzOperatorSystem};
use qheis::{FockSpace, Sign, Statistics};

fn main() -> qheis::Result<()> {
    let space = FockSpace::new(2, Statistics::Bose, 4)?;
    for h in [0.1, 0.05] {
        let sys = KzOperatorSystem::from_h(&space, h)?;
        let coas = kz::coassociator_matrix(&sys, kz::DEFAULT_OPERATOR_EPS)?;
        let m = coas.m.matrix();
        println!(
            "h={h}: dim {}, |M-1| {:.4e}, eps-halving {:.1e}, M aa = aa {:.1e}, invariance {:.1e}",
            sys.dim(),
            kz::deviation_from_identity(m),
            coas.error_estimate,
            kz::trivial_action_residual(&sys, m),
            kz::invariance_residual(&sys, m)?
        );
        for sign in [Sign::Plus, Sign::Minus] {
            let r = kz::figata_check(&sys, m, sign, Dressing::Unit)?;
            println!("    sign {}: {:.1e} {:.1e} {:.1e}", sign.symbol(), r.figata1, r.figata2, r.figata3);
        }
    }
    Ok(())
}
