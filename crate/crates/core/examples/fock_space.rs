//! Truncated Fock spaces: bosonic cutoff artifacts and Jordan–Wigner fermions.

use qheis::linalg;
use qheis::{FockSpace, Statistics};

fn main() -> qheis::Result<()> {
    let bose = FockSpace::new(2, Statistics::Bose, 4)?;
    println!("bose: N = {}, cutoff = {}, dim = {}", bose.modes(), bose.cutoff(), bose.dim());

    let a0 = bose.annihilator(0)?;
    let ap0 = bose.creator(0)?;
    let comm = a0.commutator(&ap0);
    // [a, a⁺] = 1 fails only on the top shell
    let raw = linalg::max_abs(&(comm.matrix() - bose.identity().matrix()));
    let p = bose.safe_projector(1)?;
    let safe = linalg::max_abs(&(comm.project(&p).matrix() - p.matrix()));
    println!("[a0, a0+] - 1: full space {raw:.3e}, safe subspace {safe:.3e}");

    let fermi = FockSpace::new(3, Statistics::Fermi, 3)?;
    let a = fermi.annihilators();
    let ap = fermi.creators();
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { linalg::identity(fermi.dim()) } else { linalg::zeros(fermi.dim(), fermi.dim()) };
            worst = worst.max(linalg::max_abs(&(a[i].anticommutator(&ap[j]).matrix() - want)));
            worst = worst.max(linalg::max_abs(a[i].anticommutator(&a[j]).matrix()));
        }
    }
    println!("fermi: dim = {}, CAR residual = {worst:.1e}", fermi.dim());
    for k in 0..fermi.dim() {
        println!("  |{:?}>  n = {}", fermi.state(k), fermi.total(k));
    }
    Ok(())
}
