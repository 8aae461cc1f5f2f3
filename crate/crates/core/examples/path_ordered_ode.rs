//! The adaptive integrator on its own: a path-ordered exponential of a
//! non-commuting 2×2 family, compared against a fine product of exponentials.

use qheis::linalg::{c, re, C64};
use qheis::ode::{self, OdeOptions};

fn generator(t: f64) -> [[C64; 2]; 2] {
    [[c(0.0, t), re(1.0)], [re(-t * t), c(0.0, -1.0)]]
}

fn main() -> qheis::Result<()> {
    // columns of U(t) with U' = A(t) U, U(0) = 1, stacked as one vector
    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        let a = generator(t);
        for col in 0..2 {
            for i in 0..2 {
                dy[2 * col + i] = a[i][0] * y[2 * col] + a[i][1] * y[2 * col + 1];
            }
        }
    };
    let y0 = [re(1.0), re(0.0), re(0.0), re(1.0)];
    let (ys, stats) = ode::integrate(rhs, 0.0, &y0, &[0.5, 1.0], &OdeOptions::default())?;
    println!("U(1) = {:?}", ys[1]);
    println!("steps accepted {}, rejected {}, evaluations {}", stats.accepted, stats.rejected, stats.evaluations);

    // midpoint product with many small slices (second order) as a sanity check
    let slices = 20_000;
    let h = 1.0 / slices as f64;
    let mut u = [[re(1.0), re(0.0)], [re(0.0), re(1.0)]];
    for k in 0..slices {
        let a = generator((k as f64 + 0.5) * h);
        // exp(hA) ≈ 1 + hA + h²A²/2
        let mut step = [[re(0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let a2: C64 = (0..2).map(|m| a[i][m] * a[m][j]).sum();
                step[i][j] = if i == j { re(1.0) } else { re(0.0) } + a[i][j] * h + a2 * (h * h / 2.0);
            }
        }
        let mut next = [[re(0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                next[i][j] = (0..2).map(|m| step[i][m] * u[m][j]).sum();
            }
        }
        u = next;
    }
    let diff = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| (u[i][j] - ys[1][2 * j + i]).norm())
        .fold(0.0, f64::max);
    println!("difference from product formula: {diff:.1e}");
    Ok(())
}
