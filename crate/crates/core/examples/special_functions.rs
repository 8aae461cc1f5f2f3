//! q-Gamma functions, Gauss 2F1 and its connection formula.

use qheis::linalg::{c, re};
use qheis::qspecial;

fn main() -> qheis::Result<()> {
    for q in [0.5, 0.9] {
        for a in [re(0.5), re(3.0), c(1.3, 0.4)] {
            let g = qspecial::qgamma(a, q)?;
            let g1 = qspecial::qgamma(a + 1.0, q)?;
            let rel = (g1 - qspecial::qnum_c(a, re(q)) * g).norm() / g1.norm();
            println!("Gamma_q({a}; q={q}) = {g:.12}  recurrence {rel:.1e}");
        }
    }
    println!("Gamma_q(5; q=2) = {:.6}  (= 1·3·7·15)", qspecial::qgamma(re(5.0), 2.0)?);
    println!("reflection residual at 0.3+0.7i: {:.1e}", qspecial::reflection_residual(c(0.3, 0.7))?);

    let f = qspecial::gauss_2f1(re(1.0), re(1.0), re(2.0), re(0.5))?;
    println!("F(1,1;2;1/2) = {:.16} vs 2 ln 2 = {:.16}", f.re, 2.0 * 2f64.ln());
    let (a, b, cc) = (c(0.0, 0.1), c(0.0, -0.1), c(1.0, 0.2));
    println!(
        "connection residual {:.1e}, ODE residual {:.1e}",
        qspecial::connection_residual(a, b, cc, re(0.5))?,
        qspecial::hyper_ode_residual(a, b, cc, re(0.3))?
    );
    for n in 0..5 {
        println!("y_sl(n={n}, q=1.3) = {:.12}", qspecial::y_sln(n, 1.3));
    }
    Ok(())
}
