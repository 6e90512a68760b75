// scratch diagnostic
use ptzeros::ode::Tolerances;
use ptzeros::potentials::Potential;
use ptzeros::shooting::{mismatch, WedgePair};

fn main() {
    let pot = Potential::monomial(2).unwrap();
    for radius in [6.5f64, 8.0, 9.0, 9.6, 11.0, 13.0] {
        let wedges = WedgePair::new(2, radius).unwrap();
        for rel in [1e-12f64, 1e-13, 4e-14] {
            let tol = Tolerances { rel, abs: rel * 1e-2, max_step: 0.5, min_step: 1e-13 };
            let w9 = mismatch(&pot, 9.0, &wedges, &tol).unwrap().w;
            let dw = (mismatch(&pot, 9.0 + 1e-4, &wedges, &tol).unwrap().w
                - mismatch(&pot, 9.0 - 1e-4, &wedges, &tol).unwrap().w) / 2e-4;
            println!("r={radius:5.1} rel={rel:.0e}  W(9)={w9:+.3e}  dW={dw:+.3e}  dE={:+.3e}", w9 / dw);
        }
    }
}
