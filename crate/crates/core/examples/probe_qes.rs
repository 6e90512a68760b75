use ptzeros::qes::{classify_zeros, default_axis_tol, polynomial_zeros, qes_spectrum};

fn main() {
    let spec = qes_spectrum(10.0, 2.0, 21).unwrap();
    println!("{} real states, {} complex", spec.states.len(), spec.complex_energies.len());
    for (idx, s) in spec.states.iter().enumerate() {
        let k = idx + 1;
        let rr = s.recursion_residual();
        let z = polynomial_zeros(&s.coeffs).unwrap();
        let cls = classify_zeros(&z.zeros, default_axis_tol(&z.zeros));
        let max_res: f64 = s_o(&z.residuals);
        println!(
            "k={k:2} E={:10.5} rec={rr:.2e} zeros={} irrel={} (want {}) ill={} maxres={max_res:.2e}",
            s.e, z.zeros.len(), cls.irrelevant.len(), 21 - k, z.ill_conditioned.len(),
        );
        if k == 1 {
            for zz in &z.zeros { println!("    {zz}"); }
        }
    }
}
fn s_o(v: &[f64]) -> f64 { v.iter().cloned().fold(0.0, f64::max) }
