use num_complex::Complex64;
use ptzeros::qes::qes_spectrum;

fn main() {
    let spec = qes_spectrum(10.0, 2.0, 21).unwrap();
    for idx in [0usize, 20] {
        let s = &spec.states[idx];
        println!("== k={} E={:.12}", idx + 1, s.e);
        let i = Complex64::i();
        let c = |m: i64| -> Complex64 {
            if m < 0 || m >= s.coeffs.len() as i64 { Complex64::ZERO } else { s.coeffs[m as usize] }
        };
        for m in 0..21i64 {
            let mf = m as f64;
            let t1 = (mf + 2.0) * (mf + 1.0) * c(m + 2);
            let t2 = -2.0 * i * s.b * (mf + 1.0) * c(m + 1);
            let t3 = (s.e - s.a - s.b * s.b - 2.0 * s.a * mf) * c(m);
            let t4 = 2.0 * i * (21.0 - mf) * c(m - 1);
            let row = t1 + t2 + t3 + t4;
            let scale = t1.norm() + t2.norm() + t3.norm() + t4.norm();
            println!("  m={m:2} |c_m|={:9.2e} row={:9.2e} rel={:9.2e}", c(m).norm(), row.norm(), row.norm() / scale.max(1.0));
        }
    }
}
