use num_complex::Complex64;

// re-derive row0 locally to scan it
fn row0(a: f64, b: f64, j: u32, e: Complex64) -> (Complex64, Complex64) {
    let n = j as usize;
    let i = Complex64::i();
    let mut c = vec![Complex64::ZERO; n + 2];
    let mut dc = vec![Complex64::ZERO; n + 2];
    c[n - 1] = Complex64::ONE;
    for m in (1..n).rev() {
        let mf = m as f64;
        let diag = e - a - b * b - 2.0 * a * mf;
        let num = (mf + 2.0) * (mf + 1.0) * c[m + 2] - 2.0 * i * b * (mf + 1.0) * c[m + 1] + diag * c[m];
        let dnum = (mf + 2.0) * (mf + 1.0) * dc[m + 2] - 2.0 * i * b * (mf + 1.0) * dc[m + 1] + diag * dc[m] + c[m];
        let denom = -2.0 * i * (j as f64 - mf);
        c[m - 1] = num / denom;
        dc[m - 1] = dnum / denom;
    }
    let diag0 = e - a - b * b;
    (2.0 * c[2] - 2.0 * i * b * c[1] + diag0 * c[0],
     2.0 * dc[2] - 2.0 * i * b * dc[1] + diag0 * dc[0] + c[0])
}

fn main() {
    let (a, b, j) = (10.0, 2.0, 21u32);
    // nalgebra top eigenvalue was ~425.2542
    for e in [403.0f64, 403.4688, 424.0, 425.2542, 426.0, 430.0] {
        let (f, df) = row0(a, b, j, Complex64::new(e, 0.0));
        println!("E={e:10.4}  row0={:12.4e}  d={:12.4e}  step={:10.3e}", f.norm(), df.norm(), (f / df).norm());
    }
    // newton from the nalgebra value
    let mut e = Complex64::new(425.2542251869172, 0.0);
    for it in 0..60 {
        let (f, df) = row0(a, b, j, e);
        let step = f / df;
        e -= step;
        if it % 5 == 0 || step.norm() < 1e-13 * e.norm() {
            println!("it={it:2} E={:.12} |f|={:.3e} |step|={:.3e}", e.re, f.norm(), step.norm());
        }
        if step.norm() < 1e-14 * (1.0 + e.norm()) { break; }
    }
}
