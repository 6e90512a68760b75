use num_complex::Complex64;
use ptzeros::qes::qes_spectrum;

type C = Complex64;

// forward recursion: rows m = 0..J-3 define c_{m+2} from lower ones
fn forward(a: f64, b: f64, j: u32, e: f64, c0: C, c1: C) -> Vec<C> {
    let n = j as usize;
    let i = C::i();
    let mut c = vec![C::ZERO; n];
    c[0] = c0;
    if n > 1 { c[1] = c1; }
    for m in 0..n.saturating_sub(2) {
        let mf = m as f64;
        let cm1 = if m >= 1 { c[m - 1] } else { C::ZERO };
        // (m+2)(m+1)c_{m+2} = 2ib(m+1)c_{m+1} - (E-a-b^2-2am)c_m - 2i(J-m)c_{m-1}
        c[m + 2] = (2.0 * i * b * (mf + 1.0) * c[m + 1]
            - (e - a - b * b - 2.0 * a * mf) * c[m]
            - 2.0 * i * (j as f64 - mf) * cm1)
            / ((mf + 2.0) * (mf + 1.0));
    }
    c
}

fn row_resid(a: f64, b: f64, j: u32, e: f64, c: &[C]) -> (f64, usize) {
    let i = C::i();
    let get = |m: i64| if m < 0 || m >= c.len() as i64 { C::ZERO } else { c[m as usize] };
    let mut worst = (0.0f64, 0usize);
    for m in 0..c.len() as i64 {
        let mf = m as f64;
        let t1 = (mf + 2.0) * (mf + 1.0) * get(m + 2);
        let t2 = -2.0 * i * b * (mf + 1.0) * get(m + 1);
        let t3 = (e - a - b * b - 2.0 * a * mf) * get(m);
        let t4 = 2.0 * i * (j as f64 - mf) * get(m - 1);
        let row = (t1 + t2 + t3 + t4).norm();
        let scale = (t1.norm() + t2.norm() + t3.norm() + t4.norm()).max(1e-300);
        let rel = row / scale;
        if rel > worst.0 { worst = (rel, m as usize); }
    }
    worst
}

fn main() {
    let (a, b, j) = (10.0, 2.0, 21u32);
    let spec = qes_spectrum(a, b, j).unwrap();
    let i = C::i();
    for (idx, s) in spec.states.iter().enumerate() {
        // forward shooting: c affine in c1: run with c1=0 and c1=1,
        // impose row J-2 (with c_J = 0): alpha + beta*c1 = 0.
        let ca = forward(a, b, j, s.e, C::ONE, C::ZERO);
        let cb = forward(a, b, j, s.e, C::ZERO, C::ONE);
        let n = j as usize;
        let mf = (n - 2) as f64;
        let rowj2 = |c: &[C]| -> C {
            -2.0 * i * b * (mf + 1.0) * c[n - 1]
                + (s.e - a - b * b - 2.0 * a * mf) * c[n - 2]
                + 2.0 * i * (j as f64 - mf) * c[n - 3]
        };
        let (ga, gb) = (rowj2(&ca), rowj2(&cb));
        let c1 = -ga / gb;
        let cf: Vec<C> = ca.iter().zip(&cb).map(|(p, q)| p + q * c1).collect();
        let (fwd_rel, fwd_m) = row_resid(a, b, j, s.e, &cf);
        let (bwd_rel, bwd_m) = row_resid(a, b, j, s.e, &s.coeffs);
        println!(
            "k={:2} E={:9.4}  bwd={:9.2e}@{:2}  fwd={:9.2e}@{:2}",
            idx + 1, s.e, bwd_rel, bwd_m, fwd_rel, fwd_m
        );
    }
}
