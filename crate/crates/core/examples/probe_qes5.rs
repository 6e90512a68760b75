use num_complex::Complex64;
use ptzeros::poly;
use ptzeros::qes::qes_spectrum;

fn main() {
    let spec = qes_spectrum(10.0, 2.0, 21).unwrap();
    let s = &spec.states[0]; // k=1, expect 20 axis zeros
    // Coefficients of Q(y) = P(iy): c_n i^n. Check whether they are real
    // up to a common phase (PT symmetry of P).
    let q: Vec<Complex64> = s
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, &c)| c * Complex64::i().powu(n as u32))
        .collect();
    let phase = q
        .iter()
        .cloned()
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .unwrap();
    let phase = phase / phase.norm();
    let mut max_im_ratio = 0.0f64;
    for c in &q {
        let v = c / phase;
        if v.norm() > 1e-18 {
            max_im_ratio = max_im_ratio.max(v.im.abs() / v.norm());
        }
    }
    println!("max |Im|/|c| of phased axis-polynomial coefficients: {max_im_ratio:.3e}");
    // Sign pattern of the real axis-polynomial between 6.5 and 14.5.
    let g = |y: f64| -> f64 {
        let mut acc = Complex64::ZERO;
        for c in q.iter().rev() {
            acc = acc * y + c / phase;
        }
        acc.re
    };
    let mut prev = g(6.5);
    let mut crossings = Vec::new();
    let mut y = 6.5;
    while y < 14.5 {
        y += 0.0005;
        let v = g(y);
        if prev.signum() != v.signum() {
            crossings.push(y);
        }
        prev = v;
    }
    println!("axis sign changes: {} at {crossings:.4?}", crossings.len());
    // Also: roots of the phased real-coefficient polynomial in y.
    let roots = poly::roots(&q.iter().map(|c| c / phase).collect::<Vec<_>>());
    let mut on_axis: Vec<f64> = roots
        .iter()
        .filter(|r| r.im.abs() < 1e-4 * r.re.abs() && r.re > 0.0)
        .map(|r| r.re)
        .collect();
    on_axis.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("real positive roots of Q: {} -> {on_axis:.4?}", on_axis.len());
}
