/// Outcome of a preconditioned conjugate-gradient run.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CgOutcome {
    pub iterations: usize,
    pub residual_inf: f64,
}

/// Jacobi-preconditioned CG for a symmetric positive definite operator.
///
/// Stops once `max|r| <= max(abs_tol, forcing * max|r0|)`, or `|r|_2` has dropped by `rel_tol`
/// from its initial value, or after `max_iter` steps.
pub(crate) fn pcg(
    apply: impl Fn(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    abs_tol: f64,
    forcing: f64,
    rel_tol: f64,
    max_iter: usize,
) -> CgOutcome {
    let n = b.len();
    let mut r = vec![0.0; n];
    apply(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, &a| m.max(a.abs()));
    let rel_target = rel_tol * r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let abs_tol = abs_tol.max(forcing * inf(&r));
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut it = 0;
    loop {
        let rinf = inf(&r);
        let r2 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rinf <= abs_tol || r2 <= rel_target || it >= max_iter || rz == 0.0 {
            return CgOutcome { iterations: it, residual_inf: rinf };
        }
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return CgOutcome { iterations: it, residual_inf: rinf };
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        it += 1;
    }
}
