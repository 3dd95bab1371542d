//! Special functions needed by the correlation and displacement code.

/// Modified Bessel function I_n(z) of integer order by its power series.
///
/// Intended for moderate arguments (|z| < 8); the terms are all positive for
/// z > 0 so there is no cancellation.
pub fn bessel_i(n: i32, z: f64) -> f64 {
    let n = n.unsigned_abs() as usize;
    if z == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * z;
    // (z/2)^n / n!
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() || k > 500 {
            break;
        }
    }
    sum
}

/// Table of ln k! for k = 0..len.
#[derive(Clone, Debug)]
pub struct LnFactorials(Vec<f64>);

impl LnFactorials {
    pub fn new(len: usize) -> Self {
        let mut v = Vec::with_capacity(len + 1);
        let mut acc = 0.0f64;
        v.push(0.0);
        for k in 1..=len {
            acc += (k as f64).ln();
            v.push(acc);
        }
        LnFactorials(v)
    }

    pub fn get(&self, k: usize) -> f64 {
        self.0[k]
    }
}

/// Generalized Laguerre polynomial L_n^{(k)}(x) by its three-term recurrence.
pub fn laguerre(n: usize, k: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + k - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + k - x) * cur - (jf + k) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}
