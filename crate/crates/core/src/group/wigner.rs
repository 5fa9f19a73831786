//! Wigner little-d matrices and the SU(2) fundamental representation.
//!
//! Rows and columns of a spin-`l` matrix are indexed by `i = 0..2l+1` with
//! magnetic number `m = l - i`, so index 0 is the highest weight.

use num_complex::Complex64;

/// Natural logs of `k!` for `k = 0..=n`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// `d^J_{M'M}(beta)` for `J = max(|M|, |M'|)`, where the Wigner sum has a single term.
fn seed(two_mp: i64, two_m: i64, cos_half: f64, sin_half: f64, lnf: &[f64]) -> f64 {
    let two_j = two_m.abs().max(two_mp.abs());
    // all of these are integers because 2J, 2M, 2M' share parity
    let j_p_mp = ((two_j + two_mp) / 2) as usize;
    let j_m_mp = ((two_j - two_mp) / 2) as usize;
    let j_p_m = ((two_j + two_m) / 2) as usize;
    let j_m_m = ((two_j - two_m) / 2) as usize;
    let mp_m_m = (two_mp - two_m) / 2;
    let s = 0i64.max(-mp_m_m) as usize;
    debug_assert!(s <= j_p_m.min(j_m_mp));
    let ln_mag = 0.5 * (lnf[j_p_mp] + lnf[j_m_mp] + lnf[j_p_m] + lnf[j_m_m])
        - lnf[j_p_m - s]
        - lnf[s]
        - lnf[(mp_m_m + s as i64) as usize]
        - lnf[j_m_mp - s];
    let sign = if (mp_m_m + s as i64).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    // exponent of cos(beta/2) is 2J + M - M' - 2s
    let cos_pow = (two_j - mp_m_m - 2 * s as i64) as i32;
    let sin_pow = (mp_m_m + 2 * s as i64) as i32;
    sign * ln_mag.exp() * cos_half.powi(cos_pow) * sin_half.powi(sin_pow)
}

/// Runs the three-term recurrence in `J` for a fixed `(M', M)` pair, returning
/// `d^J_{M'M}(beta)` for `2J = J0, J0 + 2, ..., two_j_max` with `J0 = max(|M|, |M'|)`.
fn recur_pair(
    two_mp: i64,
    two_m: i64,
    two_j_max: i64,
    cos_b: f64,
    cos_half: f64,
    sin_half: f64,
    lnf: &[f64],
) -> Vec<f64> {
    let two_j0 = two_m.abs().max(two_mp.abs());
    if two_j0 > two_j_max {
        return Vec::new();
    }
    let m = two_m as f64 / 2.0;
    let mp = two_mp as f64 / 2.0;
    let mut out = Vec::with_capacity(((two_j_max - two_j0) / 2 + 1) as usize);
    let mut prev = 0.0;
    let mut cur = seed(two_mp, two_m, cos_half, sin_half, lnf);
    out.push(cur);
    let mut two_j = two_j0;
    while two_j + 2 <= two_j_max {
        let j = two_j as f64 / 2.0;
        let j1 = j + 1.0;
        let norm = ((j1 * j1 - m * m) * (j1 * j1 - mp * mp)).sqrt();
        let shift = if two_j == 0 { 0.0 } else { m * mp / (j * j1) };
        let a = j1 * (2.0 * j + 1.0) / norm;
        let b = if two_j == 0 {
            0.0
        } else {
            j1 * ((j * j - m * m) * (j * j - mp * mp)).max(0.0).sqrt() / (j * norm)
        };
        let next = a * (cos_b - shift) * cur - b * prev;
        prev = cur;
        cur = next;
        out.push(cur);
        two_j += 2;
    }
    out
}

/// Offset of the spin-`two_l/2` block inside a packed table of all spins `0..=K`.
pub(crate) fn packed_offset(two_l: u32) -> usize {
    let t = two_l as usize;
    t * (t + 1) * (2 * t + 1) / 6
}

/// Little-d matrix `d^l(beta)` as a row-major `(2l+1) x (2l+1)` array.
pub fn little_d(two_l: u32, beta: f64) -> Vec<f64> {
    let d = two_l as usize + 1;
    let lnf = ln_factorials(2 * two_l as usize + 2);
    let (sin_half, cos_half) = (beta / 2.0).sin_cos();
    let cos_b = beta.cos();
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        let two_mp = two_l as i64 - 2 * i as i64;
        for j in 0..d {
            let two_m = two_l as i64 - 2 * j as i64;
            let vals = recur_pair(two_mp, two_m, two_l as i64, cos_b, cos_half, sin_half, &lnf);
            out[i * d + j] = *vals.last().expect("pair within spin");
        }
    }
    out
}

/// Packed little-d matrices for every spin `0 <= two_l <= two_l_max` at one angle.
///
/// Block `two_l` starts at [`packed_offset`] and is row-major of size `(two_l + 1)^2`.
pub fn little_d_table(two_l_max: u32, beta: f64) -> Vec<f64> {
    let lnf = ln_factorials(2 * two_l_max as usize + 2);
    let (sin_half, cos_half) = (beta / 2.0).sin_cos();
    let cos_b = beta.cos();
    let k = two_l_max as i64;
    let mut table = vec![0.0; packed_offset(two_l_max + 1)];
    for two_mp in -k..=k {
        for two_m in -k..=k {
            if (two_mp - two_m).rem_euclid(2) != 0 {
                continue;
            }
            let two_j0 = two_m.abs().max(two_mp.abs());
            let vals = recur_pair(two_mp, two_m, k, cos_b, cos_half, sin_half, &lnf);
            for (step, v) in vals.into_iter().enumerate() {
                let two_l = two_j0 + 2 * step as i64;
                let d = two_l + 1;
                let i = (two_l - two_mp) / 2;
                let j = (two_l - two_m) / 2;
                table[packed_offset(two_l as u32) + (i * d + j) as usize] = v;
            }
        }
    }
    table
}

/// The spin-1/2 matrix `e^{-i alpha Jz} e^{-i beta Jy} e^{-i gamma Jz}`.
pub fn su2_matrix(alpha: f64, beta: f64, gamma: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (beta / 2.0).sin_cos();
    let sum = Complex64::from_polar(1.0, -(alpha + gamma) / 2.0);
    let diff = Complex64::from_polar(1.0, (alpha - gamma) / 2.0);
    [
        [sum * c, -diff.conj() * s],
        [diff * s, sum.conj() * c],
    ]
}

pub(crate) fn su2_mul(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Wraps `x` into `[0, period)`.
pub(crate) fn wrap(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Euler angles `(alpha, beta, gamma)` in `[0,2pi) x [0,pi] x [0,4pi)` of an SU(2) matrix.
pub fn euler_from_su2(u: &[[Complex64; 2]; 2]) -> (f64, f64, f64) {
    use std::f64::consts::PI;
    let a = u[0][0];
    let b = u[1][0];
    let beta = 2.0 * b.norm().atan2(a.norm());
    let (alpha, gamma) = if b.norm() == 0.0 {
        (0.0, -2.0 * a.arg())
    } else if a.norm() == 0.0 {
        (0.0, -2.0 * b.arg())
    } else {
        let half_sum = -a.arg();
        let half_diff = b.arg();
        (half_sum + half_diff, half_sum - half_diff)
    };
    let turns = (alpha / (2.0 * PI)).floor();
    let mut alpha = alpha - 2.0 * PI * turns;
    let gamma = wrap(gamma - 2.0 * PI * turns, 4.0 * PI);
    if !(0.0..2.0 * PI).contains(&alpha) {
        alpha = wrap(alpha, 2.0 * PI);
    }
    (alpha, beta, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spin_half_matches_rotation_form() {
        let beta = 0.7;
        let d = little_d(1, beta);
        let (s, c) = (beta / 2.0).sin_cos();
        assert_abs_diff_eq!(d[0], c, epsilon = 1e-15);
        assert_abs_diff_eq!(d[1], -s, epsilon = 1e-15);
        assert_abs_diff_eq!(d[2], s, epsilon = 1e-15);
        assert_abs_diff_eq!(d[3], c, epsilon = 1e-15);
    }

    #[test]
    fn spin_one_closed_forms() {
        let beta: f64 = 1.1;
        let d = little_d(2, beta);
        let cb = beta.cos();
        let sb = beta.sin();
        // rows m' = 1, 0, -1
        assert_abs_diff_eq!(d[0], (1.0 + cb) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d[1], -sb / 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(d[4], cb, epsilon = 1e-14);
        assert_abs_diff_eq!(d[8], (1.0 + cb) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d[2], (1.0 - cb) / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn table_agrees_with_single_spin() {
        let beta = 2.3;
        let table = little_d_table(9, beta);
        for two_l in 0..=9u32 {
            let single = little_d(two_l, beta);
            let off = packed_offset(two_l);
            for (k, v) in single.iter().enumerate() {
                assert_abs_diff_eq!(table[off + k], *v, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn euler_round_trip() {
        let (a, b, g) = (5.9, 0.4, 11.0);
        let u = su2_matrix(a, b, g);
        let (a2, b2, g2) = euler_from_su2(&u);
        assert_abs_diff_eq!(a, a2, epsilon = 1e-12);
        assert_abs_diff_eq!(b, b2, epsilon = 1e-12);
        assert_abs_diff_eq!(g, g2, epsilon = 1e-12);
    }

    #[test]
    fn wrap_never_returns_period() {
        let p = 2.0 * std::f64::consts::PI;
        assert_eq!(wrap(-1e-18, p), 0.0);
        assert!(wrap(-1e-10, p) < p);
    }
}
