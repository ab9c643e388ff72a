//! Dense polynomial arithmetic over the prime field `F_q`, `q < 2^31`.
//!
//! Coefficient vectors are little-endian (`v[i]` multiplies `x^i`). These
//! routines back the deterministic field construction: irreducibility
//! testing, the lexicographic irreducible scan, and minimal polynomials.

use num::bigint::BigUint;
use num::Zero;

pub fn addm(a: u64, b: u64, q: u64) -> u64 {
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

pub fn subm(a: u64, b: u64, q: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + q - b
    }
}

pub fn mulm(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub fn powm(mut a: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1u64;
    a %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulm(acc, a, q);
        }
        a = mulm(a, a, q);
        e >>= 1;
    }
    acc
}

pub fn invm(a: u64, q: u64) -> u64 {
    // q prime
    powm(a, q - 2, q)
}

pub fn deg(v: &[u64]) -> Option<usize> {
    v.iter().rposition(|&c| c != 0)
}

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub fn poly_mul(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[i + j] = addm(out[i + j], mulm(x, y, q), q);
            }
        }
    }
    trim(out)
}

/// Remainder of `a` modulo monic-leading `m`.
pub fn poly_rem(a: &[u64], m: &[u64], q: u64) -> Vec<u64> {
    let dm = deg(m).expect("zero modulus");
    let lead_inv = invm(m[dm], q);
    let mut r = a.to_vec();
    while let Some(dr) = deg(&r) {
        if dr < dm {
            break;
        }
        let f = mulm(r[dr], lead_inv, q);
        let shift = dr - dm;
        for i in 0..=dm {
            if m[i] != 0 {
                r[i + shift] = subm(r[i + shift], mulm(f, m[i], q), q);
            }
        }
    }
    r.truncate(dm);
    r.resize(dm, 0);
    r
}

pub fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], q: u64) -> Vec<u64> {
    poly_rem(&poly_mul(a, b, q), m, q)
}

/// `a^e mod m` with a big-integer exponent.
pub fn poly_powmod(a: &[u64], e: &BigUint, m: &[u64], q: u64) -> Vec<u64> {
    let dm = deg(m).expect("zero modulus");
    let mut acc = vec![0u64; dm];
    if dm > 0 {
        acc[0] = 1;
    }
    if e.is_zero() {
        return acc;
    }
    let mut base = poly_rem(a, m, q);
    base.resize(dm.max(1), 0);
    let bits = e.bits();
    for i in (0..bits).rev() {
        acc = poly_mulmod(&acc, &acc, m, q);
        if e.bit(i) {
            acc = poly_mulmod(&acc, &base, m, q);
        }
        acc.resize(dm.max(1), 0);
    }
    acc.resize(dm.max(1), 0);
    acc
}

pub fn poly_gcd(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let mut r0 = trim(a.to_vec());
    let mut r1 = trim(b.to_vec());
    while !r1.is_empty() {
        let r2 = trim(poly_rem(&r0, &r1, q));
        r0 = std::mem::replace(&mut r1, r2);
    }
    // normalize monic
    if let Some(d) = deg(&r0) {
        let inv = invm(r0[d], q);
        for c in r0.iter_mut() {
            *c = mulm(*c, inv, q);
        }
    }
    r0
}

/// Inverse of `a` modulo `m` (assumes coprime), via extended Euclid.
pub fn poly_invmod(a: &[u64], m: &[u64], q: u64) -> Vec<u64> {
    let dm = deg(m).expect("zero modulus");
    let mut r0 = m.to_vec();
    let mut r1 = trim(poly_rem(a, m, q));
    let mut t0: Vec<u64> = vec![];
    let mut t1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        let (quo, rem) = poly_divmod(&r0, &r1, q);
        r0 = std::mem::replace(&mut r1, rem);
        let qt = poly_mul(&quo, &t1, q);
        let t2 = poly_sub(&t0, &qt, q);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let d = deg(&r0).expect("not coprime");
    assert_eq!(d, 0, "not coprime to modulus");
    let c = invm(r0[0], q);
    let mut out: Vec<u64> = t0.iter().map(|&t| mulm(t, c, q)).collect();
    out = poly_rem(&out, m, q);
    out.resize(dm, 0);
    out
}

fn poly_sub(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, &x) in a.iter().enumerate() {
        out[i] = x;
    }
    for (i, &y) in b.iter().enumerate() {
        out[i] = subm(out[i], y, q);
    }
    trim(out)
}

fn poly_divmod(a: &[u64], m: &[u64], q: u64) -> (Vec<u64>, Vec<u64>) {
    let dm = deg(m).expect("zero divisor");
    let lead_inv = invm(m[dm], q);
    let mut r = a.to_vec();
    let mut quo = vec![0u64; a.len().saturating_sub(dm)];
    while let Some(dr) = deg(&r) {
        if dr < dm {
            break;
        }
        let f = mulm(r[dr], lead_inv, q);
        let shift = dr - dm;
        quo[shift] = f;
        for i in 0..=dm {
            if m[i] != 0 {
                r[i + shift] = subm(r[i + shift], mulm(f, m[i], q), q);
            }
        }
    }
    (trim(quo), trim(r))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test for a monic polynomial of degree >= 1.
pub fn is_irreducible(h: &[u64], q: u64) -> bool {
    let d = match deg(h) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    let x = vec![0u64, 1];
    // x^(q^d) mod h, by d-fold Frobenius
    let qe = BigUint::from(q);
    let mut fr = poly_rem(&x, h, q);
    for _ in 0..d {
        fr = poly_powmod(&fr, &qe, h, q);
    }
    let xr = poly_rem(&x, h, q);
    if trim(fr.clone()) != trim(xr.clone()) {
        return false;
    }
    for l in prime_factors(d as u64) {
        let steps = d as u64 / l;
        let mut fr_l = poly_rem(&x, h, q);
        for _ in 0..steps {
            fr_l = poly_powmod(&fr_l, &qe, h, q);
        }
        let diff = poly_sub(&fr_l, &xr, q);
        let g = poly_gcd(&diff, h, q);
        if deg(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// The lexicographically smallest monic irreducible of degree `f` over `F_q`,
/// ordering coefficient tuples `(a_{f-1}, ..., a_0)` most-significant first;
/// candidate `k` has the base-q digits of `k` as its non-leading coefficients.
pub fn lowest_lex_irreducible(f: usize, q: u64) -> Vec<u64> {
    let mut k = 0u64;
    loop {
        let mut h = vec![0u64; f + 1];
        h[f] = 1;
        let mut v = k;
        let mut i = 0;
        while v > 0 {
            assert!(i < f, "irreducible scan exhausted digit budget");
            h[i] = v % q;
            v /= q;
            i += 1;
        }
        if is_irreducible(&h, q) {
            return h;
        }
        k += 1;
    }
}

/// Minimal polynomial over `F_q` of an element of `F_q[y]/(h)`, by Gaussian
/// elimination on its power coordinates. Returns monic coefficients.
pub fn min_poly(elem: &[u64], h: &[u64], q: u64) -> Vec<u64> {
    let f = deg(h).expect("zero modulus");
    // rows: coordinates of elem^0 .. elem^j until dependency
    let mut pows: Vec<Vec<u64>> = Vec::with_capacity(f + 1);
    let mut cur = vec![0u64; f.max(1)];
    if f > 0 {
        cur[0] = 1;
    }
    for _ in 0..=f {
        pows.push(cur.clone());
        cur = poly_mulmod(&cur, elem, h, q);
        cur.resize(f.max(1), 0);
    }
    // find smallest d with elem^d in span(elem^0..elem^{d-1})
    for d in 1..=f {
        if let Some(coeffs) = solve_combination(&pows[..d], &pows[d], q) {
            let mut mp = vec![0u64; d + 1];
            mp[d] = 1;
            for (i, c) in coeffs.into_iter().enumerate() {
                mp[i] = subm(0, c, q); // x^d - sum c_i x^i
            }
            return mp;
        }
    }
    unreachable!("element of a degree-f extension has minimal polynomial of degree <= f");
}

/// Solve `sum c_i rows[i] = target` over F_q, if possible.
fn solve_combination(rows: &[Vec<u64>], target: &[u64], q: u64) -> Option<Vec<u64>> {
    let n = target.len();
    let k = rows.len();
    // columns = rows[i], augmented with target
    let mut m: Vec<Vec<u64>> = (0..n)
        .map(|r| {
            let mut row: Vec<u64> = (0..k).map(|c| rows[c][r]).collect();
            row.push(target[r]);
            row
        })
        .collect();
    let mut pivot_rows = vec![usize::MAX; k];
    let mut rank_row = 0;
    for col in 0..k {
        let Some(pr) = (rank_row..n).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank_row, pr);
        let inv = invm(m[rank_row][col], q);
        for c in col..=k {
            m[rank_row][c] = mulm(m[rank_row][c], inv, q);
        }
        for r in 0..n {
            if r != rank_row && m[r][col] != 0 {
                let factor = m[r][col];
                for c in col..=k {
                    let t = mulm(factor, m[rank_row][c], q);
                    m[r][c] = subm(m[r][c], t, q);
                }
            }
        }
        pivot_rows[col] = rank_row;
        rank_row += 1;
    }
    // consistent iff no row has zero coefficients but nonzero target
    for r in 0..n {
        if m[r][..k].iter().all(|&c| c == 0) && m[r][k] != 0 {
            return None;
        }
    }
    let mut sol = vec![0u64; k];
    for col in 0..k {
        if pivot_rows[col] != usize::MAX {
            sol[col] = m[pivot_rows[col]][k];
        }
    }
    Some(sol)
}
