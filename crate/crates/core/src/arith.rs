//! Small-integer number theory used by field validation and character enumeration.
//!
//! Conductors are desk-scale (below 10^7), so trial division is plenty.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Euler's totient from a factorization.
pub fn totient(factors: &[(u64, u32)]) -> u64 {
    factors
        .iter()
        .map(|&(q, e)| (q - 1) * q.pow(e - 1))
        .product()
}

/// Smallest primitive root modulo `q^e` for an odd prime `q`.
pub fn primitive_root_prime_power(q: u64, e: u32) -> u64 {
    assert!(q > 2 && is_prime(q), "odd prime required");
    let modulus = q.pow(e);
    let phi = (q - 1) * q.pow(e - 1);
    let phi_primes: Vec<u64> = factorize(phi).into_iter().map(|(r, _)| r).collect();
    (2..modulus)
        .find(|&g| {
            g % q != 0 && phi_primes.iter().all(|&r| mod_pow(g, phi / r, modulus) != 1)
        })
        .expect("cyclic group has a generator")
}

/// Multiplicative order of `a` modulo `m` (requires gcd(a, m) = 1).
pub fn multiplicative_order(a: u64, m: u64) -> u64 {
    let mut x = a % m;
    let mut k = 1;
    while x != 1 % m {
        x = mod_mul(x, a, m);
        k += 1;
    }
    k
}

/// Chinese remainder: the unique x mod prod(moduli) with x = r_i mod m_i (pairwise coprime).
pub fn crt(residues: &[(u64, u64)]) -> u64 {
    let modulus: u64 = residues.iter().map(|&(_, m)| m).product();
    let mut x = 0u64;
    for &(r, m) in residues {
        let rest = modulus / m;
        let inv = mod_inverse(rest % m, m).expect("moduli are coprime");
        x = (x + mod_mul(mod_mul(r % m, rest, modulus), inv, modulus)) % modulus;
    }
    x
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}
