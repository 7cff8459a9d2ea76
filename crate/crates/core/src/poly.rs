//! Dense polynomials over a prime field, just enough for irreducibility
//! testing of field moduli. Coefficients are stored low degree first.

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime divisors in increasing order.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
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

pub(crate) fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Remainder of `a` modulo `m` (m nonzero).
fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    trim(&mut a);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while a.len() > dm {
        let top = a.len() - 1;
        let c = a[top] * lead_inv % p;
        if c != 0 {
            let shift = top - dm;
            for (i, &mi) in m.iter().enumerate() {
                a[shift + i] = (a[shift + i] + p - c * mi % p) % p;
            }
        }
        a.pop();
        trim(&mut a);
    }
    a
}

fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    rem(&out, m, p)
}

fn pow_poly(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(&acc, &b, m, p);
        }
        b = mul_mod(&b, &b, m, p);
        exp >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut out);
    out
}

/// Rabin's test: a monic `f` of degree n is irreducible over F_p iff
/// x^{p^n} = x mod f and gcd(x^{p^{n/l}} - x, f) = 1 for every prime l | n.
pub fn is_irreducible(p: u32, poly: &[u32]) -> bool {
    let p = p as u64;
    let mut f: Vec<u64> = poly.iter().map(|&c| c as u64 % p).collect();
    trim(&mut f);
    if f.len() < 2 || f[f.len() - 1] != 1 {
        return false;
    }
    let n = f.len() - 1;
    if n == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // frob[i] = x^{p^i} mod f
    let mut frob = Vec::with_capacity(n + 1);
    frob.push(rem(&x, &f, p));
    for i in 1..=n {
        let next = pow_poly(&frob[i - 1], p, &f, p);
        frob.push(next);
    }
    if sub(&frob[n], &rem(&x, &f, p), p) != Vec::<u64>::new() {
        return false;
    }
    for l in prime_factors(n as u64) {
        let h = sub(&frob[n / l as usize], &x, p);
        let g = poly_gcd(&f, &h, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Smallest monic irreducible of degree `r`, ordering candidates by the
/// base-p integer formed from the lower coefficients (c_{r-1} most
/// significant). For p = 2, r = 8 this is x^8 + x^4 + x^3 + x + 1.
pub fn smallest_irreducible(p: u32, r: u32) -> Vec<u32> {
    let count = (p as u64).pow(r);
    for t in 0..count {
        let mut coeffs = Vec::with_capacity(r as usize + 1);
        let mut v = t;
        for _ in 0..r {
            coeffs.push((v % p as u64) as u32);
            v /= p as u64;
        }
        coeffs.push(1);
        if is_irreducible(p, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over a prime field")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_irreducibles() {
        assert!(is_irreducible(11, &[1, 0, 1]));
        assert!(is_irreducible(5, &[2, 0, 1]));
        assert!(!is_irreducible(5, &[4, 0, 1]));
        assert!(is_irreducible(7, &[3, 0, 1, 1, 1]));
        assert!(!is_irreducible(3, &[1, 0, 0, 0, 1]));
    }

    #[test]
    fn rijndael_is_smallest_degree_eight() {
        assert_eq!(smallest_irreducible(2, 8), vec![1, 1, 0, 1, 1, 0, 0, 0, 1]);
    }

    // Brute-force oracle: a degree <= 3 polynomial is irreducible iff it
    // has no root.
    #[test]
    fn matches_root_test_for_small_degrees() {
        for p in [2u32, 3, 5, 7] {
            for deg in 2..=3u32 {
                for t in 0..(p as u64).pow(deg) {
                    let mut c: Vec<u32> = (0..deg)
                        .map(|i| ((t / (p as u64).pow(i)) % p as u64) as u32)
                        .collect();
                    c.push(1);
                    let has_root = (0..p).any(|x| {
                        c.iter()
                            .rev()
                            .fold(0u64, |acc, &ci| (acc * x as u64 + ci as u64) % p as u64)
                            == 0
                    });
                    assert_eq!(is_irreducible(p, &c), !has_root, "p={p} c={c:?}");
                }
            }
        }
    }

    #[test]
    fn divisor_helpers() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(prime_factors(2400), vec![2, 3, 5]);
        assert!(is_prime(89) && !is_prime(91));
    }
}
