//! Finite fields `GF(p^k)` with log/antilog tables.
//!
//! Elements are encoded as integers in `[0, q)` whose base-`p` digits are the coefficients of
//! a polynomial in the generator `x`. The defining polynomial is the first monic primitive
//! polynomial of degree `k` in the digit order, so `x` itself generates the unit group.

use std::fmt;

#[derive(Clone)]
pub struct FiniteField {
    p: u64,
    k: u32,
    q: u64,
    /// Coefficients `c₀ … c_{k−1}` of the monic defining polynomial `x^k + Σ cᵢ xⁱ`.
    modulus: Vec<u64>,
    exp: Vec<u64>,
    log: Vec<u64>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k
    }
}

impl Eq for FiniteField {}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.q)
    }
}

fn digits(mut x: u64, p: u64, k: u32) -> Vec<u64> {
    (0..k)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u64], p: u64) -> u64 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Multiply a coefficient vector by `x` modulo the monic polynomial with lower coefficients `m`.
fn times_x(v: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let k = v.len();
    let top = v[k - 1];
    let mut out = vec![0; k];
    for i in (1..k).rev() {
        out[i] = v[i - 1];
    }
    for (i, o) in out.iter_mut().enumerate() {
        *o = (*o + (p - m[i]) * top) % p;
    }
    out
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// `Some((p, k))` when `q = p^k` with `p` prime and `k ≥ 1`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut r = q;
    let mut k = 0;
    while r.is_multiple_of(p) {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

impl FiniteField {
    /// Builds `GF(q)`. Panics unless `q` is a prime power below `2^20`.
    pub fn new(q: u64) -> Self {
        let (p, k) = prime_power(q).expect("field order must be a prime power");
        assert!(q < (1 << 20), "field too large for table arithmetic");
        if k == 1 {
            // Prime field: the generator is a primitive root, encoded as itself.
            let g = (2..p).find(|&g| order_mod(g, p) == p - 1).unwrap_or(1);
            return Self::from_generator(p, 1, vec![(p - g) % p], |x| (x * g) % p);
        }
        for cand in 0..q {
            let m = digits(cand, p, k);
            if m[0] == 0 {
                continue;
            }
            let mut v = vec![0; k as usize];
            v[0] = 1;
            let mut ord = 0u64;
            loop {
                v = times_x(&v, &m, p);
                ord += 1;
                if v.iter().enumerate().all(|(i, &c)| c == u64::from(i == 0)) || ord > q {
                    break;
                }
            }
            if ord == q - 1 {
                let mm = m.clone();
                return Self::from_generator(p, k, m, move |x| undigits(&times_x(&digits(x, p, k), &mm, p), p));
            }
        }
        unreachable!("a primitive polynomial always exists")
    }

    fn from_generator(p: u64, k: u32, modulus: Vec<u64>, step: impl Fn(u64) -> u64) -> Self {
        let q = p.pow(k);
        let mut exp = Vec::with_capacity((q - 1) as usize);
        let mut log = vec![0; q as usize];
        let mut x = 1;
        for i in 0..q - 1 {
            exp.push(x);
            log[x as usize] = i;
            x = step(x);
        }
        FiniteField {
            p,
            k,
            q,
            modulus,
            exp,
            log,
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// Defining polynomial coefficients (lower part of a monic polynomial).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// The chosen generator of the unit group.
    pub fn generator(&self) -> u64 {
        self.exp.get(1).copied().unwrap_or(1)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.k == 1 {
            return (a + b) % self.p;
        }
        let (da, db) = (digits(a, self.p, self.k), digits(b, self.p, self.k));
        let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        undigits(&s, self.p)
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.k == 1 {
            return (self.p - a) % self.p;
        }
        let d: Vec<u64> = digits(a, self.p, self.k)
            .iter()
            .map(|x| (self.p - x) % self.p)
            .collect();
        undigits(&d, self.p)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let e = (self.log[a as usize] + self.log[b as usize]) % (self.q - 1);
        self.exp[e as usize]
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        (a != 0).then(|| {
            let e = (self.q - 1 - self.log[a as usize]) % (self.q - 1);
            self.exp[e as usize]
        })
    }

    /// Discrete logarithm to the base `generator()`.
    pub fn dlog(&self, a: u64) -> Option<u64> {
        (a != 0).then(|| self.log[a as usize])
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        if a == 0 {
            return u64::from(e == 0);
        }
        let l = (self.log[a as usize] as u128 * e as u128) % (self.q - 1) as u128;
        self.exp[l as usize]
    }

    /// The prime-field element `n mod p`.
    pub fn from_int(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    /// Coefficients of `a` in the basis `1, x, …, x^{k−1}`.
    pub fn coefficients(&self, a: u64) -> Vec<u64> {
        digits(a, self.p, self.k)
    }

    /// `x ↦ x^{p^e}`.
    pub fn frobenius(&self, a: u64, e: u32) -> u64 {
        let mut x = a;
        for _ in 0..e % self.k {
            x = self.pow(x, self.p);
        }
        x
    }

    /// An element `β` of `self` that is a root of `sub`'s defining polynomial, if `sub`
    /// embeds. Sending `sub.generator() ↦ β` then defines a field embedding.
    pub fn embedding_root(&self, sub: &FiniteField) -> Option<u64> {
        if sub.p != self.p || !self.k.is_multiple_of(sub.k) {
            return None;
        }
        if sub.k == 1 {
            // Prime subfield: the generator is an integer.
            return Some(self.from_int(sub.generator() as i64));
        }
        (1..self.q).find(|&b| {
            // Evaluate x^k + Σ cᵢ xⁱ at b.
            let mut acc = self.pow(b, sub.k as u64);
            for (i, &c) in sub.modulus.iter().enumerate() {
                acc = self.add(acc, self.mul(self.from_int(c as i64), self.pow(b, i as u64)));
            }
            acc == 0
        })
    }

    /// Image of `a ∈ sub` under the embedding determined by `root`.
    pub fn embed_from(&self, sub: &FiniteField, root: u64, a: u64) -> u64 {
        if sub.k == 1 {
            return self.from_int(a as i64);
        }
        let mut acc = 0;
        for (i, c) in sub.coefficients(a).into_iter().enumerate() {
            acc = self.add(acc, self.mul(self.from_int(c as i64), self.pow(root, i as u64)));
        }
        acc
    }
}

fn order_mod(g: u64, p: u64) -> u64 {
    let mut x = g % p;
    let mut n = 1;
    while x != 1 {
        x = x * g % p;
        n += 1;
        if n > p {
            return 0;
        }
    }
    n
}
