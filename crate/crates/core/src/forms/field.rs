/// The field with `p^k` elements, for small `p^k`.
///
/// Elements are the integers `0..q`, read as base-`p` digit vectors
/// `c_0 + c_1 t + ... + c_{k-1} t^{k-1}` modulo a fixed monic irreducible
/// polynomial of degree `k`. The prime field sits inside as `0..p`.
#[derive(Clone, Debug)]
pub struct FiniteField {
    p: u32,
    k: u32,
    q: u32,
    /// Low-order coefficients of the monic modulus (length `k`).
    modulus: Vec<u32>,
    mul_table: Vec<u32>,
    inv_table: Vec<u32>,
}

const TABLE_LIMIT: u32 = 1 << 10;

impl FiniteField {
    /// Panics unless `p` is prime and `p^k` is at most 1024.
    pub fn new(p: u32, k: u32) -> FiniteField {
        assert!(crate::arith::is_prime(p as u64), "{p} is not prime");
        assert!(k >= 1);
        let q = p.checked_pow(k).filter(|&q| q <= TABLE_LIMIT).expect("field too large");
        let modulus = if k == 1 { vec![0] } else { find_irreducible(p, k) };
        let mut field = FiniteField { p, k, q, modulus, mul_table: Vec::new(), inv_table: Vec::new() };
        let mut table = vec![0u32; (q * q) as usize];
        for a in 0..q {
            for b in a..q {
                let c = field.mul_slow(a, b);
                table[(a * q + b) as usize] = c;
                table[(b * q + a) as usize] = c;
            }
        }
        field.mul_table = table;
        let mut inv = vec![0u32; q as usize];
        for a in 1..q {
            for b in 1..q {
                if field.mul(a, b) == 1 {
                    inv[a as usize] = b;
                    break;
                }
            }
        }
        field.inv_table = inv;
        field
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn extension_degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul_table[(a * self.q + b) as usize]
    }

    /// Multiplicative inverse; zero maps to zero.
    pub fn inv(&self, a: u32) -> u32 {
        self.inv_table[a as usize]
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        (0..self.k)
            .map(|_| {
                let d = a % self.p;
                a /= self.p;
                d
            })
            .collect()
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let k = self.k as usize;
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * k - 1];
        for i in 0..k {
            for j in 0..k {
                prod[i + j] = (prod[i + j] + da[i] as u64 * db[j] as u64) % p;
            }
        }
        // t^k = -(modulus low part)
        for deg in (k..prod.len()).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (i, &m) in self.modulus.iter().enumerate() {
                let idx = deg - k + i;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
        }
        prod[..k].iter().rev().fold(0u32, |acc, &d| acc * self.p + d as u32)
    }
}

/// First monic irreducible of degree `k` over F_p, as its `k` low-order
/// coefficients.
fn find_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = p.pow(k);
    'candidates: for idx in 0..count {
        let mut low = Vec::with_capacity(k as usize);
        let mut v = idx;
        for _ in 0..k {
            low.push(v % p);
            v /= p;
        }
        let mut poly = low.clone();
        poly.push(1);
        for deg in 1..=k / 2 {
            for didx in 0..p.pow(deg) {
                let mut d = Vec::with_capacity(deg as usize + 1);
                let mut v = didx;
                for _ in 0..deg {
                    d.push(v % p);
                    v /= p;
                }
                d.push(1);
                if poly_rem_is_zero(&poly, &d, p) {
                    continue 'candidates;
                }
            }
        }
        return low;
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn poly_rem_is_zero(num: &[u32], den: &[u32], p: u32) -> bool {
    let p = p as u64;
    let mut r: Vec<u64> = num.iter().map(|&c| c as u64).collect();
    let dd = den.len() - 1;
    for top in (dd..r.len()).rev() {
        let c = r[top];
        if c == 0 {
            continue;
        }
        for (i, &dc) in den.iter().enumerate() {
            let idx = top - dd + i;
            r[idx] = (r[idx] + (p - c) * dc as u64 % p) % p;
        }
    }
    r.iter().all(|&c| c == 0)
}
