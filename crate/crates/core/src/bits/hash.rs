use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BitVec, BitsError};

/// A strongly two-universal hash family from password indices `0..m` to
/// `{0,1}^ell`.
///
/// Keys are pairs `(a, b)` of elements of GF(2^k) with `2^k = m * 2^ell`
/// (rounded up), and `h_{a,b}(w)` is the low `ell` bits of `a*w + b` in the
/// field. For distinct `w1 != w2` the map `(a,b) -> (h(w1), h(w2))` hits
/// every output pair equally often, which is exactly strong two-universality.
///
/// The reduction polynomial for each degree is found by searching for the
/// smallest irreducible candidate; irreducibility is checked with the
/// Frobenius criterion rather than trusted from a table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashFamily {
    m: usize,
    ell: usize,
    k: u32,
    poly: u128,
}

/// One sampled key of a [`HashFamily`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongHash {
    family: HashFamily,
    a: u64,
    b: u64,
}

const MAX_FIELD_BITS: u32 = 48;

impl HashFamily {
    pub fn new(m: usize, ell: usize) -> Result<Self, BitsError> {
        if m < 1 || ell < 1 {
            return Err(BitsError::HashFamilyTooLarge { m, ell });
        }
        // ceil(log2 m) bits to embed passwords injectively, plus ell output
        // bits, so the field has size >= m * 2^ell.
        let m_bits = if m <= 2 {
            1
        } else {
            usize::BITS - (m - 1).leading_zeros()
        };
        let k = m_bits + ell as u32;
        if k > MAX_FIELD_BITS {
            return Err(BitsError::HashFamilyTooLarge { m, ell });
        }
        Ok(HashFamily {
            m,
            ell,
            k,
            poly: find_irreducible(k),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Field degree; the key space has size `2^(2k)`.
    pub fn field_bits(&self) -> u32 {
        self.k
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> StrongHash {
        let mask = mask_k(self.k);
        StrongHash {
            family: self.clone(),
            a: rng.gen::<u64>() & mask,
            b: rng.gen::<u64>() & mask,
        }
    }

    /// Every key in the family. Only sensible for small fields (tests).
    pub fn all_keys(&self) -> impl Iterator<Item = StrongHash> + '_ {
        assert!(self.k <= 12, "key enumeration is exponential in the field size");
        let size = 1u64 << self.k;
        (0..size).flat_map(move |a| {
            (0..size).map(move |b| StrongHash {
                family: self.clone(),
                a,
                b,
            })
        })
    }

    pub fn key(&self, a: u64, b: u64) -> StrongHash {
        let mask = mask_k(self.k);
        StrongHash {
            family: self.clone(),
            a: a & mask,
            b: b & mask,
        }
    }
}

impl StrongHash {
    /// Hash a password index to `ell` bits.
    pub fn eval(&self, w: usize) -> Result<BitVec, BitsError> {
        if w >= self.family.m {
            return Err(BitsError::PasswordOutOfRange(w, self.family.m));
        }
        let prod = gf_mul(self.a, w as u64, self.family.poly, self.family.k);
        let v = prod ^ self.b;
        Ok(BitVec::from_u64(v, self.family.ell))
    }

    pub fn family(&self) -> &HashFamily {
        &self.family
    }

    pub fn key_pair(&self) -> (u64, u64) {
        (self.a, self.b)
    }
}

fn mask_k(k: u32) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// Carry-less multiplication in GF(2)[x] followed by reduction mod `poly`
/// (a degree-`k` polynomial with the x^k bit set).
fn gf_mul(a: u64, b: u64, poly: u128, k: u32) -> u64 {
    let mut acc: u128 = 0;
    let a = a as u128;
    for i in 0..64 {
        if (b >> i) & 1 == 1 {
            acc ^= a << i;
        }
    }
    // Reduce from the top down.
    for bit in (k..128).rev() {
        if (acc >> bit) & 1 == 1 {
            acc ^= poly << (bit - k);
        }
    }
    acc as u64
}

/// Multiplication of polynomials over GF(2) modulo `f` (degree `k`).
fn poly_mulmod(a: u128, b: u128, f: u128, k: u32) -> u128 {
    let mut acc: u128 = 0;
    for i in 0..(k as usize) {
        if (b >> i) & 1 == 1 {
            acc ^= a << i;
        }
    }
    for bit in (k..2 * k).rev() {
        if (acc >> bit) & 1 == 1 {
            acc ^= f << (bit - k);
        }
    }
    acc
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        if a == 0 {
            return b;
        }
        let da = 127 - a.leading_zeros();
        let db = 127 - b.leading_zeros();
        if da < db {
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        a ^= b << (da - db);
    }
    a
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test for a degree-`k >= 2` polynomial `f`:
/// `x^(2^k) == x (mod f)` and, for every prime `p | k`,
/// `gcd(x^(2^(k/p)) - x, f) == 1`.
fn is_irreducible(f: u128, k: u32) -> bool {
    debug_assert!(k >= 2);
    let frob = |steps: u32| {
        // x^(2^steps) mod f by repeated squaring of x.
        let mut t: u128 = 0b10;
        for _ in 0..steps {
            t = poly_mulmod(t, t, f, k);
        }
        t
    };
    if frob(k) != 0b10 {
        return false;
    }
    prime_factors(k)
        .into_iter()
        .all(|p| poly_gcd(frob(k / p) ^ 0b10, f) == 1)
}

/// Smallest irreducible polynomial of degree `k` (by integer value of the
/// low-order terms). The constant term must be set, so candidates are odd.
fn find_irreducible(k: u32) -> u128 {
    if k == 1 {
        return 0b11; // x + 1
    }
    let top = 1u128 << k;
    let mut c = 1u128;
    loop {
        let f = top | c;
        if is_irreducible(f, k) {
            return f;
        }
        c += 2;
        assert!(c < top, "no irreducible of degree {k} found (bug)");
    }
}
