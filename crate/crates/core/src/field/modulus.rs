use std::fmt;

use crate::error::FieldError;

/// Characteristic of the prime field F_p, restricted to single-word primes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u32);

pub const MAX_PRIME: u32 = 251;

impl PrimeModulus {
    pub fn new(p: u32) -> Result<Self, FieldError> {
        if !(2..=MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(FieldError::InvalidModulus(p));
        }
        Ok(PrimeModulus(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        (a * b) % self.0
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Inverse by Fermat; `a` must be nonzero.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.0));
        self.pow(a, (self.0 - 2) as u64)
    }

    /// Binomial coefficient mod p via Lucas' theorem on base-p digits.
    pub fn binom(self, mut n: u64, mut k: u64) -> u32 {
        if k > n {
            return 0;
        }
        let p = self.0 as u64;
        let mut acc = 1u32;
        while n > 0 || k > 0 {
            let (nd, kd) = (n % p, k % p);
            if kd > nd {
                return 0;
            }
            acc = self.mul(acc, small_binom_mod(nd as u32, kd as u32, self));
            n /= p;
            k /= p;
        }
        acc
    }
}

// n, k < p, so the factorials are invertible.
fn small_binom_mod(n: u32, k: u32, m: PrimeModulus) -> u32 {
    let mut num = 1u32;
    let mut den = 1u32;
    for i in 0..k {
        num = m.mul(num, n - i);
        den = m.mul(den, i + 1);
    }
    m.mul(num, m.inv(den))
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
