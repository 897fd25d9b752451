//! Modular arithmetic kernels for elimination over `F_p`.
//!
//! Elimination only needs the zero pattern to be preserved, so values stay in
//! whatever internal representation the kernel uses (Montgomery form for odd
//! moduli) for the whole run.

use crate::scalars::PrimeField;

pub(crate) trait ModArith: Sync + Send {
    /// Maps a canonical residue in `[0, p)` into the internal representation.
    fn enter(&self, x: u64) -> u64;
    fn mul(&self, a: u64, b: u64) -> u64;
    fn sub(&self, a: u64, b: u64) -> u64;
    fn inv(&self, a: u64) -> u64;
}

/// Montgomery multiplication with `R = 2^64`; requires an odd modulus below 2^62.
pub(crate) struct Montgomery {
    p: u64,
    neg_pinv: u64,
    r2: u64,
    field: PrimeField,
}

impl Montgomery {
    pub(crate) fn new(field: PrimeField) -> Self {
        let p = field.modulus();
        debug_assert!(p % 2 == 1);
        let mut inv = p;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r1 = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((r1 as u128 * r1 as u128) % p as u128) as u64;
        Montgomery { p, neg_pinv: inv.wrapping_neg(), r2, field }
    }

    #[inline(always)]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_pinv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    fn leave(&self, x: u64) -> u64 {
        self.redc(x as u128)
    }
}

impl ModArith for Montgomery {
    fn enter(&self, x: u64) -> u64 {
        self.redc(x as u128 * self.r2 as u128)
    }

    #[inline(always)]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline(always)]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn inv(&self, a: u64) -> u64 {
        let plain = self.leave(a);
        self.enter(self.field.inv(plain).expect("pivot is nonzero"))
    }
}

/// Straightforward `u128 %` arithmetic, used for `p = 2`.
pub(crate) struct Plain(pub(crate) PrimeField);

impl ModArith for Plain {
    fn enter(&self, x: u64) -> u64 {
        x
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        self.0.mul(a, b)
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        self.0.sub(a, b)
    }

    fn inv(&self, a: u64) -> u64 {
        self.0.inv(a).expect("pivot is nonzero")
    }
}
