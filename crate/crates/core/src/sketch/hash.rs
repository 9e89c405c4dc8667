//! Pairwise-independent hash functions `x ↦ (a·x + b) mod P` over the
//! Mersenne prime `P = 2⁶¹ − 1`.

use rand::Rng;

pub const PRIME: u64 = (1 << 61) - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pairwise {
    pub a: u64,
    pub b: u64,
}

impl Pairwise {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        Pairwise { a: rng.gen_range(1..PRIME), b: rng.gen_range(0..PRIME) }
    }

    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        ((self.a as u128 * x as u128 + self.b as u128) % PRIME as u128) as u64
    }
}
