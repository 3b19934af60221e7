//! Arithmetic modulo a prime.

use crate::{Color, HatError, Result};

/// Trial-division primality test.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The prime field `Z_p`, colors being the representatives `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: Color,
}

impl PrimeField {
    pub fn new(p: Color) -> Result<Self> {
        if !is_prime(u64::from(p)) {
            return Err(HatError::invalid(alloc::format!("{p} is not prime")));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> Color {
        self.p
    }

    #[inline]
    pub fn add(&self, a: Color, b: Color) -> Color {
        ((u64::from(a) + u64::from(b)) % u64::from(self.p)) as Color
    }

    #[inline]
    pub fn sub(&self, a: Color, b: Color) -> Color {
        let p = u64::from(self.p);
        ((u64::from(a) + p - u64::from(b) % p) % p) as Color
    }

    #[inline]
    pub fn mul(&self, a: Color, b: Color) -> Color {
        ((u64::from(a) * u64::from(b)) % u64::from(self.p)) as Color
    }

    /// `bias + Σ coeffs[i] * xs[i]`.
    pub fn affine(&self, coeffs: &[Color], xs: &[Color], bias: Color) -> Color {
        let p = u64::from(self.p);
        let acc = coeffs.iter().zip(xs).fold(u64::from(bias) % p, |acc, (&c, &x)| {
            (acc + u64::from(c) * u64::from(x)) % p
        });
        acc as Color
    }
}
