//! Real roots of low-degree polynomials.

use crate::scalar::Scalar;

/// Up to two real roots, ascending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Roots<T> {
    len: usize,
    vals: [T; 2],
}

impl<T: Scalar> Roots<T> {
    fn none() -> Self {
        Self {
            len: 0,
            vals: [T::zero(); 2],
        }
    }

    fn one(x: T) -> Self {
        Self {
            len: 1,
            vals: [x, T::zero()],
        }
    }

    fn two(a: T, b: T) -> Self {
        Self {
            len: 2,
            vals: if a <= b { [a, b] } else { [b, a] },
        }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.vals[..self.len]
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Smallest root that is `>= 0`.
    pub fn smallest_nonnegative(&self) -> Option<T> {
        self.as_slice().iter().copied().find(|&r| r >= T::zero())
    }

    /// Smallest root that is `> 0`.
    pub fn smallest_positive(&self) -> Option<T> {
        self.as_slice().iter().copied().find(|&r| r > T::zero())
    }
}

/// Real roots of `a x^2 + b x + c = 0`.
///
/// Uses the cancellation-free form `q = -(b + sgn(b) sqrt(disc)) / 2`, so a
/// vanishing leading coefficient degrades gracefully into the linear root.
/// A degenerate equation (`a = b = 0`) has no roots reported.
pub fn quadratic<T: Scalar>(a: T, b: T, c: T) -> Roots<T> {
    let zero = T::zero();
    let two = T::lit(2.0);
    if a == zero {
        if b == zero {
            return Roots::none();
        }
        return Roots::one(-c / b);
    }
    let disc = b * b - T::lit(4.0) * a * c;
    if disc < zero {
        return Roots::none();
    }
    let sq = disc.sqrt();
    let q = if b >= zero { -(b + sq) / two } else { (sq - b) / two };
    if q == zero {
        // b == 0 and c == 0
        return Roots::one(zero);
    }
    let r1 = q / a;
    let r2 = c / q;
    if disc == zero {
        Roots::one(r1)
    } else {
        Roots::two(r1, r2)
    }
}
