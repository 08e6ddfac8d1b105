//! Minimal exact non-negative rational, used where float thresholds would
//! be wrong: split sizes, query-cost accounting, epsilon parameters.

use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    num: u128,
    den: u128,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Ratio {
    pub fn new(num: u128, den: u128) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num.max(1), den);
        Ratio {
            num: num / g,
            den: den / g,
        }
    }

    pub fn int(v: u64) -> Self {
        Ratio {
            num: v as u128,
            den: 1,
        }
    }

    pub fn num(&self) -> u128 {
        self.num
    }

    pub fn den(&self) -> u128 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// self > 1
    pub fn gt_one(&self) -> bool {
        self.num > self.den
    }

    /// Exact comparison of an integer against the ratio: v >= self.
    pub fn le_int(&self, v: u128) -> bool {
        v * self.den >= self.num
    }

    /// Exact comparison: v < self.
    pub fn gt_int(&self, v: u128) -> bool {
        v * self.den < self.num
    }

    pub fn mul_int(&self, v: u128) -> Ratio {
        Ratio::new(self.num * v, self.den)
    }

    pub fn recip(&self) -> Ratio {
        assert!(self.num != 0);
        Ratio {
            num: self.den,
            den: self.num,
        }
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_compares() {
        assert_eq!(Ratio::new(4, 8), Ratio::new(1, 2));
        assert!(Ratio::new(3, 2).gt_one());
        assert!(!Ratio::new(2, 2).gt_one());
        assert!(Ratio::new(7, 2) < Ratio::new(15, 4));
    }

    #[test]
    fn int_comparisons_are_exact() {
        let r = Ratio::new(10, 3); // 3.333...
        assert!(r.le_int(4));
        assert!(!r.le_int(3));
        assert!(r.gt_int(3));
        assert!(!r.gt_int(4));
    }
}
