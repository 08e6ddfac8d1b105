//! Ackermann function variants and their row inverses.
//!
//! A(0,j) = 2j, A(i,0) = 1, A(i,j) = A(i-1, A(i,j-1));
//! B(0,j) = j^2, B(i,0) = 2, B(i,j) = B(i-1, B(i,j-1)).
//!
//! lambda_{2i}(n) = min{ j : A(i,j) >= n },
//! lambda_{2i+1}(n) = min{ j : B(i,j) >= n },
//! alpha(n) = min{ j : A(j,j) >= n }.
//!
//! Values saturate at 2^63 - 1; a saturated value compares as at least any
//! requested n, since for i >= 1 the true values overshoot u64 range as
//! soon as the clamp is hit.

/// Saturation sentinel, shared with the distance infinity.
pub const SAT: u64 = i64::MAX as u64;

/// A(i,j) with saturation.
pub fn ackermann_a(i: u64, j: u64) -> u64 {
    if i == 0 {
        return (2u64).saturating_mul(j).min(SAT);
    }
    // For i >= 1, A(i,j) >= 2^j, so 63 iterations saturate.
    if j >= 63 {
        return SAT;
    }
    let mut val = 1u64; // A(i, 0)
    for _ in 0..j {
        val = ackermann_a(i - 1, val);
        if val >= SAT {
            return SAT;
        }
    }
    val
}

/// B(i,j) with saturation.
pub fn ackermann_b(i: u64, j: u64) -> u64 {
    if i == 0 {
        return j.saturating_mul(j).min(SAT);
    }
    // For i >= 1, B(i,j) >= 2^(2^j), so 6 iterations saturate.
    if j >= 6 {
        return SAT;
    }
    let mut val = 2u64; // B(i, 0)
    for _ in 0..j {
        val = ackermann_b(i - 1, val);
        if val >= SAT {
            return SAT;
        }
    }
    val
}

/// k-th-row inverse Ackermann: the exact minima from the definitions, not
/// the ceiling-free asymptotic identities.
pub fn lambda(k: u64, n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    if k == 0 {
        // min{ j : 2j >= n } in closed form; the row grows too slowly to scan.
        return n.div_ceil(2);
    }
    if k == 1 {
        // min{ j : j^2 >= n }: integer square-root ceiling.
        let mut j = (n as f64).sqrt() as u64;
        while j * j >= n {
            j -= 1;
        }
        while j.saturating_mul(j) < n {
            j += 1;
        }
        return j;
    }
    let i = k / 2;
    let f: fn(u64, u64) -> u64 = if k.is_multiple_of(2) {
        ackermann_a
    } else {
        ackermann_b
    };
    let mut j = 0;
    loop {
        let v = f(i, j);
        if v >= n || v == SAT {
            return j;
        }
        j += 1;
    }
}

/// Inverse Ackermann alpha(n) = min{ j : A(j,j) >= n }.
pub fn inv_ackermann(n: u64) -> u64 {
    let mut j = 0;
    loop {
        let v = ackermann_a(j, j);
        if v >= n || v == SAT {
            return j;
        }
        j += 1;
    }
}
