//! Fixed-width unsigned arithmetic lowered to gates. Words are little-endian wire vectors;
//! every operation is exact modulo `2^width` unless it reports a carry or borrow.

use crate::annet::{CircuitBuilder, Wire};

pub(crate) type Word = Vec<Wire>;

pub(crate) fn constant(b: &mut CircuitBuilder, value: u64, width: usize) -> Word {
    (0..width).map(|i| b.constant(i < 64 && value >> i & 1 == 1)).collect()
}

pub(crate) fn input_word(b: &mut CircuitBuilder, first: usize, width: usize) -> Word {
    (first..first + width).map(|i| b.input(i)).collect()
}

fn full_add(b: &mut CircuitBuilder, x: Wire, y: Wire, c: Wire) -> (Wire, Wire) {
    let xy = b.xor(x, y);
    let sum = b.xor(xy, c);
    let (g, p) = (b.and(x, y), b.and(xy, c));
    (sum, b.or(g, p))
}

/// Ripple-carry `x + y + carry_in`, with the carry out.
pub(crate) fn add_with(b: &mut CircuitBuilder, x: &[Wire], y: &[Wire], carry_in: Wire) -> (Word, Wire) {
    assert_eq!(x.len(), y.len());
    let mut c = carry_in;
    let mut out = Vec::with_capacity(x.len());
    for (&xi, &yi) in x.iter().zip(y) {
        let (s, c2) = full_add(b, xi, yi, c);
        out.push(s);
        c = c2;
    }
    (out, c)
}

/// `x + delta` modulo `2^width`; negative offsets wrap.
pub(crate) fn add_const(b: &mut CircuitBuilder, x: &[Wire], delta: i64) -> Word {
    let y = constant(b, delta as u64, x.len());
    let zero = b.constant(false);
    add_with(b, x, &y, zero).0
}

/// `x − y` and whether it borrowed (`x < y`).
pub(crate) fn sub(b: &mut CircuitBuilder, x: &[Wire], y: &[Wire]) -> (Word, Wire) {
    let ny: Word = y.iter().map(|&w| b.not(w)).collect();
    let one = b.constant(true);
    let (d, carry) = add_with(b, x, &ny, one);
    (d, b.not(carry))
}

/// `x − c` and whether `x < c`.
pub(crate) fn sub_const(b: &mut CircuitBuilder, x: &[Wire], c: u64) -> (Word, Wire) {
    if x.len() < 64 && c >> x.len() != 0 {
        let t = b.constant(true);
        return (x.to_vec(), t);
    }
    let y = constant(b, c, x.len());
    sub(b, x, &y)
}

pub(crate) fn lt_const(b: &mut CircuitBuilder, x: &[Wire], c: u64) -> Wire {
    sub_const(b, x, c).1
}

pub(crate) fn eq_const(b: &mut CircuitBuilder, x: &[Wire], c: u64) -> Wire {
    if x.len() < 64 && c >> x.len() != 0 {
        return b.constant(false);
    }
    let lits: Vec<Wire> = x.iter().enumerate().map(|(i, &w)| if c >> i & 1 == 1 { w } else { b.not(w) }).collect();
    b.and_many(&lits)
}

pub(crate) fn eq(b: &mut CircuitBuilder, x: &[Wire], y: &[Wire]) -> Wire {
    assert_eq!(x.len(), y.len());
    let diffs: Vec<Wire> = x.iter().zip(y).map(|(&p, &q)| b.xor(p, q)).collect();
    let any = b.or_many(&diffs);
    b.not(any)
}

/// `x · c` modulo `2^width` by shift-and-add.
#[allow(dead_code)]
pub(crate) fn mul_const(b: &mut CircuitBuilder, x: &[Wire], c: u64) -> Word {
    let w = x.len();
    let zero = b.constant(false);
    let mut acc = vec![zero; w];
    for i in (0..w.min(64)).filter(|i| c >> i & 1 == 1) {
        let shifted: Word = (0..w).map(|j| if j >= i { x[j - i] } else { zero }).collect();
        acc = add_with(b, &acc, &shifted, zero).0;
    }
    acc
}

/// `(⌊x / d⌋, x mod d)` by restoring division with the divisor unrolled; both results
/// have the width of `x`.
pub(crate) fn divmod_const(b: &mut CircuitBuilder, x: &[Wire], d: u64) -> (Word, Word) {
    assert!(d >= 1, "division by zero");
    let w = x.len();
    let rw = 64 - d.leading_zeros() as usize + 1;
    let zero = b.constant(false);
    let mut rem = vec![zero; rw];
    let mut quot = vec![zero; w];
    for i in (0..w).rev() {
        rem.rotate_right(1);
        rem[0] = x[i];
        let (diff, borrow) = sub_const(b, &rem, d);
        let take = b.not(borrow);
        quot[i] = take;
        rem = (0..rw).map(|j| b.mux(take, diff[j], rem[j])).collect();
    }
    rem.resize(w.max(rw), zero);
    rem.truncate(w);
    (quot, rem)
}

#[allow(dead_code)]
pub(crate) fn mux_word(b: &mut CircuitBuilder, sel: Wire, x: &[Wire], y: &[Wire]) -> Word {
    x.iter().zip(y).map(|(&p, &q)| b.mux(sel, p, q)).collect()
}
