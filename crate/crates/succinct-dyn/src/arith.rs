//! Arithmetic of the sizes reachable by pumping: solutions of `a·K + b = q^N`, coprime
//! powers, periodicity, geometric sequences of solutions and the padding counts `L(s)`.
//!
//! Everything is exact: sizes and quotients are [`BigUint`], exponents are `u32`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// `a·K + b = q^N` with `N ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SolutionWitness {
    pub k: BigUint,
    pub n: u32,
}

/// `a = a′·gcd(a, q^η)` with `a′` coprime to `q` and `η` minimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoprimeDecomp {
    pub eta: u32,
    pub a_prime: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    UniqueAtZero,
    Inapplicable,
}

/// Result of [`normalize`]: `a·K + b = q^N` iff `a_red·(K + m) + b_red = q^(N − eta0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Normalized {
    pub a: u64,
    pub b: u64,
    pub m: u64,
    pub eta0: u32,
}

impl Normalized {
    /// Maps a witness of the reduced pair back to the original one, if it has one.
    pub fn to_original(&self, w: &SolutionWitness) -> Option<SolutionWitness> {
        let m = BigUint::from(self.m);
        (w.k >= m).then(|| SolutionWitness { k: &w.k - m, n: w.n + self.eta0 })
    }
}

/// Sizes `q^(n0 + ℓ·mu)` for `ℓ ≥ 0`, each of the form `a·k_ℓ + b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeomSeq {
    pub a: u64,
    pub b: u64,
    pub q: u64,
    pub n0: u32,
    pub mu: u32,
}

impl GeomSeq {
    pub fn exponent(&self, l: u32) -> u32 {
        self.n0 + l * self.mu
    }

    pub fn size(&self, l: u32) -> BigUint {
        pow(self.q, self.exponent(l))
    }

    pub fn k(&self, l: u32) -> BigUint {
        (self.size(l) - BigUint::from(self.b)) / BigUint::from(self.a)
    }

    /// All emitted sizes not exceeding `bound`.
    pub fn sizes_up_to(&self, bound: &BigUint) -> Vec<BigUint> {
        (0..).map(|l| self.size(l)).take_while(|s| s <= bound).collect()
    }
}

/// How to choose the padding count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Padding {
    /// The closed formulas [`padding_boolean`] / [`padding_q`].
    #[default]
    Formula,
    /// Least `L` making the total a power of `q` ([`minimal_padding`]).
    Minimal,
}

pub(crate) fn pow(q: u64, e: u32) -> BigUint {
    num_traits::pow(BigUint::from(q), e as usize)
}

/// Exact `log_q(x)` when `x` is a power of `q`.
pub fn exact_log(x: &BigUint, q: u64) -> Option<u32> {
    if x.is_zero() || q < 2 {
        return None;
    }
    let q = BigUint::from(q);
    let (mut x, mut e) = (x.clone(), 0u32);
    while !x.is_one() {
        let (d, r) = x.div_rem(&q);
        if !r.is_zero() {
            return None;
        }
        x = d;
        e += 1;
    }
    Some(e)
}

/// Least `e` with `q^e ≥ x`.
fn ceil_log(x: u64, q: u64) -> u32 {
    let (mut p, mut e) = (1u128, 0u32);
    while p < x as u128 {
        p *= q as u128;
        e += 1;
    }
    e
}

fn pow_mod(q: u64, mut e: u64, m: u64) -> u64 {
    let m = m as u128;
    let (mut base, mut acc) = (q as u128 % m, 1u128 % m);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc as u64
}

pub fn totient(n: u64) -> u64 {
    assert!(n >= 1, "totient is defined on positive integers");
    let (mut n, mut out, mut p) = (n, n, 2u64);
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

pub fn coprime_power(a: u64, q: u64) -> CoprimeDecomp {
    assert!(a >= 1 && q >= 2, "coprime_power needs a ≥ 1 and q ≥ 2");
    // gcd(a, q^e) = gcd(a, q^e mod a); terminates within log2(a) + 1 steps.
    (0u32..)
        .map(|eta| (eta, a / a.gcd(&pow_mod(q, eta as u64, a))))
        .find(|&(_, a_prime)| a_prime.gcd(&q) == 1)
        .map(|(eta, a_prime)| CoprimeDecomp { eta, a_prime })
        .expect("unbounded search")
}

/// Every `(K, N)` with `a·K + b = q^N` and `1 ≤ N ≤ n_max`, by increasing `N`.
pub fn find_solutions(a: u64, b: u64, q: u64, n_max: u32) -> Vec<SolutionWitness> {
    assert!(a >= 1 && q >= 2);
    let (a_big, b_big) = (BigUint::from(a), BigUint::from(b));
    let mut out = Vec::new();
    let mut p = BigUint::one();
    for n in 1..=n_max {
        p *= q;
        if p >= b_big {
            let (k, r) = (&p - &b_big).div_rem(&a_big);
            if r.is_zero() {
                out.push(SolutionWitness { k, n });
            }
        }
    }
    out
}

/// Least exponent `N ≥ lo` of a solution, decided exactly.
///
/// Residues of `q^N mod a` are periodic from `η` on with period `ord_{a′}(q) < a`, so
/// scanning `a` exponents past `max(η, ⌈log_q b⌉, lo)` is conclusive.
pub fn least_solution_from(a: u64, b: u64, q: u64, lo: u32) -> Option<u32> {
    let eta = coprime_power(a, q).eta;
    let start = lo.max(1);
    let end = eta.max(ceil_log(b, q)).max(start) as u64 + a;
    (start as u64..=end)
        .find(|&n| pow_mod(q, n, a) == b % a && pow(q, n as u32) >= BigUint::from(b))
        .map(|n| n as u32)
}

pub fn divisibility_emptiness(a: u64, b: u64, q: u64) -> Emptiness {
    if !a.is_multiple_of(q) || b.is_multiple_of(q) {
        Emptiness::Inapplicable
    } else if b == 1 {
        Emptiness::UniqueAtZero
    } else {
        Emptiness::Empty
    }
}

/// Extracts the common power of `q` from `(a, b)`, then reduces `b` below `a`.
pub fn normalize(a: u64, b: u64, q: u64) -> Normalized {
    let (mut a, mut b, mut eta0) = (a, b, 0u32);
    while a % q == 0 && b % q == 0 && b > 0 {
        a /= q;
        b /= q;
        eta0 += 1;
    }
    Normalized { a, b: b % a, m: b / a, eta0 }
}

/// Least `μ ≥ 1` with `b·q^μ = a·κ + b` for some `κ ≥ 1`, together with that `κ`.
///
/// The admissible `μ` are exactly the multiples of the least one, which is at most `a`.
/// When the equation `a·K + b = q^N` has any solution the answer is cross-checked against
/// the characterisation by a solution with `N ≥ η`, and `μ = φ(a′)` (or 1 when `a′ = 1`)
/// must be a multiple of the returned period; disagreement panics.
pub fn periodicity(a: u64, b: u64, q: u64) -> Option<(u32, BigUint)> {
    assert!(a >= 1 && q >= 2);
    if b == 0 {
        return None;
    }
    let bound = 2 * a * totient(a);
    let mu = (1..=bound).find(|&mu| (b as u128 * pow_mod(q, mu, a) as u128) % a as u128 == b as u128 % a as u128);
    let found = mu.map(|mu| {
        let mu = mu as u32;
        let kappa = BigUint::from(b) * (pow(q, mu) - 1u32) / BigUint::from(a);
        (mu, kappa)
    });
    if least_solution_from(a, b, q, 1).is_some() {
        let cp = coprime_power(a, q);
        let late = least_solution_from(a, b, q, cp.eta).is_some();
        assert_eq!(found.is_some(), late, "periodicity disagrees with the solution characterisation for ({a},{b},{q})");
        if let Some((mu, _)) = &found {
            let phi = if cp.a_prime == 1 { 1 } else { totient(cp.a_prime) };
            assert_eq!(phi % *mu as u64, 0, "φ(a′) is not a period for ({a},{b},{q})");
        }
    }
    found
}

/// The solutions as a geometric sequence: `n0` is the least solution exponent and `mu` the
/// least period, so the emitted sizes are exactly the solution sizes.
pub fn geometric_sequence(a: u64, b: u64, q: u64) -> Option<GeomSeq> {
    if b == 0 {
        let cp = coprime_power(a, q);
        return (cp.a_prime == 1).then(|| GeomSeq { a, b, q, n0: cp.eta.max(1), mu: 1 });
    }
    let n0 = least_solution_from(a, b, q, 1)?;
    let (mu, _) = periodicity(a, b, q)?;
    Some(GeomSeq { a, b, q, n0, mu })
}

fn total(a: u64, b: u64, alpha: u64, s: u32, l: &BigUint) -> BigUint {
    BigUint::from(a) * (BigUint::from(alpha) * pow(2, s) + l) + BigUint::from(b)
}

/// `L = 2^(ℓ′φ(a)) + b(2^(ℓ′φ(a)) − 1)/a − α·2^s` with `ℓ′ = s + log₂ α`, making
/// `a(α·2^s + L) + b = (a + b)·2^(ℓ′φ(a))`.
pub fn padding_boolean(a: u64, b: u64, alpha: u64, s: u32) -> Result<BigUint, ArithError> {
    let ab = BigUint::from(a + b);
    let log_ab = exact_log(&ab, 2)
        .ok_or_else(|| ArithError::PreconditionViolated(format!("a + b = {} is not a power of two", a + b)))?;
    let log_alpha = exact_log(&BigUint::from(alpha), 2)
        .ok_or_else(|| ArithError::PreconditionViolated(format!("α = {alpha} is not a power of two")))?;
    let e = (s + log_alpha) * totient(a) as u32;
    let p = pow(2, e);
    let (frac, r) = (BigUint::from(b) * (&p - 1u32)).div_rem(&BigUint::from(a));
    if !r.is_zero() {
        return Err(ArithError::PreconditionViolated(format!("a = {a} does not divide b(2^{e} − 1)")));
    }
    let head = p + frac;
    let blocks = BigUint::from(alpha) * pow(2, s);
    if head < blocks {
        return Err(ArithError::PreconditionViolated("negative padding".into()));
    }
    let l = head - blocks;
    debug_assert_eq!(exact_log(&total(a, b, alpha, s, &l), 2), Some(log_ab + e));
    Ok(l)
}

/// Exponent `n` with `a(α·2^s + L) + b = 2^n` for [`padding_boolean`].
pub fn boolean_exponent(a: u64, b: u64, alpha: u64, s: u32) -> Result<u32, ArithError> {
    let l = padding_boolean(a, b, alpha, s)?;
    Ok(exact_log(&total(a, b, alpha, s, &l), 2).expect("padding identity"))
}

/// `L = (b/a)(q^(ℓ′μ) − 1) − α·2^s` with `ℓ′ = s + log_q α + 1`, making
/// `a(α·2^s + L) + b = q^(N + ℓ′μ)` where `b = q^N`.
pub fn padding_q(a: u64, b: u64, q: u64, mu: u32, alpha: u64, s: u32) -> Result<BigUint, ArithError> {
    let pre = |m: String| ArithError::PreconditionViolated(m);
    let n = exact_log(&BigUint::from(b), q).ok_or_else(|| pre(format!("b = {b} is not a power of {q}")))?;
    let eta = coprime_power(a, q).eta;
    if n < eta {
        return Err(pre(format!("b = {q}^{n} with {n} below the coprime power {eta}")));
    }
    if b < a {
        return Err(pre(format!("b = {b} is smaller than a = {a}")));
    }
    if mu == 0 {
        return Err(pre("μ must be positive".into()));
    }
    let log_alpha =
        exact_log(&BigUint::from(alpha), q).ok_or_else(|| pre(format!("α = {alpha} is not a power of {q}")))?;
    let e = (s + log_alpha + 1) * mu;
    let (frac, r) = (BigUint::from(b) * (pow(q, e) - 1u32)).div_rem(&BigUint::from(a));
    if !r.is_zero() {
        return Err(pre(format!("a = {a} does not divide b(q^{e} − 1); μ = {mu} is not a period")));
    }
    let blocks = BigUint::from(alpha) * pow(2, s);
    if frac < blocks {
        return Err(pre("negative padding".into()));
    }
    Ok(frac - blocks)
}

/// Exponent with `a(α·2^s + L) + b = q^n` for [`padding_q`].
pub fn q_exponent(a: u64, b: u64, q: u64, mu: u32, alpha: u64, s: u32) -> Result<u32, ArithError> {
    let l = padding_q(a, b, q, mu, alpha, s)?;
    Ok(exact_log(&total(a, b, alpha, s, &l), q).expect("padding identity"))
}

/// Least `L ≥ 0` with `a(α·2^s + L) + b = q^n` for some `n ≤ n_max`, with that `n`.
pub fn minimal_padding(a: u64, b: u64, q: u64, alpha: u64, s: u32, n_max: u32) -> Option<(BigUint, u32)> {
    let base = total(a, b, alpha, s, &BigUint::zero());
    let a_big = BigUint::from(a);
    (0..=n_max).find_map(|n| {
        let p = pow(q, n);
        if p < base {
            return None;
        }
        let (l, r) = (p - &base).div_rem(&a_big);
        r.is_zero().then_some((l, n))
    })
}
