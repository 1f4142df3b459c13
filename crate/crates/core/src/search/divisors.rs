use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Positive divisors of `|n|` in increasing order, by trial division with a
/// 2-3 wheel. `None` when `|n|` exceeds `limit` (or does not fit in `u128`).
/// `n = 0` has no finite divisor list and also yields `None`.
pub fn divisors(n: &BigInt, limit: &BigInt) -> Option<Vec<BigInt>> {
    if n.is_zero() || n.abs() > *limit {
        return None;
    }
    let mut rest = n.abs().to_u128()?;
    let mut factors: Vec<(u128, u32)> = Vec::new();
    let mut push = |p: u128, rest: &mut u128| {
        let mut e = 0;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(2, &mut rest);
    push(3, &mut rest);
    let mut p: u128 = 5;
    while p * p <= rest {
        push(p, &mut rest);
        push(p + 2, &mut rest);
        p += 6;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    let mut divs: Vec<u128> = vec![1];
    for (p, e) in factors {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    Some(divs.into_iter().map(BigInt::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(n: u64) -> Vec<BigInt> {
        (1..=n).filter(|d| n.is_multiple_of(*d)).map(BigInt::from).collect()
    }

    #[test]
    fn matches_brute_force() {
        let limit = BigInt::from(u64::MAX);
        for n in 1..2000u64 {
            assert_eq!(divisors(&BigInt::from(n), &limit).unwrap(), brute(n), "n = {n}");
        }
        assert_eq!(divisors(&BigInt::from(-12), &limit).unwrap().len(), 6);
    }

    #[test]
    fn limits() {
        assert!(divisors(&BigInt::zero(), &BigInt::from(10)).is_none());
        assert!(divisors(&BigInt::from(11), &BigInt::from(10)).is_none());
        // 2^61 - 1 is prime.
        let p = BigInt::from((1u64 << 61) - 1);
        assert_eq!(divisors(&p, &BigInt::from(u64::MAX)).unwrap().len(), 2);
    }
}
