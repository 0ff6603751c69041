//! Exact Baker–Campbell–Hausdorff coefficients up to bracket depth 5.
//!
//! `log(exp(x) exp(y))` is expanded in the free associative algebra on two
//! letters with rational coefficients, then mapped to Lie form with the
//! Dynkin–Specht–Wever projection: a homogeneous Lie polynomial `P` of
//! degree `k` equals `(1/k) * sum_w c_w [..[[w1, w2], w3].., wk]`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_rational::Rational64;
use num_traits::Zero;

pub const MAX_DEPTH: usize = 5;

/// A word in the letters `0 = x`, `1 = y`, read as a left-normed bracket.
pub type Word = Vec<u8>;

type Poly = BTreeMap<Word, Rational64>;

fn mul(p: &Poly, q: &Poly, max_deg: usize) -> Poly {
    let mut out = Poly::new();
    for (u, a) in p {
        for (v, b) in q {
            if u.len() + v.len() > max_deg {
                continue;
            }
            let mut w = u.clone();
            w.extend_from_slice(v);
            *out.entry(w).or_insert_with(Rational64::zero) += a * b;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn add_scaled(acc: &mut Poly, p: &Poly, s: Rational64) {
    for (w, c) in p {
        *acc.entry(w.clone()).or_insert_with(Rational64::zero) += c * s;
    }
    acc.retain(|_, c| !c.is_zero());
}

fn exp_letter(letter: u8, max_deg: usize) -> Poly {
    let mut p = Poly::new();
    let mut fact = 1i64;
    for k in 0..=max_deg {
        if k > 0 {
            fact *= k as i64;
        }
        p.insert(vec![letter; k], Rational64::new(1, fact));
    }
    p
}

fn compute(max_deg: usize) -> Vec<(Word, Rational64)> {
    let prod = mul(&exp_letter(0, max_deg), &exp_letter(1, max_deg), max_deg);
    let mut z = prod;
    z.remove(&Vec::new());

    let mut log = Poly::new();
    let mut power = z.clone();
    for m in 1..=max_deg {
        let sign = if m % 2 == 1 { 1 } else { -1 };
        add_scaled(&mut log, &power, Rational64::new(sign, m as i64));
        power = mul(&power, &z, max_deg);
    }

    log.into_iter()
        .map(|(w, c)| {
            let k = w.len() as i64;
            (w, c / Rational64::from_integer(k))
        })
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

/// Lie-form BCH terms of depth `<= MAX_DEPTH`, sorted by (length, word).
pub fn table() -> &'static [(Word, Rational64)] {
    static TABLE: OnceLock<Vec<(Word, Rational64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = compute(MAX_DEPTH);
        t.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
        t
    })
}

/// Terms needed for a class-`n` algebra.
pub fn terms_up_to(depth: usize) -> impl Iterator<Item = &'static (Word, Rational64)> {
    table().iter().filter(move |(w, _)| w.len() <= depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeff(word: &[u8]) -> Rational64 {
        table()
            .iter()
            .find(|(w, _)| w.as_slice() == word)
            .map(|(_, c)| *c)
            .unwrap_or_else(Rational64::zero)
    }

    #[test]
    fn low_degree_terms() {
        assert_eq!(coeff(&[0]), Rational64::new(1, 1));
        assert_eq!(coeff(&[1]), Rational64::new(1, 1));
        // [x, y] / 2 arrives as (1/2)(xy - yx) / 2 per word, i.e. 1/4 on
        // [x,y] and -1/4 on [y,x] = +1/4 on [x,y]: total 1/2.
        assert_eq!(coeff(&[0, 1]), Rational64::new(1, 4));
        assert_eq!(coeff(&[1, 0]), Rational64::new(-1, 4));
        assert!(table().iter().all(|(w, _)| !w.is_empty() && w.len() <= MAX_DEPTH));
    }

    #[test]
    fn pure_powers_vanish_beyond_degree_one() {
        for k in 2..=MAX_DEPTH {
            assert!(coeff(&vec![0; k]).is_zero());
            assert!(coeff(&vec![1; k]).is_zero());
        }
    }
}
