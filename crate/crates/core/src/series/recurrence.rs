//! Minimal linear recurrences by exact rational elimination.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// `c_n = Σ_{i=1..order} coefficients[i-1]·c_{n-i}` for every `n >= order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recurrence {
    pub order: usize,
    pub coefficients: Vec<BigRational>,
}

impl Recurrence {
    /// Next term from the `order` preceding ones.
    pub fn step(&self, history: &[BigRational]) -> BigRational {
        let n = history.len();
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, a)| a * &history[n - 1 - i])
            .fold(BigRational::zero(), |s, x| s + x)
    }

    /// The recurrence holds on every `n` in `order..terms.len()`.
    pub fn reproduces(&self, terms: &[BigRational]) -> bool {
        (self.order..terms.len()).all(|n| self.step(&terms[..n]) == terms[n])
    }
}

impl Serialize for Recurrence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let coefficients: Vec<String> = self.coefficients.iter().map(ToString::to_string).collect();
        let mut st = s.serialize_struct("Recurrence", 2)?;
        st.serialize_field("order", &self.order)?;
        st.serialize_field("coefficients", &coefficients)?;
        st.end()
    }
}

/// Outcome of a rationality probe; `recurrence` is `None` when nothing of
/// order `<= max_order` fits all `terms`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalityProbe {
    pub max_order: usize,
    pub terms: usize,
    pub recurrence: Option<Recurrence>,
}

impl RationalityProbe {
    pub fn verdict(&self) -> String {
        match &self.recurrence {
            Some(r) => format!(
                "linear recurrence of order {} on {} terms: c_n = {}",
                r.order,
                self.terms,
                describe(&r.coefficients)
            ),
            None => format!(
                "no linear recurrence of order ≤ {} on {} terms",
                self.max_order, self.terms
            ),
        }
    }
}

fn describe(coefficients: &[BigRational]) -> String {
    if coefficients.is_empty() {
        return "0".into();
    }
    coefficients
        .iter()
        .enumerate()
        .map(|(i, a)| format!("({a})·c_{{n-{}}}", i + 1))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Solves the `rows × (d + 1)` augmented system in place. Returns a solution
/// (free variables set to 0) or `None` if inconsistent.
fn solve(mut rows: Vec<Vec<BigRational>>, d: usize) -> Option<Vec<BigRational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..d {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &factor * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[d].is_zero()) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); d];
    for (i, &col) in pivots.iter().enumerate() {
        sol[col] = rows[i][d].clone();
    }
    Some(sol)
}

/// Least `d <= max_order` admitting a recurrence valid on all of `terms`,
/// found by solving the Hankel system `Σ a_i c_{n-i} = c_n`, `n = d..N`.
pub fn rationality_probe_rational(
    terms: &[BigRational],
    max_order: usize,
) -> Result<RationalityProbe> {
    let need = 2 * max_order + 2;
    if terms.len() < need {
        return Err(Error::InsufficientData(format!(
            "order ≤ {max_order} needs at least {need} terms, got {}",
            terms.len()
        )));
    }
    let recurrence = (0..=max_order).find_map(|d| {
        let rows: Vec<Vec<BigRational>> = (d..terms.len())
            .map(|n| {
                let mut row: Vec<BigRational> = (1..=d).map(|i| terms[n - i].clone()).collect();
                row.push(terms[n].clone());
                row
            })
            .collect();
        solve(rows, d).map(|coefficients| Recurrence {
            order: d,
            coefficients,
        })
    });
    debug_assert!(recurrence.as_ref().is_none_or(|r| r.reproduces(terms)));
    Ok(RationalityProbe {
        max_order,
        terms: terms.len(),
        recurrence,
    })
}

/// Integer-sequence form of [`rationality_probe_rational`].
pub fn rationality_probe(coefficients: &[BigInt], max_order: usize) -> Result<RationalityProbe> {
    let terms: Vec<BigRational> = coefficients
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    rationality_probe_rational(&terms, max_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Berlekamp–Massey over the rationals: linear complexity of the sequence.
    fn berlekamp_massey(s: &[BigRational]) -> usize {
        let mut c = vec![BigRational::one()];
        let mut b = vec![BigRational::one()];
        let (mut l, mut m) = (0usize, 1usize);
        let mut bd = BigRational::one();
        for n in 0..s.len() {
            let mut disc = s[n].clone();
            for i in 1..=l {
                disc += &c[i] * &s[n - i];
            }
            if disc.is_zero() {
                m += 1;
                continue;
            }
            let coef = &disc / &bd;
            let old = c.clone();
            if c.len() < b.len() + m {
                c.resize(b.len() + m, BigRational::zero());
            }
            for (i, bi) in b.iter().enumerate() {
                c[i + m] -= &coef * bi;
            }
            if 2 * l <= n {
                l = n + 1 - l;
                b = old;
                bd = disc;
                m = 1;
            } else {
                m += 1;
            }
        }
        l
    }

    #[test]
    fn sphere_series_of_f2() {
        let p = rationality_probe(&ints(&[1, 4, 12, 36, 108, 324, 972, 2916]), 2).unwrap();
        let r = p.recurrence.unwrap();
        assert_eq!(r.order, 2);
        assert_eq!(r.coefficients, vec![q(3, 1), q(0, 1)]);
    }

    #[test]
    fn constant_and_zero_sequences() {
        let p = rationality_probe(&ints(&[5; 6]), 2).unwrap();
        let r = p.recurrence.unwrap();
        assert_eq!((r.order, r.coefficients), (1, vec![q(1, 1)]));
        assert_eq!(
            rationality_probe(&ints(&[0; 4]), 1)
                .unwrap()
                .recurrence
                .unwrap()
                .order,
            0
        );
    }

    #[test]
    fn short_input_is_an_error() {
        assert!(matches!(
            rationality_probe(&ints(&[1, 2, 3, 4, 5]), 2),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn verdict_wording() {
        // Squares of Fibonacci numbers satisfy an order-3 recurrence only.
        let p = rationality_probe(&ints(&[0, 1, 1, 4, 9, 25, 64, 169]), 2).unwrap();
        assert_eq!(p.verdict(), "no linear recurrence of order ≤ 2 on 8 terms");
        assert_eq!(
            rationality_probe(&ints(&[0, 1, 1, 4, 9, 25, 64, 169]), 3)
                .unwrap()
                .recurrence
                .unwrap()
                .order,
            3
        );
    }

    fn planted() -> impl Strategy<Value = (Vec<BigRational>, usize)> {
        (1usize..=5).prop_flat_map(|d| {
            (
                prop::collection::vec((-5i64..=5, 1i64..=3), d),
                prop::collection::vec(-9i64..=9, d),
                Just(d),
            )
                .prop_map(|(coef, init, d)| {
                    let rec = Recurrence {
                        order: d,
                        coefficients: coef.iter().map(|&(a, b)| q(a, b)).collect(),
                    };
                    let mut s: Vec<BigRational> = init.iter().map(|&x| q(x, 1)).collect();
                    while s.len() < 2 * 5 + 2 {
                        let next = rec.step(&s);
                        s.push(next);
                    }
                    (s, d)
                })
        })
    }

    proptest! {
        #[test]
        fn recovers_planted_recurrences((s, d) in planted()) {
            let p = rationality_probe_rational(&s, 5).unwrap();
            let r = p.recurrence.expect("planted recurrence fits");
            prop_assert!(r.order <= d);
            prop_assert!(r.reproduces(&s));
            prop_assert_eq!(r.order, berlekamp_massey(&s));
        }

        #[test]
        fn probe_matches_berlekamp_massey(v in prop::collection::vec(-3i64..=3, 12)) {
            let s: Vec<BigRational> = v.iter().map(|&x| q(x, 1)).collect();
            let p = rationality_probe_rational(&s, 5).unwrap();
            let bm = berlekamp_massey(&s);
            match p.recurrence {
                Some(r) => prop_assert_eq!(r.order, bm),
                None => prop_assert!(bm > 5),
            }
        }
    }
}
