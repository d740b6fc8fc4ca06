//! Exact row rank by Gaussian elimination over `Q` or `Q(√d)`.

use crate::field::{FieldTag, QuadraticFieldScalar};
use crate::{Error, Result};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// The operations the elimination needs.
pub trait Field: Clone {
    fn is_zero(&self) -> bool;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Multiplicative inverse of a nonzero element.
    fn inv(&self) -> Self;
}

impl Field for BigRational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn inv(&self) -> Self {
        BigRational::one() / self
    }
}

impl Field for QuadraticFieldScalar {
    fn is_zero(&self) -> bool {
        QuadraticFieldScalar::is_zero(self)
    }
    fn sub(&self, other: &Self) -> Self {
        QuadraticFieldScalar::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        QuadraticFieldScalar::mul(self, other)
    }
    fn inv(&self) -> Self {
        QuadraticFieldScalar::inv(self).expect("pivot is nonzero")
    }
}

/// Rank of the span of `rows`, each of which must have `num_symbols` entries.
pub fn rank<F: Field>(rows: &[Vec<F>], num_symbols: usize) -> Result<usize> {
    for (idx, row) in rows.iter().enumerate() {
        if row.len() != num_symbols {
            return Err(Error::Input(format!(
                "relation {idx} has {} coefficients, expected {num_symbols}",
                row.len()
            )));
        }
    }
    let mut m: Vec<Vec<F>> = rows.to_vec();
    let mut rank = 0;
    for col in 0..num_symbols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = m[rank][col].inv();
        let pivot_row: Vec<F> = m[rank].iter().map(|x| x.mul(&inv)).collect();
        for row in m.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x = x.sub(&factor.mul(p));
            }
        }
        m[rank] = pivot_row;
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    Ok(rank)
}

/// Rank over the field `field`, promoting rational coefficients into it.
pub fn rank_over_field(
    relations: &[Vec<QuadraticFieldScalar>],
    num_symbols: usize,
    field: FieldTag,
) -> Result<usize> {
    let promoted = relations
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| x.promote(field))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    rank(&promoted, num_symbols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rows(v: &[&[i64]]) -> Vec<Vec<BigRational>> {
        v.iter()
            .map(|r| {
                r.iter()
                    .map(|&x| BigRational::from_integer(BigInt::from(x)))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn empty_relations_have_rank_zero() {
        assert_eq!(rank::<BigRational>(&[], 4).unwrap(), 0);
    }

    #[test]
    fn duplicates_do_not_count() {
        let m = rows(&[&[1, 2, 3], &[1, 2, 3], &[2, 4, 6], &[0, 1, 0]]);
        assert_eq!(rank(&m, 3).unwrap(), 2);
    }

    #[test]
    fn inconsistent_lengths_are_an_input_error() {
        let m = rows(&[&[1, 2], &[1]]);
        assert!(matches!(rank(&m, 2), Err(Error::Input(_))));
    }

    #[test]
    fn rank_over_imaginary_field_differs_from_rational() {
        // (1, γ) and (γ, d) are proportional over Q(γ) but not over Q.
        let f = FieldTag::imaginary(-3).unwrap();
        let g = QuadraticFieldScalar::generator(f).unwrap();
        let one = QuadraticFieldScalar::one();
        let d = QuadraticFieldScalar::from_integer(-3);
        let m = vec![vec![one, g.clone()], vec![g, d]];
        assert_eq!(rank_over_field(&m, 2, f).unwrap(), 1);
        assert!(rank_over_field(&m, 2, FieldTag::Rational).is_err());
    }
}
