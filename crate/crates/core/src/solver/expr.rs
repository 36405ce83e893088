use std::collections::BTreeMap;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use super::Var;

/// Sparse affine expression `Σ c·x + constant`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(Var, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(v: Var, coef: f64) -> Self {
        LinExpr { terms: vec![(v, coef)], constant: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        LinExpr { terms: Vec::new(), constant: c }
    }

    pub fn add_term(&mut self, v: Var, coef: f64) -> &mut Self {
        self.terms.push((v, coef));
        self
    }

    pub fn add_constant(&mut self, c: f64) -> &mut Self {
        self.constant += c;
        self
    }

    /// Merge repeated handles (summing their coefficients) and drop zeros.
    pub fn canonical(mut self) -> Self {
        if self.terms.len() > 1 {
            let mut merged: BTreeMap<Var, f64> = BTreeMap::new();
            for (v, c) in self.terms.drain(..) {
                *merged.entry(v).or_insert(0.0) += c;
            }
            self.terms = merged.into_iter().collect();
        }
        self.terms.retain(|&(_, c)| c != 0.0);
        self
    }

    pub fn evaluate(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum::<f64>() + self.constant
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl From<Var> for LinExpr {
    fn from(v: Var) -> Self {
        LinExpr::term(v, 1.0)
    }
}

impl From<f64> for LinExpr {
    fn from(c: f64) -> Self {
        LinExpr::constant(c)
    }
}

impl<T: Into<LinExpr>> Add<T> for LinExpr {
    type Output = LinExpr;
    fn add(mut self, rhs: T) -> LinExpr {
        self += rhs;
        self
    }
}

impl<T: Into<LinExpr>> AddAssign<T> for LinExpr {
    fn add_assign(&mut self, rhs: T) {
        let rhs = rhs.into();
        self.terms.extend(rhs.terms);
        self.constant += rhs.constant;
    }
}

impl<T: Into<LinExpr>> Sub<T> for LinExpr {
    type Output = LinExpr;
    fn sub(mut self, rhs: T) -> LinExpr {
        self -= rhs;
        self
    }
}

impl<T: Into<LinExpr>> SubAssign<T> for LinExpr {
    fn sub_assign(&mut self, rhs: T) {
        let rhs = rhs.into();
        self.terms.extend(rhs.terms.into_iter().map(|(v, c)| (v, -c)));
        self.constant -= rhs.constant;
    }
}

impl Mul<f64> for LinExpr {
    type Output = LinExpr;
    fn mul(mut self, k: f64) -> LinExpr {
        for t in &mut self.terms {
            t.1 *= k;
        }
        self.constant *= k;
        self
    }
}

impl Neg for LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        self * -1.0
    }
}

impl Sum for LinExpr {
    fn sum<I: Iterator<Item = LinExpr>>(iter: I) -> LinExpr {
        iter.fold(LinExpr::default(), |acc, e| acc + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn repeated_handle_is_merged() {
        let x = Var(0);
        let y = Var(1);
        let e = (LinExpr::term(x, 2.0) + LinExpr::term(y, 1.0) + LinExpr::term(x, 3.5)).canonical();
        assert_eq!(e.terms, vec![(x, 5.5), (y, 1.0)]);
    }

    #[test]
    fn cancelling_terms_vanish() {
        let x = Var(0);
        let e = (LinExpr::from(x) - x).canonical();
        assert!(e.is_empty());
    }

    proptest! {
        #[test]
        fn canonical_form_preserves_value(
            terms in proptest::collection::vec((0usize..4, -10.0f64..10.0), 0..12),
            values in proptest::collection::vec(-5.0f64..5.0, 4),
            constant in -3.0f64..3.0,
        ) {
            let mut e = LinExpr::constant(constant);
            for (i, c) in &terms {
                e.add_term(Var(*i), *c);
            }
            let before = e.evaluate(&values);
            let canon = e.canonical();
            let after = canon.evaluate(&values);
            prop_assert!((before - after).abs() < 1e-9);
            let mut seen = std::collections::HashSet::new();
            for (v, _) in &canon.terms {
                prop_assert!(seen.insert(*v));
            }
        }
    }
}
