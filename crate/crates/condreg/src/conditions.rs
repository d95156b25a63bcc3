//! k-DNF conditions over Boolean attribute vectors.
//!
//! A condition is an OR of terms, each term an AND of at most `k` literals
//! (an attribute or its negation). Conditions select the sub-population a
//! regression fit is allowed to specialize to, so everything here is plain
//! data: immutable after construction and freely shared across worker threads.
//!
//! Terms are kept in a single canonical order (ascending size, then
//! lexicographically by attribute index with the positive literal before the
//! negated one). Enumeration, `Dnf` construction, and serialization all use
//! that order, which is what makes search results reproducible byte for byte.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::BoolMat;

/// One Boolean attribute, possibly negated. Attribute indices are zero-based
/// internally; the serialized form is a signed one-based integer (`+i` for
/// the plain attribute, `-i` for its negation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub attribute: usize,
    pub negated: bool,
}

impl Literal {
    pub fn positive(attribute: usize) -> Self {
        Literal {
            attribute,
            negated: false,
        }
    }

    pub fn negative(attribute: usize) -> Self {
        Literal {
            attribute,
            negated: true,
        }
    }

    /// Signed one-based encoding used in JSON: `+i` for xᵢ, `-i` for ¬xᵢ.
    pub fn to_signed(self) -> i64 {
        let i = self.attribute as i64 + 1;
        if self.negated {
            -i
        } else {
            i
        }
    }

    pub fn from_signed(v: i64) -> Result<Self> {
        if v == 0 {
            return Err(Error::parameter("literal 0 is not a valid signed encoding"));
        }
        Ok(Literal {
            attribute: (v.unsigned_abs() - 1) as usize,
            negated: v < 0,
        })
    }

    pub fn holds(self, x: &[bool]) -> bool {
        x[self.attribute] != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "!x{}", self.attribute + 1)
        } else {
            write!(f, "x{}", self.attribute + 1)
        }
    }
}

/// A conjunction of literals over distinct attributes. Width bounds (the `k`
/// in k-DNF) are enforced where terms are enumerated, not stored here.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    literals: Vec<Literal>,
}

impl Term {
    /// Builds a term, sorting literals into canonical attribute order.
    /// Rejects empty literal sets and any attribute that appears twice,
    /// whether duplicated or with both polarities (x ∧ ¬x is never true).
    pub fn new(mut literals: Vec<Literal>) -> Result<Self> {
        if literals.is_empty() {
            return Err(Error::parameter("term must contain at least one literal"));
        }
        literals.sort();
        for pair in literals.windows(2) {
            if pair[0].attribute == pair[1].attribute {
                return Err(Error::parameter(format!(
                    "attribute {} appears twice in one term",
                    pair[0].attribute + 1
                )));
            }
        }
        Ok(Term { literals })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True iff every literal holds under `x`.
    ///
    /// Panics if an attribute index is out of range; arity is validated once
    /// at the dataset boundary, not per evaluation.
    pub fn satisfied_by(&self, x: &[bool]) -> bool {
        self.literals.iter().all(|lit| lit.holds(x))
    }

    pub fn max_attribute(&self) -> usize {
        // Literals are sorted by attribute, so the last one is the largest.
        self.literals.last().expect("term is never empty").attribute
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    /// Canonical order: smaller terms first, ties broken lexicographically by
    /// (attribute, polarity). This is exactly the order `enumerate_terms`
    /// produces.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.literals
            .len()
            .cmp(&other.literals.len())
            .then_with(|| self.literals.cmp(&other.literals))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for lit in &self.literals {
            if !first {
                write!(f, " & ")?;
            }
            write!(f, "{lit}")?;
            first = false;
        }
        Ok(())
    }
}

/// A disjunction of terms in canonical order with duplicates removed.
/// The empty disjunction is allowed and is identically false.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "DnfRepr", into = "DnfRepr")]
pub struct Dnf {
    terms: Vec<Term>,
}

impl Dnf {
    pub fn new(mut terms: Vec<Term>) -> Self {
        terms.sort();
        terms.dedup();
        Dnf { terms }
    }

    pub fn empty() -> Self {
        Dnf { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_attribute(&self) -> Option<usize> {
        self.terms.iter().map(Term::max_attribute).max()
    }

    /// True iff some term is satisfied; the empty disjunction is false.
    pub fn satisfied_by(&self, x: &[bool]) -> bool {
        self.terms.iter().any(|t| t.satisfied_by(x))
    }

    /// Counts satisfied rows and returns `(count, count / m)`.
    pub fn coverage(&self, xs: &BoolMat) -> Result<(usize, f64)> {
        let m = xs.rows();
        if m == 0 {
            return Err(Error::parameter("coverage is undefined on an empty dataset"));
        }
        if let Some(a) = self.max_attribute() {
            if a >= xs.cols() {
                return Err(Error::parameter(format!(
                    "condition mentions attribute {} but rows have {} attributes",
                    a + 1,
                    xs.cols()
                )));
            }
        }
        let count = xs.iter_rows().filter(|x| self.satisfied_by(x)).count();
        Ok((count, count as f64 / m as f64))
    }
}

impl fmt::Display for Dnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "false");
        }
        let mut first = true;
        for t in &self.terms {
            if !first {
                write!(f, " | ")?;
            }
            write!(f, "({t})")?;
            first = false;
        }
        Ok(())
    }
}

/// Wire form: `{"terms": [[+1,-3],[+2]]}` with signed one-based literals.
#[derive(Serialize, Deserialize)]
struct DnfRepr {
    terms: Vec<Vec<i64>>,
}

impl From<Dnf> for DnfRepr {
    fn from(dnf: Dnf) -> Self {
        DnfRepr {
            terms: dnf
                .terms
                .iter()
                .map(|t| t.literals.iter().map(|l| l.to_signed()).collect())
                .collect(),
        }
    }
}

impl TryFrom<DnfRepr> for Dnf {
    type Error = String;

    fn try_from(repr: DnfRepr) -> std::result::Result<Self, String> {
        let mut terms = Vec::with_capacity(repr.terms.len());
        for encoded in &repr.terms {
            let literals = encoded
                .iter()
                .map(|&v| Literal::from_signed(v))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| e.to_string())?;
            terms.push(Term::new(literals).map_err(|e| e.to_string())?);
        }
        Ok(Dnf::new(terms))
    }
}

/// Lists every term of 1 to `k` literals over `n` attributes in canonical
/// order. The result has Σ_{j=1..k} C(n,j)·2ʲ entries; always-true (empty)
/// terms and contradictions are never produced.
pub fn enumerate_terms(n: usize, k: usize) -> Result<Vec<Term>> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::parameter(format!(
            "term enumeration needs 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(k);
    for size in 1..=k {
        extend_terms(n, size, 0, &mut prefix, &mut out);
    }
    Ok(out)
}

fn extend_terms(
    n: usize,
    size: usize,
    first_attr: usize,
    prefix: &mut Vec<Literal>,
    out: &mut Vec<Term>,
) {
    if prefix.len() == size {
        out.push(Term {
            literals: prefix.clone(),
        });
        return;
    }
    let remaining = size - prefix.len();
    // Leave room for the literals still to come; attributes ascend strictly.
    for attribute in first_attr..=(n - remaining) {
        for negated in [false, true] {
            prefix.push(Literal { attribute, negated });
            extend_terms(n, size, attribute + 1, prefix, out);
            prefix.pop();
        }
    }
}

/// Checks that every attribute a condition mentions exists in `n` columns.
pub fn check_arity(dnf: &Dnf, n: usize) -> Result<()> {
    match dnf.max_attribute() {
        Some(a) if a >= n => Err(Error::parameter(format!(
            "condition mentions attribute {} but data has {} attributes",
            a + 1,
            n
        ))),
        _ => Ok(()),
    }
}

/// Convenience for tests and generators: the distinct attribute sets touched
/// by each term.
pub fn term_attribute_sets(dnf: &Dnf) -> Vec<HashSet<usize>> {
    dnf.terms()
        .iter()
        .map(|t| t.literals().iter().map(|l| l.attribute).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn term(lits: &[i64]) -> Term {
        Term::new(
            lits.iter()
                .map(|&v| Literal::from_signed(v).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn dnf(terms: &[&[i64]]) -> Dnf {
        Dnf::new(terms.iter().map(|t| term(t)).collect())
    }

    fn binomial(n: u128, k: u128) -> u128 {
        if k > n {
            return 0;
        }
        let mut acc = 1u128;
        for j in 0..k {
            acc = acc * (n - j) / (j + 1);
        }
        acc
    }

    #[test]
    fn enumeration_matches_small_cases() {
        let terms = enumerate_terms(2, 1).unwrap();
        assert_eq!(
            terms,
            vec![term(&[1]), term(&[-1]), term(&[2]), term(&[-2])]
        );

        assert_eq!(enumerate_terms(10, 2).unwrap().len(), 200);
        assert_eq!(enumerate_terms(1, 1).unwrap().len(), 2);
    }

    #[test]
    fn enumeration_rejects_bad_parameters() {
        assert!(enumerate_terms(0, 1).is_err());
        assert!(enumerate_terms(3, 0).is_err());
        assert!(enumerate_terms(3, 4).is_err());
    }

    #[test]
    fn enumeration_count_formula_exhaustive() {
        for n in 1..=12u128 {
            for k in 1..=n {
                let expect: u128 = (1..=k).map(|j| binomial(n, j) << j).sum();
                let got = enumerate_terms(n as usize, k as usize).unwrap().len();
                assert_eq!(got as u128, expect, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn enumeration_is_sorted_and_duplicate_free() {
        let terms = enumerate_terms(5, 3).unwrap();
        for pair in terms.windows(2) {
            assert!(pair[0] < pair[1]);
        }
        // Deterministic: a second call yields the identical sequence.
        assert_eq!(terms, enumerate_terms(5, 3).unwrap());
    }

    #[test]
    fn term_construction_normalizes_and_validates() {
        assert_eq!(term(&[-2, 1]), term(&[1, -2]));
        assert!(Term::new(vec![]).is_err());
        assert!(Term::new(vec![Literal::positive(0), Literal::positive(0)]).is_err());
        assert!(Term::new(vec![Literal::positive(0), Literal::negative(0)]).is_err());
    }

    #[test]
    fn term_satisfaction() {
        let t = term(&[1, -2]);
        assert!(t.satisfied_by(&[true, false]));
        assert!(!t.satisfied_by(&[true, true]));
        assert!(term(&[3]).satisfied_by(&[false, false, true]));
    }

    #[test]
    fn dnf_satisfaction() {
        let any = [true, false];
        assert!(!Dnf::empty().satisfied_by(&any));
        let tautology = dnf(&[&[1], &[-1]]);
        assert!(tautology.satisfied_by(&[true]));
        assert!(tautology.satisfied_by(&[false]));
        assert!(!dnf(&[&[1, 2]]).satisfied_by(&[true, false]));
    }

    #[test]
    fn coverage_counts_and_fractions() {
        let xs = BoolMat::from_rows(&[vec![true], vec![false], vec![true]]).unwrap();
        assert_eq!(dnf(&[&[1]]).coverage(&xs).unwrap(), (2, 2.0 / 3.0));
        assert_eq!(Dnf::empty().coverage(&xs).unwrap(), (0, 0.0));

        let rows: Vec<Vec<bool>> = (0..5).map(|i| vec![i % 2 == 0]).collect();
        let five = BoolMat::from_rows(&rows).unwrap();
        assert_eq!(dnf(&[&[1], &[-1]]).coverage(&five).unwrap(), (5, 1.0));

        let empty = BoolMat::from_vec(vec![], 0, 1).unwrap();
        assert!(dnf(&[&[1]]).coverage(&empty).is_err());
        let narrow = BoolMat::from_rows(&[vec![true]]).unwrap();
        assert!(dnf(&[&[2]]).coverage(&narrow).is_err());
    }

    #[test]
    fn dnf_canonicalizes_order_and_duplicates() {
        let a = dnf(&[&[2], &[1, -2], &[1]]);
        let b = dnf(&[&[1], &[1], &[2], &[-2, 1]]);
        assert_eq!(a, b);
        assert_eq!(a.terms()[0], term(&[1]));
        assert_eq!(a.terms()[2], term(&[1, -2]));
    }

    #[test]
    fn json_round_trip_uses_signed_literals() {
        let c = dnf(&[&[1, -3], &[2]]);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(text, r#"{"terms":[[2],[1,-3]]}"#);
        let back: Dnf = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);

        let noncanonical: Dnf = serde_json::from_str(r#"{"terms":[[-3,1],[2],[2]]}"#).unwrap();
        assert_eq!(noncanonical, c);
        assert!(serde_json::from_str::<Dnf>(r#"{"terms":[[0]]}"#).is_err());
        assert!(serde_json::from_str::<Dnf>(r#"{"terms":[[1,-1]]}"#).is_err());
        assert!(serde_json::from_str::<Dnf>(r#"{"terms":[[]]}"#).is_err());
    }

    #[test]
    fn display_forms() {
        assert_eq!(dnf(&[&[1, -3], &[2]]).to_string(), "(x2) | (x1 & !x3)");
        assert_eq!(Dnf::empty().to_string(), "false");
    }

    /// Truth-table oracle: evaluate the DNF from its serialized signed form,
    /// independently of `satisfied_by`.
    fn oracle_eval(c: &Dnf, x: &[bool]) -> bool {
        let repr: serde_json::Value = serde_json::to_value(c).unwrap();
        repr["terms"].as_array().unwrap().iter().any(|t| {
            t.as_array().unwrap().iter().all(|v| {
                let v = v.as_i64().unwrap();
                let attr = v.unsigned_abs() as usize - 1;
                if v > 0 {
                    x[attr]
                } else {
                    !x[attr]
                }
            })
        })
    }

    fn arbitrary_dnf(n: usize, k: usize) -> impl Strategy<Value = Dnf> {
        let all = enumerate_terms(n, k).unwrap();
        let most = all.len().min(6);
        proptest::sample::subsequence(all, 0..=most).prop_map(Dnf::new)
    }

    proptest! {
        #[test]
        fn satisfaction_matches_truth_table_oracle(
            c in (1usize..=4).prop_flat_map(|n| (Just(n), arbitrary_dnf(n, n.min(2)))),
        ) {
            let (n, c) = c;
            for bits in 0..(1u32 << n) {
                let x: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
                prop_assert_eq!(c.satisfied_by(&x), oracle_eval(&c, &x));
            }
        }

        #[test]
        fn adding_a_term_never_reduces_coverage(
            (c, extra, rows) in (2usize..=5).prop_flat_map(|n| (
                arbitrary_dnf(n, 2),
                proptest::sample::select(enumerate_terms(n, 2).unwrap()),
                proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), 1..20),
            )),
        ) {
            let xs = BoolMat::from_rows(&rows).unwrap();
            let base = c.coverage(&xs).unwrap();
            let mut terms = c.terms().to_vec();
            terms.push(extra);
            let wider = Dnf::new(terms).coverage(&xs).unwrap();
            prop_assert!(wider.0 >= base.0);
            prop_assert!(wider.1 >= base.1);
        }
    }
}
