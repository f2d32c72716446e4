//! Values of the free associative algebra on `x1, x2, y1, y2` over the
//! parameter field, with the bigraded structure used by the center solver.
//!
//! Words compare by bidegree (x-count, then y-count) and then letterwise
//! under the fixed order `x1 < x2 < y1 < y2`; that order is also the term
//! order of canonical renderings.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::params::{ArithError, ConstraintSet, ParamName, Scalar};

/// One of the four generators, in the fixed PBW order `x1 < x2 < y1 < y2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Letter {
    X1,
    X2,
    Y1,
    Y2,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::X1, Letter::X2, Letter::Y1, Letter::Y2];

    pub fn is_x(self) -> bool {
        matches!(self, Letter::X1 | Letter::X2)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Letter::X1 => "x1",
            Letter::X2 => "x2",
            Letter::Y1 => "y1",
            Letter::Y2 => "y2",
        }
    }

    pub fn parse(s: &str) -> Option<Letter> {
        Letter::ALL.iter().copied().find(|l| l.as_str() == s)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The `N^2` grading: (number of x-letters, number of y-letters).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bidegree {
    pub x: u32,
    pub y: u32,
}

impl Bidegree {
    pub fn new(x: u32, y: u32) -> Bidegree {
        Bidegree { x, y }
    }

    pub fn add(self, other: Bidegree) -> Bidegree {
        Bidegree {
            x: self.x + other.x,
            y: self.y + other.y,
        }
    }

    /// Componentwise comparison used by scan bounds.
    pub fn within(self, bound: Bidegree) -> bool {
        self.x <= bound.x && self.y <= bound.y
    }

    pub fn total(self) -> u32 {
        self.x + self.y
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// A finite word over the four letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    pub fn from_letters(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn bidegree(&self) -> Bidegree {
        let x = self.0.iter().filter(|l| l.is_x()).count() as u32;
        Bidegree::new(x, self.0.len() as u32 - x)
    }

    /// Whether the letters are nondecreasing, i.e. the word is a PBW monomial.
    pub fn is_ordered(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    /// Deglex comparison: length first, then letterwise.
    pub fn deglex_cmp(&self, other: &Word) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }

    /// Render with powers for adjacent repeats, e.g. `x1^2*y1*y2`.
    pub fn render(&self) -> String {
        use alloc::format;
        if self.0.is_empty() {
            return String::from("1");
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut n = 1;
            while i + n < self.0.len() && self.0[i + n] == l {
                n += 1;
            }
            if n == 1 {
                parts.push(format!("{l}"));
            } else {
                parts.push(format!("{l}^{n}"));
            }
            i += n;
        }
        parts.join("*")
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = self.bidegree();
        let b = other.bidegree();
        (a.x, a.y)
            .cmp(&(b.x, b.y))
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Exponents `(i, j, k, l)` of an ordered monomial `x1^i x2^j y1^k y2^l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PbwMonomial {
    pub i: u32,
    pub j: u32,
    pub k: u32,
    pub l: u32,
}

impl PbwMonomial {
    pub fn new(i: u32, j: u32, k: u32, l: u32) -> PbwMonomial {
        PbwMonomial { i, j, k, l }
    }

    pub fn bidegree(&self) -> Bidegree {
        Bidegree::new(self.i + self.j, self.k + self.l)
    }

    pub fn to_word(&self) -> Word {
        let mut v = Vec::with_capacity((self.i + self.j + self.k + self.l) as usize);
        v.extend(core::iter::repeat(Letter::X1).take(self.i as usize));
        v.extend(core::iter::repeat(Letter::X2).take(self.j as usize));
        v.extend(core::iter::repeat(Letter::Y1).take(self.k as usize));
        v.extend(core::iter::repeat(Letter::Y2).take(self.l as usize));
        Word(v)
    }

    pub fn from_word(w: &Word) -> Option<PbwMonomial> {
        if !w.is_ordered() {
            return None;
        }
        let mut counts = [0u32; 4];
        for l in w.letters() {
            counts[*l as usize] += 1;
        }
        Some(PbwMonomial::new(counts[0], counts[1], counts[2], counts[3]))
    }
}

impl fmt::Display for PbwMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_word().render())
    }
}

/// All PBW monomials of one bidegree, in descending lexicographic order of
/// `(i, k)` (so `x1^a` comes first at bidegree `(a, 0)`).
pub fn enumerate_pbw(bd: Bidegree) -> Vec<PbwMonomial> {
    let mut out = Vec::with_capacity(((bd.x + 1) * (bd.y + 1)) as usize);
    for i in (0..=bd.x).rev() {
        for k in (0..=bd.y).rev() {
            out.push(PbwMonomial::new(i, bd.x - i, k, bd.y - k));
        }
    }
    out
}

/// Finitely supported map from words to scalars: an element of the free
/// algebra. No zero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Element {
    terms: BTreeMap<Word, Scalar>,
}

impl Element {
    pub fn zero() -> Element {
        Element::default()
    }

    pub fn one() -> Element {
        Element::term(Word::empty(), Scalar::one())
    }

    pub fn letter(l: Letter) -> Element {
        Element::term(Word::letter(l), Scalar::one())
    }

    pub fn word(w: Word) -> Element {
        Element::term(w, Scalar::one())
    }

    pub fn pbw(m: PbwMonomial) -> Element {
        Element::word(m.to_word())
    }

    pub fn term(w: Word, c: Scalar) -> Element {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        Element { terms }
    }

    pub fn scalar(c: Scalar) -> Element {
        Element::term(Word::empty(), c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn insert_add(&mut self, w: Word, c: Scalar, cs: &ConstraintSet) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(existing) => {
                *existing = existing.add(&c, cs);
                if existing.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add(&self, other: &Element, cs: &ConstraintSet) -> Element {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.insert_add(w.clone(), c.clone(), cs);
        }
        out
    }

    pub fn sub(&self, other: &Element, cs: &ConstraintSet) -> Element {
        self.add(&other.neg(), cs)
    }

    pub fn neg(&self) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.neg()))
                .collect(),
        }
    }

    /// Free-algebra product: concatenates words and convolves coefficients.
    pub fn mul(&self, other: &Element, cs: &ConstraintSet) -> Element {
        let mut out = Element::zero();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                out.insert_add(wa.concat(wb), ca.mul(cb, cs), cs);
            }
        }
        out
    }

    pub fn scalar_mul(&self, c: &Scalar, cs: &ConstraintSet) -> Element {
        let mut out = Element::zero();
        for (w, k) in &self.terms {
            out.insert_add(w.clone(), k.mul(c, cs), cs);
        }
        out
    }

    pub fn rational_mul(&self, r: &BigRational) -> Element {
        if r.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.mul_rational(r)))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32, cs: &ConstraintSet) -> Element {
        let mut out = Element::one();
        for _ in 0..n {
            out = out.mul(self, cs);
        }
        out
    }

    pub fn eq_element(&self, other: &Element, cs: &ConstraintSet) -> bool {
        self == other || self.sub(other, cs).is_zero()
    }

    /// Split into bihomogeneous components; the values sum to `self`.
    pub fn bidegree_split(&self) -> BTreeMap<Bidegree, Element> {
        let mut out: BTreeMap<Bidegree, Element> = BTreeMap::new();
        for (w, c) in &self.terms {
            out.entry(w.bidegree())
                .or_default()
                .terms
                .insert(w.clone(), c.clone());
        }
        out
    }

    /// Whether all words share one bidegree (zero counts as homogeneous).
    pub fn is_bihomogeneous(&self) -> bool {
        self.bidegree().is_some() || self.is_zero()
    }

    /// The common bidegree of all terms, if there is one.
    pub fn bidegree(&self) -> Option<Bidegree> {
        let mut it = self.terms.keys();
        let bd = it.next()?.bidegree();
        if it.all(|w| w.bidegree() == bd) {
            Some(bd)
        } else {
            None
        }
    }

    /// Substitute rational values for parameters in every coefficient.
    pub fn specialize(
        &self,
        assignment: &BTreeMap<ParamName, BigRational>,
        cs: &ConstraintSet,
    ) -> Result<Element, ArithError> {
        let mut out = Element::zero();
        for (w, c) in &self.terms {
            out.insert_add(w.clone(), c.specialize(assignment, cs)?, cs);
        }
        Ok(out)
    }

    /// Canonical text rendering: terms in the canonical word order,
    /// coefficients in canonical scalar form, e.g. `(-2*p)*x1*y1*y2`.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return String::from("0");
        }
        let mut s = String::new();
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                s.push_str(" + ");
            }
            let coeff = c.render();
            if w.is_empty() {
                if coeff.contains(' ') || coeff.contains('/') {
                    s.push('(');
                    s.push_str(&coeff);
                    s.push(')');
                } else {
                    s.push_str(&coeff);
                }
            } else if c.is_one() {
                s.push_str(&w.render());
            } else {
                s.push('(');
                s.push_str(&coeff);
                s.push_str(")*");
                s.push_str(&w.render());
            }
        }
        s
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// The pre-normal-form commutator `u*v - v*u`.
pub fn raw_commutator(u: &Element, v: &Element, cs: &ConstraintSet) -> Element {
    u.mul(v, cs).sub(&v.mul(u, cs), cs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::MinimalPoly;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};

    fn x1() -> Element {
        Element::letter(Letter::X1)
    }
    fn x2() -> Element {
        Element::letter(Letter::X2)
    }
    fn y1() -> Element {
        Element::letter(Letter::Y1)
    }
    fn y2() -> Element {
        Element::letter(Letter::Y2)
    }

    #[test]
    fn product_concatenates() {
        let cs = ConstraintSet::empty();
        let prod = x1().mul(&x2(), &cs);
        assert_eq!(
            prod,
            Element::word(Word::from_letters(vec![Letter::X1, Letter::X2]))
        );
    }

    #[test]
    fn noncommutative_expansion_keeps_order() {
        let cs = ConstraintSet::empty();
        let lhs = x1().add(&y1(), &cs);
        let rhs = x1().sub(&y1(), &cs);
        let prod = lhs.mul(&rhs, &cs);
        // x1x1 - x1y1 + y1x1 - y1y1, no collapsing
        assert_eq!(prod.num_terms(), 4);
        let y1x1 = Word::from_letters(vec![Letter::Y1, Letter::X1]);
        assert!(prod.coeff(&y1x1).is_one());
        let x1y1 = Word::from_letters(vec![Letter::X1, Letter::Y1]);
        assert_eq!(prod.coeff(&x1y1), Scalar::from_integer(-1));
    }

    #[test]
    fn coefficient_addition_under_constraint() {
        // p*(y1y2) + p*(y1y2) = 2p*(y1y2) with p^2 = -1 active
        let cs = ConstraintSet::empty().with(
            ParamName::P,
            MinimalPoly::quadratic(
                BigRational::from_integer(BigInt::from(0)),
                BigRational::from_integer(BigInt::from(-1)),
            )
            .unwrap(),
        );
        let w = Word::from_letters(vec![Letter::Y1, Letter::Y2]);
        let t = Element::term(w.clone(), Scalar::param(ParamName::P));
        let sum = t.add(&t, &cs);
        assert_eq!(
            sum.coeff(&w),
            Scalar::param(ParamName::P).mul_rational(&BigRational::from_integer(BigInt::from(2)))
        );
    }

    #[test]
    fn raw_commutator_examples() {
        let cs = ConstraintSet::empty();
        assert!(raw_commutator(&x1(), &x1(), &cs).is_zero());
        let c = raw_commutator(&x2(), &x1(), &cs);
        assert_eq!(
            c.coeff(&Word::from_letters(vec![Letter::X2, Letter::X1])),
            Scalar::from_integer(1)
        );
        assert_eq!(
            c.coeff(&Word::from_letters(vec![Letter::X1, Letter::X2])),
            Scalar::from_integer(-1)
        );
        let c2 = raw_commutator(&y1(), &x2(), &cs);
        assert_eq!(c2.num_terms(), 2);
    }

    #[test]
    fn bidegree_split_examples() {
        let cs = ConstraintSet::empty();
        let e = x1().pow(2, &cs).add(&y1().mul(&y2(), &cs), &cs);
        let split = e.bidegree_split();
        assert_eq!(split.len(), 2);
        assert!(split.contains_key(&Bidegree::new(2, 0)));
        assert!(split.contains_key(&Bidegree::new(0, 2)));
        assert!(Element::zero().bidegree_split().is_empty());
        let mixed = x1().mul(&y2(), &cs).add(&y2().mul(&x1(), &cs), &cs);
        assert_eq!(mixed.bidegree_split().len(), 1);
    }

    #[test]
    fn enumerate_pbw_matches_examples() {
        let names: Vec<String> = enumerate_pbw(Bidegree::new(2, 0))
            .iter()
            .map(|m| m.to_word().render())
            .collect();
        assert_eq!(names, vec!["x1^2", "x1*x2", "x2^2"]);
        let names: Vec<String> = enumerate_pbw(Bidegree::new(0, 2))
            .iter()
            .map(|m| m.to_word().render())
            .collect();
        assert_eq!(names, vec!["y1^2", "y1*y2", "y2^2"]);
        let names: Vec<String> = enumerate_pbw(Bidegree::new(1, 1))
            .iter()
            .map(|m| m.to_word().render())
            .collect();
        assert_eq!(names, vec!["x1*y1", "x1*y2", "x2*y1", "x2*y2"]);
        for a in 0..=6u32 {
            for b in 0..=6u32 {
                assert_eq!(
                    enumerate_pbw(Bidegree::new(a, b)).len(),
                    ((a + 1) * (b + 1)) as usize
                );
            }
        }
    }

    fn random_element(rng: &mut impl Rng, cs: &ConstraintSet) -> Element {
        let mut e = Element::zero();
        for _ in 0..rng.gen_range(1..4) {
            let len = rng.gen_range(0..4);
            let letters: Vec<Letter> = (0..len)
                .map(|_| Letter::ALL[rng.gen_range(0..4)])
                .collect();
            let c = Scalar::from_rational(BigRational::new(
                BigInt::from(rng.gen_range(-5..6)),
                BigInt::from(rng.gen_range(1..4)),
            ));
            e.insert_add(Word::from_letters(letters), c, cs);
        }
        e
    }

    #[test]
    fn multiplication_is_associative() {
        let cs = ConstraintSet::empty();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a = random_element(&mut rng, &cs);
            let b = random_element(&mut rng, &cs);
            let c = random_element(&mut rng, &cs);
            let lhs = a.mul(&b, &cs).mul(&c, &cs);
            let rhs = a.mul(&b.mul(&c, &cs), &cs);
            assert!(lhs.eq_element(&rhs, &cs));
        }
    }

    #[test]
    fn bidegree_split_respects_products() {
        let cs = ConstraintSet::empty();
        let a = x1().add(&x2(), &cs); // homogeneous (1,0)
        let b = y1().mul(&y2(), &cs); // homogeneous (0,2)
        let prod = a.mul(&b, &cs);
        let split = prod.bidegree_split();
        assert_eq!(split.len(), 1);
        assert!(split.contains_key(&Bidegree::new(1, 2)));
    }

    #[test]
    fn render_canonical_form() {
        let cs = ConstraintSet::empty();
        let w = Word::from_letters(vec![Letter::X1, Letter::Y1, Letter::Y2]);
        let c =
            Scalar::param(ParamName::P).mul_rational(&BigRational::from_integer(BigInt::from(-2)));
        let e = Element::term(w, c);
        assert_eq!(e.render(), "(-2*p)*x1*y1*y2");
        assert_eq!(Element::zero().render(), "0");
        let one_term = x1().pow(2, &cs);
        assert_eq!(one_term.render(), "x1^2");
    }
}
