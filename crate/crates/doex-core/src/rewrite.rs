//! Iterated-rewriting normal forms for the six two-letter rules of a family.
//!
//! Each rule replaces a descending "bad pair" of adjacent letters by a
//! bidegree-homogeneous combination of strictly smaller words, so iterating
//! single-step reduction terminates in a PBW normal form. Reduction is
//! leftmost-first within each term: one scan pass applies at most one rewrite
//! per term, and `normal_form` runs passes to a fixpoint under a step budget.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::algebra::{raw_commutator, Element, Letter, Word};
use crate::params::ConstraintSet;

/// The six left-hand sides, in canonical order.
pub const RULE_KEYS: [(Letter, Letter); 6] = [
    (Letter::X2, Letter::X1),
    (Letter::Y2, Letter::Y1),
    (Letter::Y1, Letter::X1),
    (Letter::Y1, Letter::X2),
    (Letter::Y2, Letter::X1),
    (Letter::Y2, Letter::X2),
];

/// A single two-letter rule `lhs -> rhs`.
#[derive(Clone, Debug)]
pub struct RewriteRule {
    pub lhs: (Letter, Letter),
    pub rhs: Element,
}

/// Errors raised while building or running a rewrite system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RewriteError {
    /// The fixpoint loop exhausted its step budget; increase `max_steps`
    /// or check whether the rules loop.
    StepBudgetExceeded { max_steps: u32 },
    /// Rule set is not exactly the six expected bad pairs.
    WrongRuleKeys,
    /// A right-hand side is not bidegree-homogeneous of its lhs bidegree.
    InhomogeneousRhs { lhs: (Letter, Letter) },
}

impl fmt::Display for RewriteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RewriteError::StepBudgetExceeded { max_steps } => write!(
                f,
                "normal form did not stabilize within {max_steps} steps; increase max_steps or check whether the rules loop"
            ),
            RewriteError::WrongRuleKeys => {
                write!(f, "a rewrite system needs exactly the six descending letter pairs")
            }
            RewriteError::InhomogeneousRhs { lhs } => write!(
                f,
                "right-hand side of {}*{} is not bidegree-homogeneous of the left-hand side's bidegree",
                lhs.0, lhs.1
            ),
        }
    }
}

/// Default step budget of [`normal_form`].
pub const DEFAULT_MAX_STEPS: u32 = 20000;

/// The six rules of one family together with its active constraints.
#[derive(Clone, Debug)]
pub struct RewriteSystem {
    rules: BTreeMap<(Letter, Letter), Element>,
    constraints: ConstraintSet,
}

impl RewriteSystem {
    /// Build from the six rule right-hand sides. Validates the key set and
    /// bidegree homogeneity; deglex descent is certified separately by
    /// [`check_termination`].
    pub fn new(
        rules: BTreeMap<(Letter, Letter), Element>,
        constraints: ConstraintSet,
    ) -> Result<RewriteSystem, RewriteError> {
        if rules.len() != RULE_KEYS.len() || RULE_KEYS.iter().any(|k| !rules.contains_key(k)) {
            return Err(RewriteError::WrongRuleKeys);
        }
        for (lhs, rhs) in &rules {
            let lhs_bd = Word::from_letters([lhs.0, lhs.1].to_vec()).bidegree();
            if !rhs.is_zero() && rhs.bidegree() != Some(lhs_bd) {
                return Err(RewriteError::InhomogeneousRhs { lhs: *lhs });
            }
        }
        Ok(RewriteSystem { rules, constraints })
    }

    pub fn rule(&self, lhs: (Letter, Letter)) -> &Element {
        &self.rules[&lhs]
    }

    pub fn rules(&self) -> impl Iterator<Item = (&(Letter, Letter), &Element)> {
        self.rules.iter()
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }
}

/// One reduction pass: for each term, replace the leftmost adjacent bad pair
/// (scanning left to right) by the rule's right-hand side in context. Terms
/// with no bad pair pass through. Returns the new element and whether any
/// replacement occurred.
pub fn reduce_once(a: &Element, sys: &RewriteSystem) -> (Element, bool) {
    reduce_once_traced(a, sys, &mut None)
}

fn reduce_once_traced(
    a: &Element,
    sys: &RewriteSystem,
    trace: &mut Option<&mut Vec<String>>,
) -> (Element, bool) {
    let cs = &sys.constraints;
    let mut out = Element::zero();
    let mut changed = false;
    for (word, coeff) in a.terms() {
        let letters = word.letters();
        let mut done = false;
        for i in 0..letters.len().saturating_sub(1) {
            let pair = (letters[i], letters[i + 1]);
            if let Some(rhs) = sys.rules.get(&pair) {
                let prefix = Element::word(Word::from_letters(letters[..i].to_vec()));
                let suffix = Element::word(Word::from_letters(letters[i + 2..].to_vec()));
                let replaced = prefix
                    .mul(rhs, cs)
                    .mul(&suffix, cs)
                    .scalar_mul(coeff, cs);
                if let Some(t) = trace.as_deref_mut() {
                    t.push(format!(
                        "{} : rule({}*{}) -> {}",
                        word.render(),
                        pair.0,
                        pair.1,
                        replaced.render()
                    ));
                }
                out = out.add(&replaced, cs);
                changed = true;
                done = true;
                break;
            }
        }
        if !done {
            out.insert_add(word.clone(), coeff.clone(), cs);
        }
    }
    (out, changed)
}

/// Normal form by iterated rewriting: the fixpoint of [`reduce_once`].
pub fn normal_form(
    a: &Element,
    sys: &RewriteSystem,
    max_steps: u32,
) -> Result<Element, RewriteError> {
    let mut g = a.clone();
    for _ in 0..max_steps {
        let (g2, changed) = reduce_once(&g, sys);
        if !changed {
            return Ok(g);
        }
        g = g2;
    }
    Err(RewriteError::StepBudgetExceeded { max_steps })
}

/// [`normal_form`] with a per-step trace line
/// `word : rule(lhs) -> expansion`.
pub fn normal_form_traced(
    a: &Element,
    sys: &RewriteSystem,
    max_steps: u32,
) -> Result<(Element, Vec<String>), RewriteError> {
    let mut lines = Vec::new();
    let mut g = a.clone();
    for _ in 0..max_steps {
        let mut sink = Some(&mut lines);
        let (g2, changed) = reduce_once_traced(&g, sys, &mut sink);
        if !changed {
            return Ok((g, lines));
        }
        g = g2;
    }
    Err(RewriteError::StepBudgetExceeded { max_steps })
}

/// `NF(u*v - v*u)`.
pub fn nf_commutator(
    u: &Element,
    v: &Element,
    sys: &RewriteSystem,
    max_steps: u32,
) -> Result<Element, RewriteError> {
    normal_form(&raw_commutator(u, v, &sys.constraints), sys, max_steps)
}

/// Outcome of the termination certificate.
#[derive(Clone, Debug)]
pub struct TerminationReport {
    /// Rules whose right-hand side contains a word not strictly
    /// deglex-smaller than the left-hand side.
    pub violations: Vec<((Letter, Letter), Word)>,
}

impl TerminationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Certify termination: every rhs word must be strictly deglex-smaller than
/// its lhs word, which bounds every reduction by the multiset extension of
/// deglex.
pub fn check_termination(sys: &RewriteSystem) -> TerminationReport {
    let mut violations = Vec::new();
    for (lhs, rhs) in &sys.rules {
        let lhs_word = Word::from_letters([lhs.0, lhs.1].to_vec());
        for (w, _) in rhs.terms() {
            if w.deglex_cmp(&lhs_word) != Ordering::Less {
                violations.push((*lhs, w.clone()));
            }
        }
    }
    TerminationReport { violations }
}

/// One overlap `abc` where `(a,b)` and `(b,c)` are both rule keys, with the
/// normal forms of the two one-step reductions.
#[derive(Clone, Debug)]
pub struct OverlapCheck {
    pub word: Word,
    pub nf_left: Element,
    pub nf_right: Element,
    pub confluent: bool,
}

/// Report of the exhaustive overlap scan.
#[derive(Clone, Debug)]
pub struct ConfluenceReport {
    pub overlaps: Vec<OverlapCheck>,
}

impl ConfluenceReport {
    pub fn ok(&self) -> bool {
        self.overlaps.iter().all(|o| o.confluent)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &OverlapCheck> {
        self.overlaps.iter().filter(|o| !o.confluent)
    }
}

/// Check local confluence on every length-3 overlap: both one-step reductions
/// are taken to normal form and compared.
pub fn check_local_confluence(
    sys: &RewriteSystem,
    max_steps: u32,
) -> Result<ConfluenceReport, RewriteError> {
    let cs = &sys.constraints;
    let mut overlaps = Vec::new();
    for (ab, rhs_ab) in &sys.rules {
        for (bc, rhs_bc) in &sys.rules {
            if ab.1 != bc.0 {
                continue;
            }
            let (a, b, c) = (ab.0, ab.1, bc.1);
            let word = Word::from_letters([a, b, c].to_vec());
            // reduce the (a,b) pair first
            let left = rhs_ab.mul(&Element::letter(c), cs);
            // reduce the (b,c) pair first
            let right = Element::letter(a).mul(rhs_bc, cs);
            let nf_left = normal_form(&left, sys, max_steps)?;
            let nf_right = normal_form(&right, sys, max_steps)?;
            let confluent = nf_left.eq_element(&nf_right, cs);
            overlaps.push(OverlapCheck {
                word,
                nf_left,
                nf_right,
                confluent,
            });
        }
    }
    Ok(ConfluenceReport { overlaps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Scalar;

    /// Test fixture: Q = (-1, 0), P = (p, 0) at a rational p with mixing rules
    /// y1x1 = -p x1y1, y1x2 = -p^2 x2y1 + x1y2, y2x1 = p x1y2,
    /// y2x2 = x1y1 + x2y2.
    fn system_d(p: i64) -> RewriteSystem {
        let cs = ConstraintSet::empty();
        let e = |l: Letter| Element::letter(l);
        let pair = |a: Letter, b: Letter| e(a).mul(&e(b), &cs);
        let mut rules = BTreeMap::new();
        rules.insert((Letter::X2, Letter::X1), pair(Letter::X1, Letter::X2).neg());
        rules.insert(
            (Letter::Y2, Letter::Y1),
            pair(Letter::Y1, Letter::Y2).scalar_mul(&Scalar::from_integer(p), &cs),
        );
        rules.insert(
            (Letter::Y1, Letter::X1),
            pair(Letter::X1, Letter::Y1).scalar_mul(&Scalar::from_integer(-p), &cs),
        );
        rules.insert(
            (Letter::Y1, Letter::X2),
            pair(Letter::X2, Letter::Y1)
                .scalar_mul(&Scalar::from_integer(-p * p), &cs)
                .add(&pair(Letter::X1, Letter::Y2), &cs),
        );
        rules.insert(
            (Letter::Y2, Letter::X1),
            pair(Letter::X1, Letter::Y2).scalar_mul(&Scalar::from_integer(p), &cs),
        );
        rules.insert(
            (Letter::Y2, Letter::X2),
            pair(Letter::X1, Letter::Y1).add(&pair(Letter::X2, Letter::Y2), &cs),
        );
        RewriteSystem::new(rules, cs).unwrap()
    }

    fn el(letters: &[Letter]) -> Element {
        Element::word(Word::from_letters(letters.to_vec()))
    }

    #[test]
    fn reduce_once_replaces_leftmost_pair() {
        let sys = system_d(1);
        let (out, changed) = reduce_once(&el(&[Letter::X2, Letter::X1]), &sys);
        assert!(changed);
        assert!(out.eq_element(&el(&[Letter::X1, Letter::X2]).neg(), sys.constraints()));

        let ordered = el(&[Letter::X1, Letter::X2, Letter::Y1, Letter::Y2]);
        let (out, changed) = reduce_once(&ordered, &sys);
        assert!(!changed);
        assert_eq!(out, ordered);

        let (out, changed) = reduce_once(&el(&[Letter::Y2, Letter::X2]), &sys);
        assert!(changed);
        let expected =
            el(&[Letter::X1, Letter::Y1]).add(&el(&[Letter::X2, Letter::Y2]), sys.constraints());
        assert!(out.eq_element(&expected, sys.constraints()));
    }

    #[test]
    fn normal_form_of_ordered_powers_is_identity() {
        let sys = system_d(-1);
        let x1k = el(&[Letter::X1; 5]);
        assert_eq!(normal_form(&x1k, &sys, 100).unwrap(), x1k);
    }

    #[test]
    fn worked_example_y1_squared_x2() {
        // NF(y1^2 x2) = x2 y1^2 - 2p x1 y1 y2 at p = 1 and p = -1
        for p in [1i64, -1] {
            let sys = system_d(p);
            let cs = sys.constraints();
            let input = el(&[Letter::Y1, Letter::Y1, Letter::X2]);
            let nf = normal_form(&input, &sys, 1000).unwrap();
            let expected = el(&[Letter::X2, Letter::Y1, Letter::Y1]).add(
                &el(&[Letter::X1, Letter::Y1, Letter::Y2])
                    .scalar_mul(&Scalar::from_integer(-2 * p), cs),
                cs,
            );
            assert!(nf.eq_element(&expected, cs), "p = {p}");
        }
    }

    #[test]
    fn worked_example_y2_squared_x2() {
        // NF(y2^2 x2) = x2 y2^2 + 2 x1 y1 y2 for both p
        for p in [1i64, -1] {
            let sys = system_d(p);
            let cs = sys.constraints();
            let input = el(&[Letter::Y2, Letter::Y2, Letter::X2]);
            let nf = normal_form(&input, &sys, 1000).unwrap();
            let expected = el(&[Letter::X2, Letter::Y2, Letter::Y2]).add(
                &el(&[Letter::X1, Letter::Y1, Letter::Y2])
                    .scalar_mul(&Scalar::from_integer(2), cs),
                cs,
            );
            assert!(nf.eq_element(&expected, cs), "p = {p}");
        }
    }

    #[test]
    fn commutator_examples() {
        let sys = system_d(1);
        let cs = sys.constraints();
        // [x1^2, x2] = 0
        let x1sq = el(&[Letter::X1, Letter::X1]);
        let c = nf_commutator(&x1sq, &Element::letter(Letter::X2), &sys, 1000).unwrap();
        assert!(c.is_zero());
        // [x1, y1] = 2 x1 y1 at p = 1 (since y1 x1 = -x1 y1)
        let c = nf_commutator(
            &Element::letter(Letter::X1),
            &Element::letter(Letter::Y1),
            &sys,
            1000,
        )
        .unwrap();
        let expected = el(&[Letter::X1, Letter::Y1]).scalar_mul(&Scalar::from_integer(2), cs);
        assert!(c.eq_element(&expected, cs));
        // the unit is central
        let c = nf_commutator(&Element::one(), &Element::letter(Letter::Y2), &sys, 1000).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn termination_certificate() {
        let sys = system_d(1);
        assert!(check_termination(&sys).ok());

        // hostile system: rule (y1, x1) -> y1 x1 itself
        let mut rules: BTreeMap<(Letter, Letter), Element> =
            sys.rules().map(|(k, v)| (*k, v.clone())).collect();
        rules.insert((Letter::Y1, Letter::X1), el(&[Letter::Y1, Letter::X1]));
        let hostile = RewriteSystem::new(rules, ConstraintSet::empty()).unwrap();
        let report = check_termination(&hostile);
        assert!(!report.ok());
        assert_eq!(report.violations[0].0, (Letter::Y1, Letter::X1));
    }

    #[test]
    fn local_confluence_of_fixture() {
        for p in [1i64, -1] {
            let report = check_local_confluence(&system_d(p), 1000).unwrap();
            assert_eq!(report.overlaps.len(), 4);
            assert!(report.ok(), "p = {p}");
        }
    }

    #[test]
    fn nf_is_idempotent_and_linear() {
        let sys = system_d(-1);
        let cs = sys.constraints();
        let a = el(&[Letter::Y2, Letter::Y1, Letter::X2, Letter::X1]);
        let b = el(&[Letter::Y1, Letter::X2, Letter::Y2, Letter::X1]);
        let nf_a = normal_form(&a, &sys, 1000).unwrap();
        assert_eq!(normal_form(&nf_a, &sys, 1000).unwrap(), nf_a);
        let alpha = Scalar::from_integer(3);
        let beta = Scalar::from_integer(-2);
        let lin = a.scalar_mul(&alpha, cs).add(&b.scalar_mul(&beta, cs), cs);
        let nf_lin = normal_form(&lin, &sys, 1000).unwrap();
        let nf_b = normal_form(&b, &sys, 1000).unwrap();
        let combined = nf_a
            .scalar_mul(&alpha, cs)
            .add(&nf_b.scalar_mul(&beta, cs), cs);
        assert!(nf_lin.eq_element(&combined, cs));
    }

    #[test]
    fn step_budget_error() {
        let sys = system_d(1);
        let long = el(&[Letter::Y2; 3]).mul(&el(&[Letter::X1; 3]), sys.constraints());
        assert_eq!(
            normal_form(&long, &sys, 1),
            Err(RewriteError::StepBudgetExceeded { max_steps: 1 })
        );
    }

    #[test]
    fn trace_lines_record_rules() {
        let sys = system_d(1);
        let (nf, lines) = normal_form_traced(&el(&[Letter::Y1, Letter::X2]), &sys, 100).unwrap();
        assert_eq!(lines.len(), 1);
        assert!(lines[0].contains("rule(y1*x2)"));
        assert!(!nf.is_zero());
    }
}
