//! Command implementations: each returns a text report, a structured
//! document with identical content, and a deterministic exit outcome.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use doex_core::algebra::{Bidegree, Element};
use doex_core::center::{
    cancellation_report, center_bidegree, center_scan, check_normality, is_central,
    verify_power_central, verify_table_entry, CancellationVerdict,
};
use doex_core::family::{check_consistency, FamilySpec, SigmaMatrix, Variant};
use doex_core::formulas::{
    p_analogue_check, verify_x2_x1n, verify_x2n_x1, verify_ys_xtn, verify_ysn_xt, VerificationRow,
};
use doex_core::params::{ConstraintSet, ParamName, Scalar};
use doex_core::rewrite::{
    check_local_confluence, check_termination, nf_commutator, normal_form, normal_form_traced,
    RewriteSystem,
};
use num_rational::BigRational;

use crate::doc::Doc;
use crate::expr::parse_element;
use crate::registry::Registry;

/// Exit outcome of one run: confirmation, falsification/no-verdict, or a
/// usage error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Confirmed,
    Falsified,
    Usage,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Confirmed => 0,
            Outcome::Falsified => 1,
            Outcome::Usage => 2,
        }
    }
}

/// A finished run: human-readable text and the structured document.
pub struct RunResult {
    pub text: String,
    pub doc: Doc,
    pub outcome: Outcome,
}

impl RunResult {
    pub fn usage(message: impl Into<String>) -> RunResult {
        let message = message.into();
        RunResult {
            text: format!("usage error: {message}\n"),
            doc: Doc::obj()
                .field("status", Doc::str("usage-error"))
                .field("message", Doc::str(message)),
            outcome: Outcome::Usage,
        }
    }

    pub fn failure(message: impl Into<String>) -> RunResult {
        let message = message.into();
        RunResult {
            text: format!("error: {message}\n"),
            doc: Doc::obj()
                .field("status", Doc::str("error"))
                .field("message", Doc::str(message)),
            outcome: Outcome::Falsified,
        }
    }
}

/// The resolved execution context of family-scoped commands.
pub struct FamilyContext<'a> {
    pub fs: &'a FamilySpec,
    pub assignment: BTreeMap<ParamName, BigRational>,
    pub sys: RewriteSystem,
    pub assumptions: Vec<String>,
}

/// Resolve a family, validate a parameter assignment against its conditions
/// and build the specialized rewrite system.
pub fn family_context<'a>(
    registry: &'a Registry,
    label: char,
    variant: Variant,
    params: &[(ParamName, BigRational)],
) -> Result<FamilyContext<'a>, RunResult> {
    let Some(fs) = registry.get(label, variant) else {
        return Err(RunResult::usage(format!(
            "unknown family '{label}'{}",
            if variant == Variant::Misprint {
                " (misprint variant)"
            } else {
                ""
            }
        )));
    };
    let used = fs.params_used();
    let mut assignment = BTreeMap::new();
    for (name, value) in params {
        if !used.contains(name) {
            let names: Vec<&str> = used.iter().map(|p| p.as_str()).collect();
            return Err(RunResult::usage(format!(
                "family {} does not use parameter {name}; its parameters are [{}]",
                fs.name(),
                names.join(", ")
            )));
        }
        if let Some(mp) = fs.constraints.get(*name) {
            if !mp.is_satisfied_by(value) {
                return Err(RunResult::usage(format!(
                    "parameter {name} of family {} is constrained algebraically; \
                     a rational value cannot satisfy its minimal polynomial",
                    fs.name()
                )));
            }
        }
        if let Some(choice) = fs.choices.iter().find(|c| c.name == *name) {
            if !choice.values.contains(value) {
                let menu: Vec<String> = choice.values.iter().map(|v| v.to_string()).collect();
                return Err(RunResult::usage(format!(
                    "parameter {name} of family {} must be one of {{{}}}",
                    fs.name(),
                    menu.join(", ")
                )));
            }
        }
        assignment.insert(*name, value.clone());
    }
    // validity conditions that become decidable under the assignment
    for nz in &fs.nonzero {
        if let Ok(v) = nz.specialize(&assignment, &fs.constraints) {
            if v.is_zero() {
                return Err(RunResult::usage(format!(
                    "assignment violates the condition {} != 0 of family {}",
                    nz.render(),
                    fs.name()
                )));
            }
        }
    }
    let sys = match fs.specialized_system(&assignment, &ConstraintSet::empty()) {
        Ok(sys) => sys,
        Err(e) => return Err(RunResult::usage(e.to_string())),
    };
    let mut assumptions = fs.assumptions.clone();
    for g in &fs.generic {
        let g = g
            .specialize(&assignment, &fs.constraints)
            .unwrap_or_else(|_| g.clone());
        if g.as_rational().is_none() {
            assumptions.push(format!("{} is treated as not a root of unity", g.render()));
        }
    }
    for name in &used {
        if !assignment.contains_key(name) && fs.constraints.get(*name).is_none() {
            assumptions.push(format!("parameter {name} left symbolic (generic)"));
        }
    }
    Ok(FamilyContext {
        fs,
        assignment,
        sys,
        assumptions,
    })
}

fn header(ctx: &FamilyContext<'_>) -> (String, Doc) {
    let mut text = format!("family {}", ctx.fs.name());
    let set: Vec<String> = ctx
        .assignment
        .iter()
        .map(|(k, v)| format!("{k} = {v}"))
        .collect();
    if !set.is_empty() {
        let _ = write!(text, " at {}", set.join(", "));
    }
    text.push('\n');
    for a in &ctx.assumptions {
        let _ = writeln!(text, "assumption: {a}");
    }
    let doc = Doc::obj()
        .field("family", Doc::str(ctx.fs.name()))
        .field(
            "parameters",
            Doc::arr(set.iter().map(|s| Doc::str(s.clone()))),
        )
        .field(
            "assumptions",
            Doc::arr(ctx.assumptions.iter().map(|s| Doc::str(s.clone()))),
        );
    (text, doc)
}

fn parse_user_element(input: &str, ctx: &FamilyContext<'_>) -> Result<Element, RunResult> {
    let e = match parse_element(input, ctx.sys.constraints()) {
        Ok(e) => e,
        Err(err) => return Err(RunResult::usage(err.to_string())),
    };
    match e.specialize(&ctx.assignment, ctx.sys.constraints()) {
        Ok(e) => Ok(e),
        Err(err) => Err(RunResult::usage(err.to_string())),
    }
}

pub fn cmd_families_list(registry: &Registry) -> RunResult {
    let mut text = String::new();
    let mut items = Vec::new();
    for fs in registry.standard() {
        let params = fs.params_used();
        let names: Vec<&str> = params.iter().map(|p| p.as_str()).collect();
        let _ = writeln!(
            text,
            "{}: P = ({}, {}), Q = ({}, {}), parameters [{}]{}",
            fs.label,
            fs.p12.render(),
            fs.p11.render(),
            fs.q12.render(),
            fs.q11.render(),
            names.join(", "),
            if fs.condition.is_empty() || fs.condition == "(none)" {
                String::new()
            } else {
                format!(", conditions: {}", fs.condition)
            }
        );
        items.push(
            Doc::obj()
                .field("label", Doc::str(fs.label.to_string()))
                .field("p12", Doc::str(fs.p12.render()))
                .field("p11", Doc::str(fs.p11.render()))
                .field("q12", Doc::str(fs.q12.render()))
                .field("q11", Doc::str(fs.q11.render()))
                .field(
                    "parameters",
                    Doc::arr(names.iter().map(|n| Doc::str(n.to_string()))),
                )
                .field("condition", Doc::str(fs.condition.clone())),
        );
    }
    RunResult {
        text,
        doc: Doc::obj().field("families", Doc::Arr(items)),
        outcome: Outcome::Confirmed,
    }
}

pub fn cmd_families_show(registry: &Registry, label: char, variant: Variant) -> RunResult {
    let Some(fs) = registry.get(label, variant) else {
        return RunResult::usage(format!("unknown family '{label}'"));
    };
    let mut text = format!("family {}\n", fs.name());
    let _ = writeln!(text, "P = ({}, {})", fs.p12.render(), fs.p11.render());
    let _ = writeln!(text, "Q = ({}, {})", fs.q12.render(), fs.q11.render());
    for (lhs, rhs) in fs.render_relations() {
        let _ = writeln!(text, "{lhs} = {rhs}");
    }
    if !fs.condition.is_empty() && fs.condition != "(none)" {
        let _ = writeln!(text, "conditions: {}", fs.condition);
    }
    for c in &fs.claims {
        let _ = writeln!(text, "claim (table {}): {}", c.table, c.desc);
    }
    let relations = Doc::arr(
        fs.render_relations()
            .iter()
            .map(|(l, r)| Doc::str(format!("{l} = {r}"))),
    );
    let doc = Doc::obj()
        .field("family", Doc::str(fs.name()))
        .field("relations", relations)
        .field("condition", Doc::str(fs.condition.clone()));
    RunResult {
        text,
        doc,
        outcome: Outcome::Confirmed,
    }
}

pub fn cmd_render_relations(registry: &Registry, label: Option<char>) -> RunResult {
    let mut text = String::new();
    let mut items = Vec::new();
    let families: Vec<&FamilySpec> = match label {
        Some(l) => match registry.get(l, Variant::Standard) {
            Some(f) => vec![f],
            None => return RunResult::usage(format!("unknown family '{l}'")),
        },
        None => registry.standard(),
    };
    for fs in families {
        let _ = writeln!(text, "[{}]", fs.label);
        let mut rels = Vec::new();
        for (lhs, rhs) in fs.render_relations() {
            let _ = writeln!(text, "{lhs} = {rhs}");
            rels.push(Doc::str(format!("{lhs} = {rhs}")));
        }
        items.push(
            Doc::obj()
                .field("label", Doc::str(fs.label.to_string()))
                .field("relations", Doc::Arr(rels)),
        );
    }
    RunResult {
        text,
        doc: Doc::obj().field("relations", Doc::Arr(items)),
        outcome: Outcome::Confirmed,
    }
}

pub fn cmd_nf(ctx: &FamilyContext<'_>, input: &str, max_steps: u32, trace: bool) -> RunResult {
    let e = match parse_user_element(input, ctx) {
        Ok(e) => e,
        Err(r) => return r,
    };
    let (mut text, doc) = header(ctx);
    if trace {
        match normal_form_traced(&e, &ctx.sys, max_steps) {
            Ok((nf, lines)) => {
                for line in &lines {
                    let _ = writeln!(text, "{line}");
                }
                let _ = writeln!(text, "NF({input}) = {}", nf.render());
                RunResult {
                    text,
                    doc: doc
                        .field("input", Doc::str(input))
                        .field("trace", Doc::arr(lines.iter().map(|l| Doc::str(l.clone()))))
                        .field("normal_form", Doc::str(nf.render())),
                    outcome: Outcome::Confirmed,
                }
            }
            Err(e) => RunResult::failure(e.to_string()),
        }
    } else {
        match normal_form(&e, &ctx.sys, max_steps) {
            Ok(nf) => {
                let _ = writeln!(text, "NF({input}) = {}", nf.render());
                RunResult {
                    text,
                    doc: doc
                        .field("input", Doc::str(input))
                        .field("normal_form", Doc::str(nf.render())),
                    outcome: Outcome::Confirmed,
                }
            }
            Err(e) => RunResult::failure(e.to_string()),
        }
    }
}

pub fn cmd_comm(ctx: &FamilyContext<'_>, a: &str, b: &str, max_steps: u32) -> RunResult {
    let ea = match parse_user_element(a, ctx) {
        Ok(e) => e,
        Err(r) => return r,
    };
    let eb = match parse_user_element(b, ctx) {
        Ok(e) => e,
        Err(r) => return r,
    };
    let (mut text, doc) = header(ctx);
    match nf_commutator(&ea, &eb, &ctx.sys, max_steps) {
        Ok(c) => {
            let _ = writeln!(text, "[{a}, {b}] = {}", c.render());
            RunResult {
                text,
                doc: doc
                    .field("left", Doc::str(a))
                    .field("right", Doc::str(b))
                    .field("commutator", Doc::str(c.render())),
                outcome: Outcome::Confirmed,
            }
        }
        Err(e) => RunResult::failure(e.to_string()),
    }
}

pub fn cmd_central(ctx: &FamilyContext<'_>, input: &str, max_steps: u32) -> RunResult {
    let e = match parse_user_element(input, ctx) {
        Ok(e) => e,
        Err(r) => return r,
    };
    let (mut text, doc) = header(ctx);
    match is_central(&e, &ctx.sys, max_steps) {
        Ok(report) => {
            let mut witnesses = Vec::new();
            if report.is_central() {
                let _ = writeln!(text, "{input} is central");
            } else {
                let _ = writeln!(text, "{input} is not central:");
                for (g, c) in &report.nonzero {
                    let _ = writeln!(text, "  [{input}, {g}] = {}", c.render());
                    witnesses.push(
                        Doc::obj()
                            .field("generator", Doc::str(g.as_str()))
                            .field("commutator", Doc::str(c.render())),
                    );
                }
            }
            let central = report.is_central();
            RunResult {
                text,
                doc: doc
                    .field("element", Doc::str(input))
                    .field("central", Doc::Bool(central))
                    .field("nonzero_commutators", Doc::Arr(witnesses)),
                outcome: if central {
                    Outcome::Confirmed
                } else {
                    Outcome::Falsified
                },
            }
        }
        Err(e) => RunResult::failure(e.to_string()),
    }
}

pub fn cmd_center(ctx: &FamilyContext<'_>, bd: Bidegree, max_steps: u32) -> RunResult {
    let (mut text, doc) = header(ctx);
    match center_bidegree(&ctx.sys, bd, max_steps) {
        Ok(basis) => {
            let _ = writeln!(text, "bidegree {bd}: kernel dimension {}", basis.len());
            for b in &basis {
                let _ = writeln!(text, "  {}", b.render());
            }
            RunResult {
                text,
                doc: doc
                    .field("bidegree", Doc::str(bd.to_string()))
                    .field("dimension", Doc::UInt(basis.len() as u64))
                    .field(
                        "basis",
                        Doc::arr(basis.iter().map(|b| Doc::str(b.render()))),
                    ),
                outcome: Outcome::Confirmed,
            }
        }
        Err(e) => RunResult::failure(e.to_string()),
    }
}

pub fn cmd_scan(ctx: &FamilyContext<'_>, bound: Bidegree, max_steps: u32) -> RunResult {
    let (mut text, doc) = header(ctx);
    match center_scan(&ctx.sys, bound, max_steps) {
        Ok(report) => {
            let _ = writeln!(text, "scan up to bidegree {bound}");
            let mut entries = Vec::new();
            for entry in &report.entries {
                if entry.basis.is_empty() {
                    continue;
                }
                let tag = if entry.explained_by_products {
                    " (products of lower degrees)"
                } else {
                    " (new)"
                };
                let _ = writeln!(
                    text,
                    "{}: dimension {}{tag}",
                    entry.bidegree,
                    entry.basis.len()
                );
                for b in &entry.basis {
                    let _ = writeln!(text, "  {}", b.render());
                }
                entries.push(
                    Doc::obj()
                        .field("bidegree", Doc::str(entry.bidegree.to_string()))
                        .field("dimension", Doc::UInt(entry.basis.len() as u64))
                        .field(
                            "explained_by_products",
                            Doc::Bool(entry.explained_by_products),
                        )
                        .field(
                            "basis",
                            Doc::arr(entry.basis.iter().map(|b| Doc::str(b.render()))),
                        ),
                );
            }
            if report.only_constants() {
                let _ = writeln!(text, "only constants found");
            }
            RunResult {
                text,
                doc: doc
                    .field("bound", Doc::str(bound.to_string()))
                    .field("only_constants", Doc::Bool(report.only_constants()))
                    .field("entries", Doc::Arr(entries)),
                outcome: Outcome::Confirmed,
            }
        }
        Err(e) => RunResult::failure(e.to_string()),
    }
}

pub fn cmd_normality(ctx: &FamilyContext<'_>, input: &str, max_steps: u32) -> RunResult {
    let e = match parse_user_element(input, ctx) {
        Ok(e) => e,
        Err(r) => return r,
    };
    if e.is_zero() {
        return RunResult::usage("the zero element has no normality witness");
    }
    let (mut text, doc) = header(ctx);
    match check_normality(&e, &ctx.sys, max_steps) {
        Ok(Some(witness)) => {
            let _ = writeln!(text, "{input} is normal:");
            let mut lambdas = Vec::new();
            for (g, l) in &witness.lambdas {
                let _ = writeln!(text, "  {g}*w = ({}) * w*{g}", l.render());
                lambdas.push(
                    Doc::obj()
                        .field("generator", Doc::str(g.as_str()))
                        .field("lambda", Doc::str(l.render())),
                );
            }
            RunResult {
                text,
                doc: doc
                    .field("element", Doc::str(input))
                    .field("normal", Doc::Bool(true))
                    .field("lambdas", Doc::Arr(lambdas)),
                outcome: Outcome::Confirmed,
            }
        }
        Ok(None) => {
            let _ = writeln!(text, "{input} is not normal (no consistent scalar exists)");
            RunResult {
                text,
                doc: doc
                    .field("element", Doc::str(input))
                    .field("normal", Doc::Bool(false)),
                outcome: Outcome::Falsified,
            }
        }
        Err(e) => RunResult::failure(e.to_string()),
    }
}

pub fn cmd_power_central(
    ctx: &FamilyContext<'_>,
    input: &str,
    n: u32,
    max_steps: u32,
) -> RunResult {
    let e = match parse_user_element(input, ctx) {
        Ok(e) => e,
        Err(r) => return r,
    };
    let (mut text, doc) = header(ctx);
    match verify_power_central(&e, n, &ctx.sys, max_steps) {
        Ok(report) => {
            let _ = writeln!(
                text,
                "({input})^{n} is {}central (direct check)",
                if report.direct_central { "" } else { "not " }
            );
            let mut doc = doc
                .field("element", Doc::str(input))
                .field("n", Doc::UInt(n as u64))
                .field("direct_central", Doc::Bool(report.direct_central));
            if let Some(witness) = &report.witness {
                let mut lambdas = Vec::new();
                for (g, l) in &witness.lambdas {
                    let _ = writeln!(text, "  lambda_{g} = {}", l.render());
                    lambdas.push(
                        Doc::obj()
                            .field("generator", Doc::str(g.as_str()))
                            .field("lambda", Doc::str(l.render())),
                    );
                }
                let route = report.lambda_route.unwrap_or(false);
                let _ = writeln!(
                    text,
                    "lambda route: all lambda^{n} = 1 is {route}; routes agree: {}",
                    report.consistent()
                );
                doc = doc
                    .field("lambdas", Doc::Arr(lambdas))
                    .field("lambda_route_central", Doc::Bool(route))
                    .field("routes_agree", Doc::Bool(report.consistent()));
            } else {
                let _ = writeln!(text, "element is not normal; lambda route not applicable");
                doc = doc.field("normal", Doc::Bool(false));
            }
            let ok = report.direct_central && report.consistent();
            RunResult {
                text,
                doc,
                outcome: if ok {
                    Outcome::Confirmed
                } else {
                    Outcome::Falsified
                },
            }
        }
        Err(e) => RunResult::failure(e.to_string()),
    }
}

/// All assignments covering the finite choice menus of a family (one entry,
/// the empty assignment, when there are none).
pub fn choice_assignments(fs: &FamilySpec) -> Vec<BTreeMap<ParamName, BigRational>> {
    let mut out: Vec<BTreeMap<ParamName, BigRational>> = vec![BTreeMap::new()];
    for choice in &fs.choices {
        let mut next = Vec::new();
        for base in &out {
            for v in &choice.values {
                let mut a = base.clone();
                a.insert(choice.name, v.clone());
                next.push(a);
            }
        }
        out = next;
    }
    out
}

/// Substitute an assignment into a family record.
pub fn specialized_family(
    fs: &FamilySpec,
    assignment: &BTreeMap<ParamName, BigRational>,
) -> FamilySpec {
    let cs = &fs.constraints;
    let sp = |s: &Scalar| s.specialize(assignment, cs).expect("valid assignment");
    let rows: [[Scalar; 4]; 4] =
        std::array::from_fn(|r| std::array::from_fn(|c| sp(&fs.sigma.row(r)[c])));
    FamilySpec {
        p12: sp(&fs.p12),
        p11: sp(&fs.p11),
        q12: sp(&fs.q12),
        q11: sp(&fs.q11),
        sigma: SigmaMatrix::from_rows(rows),
        ..fs.clone()
    }
}

pub fn cmd_verify_consistency(
    registry: &Registry,
    label: Option<char>,
    variant: Variant,
    ignore_constraints: bool,
) -> RunResult {
    let families: Vec<&FamilySpec> = match label {
        Some(l) => match registry.get(l, variant) {
            Some(f) => vec![f],
            None => return RunResult::usage(format!("unknown family '{l}'")),
        },
        None => registry.standard(),
    };
    let mut text = String::new();
    let mut items = Vec::new();
    let mut all_ok = true;
    for fs in families {
        let mut fs = (*fs).clone();
        if ignore_constraints {
            fs.constraints = ConstraintSet::empty();
        }
        for assignment in choice_assignments(&fs) {
            let spec = specialized_family(&fs, &assignment);
            let at = render_assignment(&assignment);
            match check_consistency(&spec) {
                Ok(report) => {
                    let ok = report.ok();
                    all_ok &= ok;
                    let _ = writeln!(
                        text,
                        "family {}{}: {} (det = {})",
                        spec.name(),
                        at,
                        if ok { "PASS" } else { "FAIL" },
                        report.det.render()
                    );
                    let mut failures = Vec::new();
                    for (i, j, residual) in &report.mult_failures {
                        let _ = writeln!(
                            text,
                            "  multiplicativity entry ({i},{j}) residual: {}",
                            residual.render()
                        );
                        failures.push(Doc::str(format!(
                            "multiplicativity ({i},{j}): {}",
                            residual.render()
                        )));
                    }
                    for f in &report.identity_failures {
                        let _ = writeln!(
                            text,
                            "  identity {} fails on {}: {}",
                            f.identity,
                            f.generator,
                            f.residual.render()
                        );
                        failures.push(Doc::str(format!(
                            "identity {} on {}: {}",
                            f.identity,
                            f.generator,
                            f.residual.render()
                        )));
                    }
                    if !report.det_nonzero {
                        let _ = writeln!(text, "  det sigma = 0");
                        failures.push(Doc::str("det sigma = 0"));
                    }
                    items.push(
                        Doc::obj()
                            .field("family", Doc::str(spec.name()))
                            .field(
                                "assignment",
                                Doc::str(at.trim_start_matches(" at ").to_string()),
                            )
                            .field("ok", Doc::Bool(ok))
                            .field("det", Doc::str(report.det.render()))
                            .field("failures", Doc::Arr(failures)),
                    );
                }
                Err(e) => return RunResult::failure(e.to_string()),
            }
        }
    }
    RunResult {
        text,
        doc: Doc::obj()
            .field("all_ok", Doc::Bool(all_ok))
            .field("results", Doc::Arr(items)),
        outcome: if all_ok {
            Outcome::Confirmed
        } else {
            Outcome::Falsified
        },
    }
}

fn render_assignment(assignment: &BTreeMap<ParamName, BigRational>) -> String {
    if assignment.is_empty() {
        return String::new();
    }
    let parts: Vec<String> = assignment
        .iter()
        .map(|(k, v)| format!("{k} = {v}"))
        .collect();
    format!(" at {}", parts.join(", "))
}

fn formula_row_doc(row: &VerificationRow) -> Doc {
    let mut d = Doc::obj()
        .field("family", Doc::str(row.family.clone()))
        .field("formula", Doc::str(row.kind.as_str()))
        .field("n", Doc::UInt(row.n as u64));
    if row.s > 0 {
        d = d
            .field("s", Doc::UInt(row.s as u64))
            .field("t", Doc::UInt(row.t as u64));
    }
    d = d.field("matched", Doc::Bool(row.matched));
    if let Some(p) = row.printed_matched {
        d = d.field("printed_recursion_matched", Doc::Bool(p));
    }
    if let Some(div) = &row.first_divergence {
        d = d.field("first_divergence", Doc::str(div.clone()));
    }
    d
}

pub fn cmd_verify_formulas(
    registry: &Registry,
    label: Option<char>,
    n_max: u32,
    max_steps: u32,
) -> RunResult {
    let mut text = String::new();
    let mut rows: Vec<VerificationRow> = Vec::new();
    for n in 1..=n_max {
        match verify_x2_x1n(n, max_steps).and_then(|a| verify_x2n_x1(n, max_steps).map(|b| (a, b)))
        {
            Ok((a, b)) => {
                rows.push(a);
                rows.push(b);
            }
            Err(e) => return RunResult::failure(e.to_string()),
        }
    }
    let families: Vec<&FamilySpec> = match label {
        Some(l) => match registry.get(l, Variant::Standard) {
            Some(f) => vec![f],
            None => return RunResult::usage(format!("unknown family '{l}'")),
        },
        None => registry.standard(),
    };
    for fs in families {
        let sys = match fs.build_rewrite_system() {
            Ok(s) => s,
            Err(e) => return RunResult::failure(e.to_string()),
        };
        for n in 1..=n_max {
            for s in 1..=2usize {
                for t in 1..=2usize {
                    match verify_ys_xtn(fs, &sys, s, t, n, max_steps) {
                        Ok(r) => rows.push(r),
                        Err(e) => return RunResult::failure(e.to_string()),
                    }
                    match verify_ysn_xt(fs, &sys, s, t, n, max_steps) {
                        Ok(r) => rows.push(r),
                        Err(e) => return RunResult::failure(e.to_string()),
                    }
                }
            }
        }
        match p_analogue_check(fs, &sys, n_max, max_steps) {
            Ok(mut r) => rows.append(&mut r),
            Err(e) => return RunResult::failure(e.to_string()),
        }
    }
    // the engine is ground truth: every required row must match; the printed
    // mixed-left recursion may diverge and is reported separately
    let all_ok = rows.iter().all(|r| r.matched);
    let printed_divergences: Vec<&VerificationRow> = rows
        .iter()
        .filter(|r| r.printed_matched == Some(false))
        .collect();
    let mut matched = 0usize;
    for row in &rows {
        if row.matched {
            matched += 1;
        } else {
            let _ = writeln!(
                text,
                "MISMATCH {} {} n={} s={} t={}: {:?}",
                row.family,
                row.kind.as_str(),
                row.n,
                row.s,
                row.t,
                row.first_divergence
            );
        }
    }
    let _ = writeln!(
        text,
        "{matched}/{} formula rows matched the engine",
        rows.len()
    );
    if printed_divergences.is_empty() {
        let _ = writeln!(text, "printed mixed-left recursion: no divergences recorded");
    } else {
        let _ = writeln!(
            text,
            "printed mixed-left recursion diverges in {} rows (engine-derived table is ground truth); first few:",
            printed_divergences.len()
        );
        for row in printed_divergences.iter().take(8) {
            let _ = writeln!(
                text,
                "  {} s={} t={} n={}: {}",
                row.family,
                row.s,
                row.t,
                row.n,
                row.first_divergence.as_deref().unwrap_or("-")
            );
        }
    }
    RunResult {
        text,
        doc: Doc::obj()
            .field("all_required_matched", Doc::Bool(all_ok))
            .field("rows", Doc::arr(rows.iter().map(formula_row_doc))),
        outcome: if all_ok {
            Outcome::Confirmed
        } else {
            Outcome::Falsified
        },
    }
}

pub fn cmd_verify_tables(
    registry: &Registry,
    label: Option<char>,
    variant: Variant,
    bound: Bidegree,
    max_steps: u32,
) -> RunResult {
    let families: Vec<&FamilySpec> = match label {
        Some(l) => match registry.get(l, variant) {
            Some(f) => vec![f],
            None => return RunResult::usage(format!("unknown family '{l}'")),
        },
        None => registry.standard(),
    };
    let mut text = String::new();
    let mut items = Vec::new();
    let mut all_ok = true;
    for fs in families {
        for claim in &fs.claims {
            match verify_table_entry(fs, claim, bound, max_steps) {
                Ok(report) => {
                    let ok = report.confirmed();
                    all_ok &= ok;
                    let scan_note = report
                        .scan
                        .as_ref()
                        .map(|(b, _)| format!(" up to bidegree {b}"))
                        .unwrap_or_default();
                    let _ = writeln!(
                        text,
                        "family {} table {} [{}]: {}{}",
                        report.family,
                        report.table,
                        report.desc,
                        if ok { "CONFIRMED" } else { "FALSIFIED" },
                        scan_note
                    );
                    for g in &report.generators {
                        if g.central {
                            let _ = writeln!(text, "  central: {}", g.rendered);
                        } else {
                            let (gen, c) = g
                                .offending
                                .first()
                                .map(|(l, e)| (l.as_str(), e.render()))
                                .unwrap_or(("?", String::new()));
                            let _ = writeln!(
                                text,
                                "  NOT central: {} (offending commutator with {gen}: {c})",
                                g.rendered
                            );
                        }
                    }
                    for r in &report.relations {
                        let _ = writeln!(
                            text,
                            "  relation {}: {}",
                            if r.holds { "holds" } else { "FAILS" },
                            r.rendered
                        );
                    }
                    if let Some((_, cmps)) = &report.scan {
                        for c in cmps {
                            if c.kernel_dim > 0 || !c.kernel_in_span {
                                let _ = writeln!(
                                    text,
                                    "  scan {}: kernel dim {}, within claimed span: {}",
                                    c.bidegree, c.kernel_dim, c.kernel_in_span
                                );
                            }
                        }
                    }
                    for a in &report.assumptions {
                        let _ = writeln!(text, "  assumption: {a}");
                    }
                    let mut gen_docs = Vec::new();
                    for g in &report.generators {
                        let mut d = Doc::obj()
                            .field("generator", Doc::str(g.rendered.clone()))
                            .field("central", Doc::Bool(g.central));
                        if let Some((l, e)) = g.offending.first() {
                            d = d
                                .field("offending_generator", Doc::str(l.as_str()))
                                .field("offending_commutator", Doc::str(e.render()));
                        }
                        gen_docs.push(d);
                    }
                    let rel_docs: Vec<Doc> = report
                        .relations
                        .iter()
                        .map(|r| {
                            Doc::obj()
                                .field("relation", Doc::str(r.rendered.clone()))
                                .field("holds", Doc::Bool(r.holds))
                        })
                        .collect();
                    let mut item = Doc::obj()
                        .field("family", Doc::str(report.family.clone()))
                        .field("table", Doc::UInt(report.table as u64))
                        .field("claim", Doc::str(report.desc.clone()))
                        .field("confirmed", Doc::Bool(ok))
                        .field("generators", Doc::Arr(gen_docs))
                        .field("relations", Doc::Arr(rel_docs));
                    if let Some((b, cmps)) = &report.scan {
                        item = item.field("scan_bound", Doc::str(b.to_string())).field(
                            "scan",
                            Doc::arr(cmps.iter().map(|c| {
                                Doc::obj()
                                    .field("bidegree", Doc::str(c.bidegree.to_string()))
                                    .field("kernel_dim", Doc::UInt(c.kernel_dim as u64))
                                    .field("kernel_in_span", Doc::Bool(c.kernel_in_span))
                            })),
                        );
                    }
                    item = item.field(
                        "assumptions",
                        Doc::arr(report.assumptions.iter().map(|a| Doc::str(a.clone()))),
                    );
                    items.push(item);
                }
                Err(e) => return RunResult::failure(e.to_string()),
            }
        }
    }
    RunResult {
        text,
        doc: Doc::obj()
            .field("all_confirmed", Doc::Bool(all_ok))
            .field("claims", Doc::Arr(items)),
        outcome: if all_ok {
            Outcome::Confirmed
        } else {
            Outcome::Falsified
        },
    }
}

pub fn cmd_cancellation(
    registry: &Registry,
    label: Option<char>,
    params: &[(ParamName, BigRational)],
    bound: Bidegree,
    max_steps: u32,
) -> RunResult {
    let families: Vec<&FamilySpec> = match label {
        Some(l) => match registry.get(l, Variant::Standard) {
            Some(f) => vec![f],
            None => return RunResult::usage(format!("unknown family '{l}'")),
        },
        None => registry.standard(),
    };
    let single = families.len() == 1;
    let mut text = String::new();
    let mut items = Vec::new();
    let mut all_verdict = true;
    for fs in families {
        let ctx = match family_context(registry, fs.label, fs.variant, params) {
            Ok(c) => c,
            Err(r) => {
                if single {
                    return r;
                }
                continue;
            }
        };
        match cancellation_report(fs, &ctx.assignment, bound, max_steps) {
            Ok(report) => {
                let verdict = matches!(
                    report.verdict,
                    CancellationVerdict::UniversallyCancellative { .. }
                );
                all_verdict &= verdict;
                match &report.verdict {
                    CancellationVerdict::UniversallyCancellative { assumptions } => {
                        let _ = writeln!(
                            text,
                            "family {}: universally cancellative (center trivial up to {})",
                            report.family, report.bound
                        );
                        for a in assumptions {
                            let _ = writeln!(text, "  assumption: {a}");
                        }
                        items.push(
                            Doc::obj()
                                .field("family", Doc::str(report.family.clone()))
                                .field("verdict", Doc::str("universally-cancellative"))
                                .field("bound", Doc::str(report.bound.to_string()))
                                .field(
                                    "assumptions",
                                    Doc::arr(assumptions.iter().map(|a| Doc::str(a.clone()))),
                                ),
                        );
                    }
                    CancellationVerdict::NoVerdict => {
                        let _ = writeln!(text, "family {}: no verdict", report.family);
                        let mut found = Vec::new();
                        for (bd, e) in &report.central_found {
                            let _ = writeln!(text, "  central at {bd}: {}", e.render());
                            found.push(Doc::str(format!("{bd}: {}", e.render())));
                        }
                        items.push(
                            Doc::obj()
                                .field("family", Doc::str(report.family.clone()))
                                .field("verdict", Doc::str("none"))
                                .field("bound", Doc::str(report.bound.to_string()))
                                .field("central_found", Doc::Arr(found)),
                        );
                    }
                }
            }
            Err(e) => return RunResult::failure(e.to_string()),
        }
    }
    RunResult {
        text,
        doc: Doc::obj()
            .field("all_cancellative", Doc::Bool(all_verdict))
            .field("results", Doc::Arr(items)),
        outcome: if all_verdict {
            Outcome::Confirmed
        } else {
            Outcome::Falsified
        },
    }
}

/// Termination and local-confluence certification across families.
pub fn cmd_verify_rewriting(registry: &Registry, label: Option<char>, max_steps: u32) -> RunResult {
    let families: Vec<&FamilySpec> = match label {
        Some(l) => match registry.get(l, Variant::Standard) {
            Some(f) => vec![f],
            None => return RunResult::usage(format!("unknown family '{l}'")),
        },
        None => registry.standard(),
    };
    let mut text = String::new();
    let mut items = Vec::new();
    let mut all_ok = true;
    for fs in families {
        let sys = match fs.build_rewrite_system() {
            Ok(s) => s,
            Err(e) => return RunResult::failure(e.to_string()),
        };
        let term = check_termination(&sys);
        let conf = match check_local_confluence(&sys, max_steps) {
            Ok(c) => c,
            Err(e) => return RunResult::failure(e.to_string()),
        };
        let ok = term.ok() && conf.ok();
        all_ok &= ok;
        let _ = writeln!(
            text,
            "family {}: termination {}, local confluence {} ({} overlaps)",
            fs.name(),
            if term.ok() { "PASS" } else { "FAIL" },
            if conf.ok() { "PASS" } else { "FAIL" },
            conf.overlaps.len()
        );
        for o in conf.mismatches() {
            let _ = writeln!(
                text,
                "  overlap {} resolves to {} vs {}",
                o.word.render(),
                o.nf_left.render(),
                o.nf_right.render()
            );
        }
        items.push(
            Doc::obj()
                .field("family", Doc::str(fs.name()))
                .field("termination", Doc::Bool(term.ok()))
                .field("local_confluence", Doc::Bool(conf.ok()))
                .field("overlaps", Doc::UInt(conf.overlaps.len() as u64)),
        );
    }
    RunResult {
        text,
        doc: Doc::obj()
            .field("all_ok", Doc::Bool(all_ok))
            .field("results", Doc::Arr(items)),
        outcome: if all_ok {
            Outcome::Confirmed
        } else {
            Outcome::Falsified
        },
    }
}
