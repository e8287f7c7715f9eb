//! Machine (JSON) and human (markdown) reports.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classify::{Classification, ExactCheck, ExtendedModularData, Kind, SpanAnalysis};
use crate::commutant::{CommutantBasis, CouplingMatrix, EnumerationOptions, IntMatrix};
use crate::cyclo::{format_rational, Cyclotomic};
use crate::modular::{AxiomReport, ModularData};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: u32,
    pub ring: String,
    pub labels: Vec<String>,
    pub conductor: u32,
    /// False when dimensions were numeric and nothing below is verified.
    pub exact: bool,
    pub modular: ModularSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<EnumerationSummary>,
    #[serde(default)]
    pub invariants: Vec<InvariantEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations: Option<RelationSummary>,
    #[serde(default)]
    pub classifications: Vec<ClassificationEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModularSummary {
    pub twists: Vec<String>,
    pub dims: Option<Vec<Cyclotomic>>,
    pub dims_numeric: Vec<String>,
    pub y: Option<Vec<Vec<Cyclotomic>>>,
    pub z: Option<Cyclotomic>,
    pub z_numeric: String,
    pub w: Option<Cyclotomic>,
    pub w_numeric: String,
    pub central_charge: Option<String>,
    /// Representative of `c` used in the phase of T.
    pub t_charge: Option<String>,
    pub degenerates: Vec<usize>,
    pub nondegenerate: bool,
    pub s_numeric: Option<Vec<Vec<String>>>,
    /// Diagonal of T.
    pub t_numeric: Option<Vec<String>>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationSummary {
    pub commutant_dim: usize,
    pub basis_exact: bool,
    pub bound_scale: String,
    pub node_budget: u64,
    pub nodes: u64,
    /// False when the node budget ran out; the invariant list is partial.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantEntry {
    pub index: usize,
    pub matrix: IntMatrix,
    pub trace: u64,
    pub verified: bool,
    pub symmetric: bool,
    pub permutation: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanEntry {
    pub index: usize,
    pub in_symmetric_span: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationSummary {
    pub rank: usize,
    /// `Σ_i c_i Z_i = 0`, coefficients indexed like the invariant list.
    pub relations: Vec<Vec<i64>>,
    pub asymmetric: Vec<SpanEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationEntry {
    pub b: IntMatrix,
    pub block_twists: Vec<String>,
    pub block_dims: Vec<Cyclotomic>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BijectionEntry {
    pub map: Vec<usize>,
    pub solutions: usize,
    pub plus_factorization: usize,
    pub minus_factorization: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutomorphismEntry {
    pub permutation: Vec<usize>,
    pub preserves_extended_data: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendedEntry {
    pub y: Vec<Vec<Cyclotomic>>,
    pub twists: Vec<String>,
    pub z0: Cyclotomic,
    pub z0_numeric: String,
    pub s_numeric: Option<Vec<Vec<String>>>,
    pub checks: Vec<ExactCheck>,
    pub consistent: bool,
    pub resolved_pairs: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicesEntry {
    pub w: Cyclotomic,
    pub w_plus: Cyclotomic,
    pub w_alpha: Cyclotomic,
    pub w_zero: Cyclotomic,
    /// `[w, w₊, w_α, w₀]`
    pub numeric: Vec<String>,
    pub ordered: bool,
    pub product_identity: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationEntry {
    /// Position in the invariant list, absent for a matrix given from a file.
    pub index: Option<usize>,
    pub matrix: IntMatrix,
    pub kind: Kind,
    pub permutation: bool,
    pub vacuum_column: Vec<u32>,
    pub vacuum_row: Vec<u32>,
    pub vacuum_symmetric: bool,
    pub factorizations: Vec<FactorizationEntry>,
    pub parents_plus: Vec<usize>,
    pub parents_minus: Vec<usize>,
    pub parent_plus: Option<usize>,
    pub parent_minus: Option<usize>,
    pub bijection: Option<BijectionEntry>,
    pub automorphism: Option<AutomorphismEntry>,
    pub extended: Option<ExtendedEntry>,
    pub extended_minus: Option<ExtendedEntry>,
    pub extended_coincide: Option<bool>,
    pub indices: IndicesEntry,
    pub trace: u64,
    pub notes: Vec<String>,
}

pub fn num(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.000000000000".into()
    } else {
        s
    }
}

pub fn complex(z: Complex64) -> String {
    let im = num(z.im);
    match im.strip_prefix('-') {
        Some(abs) => format!("{} - {}i", num(z.re), abs),
        None => format!("{} + {}i", num(z.re), im),
    }
}

fn complex_matrix(m: &[Vec<Complex64>]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(|&z| complex(z)).collect()).collect()
}

pub fn modular_summary(md: &ModularData) -> ModularSummary {
    let nd = md.numeric();
    ModularSummary {
        twists: md.ring().twists().iter().map(format_rational).collect(),
        dims: md.dims().map(<[_]>::to_vec),
        dims_numeric: nd.dims.iter().map(|&d| num(d)).collect(),
        y: md.exact().map(|e| e.y.clone()),
        z: md.exact().map(|e| e.z.clone()),
        z_numeric: complex(nd.z),
        w: md.exact().map(|e| e.w.clone()),
        w_numeric: num(nd.w),
        central_charge: md.central_charge().map(format_rational),
        t_charge: md.t_charge().map(format_rational),
        degenerates: md.degenerates().iter().copied().collect(),
        nondegenerate: md.is_nondegenerate(),
        s_numeric: nd.s.as_ref().map(|s| complex_matrix(s)),
        t_numeric: nd.t.as_ref().map(|t| t.iter().map(|&z| complex(z)).collect()),
        warnings: md.warnings().to_vec(),
    }
}

pub fn invariant_entries(pool: &[CouplingMatrix]) -> Vec<InvariantEntry> {
    pool.iter()
        .enumerate()
        .map(|(index, c)| InvariantEntry {
            index,
            matrix: c.z.clone(),
            trace: c.trace,
            verified: c.verified,
            symmetric: c.is_symmetric(),
            permutation: c.is_permutation(),
        })
        .collect()
}

pub fn enumeration_summary(basis: &CommutantBasis, opts: &EnumerationOptions, nodes: u64, complete: bool) -> EnumerationSummary {
    EnumerationSummary {
        commutant_dim: basis.dim(),
        basis_exact: basis.is_exact(),
        bound_scale: format_rational(&opts.bound_scale),
        node_budget: opts.node_budget,
        nodes,
        complete,
    }
}

pub fn relation_summary(sa: &SpanAnalysis) -> RelationSummary {
    RelationSummary {
        rank: sa.rank,
        relations: sa.relations.clone(),
        asymmetric: sa
            .asymmetric_in_symmetric_span
            .iter()
            .map(|&(index, in_symmetric_span)| SpanEntry { index, in_symmetric_span })
            .collect(),
    }
}

fn extended_entry(e: &ExtendedModularData) -> ExtendedEntry {
    let z0 = e.z0.to_complex();
    let s_numeric = (z0.norm() > 1e-12).then(|| {
        let abs = z0.norm();
        e.y_ext.iter().map(|r| r.iter().map(|x| complex(x.to_complex() / abs)).collect()).collect()
    });
    ExtendedEntry {
        y: e.y_ext.clone(),
        twists: e.twists.iter().map(format_rational).collect(),
        z0: e.z0.clone(),
        z0_numeric: complex(z0),
        s_numeric,
        checks: e.checks.clone(),
        consistent: e.consistent,
        resolved_pairs: e.resolved_pairs.clone(),
    }
}

pub fn classification_entry(index: Option<usize>, z: &CouplingMatrix, c: &Classification) -> ClassificationEntry {
    let (ordered, product_identity) = c.indices.check();
    let ix = &c.indices;
    ClassificationEntry {
        index,
        matrix: z.z.clone(),
        kind: c.kind,
        permutation: c.is_permutation,
        vacuum_column: c.vacuum_column.clone(),
        vacuum_row: c.vacuum_row.clone(),
        vacuum_symmetric: c.vacuum_symmetric,
        factorizations: c
            .factorizations
            .iter()
            .map(|f| FactorizationEntry {
                b: f.b.clone(),
                block_twists: f.block_twists.iter().map(format_rational).collect(),
                block_dims: f.block_dims.clone(),
            })
            .collect(),
        parents_plus: c.parents_plus.clone(),
        parents_minus: c.parents_minus.clone(),
        parent_plus: c.parent_plus,
        parent_minus: c.parent_minus,
        bijection: c.bijection.as_ref().map(|b| BijectionEntry {
            map: b.map.clone(),
            solutions: b.solutions,
            plus_factorization: b.plus_factorization,
            minus_factorization: b.minus_factorization,
        }),
        automorphism: c.automorphism.as_ref().map(|a| AutomorphismEntry {
            permutation: a.permutation.clone(),
            preserves_extended_data: a.preserves_extended_data,
        }),
        extended: c.extended.as_ref().map(extended_entry),
        extended_minus: c.extended_minus.as_ref().map(extended_entry),
        extended_coincide: c.extended_coincide,
        indices: IndicesEntry {
            w: ix.w.clone(),
            w_plus: ix.w_plus.clone(),
            w_alpha: ix.w_alpha.clone(),
            w_zero: ix.w_zero.clone(),
            numeric: [&ix.w, &ix.w_plus, &ix.w_alpha, &ix.w_zero].iter().map(|x| num(x.to_f64())).collect(),
            ordered,
            product_identity,
        },
        trace: c.trace,
        notes: c.notes.clone(),
    }
}

impl Report {
    pub fn new(md: &ModularData) -> Self {
        Report {
            version: REPORT_VERSION,
            ring: md.ring().name().to_string(),
            labels: md.ring().names().to_vec(),
            conductor: md.conductor(),
            exact: md.is_exact(),
            modular: modular_summary(md),
            enumeration: None,
            invariants: Vec::new(),
            relations: None,
            classifications: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        self.write_markdown(&mut out).expect("writing to a string");
        out
    }

    fn label(&self, i: usize) -> String {
        format!("{} ({})", i, self.labels.get(i).map_or("?", String::as_str))
    }

    fn invariant_name(&self, i: usize) -> String {
        format!("Z{i}")
    }

    fn write_markdown(&self, out: &mut String) -> std::fmt::Result {
        writeln!(out, "# {}", self.ring)?;
        writeln!(out)?;
        writeln!(out, "- conductor: {} (z = ζ{} = e^(2πi/{}))", self.conductor, self.conductor, self.conductor)?;
        writeln!(out, "- labels: {}", self.labels.iter().enumerate().map(|(i, l)| format!("{i}={l}")).collect::<Vec<_>>().join(", "))?;
        if !self.exact {
            writeln!(out, "- **numeric dimensions: results are not verified**")?;
        }
        writeln!(out)?;
        self.write_modular(out)?;
        if let Some(e) = &self.enumeration {
            writeln!(out, "## Enumeration")?;
            writeln!(out)?;
            writeln!(out, "- commutant dimension: {}{}", e.commutant_dim, if e.basis_exact { "" } else { " (numeric basis)" })?;
            writeln!(out, "- bound scale: {}", e.bound_scale)?;
            writeln!(out, "- nodes: {} of budget {}", e.nodes, e.node_budget)?;
            if e.complete {
                writeln!(out, "- status: complete, {} invariants", self.invariants.len())?;
            } else {
                writeln!(out, "- status: **node budget exhausted; the list below is partial**")?;
            }
            writeln!(out)?;
        }
        if !self.invariants.is_empty() {
            writeln!(out, "## Invariants")?;
            writeln!(out)?;
            for inv in &self.invariants {
                let mut tags = Vec::new();
                if inv.symmetric {
                    tags.push("symmetric");
                }
                if inv.permutation {
                    tags.push("permutation");
                }
                if !inv.verified {
                    tags.push("unverified");
                }
                writeln!(out, "### {} (trace {}{}{})", self.invariant_name(inv.index), inv.trace, if tags.is_empty() { "" } else { ", " }, tags.join(", "))?;
                writeln!(out)?;
                write_int_matrix(out, &inv.matrix)?;
            }
        }
        if let Some(r) = &self.relations {
            self.write_relations(out, r)?;
        }
        if !self.classifications.is_empty() {
            writeln!(out, "## Classification")?;
            writeln!(out)?;
            writeln!(out, "| invariant | kind | trace | parent + | parent - |")?;
            writeln!(out, "|---|---|---|---|---|")?;
            for c in &self.classifications {
                writeln!(
                    out,
                    "| {} | {} | {} | {} | {} |",
                    self.classified_name(c),
                    kind_text(c),
                    c.trace,
                    c.parent_plus.map_or("-".into(), |p| self.invariant_name(p)),
                    c.parent_minus.map_or("-".into(), |p| self.invariant_name(p)),
                )?;
            }
            writeln!(out)?;
            for c in &self.classifications {
                self.write_classification(out, c)?;
            }
        }
        Ok(())
    }

    fn classified_name(&self, c: &ClassificationEntry) -> String {
        c.index.map_or("given matrix".into(), |i| self.invariant_name(i))
    }

    fn write_modular(&self, out: &mut String) -> std::fmt::Result {
        let m = &self.modular;
        writeln!(out, "## Modular data")?;
        writeln!(out)?;
        writeln!(out, "| label | h | d | d (numeric) |")?;
        writeln!(out, "|---|---|---|---|")?;
        for i in 0..self.labels.len() {
            let d = m.dims.as_ref().map_or("auto".into(), |d| d[i].to_string());
            writeln!(out, "| {} | {} | {} | {} |", self.label(i), m.twists[i], d, m.dims_numeric[i])?;
        }
        writeln!(out)?;
        if let Some(z) = &m.z {
            writeln!(out, "- z = {z}")?;
        }
        writeln!(out, "- z ≈ {}", m.z_numeric)?;
        if let Some(w) = &m.w {
            writeln!(out, "- w = {w}")?;
        }
        writeln!(out, "- w ≈ {}", m.w_numeric)?;
        match (&m.central_charge, &m.t_charge) {
            (Some(c), Some(t)) if c != t => writeln!(out, "- c = {c} mod 8 (T uses c = {t})")?,
            (Some(c), _) => writeln!(out, "- c = {c} mod 8")?,
            (None, _) => writeln!(out, "- c: undetermined")?,
        }
        let degs: Vec<String> = m.degenerates.iter().map(|&i| self.label(i)).collect();
        writeln!(out, "- degenerate labels: {}", degs.join(", "))?;
        writeln!(out, "- non-degenerate: {}", if m.nondegenerate { "yes" } else { "no" })?;
        for w in &m.warnings {
            writeln!(out, "- warning: {w}")?;
        }
        writeln!(out)?;
        if let Some(y) = &m.y {
            writeln!(out, "### Y")?;
            writeln!(out)?;
            write_cyclo_matrix(out, y)?;
        }
        if let Some(s) = &m.s_numeric {
            writeln!(out, "### S (numeric)")?;
            writeln!(out)?;
            write_string_matrix(out, s)?;
        }
        if let Some(t) = &m.t_numeric {
            writeln!(out, "### T (numeric, diagonal)")?;
            writeln!(out)?;
            for (i, x) in t.iter().enumerate() {
                writeln!(out, "- T[{}] = {}", self.label(i), x)?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    fn write_relations(&self, out: &mut String, r: &RelationSummary) -> std::fmt::Result {
        writeln!(out, "## Linear relations")?;
        writeln!(out)?;
        writeln!(out, "- rank of the invariant list: {} of {}", r.rank, self.invariants.len())?;
        if r.relations.is_empty() {
            writeln!(out, "- the invariants are linearly independent")?;
        }
        for rel in &r.relations {
            writeln!(out, "- {} = 0 (verified entrywise)", relation_text(rel, |i| self.invariant_name(i)))?;
        }
        for s in &r.asymmetric {
            writeln!(
                out,
                "- {} {} a rational combination of the symmetric invariants",
                self.invariant_name(s.index),
                if s.in_symmetric_span { "is" } else { "is not" }
            )?;
        }
        writeln!(out)
    }

    fn write_classification(&self, out: &mut String, c: &ClassificationEntry) -> std::fmt::Result {
        writeln!(out, "### {}: {}", self.classified_name(c), kind_text(c))?;
        writeln!(out)?;
        write_int_matrix(out, &c.matrix)?;
        writeln!(out, "- trace: {}", c.trace)?;
        writeln!(out, "- vacuum column: {:?}", c.vacuum_column)?;
        writeln!(out, "- vacuum row: {:?}", c.vacuum_row)?;
        let names = |v: &[usize]| if v.is_empty() { "none".to_string() } else { v.iter().map(|&i| self.invariant_name(i)).collect::<Vec<_>>().join(", ") };
        writeln!(out, "- type I matrices with this vacuum column: {}", names(&c.parents_plus))?;
        writeln!(out, "- type I matrices with this vacuum row: {}", names(&c.parents_minus))?;
        if let (Some(p), Some(m)) = (c.parent_plus, c.parent_minus) {
            writeln!(out, "- parents: Z+ = {}, Z- = {}", self.invariant_name(p), self.invariant_name(m))?;
        }
        for (i, f) in c.factorizations.iter().enumerate() {
            writeln!(out, "- factorization {i}: {} blocks", f.b.len())?;
            writeln!(out)?;
            writeln!(out, "| block | branching b | h | d |")?;
            writeln!(out, "|---|---|---|---|")?;
            for (t, row) in f.b.iter().enumerate() {
                writeln!(out, "| {t} | {:?} | {} | {} |", row, f.block_twists[t], f.block_dims[t])?;
            }
            writeln!(out)?;
        }
        if let Some(b) = &c.bijection {
            writeln!(out, "- block bijection: {:?} ({} solution{})", b.map, b.solutions, if b.solutions == 1 { "" } else { "s" })?;
        }
        if let Some(a) = &c.automorphism {
            let status = match a.preserves_extended_data {
                Some(true) => "preserves the extended data",
                Some(false) => "does **not** preserve the extended data",
                None => "extended data unavailable",
            };
            writeln!(out, "- automorphism of the extension: {:?}, {}", a.permutation, status)?;
        }
        if let Some(e) = &c.extended {
            self.write_extended(out, if c.extended_minus.is_some() { "Extended data (+)" } else { "Extended data" }, e)?;
        }
        if let Some(e) = &c.extended_minus {
            self.write_extended(out, "Extended data (-)", e)?;
        }
        if let Some(x) = c.extended_coincide {
            writeln!(out, "- extended data of the two parents coincide under the bijection: {}", if x { "yes" } else { "no" })?;
        }
        let ix = &c.indices;
        writeln!(out, "- global indices:")?;
        for (name, v, n) in [("w", &ix.w, &ix.numeric[0]), ("w+", &ix.w_plus, &ix.numeric[1]), ("wα", &ix.w_alpha, &ix.numeric[2]), ("w0", &ix.w_zero, &ix.numeric[3])] {
            writeln!(out, "  - {name} = {v} ≈ {n}")?;
        }
        writeln!(out, "  - 1 ≤ w0 ≤ w+ ≤ wα ≤ w: {}", if ix.ordered { "holds" } else { "**fails**" })?;
        writeln!(out, "  - w0·wα = w+²: {}", if ix.product_identity { "holds" } else { "**fails**" })?;
        for n in &c.notes {
            writeln!(out, "- note: {n}")?;
        }
        writeln!(out)
    }

    fn write_extended(&self, out: &mut String, title: &str, e: &ExtendedEntry) -> std::fmt::Result {
        writeln!(out)?;
        writeln!(out, "#### {title}")?;
        writeln!(out)?;
        writeln!(out, "- block twists: {}", e.twists.join(", "))?;
        writeln!(out, "- z0 = {} ≈ {}", e.z0, e.z0_numeric)?;
        for (p, q) in &e.resolved_pairs {
            writeln!(out, "- blocks {p} and {q} share a branching row; split fixed by unitarity and the Gauss relation")?;
        }
        writeln!(out)?;
        write_cyclo_matrix(out, &e.y)?;
        if let Some(s) = &e.s_numeric {
            writeln!(out, "Extended S (numeric):")?;
            writeln!(out)?;
            write_string_matrix(out, s)?;
        }
        for k in &e.checks {
            writeln!(out, "- [{}] {}", if k.passed { "pass" } else { "FAIL" }, k.name)?;
        }
        if !e.consistent {
            writeln!(out, "- **extended data inconsistent**")?;
        }
        writeln!(out)
    }
}

fn kind_text(c: &ClassificationEntry) -> String {
    if c.permutation && c.kind == Kind::TypeII {
        "type II (permutation)".into()
    } else {
        c.kind.label().into()
    }
}

pub fn relation_text(rel: &[i64], name: impl Fn(usize) -> String) -> String {
    let mut s = String::new();
    for (i, &c) in rel.iter().enumerate().filter(|(_, &c)| c != 0) {
        let mag = c.unsigned_abs();
        let coef = if mag == 1 { String::new() } else { format!("{mag}·") };
        if s.is_empty() {
            s = format!("{}{}{}", if c < 0 { "-" } else { "" }, coef, name(i));
        } else {
            s.push_str(&format!(" {} {}{}", if c < 0 { "-" } else { "+" }, coef, name(i)));
        }
    }
    s
}

fn write_int_matrix(out: &mut String, m: &IntMatrix) -> std::fmt::Result {
    writeln!(out, "```")?;
    let width = m.iter().flatten().map(|x| x.to_string().len()).max().unwrap_or(1);
    for row in m {
        writeln!(out, "{}", row.iter().map(|x| format!("{x:>width$}")).collect::<Vec<_>>().join(" "))?;
    }
    writeln!(out, "```")?;
    writeln!(out)
}

fn write_cyclo_matrix(out: &mut String, m: &[Vec<Cyclotomic>]) -> std::fmt::Result {
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            writeln!(out, "- [{i},{j}] {x}")?;
        }
    }
    writeln!(out)
}

fn write_string_matrix(out: &mut String, m: &[Vec<String>]) -> std::fmt::Result {
    writeln!(out, "```")?;
    for row in m {
        writeln!(out, "{}", row.join("  "))?;
    }
    writeln!(out, "```")?;
    writeln!(out)
}

/// Modular summary plus the axiom checks, for the `check` command.
pub fn check_text(report: &AxiomReport, violations: &[String]) -> String {
    let mut out = String::new();
    if violations.is_empty() {
        out.push_str("[pass] fusion ring axioms\n");
    }
    for v in violations {
        let _ = writeln!(out, "[FAIL] {v}");
    }
    for c in &report.checks {
        let _ = writeln!(
            out,
            "[{}] {}{}{}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            if c.exact { " (exact)" } else { "" },
            c.detail.as_ref().map_or(String::new(), |d| format!(": {d}"))
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify_all, span_analysis};
    use crate::commutant::find_invariants;
    use crate::fusion::builtin_so_level1;
    use crate::modular::compute_modular_data;

    fn so16_report() -> Report {
        let md = compute_modular_data(&builtin_so_level1(16).unwrap()).unwrap();
        let opts = EnumerationOptions::default();
        let (basis, en) = find_invariants(&md, &opts).unwrap();
        let cls = classify_all(&md, &en.invariants).unwrap();
        let mut r = Report::new(&md);
        r.enumeration = Some(enumeration_summary(&basis, &opts, en.nodes, true));
        r.invariants = invariant_entries(&en.invariants);
        r.relations = Some(relation_summary(&span_analysis(&en.invariants)));
        r.classifications = en.invariants.iter().zip(&cls).enumerate().map(|(i, (z, c))| classification_entry(Some(i), z, c)).collect();
        r
    }

    #[test]
    fn json_round_trip() {
        let r = so16_report();
        let text = r.to_json();
        let back = Report::from_json(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn markdown_contents() {
        let md = so16_report().to_markdown();
        assert!(md.contains("conductor: 2"));
        assert!(md.contains("heterotic"));
        assert!(md.contains("type II (permutation)"));
        assert!(md.contains("is not a rational combination"));
        assert!(md.contains("(verified entrywise)"));
    }

    #[test]
    fn number_formatting() {
        assert_eq!(num(-1e-17), "0.000000000000");
        assert_eq!(num(0.5), "0.500000000000");
        assert_eq!(complex(Complex64::new(1.0, -0.25)), "1.000000000000 - 0.250000000000i");
        assert_eq!(relation_text(&[1, -1, 0, 2], |i| format!("Z{i}")), "Z0 - Z1 + 2·Z3");
    }
}
