//! First-order mutant generation.

mod equivalence;
mod operators;
mod regen;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rustpython_ast::bigint::BigInt;
use serde::{Deserialize, Serialize};

pub use equivalence::passes_equivalence_heuristics;
use regen::Edit;

use crate::linemap::map_mutant_line;
use crate::syntax::{NodeId, Shape, SourceUnit, SyntaxTree};

#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    AOR,
    ROR,
    LCR,
    ASR,
    CRP,
    UOI,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::AOR,
        Category::ROR,
        Category::LCR,
        Category::ASR,
        Category::CRP,
        Category::UOI,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::AOR => "AOR",
            Category::ROR => "ROR",
            Category::LCR => "LCR",
            Category::ASR => "ASR",
            Category::CRP => "CRP",
            Category::UOI => "UOI",
        }
    }

    pub fn all() -> BTreeSet<Category> {
        Self::ALL.into_iter().collect()
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown mutation category {0:?} (expected one of AOR, ROR, LCR, ASR, CRP, UOI)")]
pub struct UnknownCategory(pub String);

impl FromStr for Category {
    type Err = UnknownCategory;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownCategory(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mutant {
    pub id: String,
    pub category: Category,
    pub original_line: usize,
    pub mutated_line: usize,
    pub original_fragment: String,
    pub mutated_fragment: String,
    pub weight: f64,
    pub mutated_source: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weighting {
    pub enabled: bool,
    pub lambda: f64,
}

impl Default for Weighting {
    fn default() -> Self {
        Weighting {
            enabled: false,
            lambda: 0.25,
        }
    }
}

/// How mutated source text is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Regeneration {
    /// Rewrite only the mutated tokens; everything else is kept verbatim.
    #[default]
    Splice,
    /// Regenerate the whole module from the edited tree. Formatting and
    /// comments are normalised away.
    Unparse,
}

#[derive(Debug, Clone)]
pub struct MutationOptions {
    pub categories: BTreeSet<Category>,
    pub limit: Option<usize>,
    pub weighting: Weighting,
    pub regeneration: Regeneration,
}

impl Default for MutationOptions {
    fn default() -> Self {
        MutationOptions {
            categories: Category::all(),
            limit: None,
            weighting: Weighting::default(),
            regeneration: Regeneration::Splice,
        }
    }
}

/// Control-flow kinds and how many leading children form the header (loop
/// target and iterable, condition, match subject).
const CONTROL_FLOW: &[(&str, usize)] = &[
    ("For", 2),
    ("AsyncFor", 2),
    ("While", 1),
    ("If", 1),
    ("Match", 1),
    ("Try", 0),
    ("TryStar", 0),
];

/// `1 + λ·depth` where depth counts the loops, conditionals and try
/// statements whose body encloses the node. A construct's own header is not
/// inside it. 1.0 when weighting is off.
pub fn assign_difficulty_weight(unit: &SourceUnit, node: NodeId, weighting: &Weighting) -> f64 {
    if !weighting.enabled {
        return 1.0;
    }
    let tree = unit.tree();
    let mut depth = 0;
    let mut child = node;
    while let Some(parent) = tree.node(child).parent {
        let p = tree.node(parent);
        if let Some(&(_, header)) = CONTROL_FLOW.iter().find(|(k, _)| *k == p.kind) {
            if p.children.iter().position(|&c| c == child).is_some_and(|i| i >= header) {
                depth += 1;
            }
        }
        child = parent;
    }
    1.0 + weighting.lambda * depth as f64
}

/// Mutants for `categories` with default weighting and splice regeneration.
pub fn generate_mutants(unit: &SourceUnit, categories: &BTreeSet<Category>, limit: Option<usize>) -> Vec<Mutant> {
    generate_mutants_with(
        unit,
        &MutationOptions {
            categories: categories.clone(),
            limit,
            ..MutationOptions::default()
        },
    )
}

struct Variant {
    index: usize,
    edit: Edit,
    expected: Shape,
}

struct Site {
    node: NodeId,
    op_index: Option<usize>,
    category: Category,
    variants: Vec<Variant>,
}

pub fn generate_mutants_with(unit: &SourceUnit, opts: &MutationOptions) -> Vec<Mutant> {
    let mut out = Vec::new();
    if opts.limit == Some(0) {
        return out;
    }
    let tree = unit.tree();
    let hash12 = &unit.content_hash()[..12];
    for (id, _) in tree.nodes() {
        for site in sites(unit, id, &opts.categories) {
            let original_shape = tree.shape(site.node);
            let mut seen = HashSet::new();
            for variant in &site.variants {
                if !passes_equivalence_heuristics(&original_shape, &variant.expected) {
                    continue;
                }
                let Some((source, mutant_unit)) = realise(unit, &site, variant, opts.regeneration) else {
                    continue;
                };
                if !seen.insert(source.clone()) {
                    continue;
                }
                out.push(build(unit, hash12, &site, variant, source, &mutant_unit, &opts.weighting));
                if opts.limit.is_some_and(|l| out.len() >= l) {
                    return out;
                }
            }
        }
    }
    out
}

fn build(
    unit: &SourceUnit,
    hash12: &str,
    site: &Site,
    variant: &Variant,
    mutated_source: String,
    mutant_unit: &SourceUnit,
    weighting: &Weighting,
) -> Mutant {
    let tree = unit.tree();
    let path = tree.path(site.node);
    let focus = regen::focus_ranges(unit, site.node, &variant.edit)
        .first()
        .map(|r| r.0)
        .unwrap_or(tree.node(site.node).start);
    let original_line = unit.line_of(focus);
    let mutated_fragment = mutant_unit
        .tree()
        .node_at_path(&path)
        .map(|n| mutant_unit.node_text(n).to_string())
        .unwrap_or_default();
    let path_str: Vec<String> = path.iter().map(|p| p.to_string()).collect();
    let op = site.op_index.map(|i| format!("@{i}")).unwrap_or_default();
    Mutant {
        id: format!("{hash12}:{}:{}{op}:{}", site.category, path_str.join("."), variant.index),
        category: site.category,
        original_line,
        mutated_line: map_mutant_line(unit.text(), &mutated_source, original_line),
        original_fragment: unit.node_text(site.node).to_string(),
        mutated_fragment,
        weight: assign_difficulty_weight(unit, site.node, weighting),
        mutated_source,
    }
}

/// Mutated text and its parse for the first regeneration candidate whose
/// tree is the original with exactly the intended subtree replaced.
fn realise(unit: &SourceUnit, site: &Site, variant: &Variant, mode: Regeneration) -> Option<(String, SourceUnit)> {
    let candidates = match mode {
        Regeneration::Splice => regen::splice_candidates(unit, site.node, &variant.edit),
        Regeneration::Unparse => regen::unparse_candidate(unit, site.node, &variant.edit).into_iter().collect(),
    };
    candidates.into_iter().find_map(|text| {
        let mutant = SourceUnit::parse(&text).ok()?;
        unit.tree()
            .equal_with_replacement(site.node, &variant.expected, mutant.tree())
            .then_some((text, mutant))
    })
}

fn op_variants(tree: &SyntaxTree, node: NodeId, category: Category, label: &str, make: impl Fn(&'static str) -> Edit) -> Vec<Variant> {
    operators::replacements(category, label)
        .iter()
        .enumerate()
        .map(|(index, &to)| Variant {
            index,
            edit: make(to),
            expected: tree.shape(node).with_label(to),
        })
        .collect()
}

fn sites(unit: &SourceUnit, id: NodeId, categories: &BTreeSet<Category>) -> Vec<Site> {
    let tree = unit.tree();
    let node = tree.node(id);
    let site = |category: Category, variants: Vec<Variant>| Site {
        node: id,
        op_index: None,
        category,
        variants,
    };
    let wants = |c: Category| categories.contains(&c);
    match node.kind {
        "BinOp" if wants(Category::AOR) => {
            vec![site(Category::AOR, op_variants(tree, id, Category::AOR, &node.label, Edit::BinOp))]
        }
        "BoolOp" if wants(Category::LCR) => {
            vec![site(Category::LCR, op_variants(tree, id, Category::LCR, &node.label, Edit::BoolOp))]
        }
        "AugAssign" if wants(Category::ASR) => {
            vec![site(Category::ASR, op_variants(tree, id, Category::ASR, &node.label, Edit::AugAssign))]
        }
        "UnaryOp" if wants(Category::UOI) => {
            vec![site(Category::UOI, op_variants(tree, id, Category::UOI, &node.label, Edit::Unary))]
        }
        "Compare" if wants(Category::ROR) => {
            let ops: Vec<&str> = node.label.split(',').collect();
            (0..ops.len())
                .map(|i| {
                    let variants = operators::replacements(Category::ROR, ops[i])
                        .iter()
                        .enumerate()
                        .map(|(index, &to)| {
                            let mut new_ops = ops.clone();
                            new_ops[i] = to;
                            Variant {
                                index,
                                edit: Edit::Compare { index: i, op: to },
                                expected: tree.shape(id).with_label(new_ops.join(",")),
                            }
                        })
                        .collect();
                    Site {
                        node: id,
                        op_index: Some(i),
                        category: Category::ROR,
                        variants,
                    }
                })
                .collect()
        }
        "Constant" if wants(Category::CRP) && crp_eligible(tree, id) => {
            let variants = crp_replacements(&node.label)
                .into_iter()
                .enumerate()
                .filter_map(|(index, text)| {
                    let expr = regen::parse_expr(&text)?;
                    let expected = SyntaxTree::from_expr(&expr).shape(0);
                    Some(Variant {
                        index,
                        edit: Edit::Literal(text),
                        expected,
                    })
                })
                .collect();
            vec![site(Category::CRP, variants)]
        }
        _ => Vec::new(),
    }
}

fn crp_eligible(tree: &SyntaxTree, id: NodeId) -> bool {
    !tree.is_docstring(id) && !tree.ancestors(id).any(|a| tree.node(a).kind == "JoinedStr")
}

fn int_text(v: &BigInt) -> String {
    let s = v.to_string();
    match s.strip_prefix('-') {
        Some(abs) => format!("(-{abs})"),
        None => s,
    }
}

fn float_text(v: f64) -> String {
    if v.is_sign_negative() {
        format!("(-{:?})", -v)
    } else {
        format!("{v:?}")
    }
}

/// Replacement literal texts for a constant label, in table order:
/// booleans flip; numbers go to n+1, n-1, -n, 0, 1; strings go to the
/// empty string and "MUTATED".
fn crp_replacements(label: &str) -> Vec<String> {
    if label == "True" {
        return vec!["False".into()];
    }
    if label == "False" {
        return vec!["True".into()];
    }
    if let Some(v) = label.strip_prefix("int:") {
        let Ok(n) = BigInt::from_str(v) else {
            return Vec::new();
        };
        let one = BigInt::from(1);
        return [&n + &one, &n - &one, -n.clone(), BigInt::from(0), one.clone()]
            .iter()
            .map(int_text)
            .collect();
    }
    if let Some(v) = label.strip_prefix("float:") {
        let Ok(f) = v.parse::<f64>() else {
            return Vec::new();
        };
        if !f.is_finite() {
            return Vec::new();
        }
        return [f + 1.0, f - 1.0, -f, 0.0, 1.0]
            .into_iter()
            .filter(|x| x.is_finite())
            .map(float_text)
            .collect();
    }
    if label.starts_with("str:") {
        return vec!["\"\"".into(), "\"MUTATED\"".into()];
    }
    Vec::new()
}

/// Mutant manifest as a pretty-printed JSON array.
pub fn manifest_json(mutants: &[Mutant]) -> String {
    let mut s = serde_json::to_string_pretty(mutants).expect("mutants serialise");
    s.push('\n');
    s
}

pub fn parse_manifest(text: &str) -> Result<Vec<Mutant>, serde_json::Error> {
    serde_json::from_str(text)
}
