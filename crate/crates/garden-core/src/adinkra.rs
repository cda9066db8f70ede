//! Adinkra graphs: bipartite, edge-colored, edge-dashed graphs encoding
//! signed-permutation representations.
//!
//! Nodes split into d bosons (drawn filled, bottom row) and d fermions
//! (drawn open, top row). An edge of color I joins boson i to fermion j
//! exactly when `(L_I)_{ij} = +-1`, dashed when the entry is negative.
//! Valid graphs are color-regular (one edge of each color per node) and
//! every bicolor 4-cycle carries an odd number of dashed edges.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{decompose_sp, GardenRep, NotSignedPermutation};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AdinkraError {
    #[error("color {color}: {source}")]
    NotAdinkraForm {
        color: usize,
        source: NotSignedPermutation,
    },
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("unknown export format {0:?}; use \"dot\" or \"json\"")]
    UnknownFormat(String),
    #[error("invalid adinkra JSON: {0}")]
    Json(String),
    #[error("edge references {node} out of range")]
    EdgeOutOfRange { node: String },
}

/// A single colored, possibly dashed edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AdinkraEdge {
    /// Boson index, 0-based.
    #[serde(rename = "b")]
    pub boson: usize,
    /// Fermion index, 0-based.
    #[serde(rename = "f")]
    pub fermion: usize,
    /// Color, 1-based supercharge index.
    pub color: usize,
    pub dashed: bool,
}

/// Bipartite edge-colored graph on d bosons and d fermions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adinkra {
    n_bosons: usize,
    n_fermions: usize,
    n_colors: usize,
    boson_labels: Vec<String>,
    fermion_labels: Vec<String>,
    edges: Vec<AdinkraEdge>,
}

impl Adinkra {
    /// Builds a graph from raw parts; edges are canonically sorted and
    /// deduplicated so structurally equal graphs compare equal.
    pub fn new(
        n_bosons: usize,
        n_fermions: usize,
        n_colors: usize,
        mut edges: Vec<AdinkraEdge>,
    ) -> Result<Self, AdinkraError> {
        for e in &edges {
            if e.boson >= n_bosons {
                return Err(AdinkraError::EdgeOutOfRange {
                    node: format!("boson {}", e.boson),
                });
            }
            if e.fermion >= n_fermions {
                return Err(AdinkraError::EdgeOutOfRange {
                    node: format!("fermion {}", e.fermion),
                });
            }
            if e.color == 0 || e.color > n_colors {
                return Err(AdinkraError::EdgeOutOfRange {
                    node: format!("color {}", e.color),
                });
            }
        }
        edges.sort_by_key(|e| (e.color, e.boson, e.fermion, e.dashed));
        edges.dedup();
        Ok(Adinkra {
            n_bosons,
            n_fermions,
            n_colors,
            boson_labels: (1..=n_bosons).map(|i| format!("phi{i}")).collect(),
            fermion_labels: (1..=n_fermions).map(|i| format!("psi{i}")).collect(),
            edges,
        })
    }

    /// Reads the graph off a representation whose L matrices carry
    /// signed-permutation structure within `tol`.
    pub fn from_rep<T: Scalar>(rep: &GardenRep<T>, tol: T) -> Result<Self, AdinkraError> {
        let d = rep.dim();
        let mut edges = Vec::with_capacity(rep.n_colors() * d);
        for color in 0..rep.n_colors() {
            let sp = decompose_sp(rep.l(color), tol.clone()).map_err(|source| {
                AdinkraError::NotAdinkraForm {
                    color: color + 1,
                    source,
                }
            })?;
            for fermion in 0..d {
                let boson = sp.perm().apply(fermion);
                edges.push(AdinkraEdge {
                    boson,
                    fermion,
                    color: color + 1,
                    dashed: sp.signs()[boson] < 0,
                });
            }
        }
        Adinkra::new(d, d, rep.n_colors(), edges)
    }

    pub fn with_labels(
        mut self,
        bosons: Vec<String>,
        fermions: Vec<String>,
    ) -> Result<Self, AdinkraError> {
        if bosons.len() != self.n_bosons {
            return Err(AdinkraError::LabelCount {
                expected: self.n_bosons,
                got: bosons.len(),
            });
        }
        if fermions.len() != self.n_fermions {
            return Err(AdinkraError::LabelCount {
                expected: self.n_fermions,
                got: fermions.len(),
            });
        }
        self.boson_labels = bosons;
        self.fermion_labels = fermions;
        Ok(self)
    }

    pub fn n_bosons(&self) -> usize {
        self.n_bosons
    }

    pub fn n_fermions(&self) -> usize {
        self.n_fermions
    }

    pub fn n_colors(&self) -> usize {
        self.n_colors
    }

    pub fn edges(&self) -> &[AdinkraEdge] {
        &self.edges
    }

    pub fn boson_labels(&self) -> &[String] {
        &self.boson_labels
    }

    pub fn fermion_labels(&self) -> &[String] {
        &self.fermion_labels
    }
}

/// Either side of the bipartition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeRef {
    Boson(usize),
    Fermion(usize),
}

impl std::fmt::Display for NodeRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NodeRef::Boson(i) => write!(f, "boson {i}"),
            NodeRef::Fermion(i) => write!(f, "fermion {i}"),
        }
    }
}

/// A violated graph regularity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A node missing its edge of some color.
    ColorMissing { node: NodeRef, color: usize },
    /// A node with more than one edge of some color.
    ColorDuplicated { node: NodeRef, color: usize },
    /// A bicolor cycle with an even number of dashed edges. Nodes listed
    /// as (boson, fermion, boson, fermion) along the cycle.
    EvenDashing {
        colors: (usize, usize),
        bosons: [usize; 2],
        fermions: [usize; 2],
        dashed_count: usize,
    },
    /// A bicolor cycle longer than four edges.
    BicolorCycleTooLong {
        colors: (usize, usize),
        start_boson: usize,
        length: usize,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::ColorMissing { node, color } => {
                write!(f, "{node} has no edge of color {color}")
            }
            Violation::ColorDuplicated { node, color } => {
                write!(f, "{node} has more than one edge of color {color}")
            }
            Violation::EvenDashing {
                colors,
                bosons,
                fermions,
                dashed_count,
            } => write!(
                f,
                "cycle B{} - F{} - B{} - F{} in colors ({}, {}) has {} dashed edges (want odd)",
                bosons[0], fermions[0], bosons[1], fermions[1], colors.0, colors.1, dashed_count
            ),
            Violation::BicolorCycleTooLong {
                colors,
                start_boson,
                length,
            } => write!(
                f,
                "bicolor ({}, {}) cycle through boson {} has length {} (want 4)",
                colors.0, colors.1, start_boson, length
            ),
        }
    }
}

/// Every violation found in a graph; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks color-regularity and the odd-dashing rule on all bicolor
/// 4-cycles. Violations are reported, never raised.
pub fn validate(a: &Adinkra) -> ValidationReport {
    let mut violations = Vec::new();

    // color regularity: exactly one incident edge per node per color
    let mut boson_deg = vec![vec![0usize; a.n_colors]; a.n_bosons];
    let mut fermion_deg = vec![vec![0usize; a.n_colors]; a.n_fermions];
    for e in &a.edges {
        boson_deg[e.boson][e.color - 1] += 1;
        fermion_deg[e.fermion][e.color - 1] += 1;
    }
    let mut regular = vec![true; a.n_colors];
    let sides = [
        (NodeRef::Boson as fn(usize) -> NodeRef, &boson_deg),
        (NodeRef::Fermion as fn(usize) -> NodeRef, &fermion_deg),
    ];
    for (make_node, degrees) in sides {
        for (idx, per_color) in degrees.iter().enumerate() {
            for (c, &deg) in per_color.iter().enumerate() {
                if deg == 0 {
                    violations.push(Violation::ColorMissing {
                        node: make_node(idx),
                        color: c + 1,
                    });
                    regular[c] = false;
                } else if deg > 1 {
                    violations.push(Violation::ColorDuplicated {
                        node: make_node(idx),
                        color: c + 1,
                    });
                    regular[c] = false;
                }
            }
        }
    }

    // bicolor cycles; only meaningful where both colors are perfect
    // matchings, which the regularity pass just established
    for ci in 0..a.n_colors {
        for cj in ci + 1..a.n_colors {
            if !regular[ci] || !regular[cj] {
                continue;
            }
            check_bicolor_cycles(a, ci + 1, cj + 1, &mut violations);
        }
    }

    ValidationReport { violations }
}

fn check_bicolor_cycles(a: &Adinkra, color_i: usize, color_j: usize, out: &mut Vec<Violation>) {
    // per-color matchings boson -> (fermion, dashed) and back
    let mut fwd_i = vec![(0usize, false); a.n_bosons];
    let mut fwd_j = vec![(0usize, false); a.n_bosons];
    let mut back_i = vec![(0usize, false); a.n_fermions];
    let mut back_j = vec![(0usize, false); a.n_fermions];
    for e in &a.edges {
        if e.color == color_i {
            fwd_i[e.boson] = (e.fermion, e.dashed);
            back_i[e.fermion] = (e.boson, e.dashed);
        } else if e.color == color_j {
            fwd_j[e.boson] = (e.fermion, e.dashed);
            back_j[e.fermion] = (e.boson, e.dashed);
        }
    }
    let mut seen = vec![false; a.n_bosons];
    for start in 0..a.n_bosons {
        if seen[start] {
            continue;
        }
        // walk boson -(i)-> fermion -(j)-> boson ... until closing
        let mut bosons = Vec::new();
        let mut fermions = Vec::new();
        let mut dashed = 0usize;
        let mut b = start;
        loop {
            seen[b] = true;
            bosons.push(b);
            let (f, dash_i) = fwd_i[b];
            fermions.push(f);
            dashed += usize::from(dash_i);
            let (next, dash_j) = back_j[f];
            dashed += usize::from(dash_j);
            b = next;
            if b == start {
                break;
            }
        }
        let length = 2 * bosons.len();
        if length != 4 {
            out.push(Violation::BicolorCycleTooLong {
                colors: (color_i, color_j),
                start_boson: start,
                length,
            });
        } else if dashed % 2 == 0 {
            out.push(Violation::EvenDashing {
                colors: (color_i, color_j),
                bosons: [bosons[0], bosons[1]],
                fermions: [fermions[0], fermions[1]],
                dashed_count: dashed,
            });
        }
    }
}

/// Connected components, each as its own graph, ordered by smallest
/// contained boson index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentDecomposition {
    pub components: Vec<Adinkra>,
    /// For each original boson: (component index, index inside it).
    pub boson_map: Vec<(usize, usize)>,
    /// For each original fermion: (component index, index inside it).
    pub fermion_map: Vec<(usize, usize)>,
}

pub fn decompose(a: &Adinkra) -> ComponentDecomposition {
    // union-find over bosons + fermions
    let total = a.n_bosons + a.n_fermions;
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for e in &a.edges {
        let rb = find(&mut parent, e.boson);
        let rf = find(&mut parent, a.n_bosons + e.fermion);
        if rb != rf {
            parent[rf] = rb;
        }
    }

    // assign component ids ordered by smallest boson index, isolated
    // fermions trailing
    let mut comp_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut order: Vec<usize> = Vec::new();
    for b in 0..a.n_bosons {
        let root = find(&mut parent, b);
        comp_of_root.entry(root).or_insert_with(|| {
            order.push(root);
            order.len() - 1
        });
    }
    for f in 0..a.n_fermions {
        let root = find(&mut parent, a.n_bosons + f);
        comp_of_root.entry(root).or_insert_with(|| {
            order.push(root);
            order.len() - 1
        });
    }
    let n_comps = order.len();

    let mut boson_map = vec![(0usize, 0usize); a.n_bosons];
    let mut fermion_map = vec![(0usize, 0usize); a.n_fermions];
    let mut boson_count = vec![0usize; n_comps];
    let mut fermion_count = vec![0usize; n_comps];
    for b in 0..a.n_bosons {
        let comp = comp_of_root[&find(&mut parent, b)];
        boson_map[b] = (comp, boson_count[comp]);
        boson_count[comp] += 1;
    }
    for f in 0..a.n_fermions {
        let comp = comp_of_root[&find(&mut parent, a.n_bosons + f)];
        fermion_map[f] = (comp, fermion_count[comp]);
        fermion_count[comp] += 1;
    }

    let mut edges_per: Vec<Vec<AdinkraEdge>> = vec![Vec::new(); n_comps];
    for e in &a.edges {
        let (comp, b) = boson_map[e.boson];
        let (_, f) = fermion_map[e.fermion];
        edges_per[comp].push(AdinkraEdge {
            boson: b,
            fermion: f,
            color: e.color,
            dashed: e.dashed,
        });
    }

    let mut components = Vec::with_capacity(n_comps);
    for comp in 0..n_comps {
        let bosons: Vec<String> = (0..a.n_bosons)
            .filter(|&b| boson_map[b].0 == comp)
            .map(|b| a.boson_labels[b].clone())
            .collect();
        let fermions: Vec<String> = (0..a.n_fermions)
            .filter(|&f| fermion_map[f].0 == comp)
            .map(|f| a.fermion_labels[f].clone())
            .collect();
        let graph = Adinkra::new(
            bosons.len(),
            fermions.len(),
            a.n_colors,
            edges_per[comp].clone(),
        )
        .expect("component edges are in range by construction")
        .with_labels(bosons, fermions)
        .expect("component label counts match");
        components.push(graph);
    }

    ComponentDecomposition {
        components,
        boson_map,
        fermion_map,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = AdinkraError;

    fn from_str(s: &str) -> Result<Self, AdinkraError> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            other => Err(AdinkraError::UnknownFormat(other.to_string())),
        }
    }
}

/// Edge color names. Colors 1-4 follow the red/green/blue/black
/// convention; the extension for more supercharges is ours.
pub fn color_name(color: usize) -> &'static str {
    const NAMES: [&str; 8] = [
        "red", "green", "blue", "black", "orange", "purple", "cyan", "magenta",
    ];
    NAMES[(color - 1) % NAMES.len()]
}

pub fn export(a: &Adinkra, format: ExportFormat) -> String {
    match format {
        ExportFormat::Dot => to_dot(a),
        ExportFormat::Json => to_json(a),
    }
}

/// Graphviz output: filled boson circles on the bottom rank, open fermion
/// circles on the top rank, solid/dashed colored edges. Output is
/// byte-stable for a given graph.
pub fn to_dot(a: &Adinkra) -> String {
    let mut out = String::from("graph adinkra {\n");
    out.push_str("  node [shape=circle];\n");
    out.push_str("  { rank=max;");
    for b in 0..a.n_bosons {
        out.push_str(&format!(
            " b{b} [label=\"{}\", style=filled, fillcolor=black, fontcolor=white];",
            a.boson_labels[b]
        ));
    }
    out.push_str(" }\n");
    out.push_str("  { rank=min;");
    for f in 0..a.n_fermions {
        out.push_str(&format!(" f{f} [label=\"{}\"];", a.fermion_labels[f]));
    }
    out.push_str(" }\n");
    for e in &a.edges {
        let style = if e.dashed { "dashed" } else { "solid" };
        out.push_str(&format!(
            "  b{} -- f{} [color={}, style={}];\n",
            e.boson,
            e.fermion,
            color_name(e.color),
            style
        ));
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize, Deserialize)]
struct AdinkraJson {
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    edges: Vec<AdinkraEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bosons: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fermions: Option<Vec<String>>,
}

pub fn to_json(a: &Adinkra) -> String {
    serde_json::to_string(&AdinkraJson {
        d: a.n_bosons,
        n: a.n_colors,
        edges: a.edges.clone(),
        bosons: Some(a.boson_labels.clone()),
        fermions: Some(a.fermion_labels.clone()),
    })
    .expect("adinkra serialization cannot fail")
}

pub fn from_json(text: &str) -> Result<Adinkra, AdinkraError> {
    let raw: AdinkraJson =
        serde_json::from_str(text).map_err(|e| AdinkraError::Json(e.to_string()))?;
    let mut graph = Adinkra::new(raw.d, raw.d, raw.n, raw.edges)?;
    if let (Some(bosons), Some(fermions)) = (raw.bosons, raw.fermions) {
        graph = graph.with_labels(bosons, fermions)?;
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GardenRep;
    use crate::mat::Mat;
    use crate::perm::SignedPermutation;

    fn single_edge_graph() -> Adinkra {
        let rep = GardenRep::from_signed_perms(&[SignedPermutation::identity(1)]).unwrap();
        Adinkra::from_rep(&rep, 0).unwrap()
    }

    #[test]
    fn identity_rep_gives_one_solid_edge() {
        let a = single_edge_graph();
        assert_eq!(
            a.edges(),
            &[AdinkraEdge {
                boson: 0,
                fermion: 0,
                color: 1,
                dashed: false
            }]
        );
        assert!(validate(&a).is_valid());
    }

    #[test]
    fn from_rep_rejects_non_signed_permutations() {
        let rep = GardenRep::new(
            vec![Mat::from_rows(vec![vec![2.0]])],
            vec![Mat::from_rows(vec![vec![0.5]])],
        )
        .unwrap();
        assert!(matches!(
            Adinkra::from_rep(&rep, 1e-9),
            Err(AdinkraError::NotAdinkraForm { color: 1, .. })
        ));
    }

    #[test]
    fn duplicate_color_at_node_is_reported() {
        let a = Adinkra::new(
            2,
            2,
            1,
            vec![
                AdinkraEdge {
                    boson: 0,
                    fermion: 0,
                    color: 1,
                    dashed: false,
                },
                AdinkraEdge {
                    boson: 0,
                    fermion: 1,
                    color: 1,
                    dashed: false,
                },
            ],
        )
        .unwrap();
        let report = validate(&a);
        assert!(report.violations.contains(&Violation::ColorDuplicated {
            node: NodeRef::Boson(0),
            color: 1
        }));
        assert!(report.violations.contains(&Violation::ColorMissing {
            node: NodeRef::Boson(1),
            color: 1
        }));
    }

    #[test]
    fn undashed_square_is_reported() {
        // two colors over 2+2 nodes, no dashes: both bicolor squares even
        let mut edges = Vec::new();
        for (color, shift) in [(1usize, 0usize), (2, 1)] {
            for b in 0..2usize {
                edges.push(AdinkraEdge {
                    boson: b,
                    fermion: (b + shift) % 2,
                    color,
                    dashed: false,
                });
            }
        }
        let a = Adinkra::new(2, 2, 2, edges).unwrap();
        let report = validate(&a);
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(
            report.violations[0],
            Violation::EvenDashing {
                colors: (1, 2),
                dashed_count: 0,
                ..
            }
        ));
    }

    #[test]
    fn long_bicolor_cycle_is_reported() {
        // colors form one 8-cycle over 2+2... need 4+4: use shift by 1 mod 4
        let mut edges = Vec::new();
        for b in 0..4usize {
            edges.push(AdinkraEdge {
                boson: b,
                fermion: b,
                color: 1,
                dashed: false,
            });
            edges.push(AdinkraEdge {
                boson: b,
                fermion: (b + 1) % 4,
                color: 2,
                dashed: true,
            });
        }
        let a = Adinkra::new(4, 4, 2, edges).unwrap();
        let report = validate(&a);
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::BicolorCycleTooLong { length: 8, .. }
        )));
    }

    #[test]
    fn disjoint_union_decomposes() {
        let mut edges = Vec::new();
        for b in 0..2usize {
            edges.push(AdinkraEdge {
                boson: b,
                fermion: b,
                color: 1,
                dashed: b == 1,
            });
        }
        let a = Adinkra::new(2, 2, 1, edges).unwrap();
        let parts = decompose(&a);
        assert_eq!(parts.components.len(), 2);
        assert_eq!(parts.boson_map, vec![(0, 0), (1, 0)]);
        assert_eq!(parts.fermion_map, vec![(0, 0), (1, 0)]);
        for part in &parts.components {
            assert_eq!(part.n_bosons(), 1);
            assert!(validate(part).is_valid());
        }
        let connected = single_edge_graph();
        assert_eq!(decompose(&connected).components.len(), 1);
    }

    #[test]
    fn json_round_trip_is_identity() {
        let a = single_edge_graph()
            .with_labels(vec!["A".into()], vec!["psi".into()])
            .unwrap();
        let text = to_json(&a);
        let back = from_json(&text).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn dot_output_shape() {
        let dot = to_dot(&single_edge_graph());
        assert!(dot.starts_with("graph adinkra {"));
        assert!(dot.contains("style=filled"));
        assert!(dot.contains("b0 -- f0 [color=red, style=solid];"));
    }

    #[test]
    fn unknown_format_is_an_error() {
        assert!(matches!(
            "svg".parse::<ExportFormat>(),
            Err(AdinkraError::UnknownFormat(_))
        ));
    }
}
