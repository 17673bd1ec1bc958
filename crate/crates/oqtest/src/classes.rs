//! Equivalence classes over oracle inputs and their quantum counterparts.
//!
//! Classical classes partition the `(x, y)` input space of a program under
//! test. From `k` classical classes three kinds of quantum input classes
//! are derived: one basis-state class per classical class, one same-class
//! superposition class per classical class with at least two members, and
//! cross-class superposition classes for the pairs selected by a pairing
//! criterion over the complete graph on the classical classes.

use rand::seq::SliceRandom;
use rand::Rng;
use std::fmt::Write as _;
use std::sync::Arc;

/// Attempts allowed when rejection sampling before giving up.
pub const SAMPLE_ATTEMPT_CAP: usize = 10_000;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ClassError {
    #[error("class {label} has no members to sample")]
    EmptyClass { label: String },
    #[error("class {label} is a singleton, same-class superposition needs two distinct members")]
    SingletonClass { label: String },
    #[error("sampling class {label} exhausted {SAMPLE_ATTEMPT_CAP} attempts")]
    SamplingExhausted { label: String },
}

/// Membership of a classical class: either an explicit list or a predicate
/// with a candidate sampler for spaces too large to enumerate.
#[derive(Clone)]
pub enum ClassMembers {
    Explicit(Vec<(u64, u64)>),
    Predicate {
        contains: Arc<dyn Fn(u64, u64) -> bool + Send + Sync>,
        sampler: Arc<dyn Fn(&mut dyn rand::RngCore) -> (u64, u64) + Send + Sync>,
    },
}

/// One block of the input-space partition.
#[derive(Clone)]
pub struct ClassicalClass {
    pub id: usize,
    pub label: String,
    pub members: ClassMembers,
    /// Known or estimated member count; consulted for predicate classes
    /// where enumeration is unavailable.
    pub cardinality_hint: Option<u64>,
}

impl ClassicalClass {
    pub fn explicit(id: usize, label: impl Into<String>, members: Vec<(u64, u64)>) -> Self {
        let hint = Some(members.len() as u64);
        ClassicalClass { id, label: label.into(), members: ClassMembers::Explicit(members), cardinality_hint: hint }
    }

    /// Whether a same-class superposition pair can be formed. Predicate
    /// classes without a cardinality hint are conservatively treated as
    /// singletons.
    pub fn supports_same_pair(&self) -> bool {
        match &self.members {
            ClassMembers::Explicit(v) => v.len() >= 2,
            ClassMembers::Predicate { .. } => self.cardinality_hint.map_or(false, |c| c >= 2),
        }
    }

    pub fn contains(&self, x: u64, y: u64) -> bool {
        match &self.members {
            ClassMembers::Explicit(v) => v.contains(&(x, y)),
            ClassMembers::Predicate { contains, .. } => contains(x, y),
        }
    }

    /// Draws one member uniformly (explicit) or by rejection sampling
    /// (predicate). Draws are independent; repeats across calls are allowed.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<(u64, u64), ClassError> {
        match &self.members {
            ClassMembers::Explicit(v) => {
                if v.is_empty() {
                    return Err(ClassError::EmptyClass { label: self.label.clone() });
                }
                Ok(v[rng.gen_range(0..v.len())])
            }
            ClassMembers::Predicate { contains, sampler } => {
                for _ in 0..SAMPLE_ATTEMPT_CAP {
                    let (x, y) = sampler(rng);
                    if contains(x, y) {
                        return Ok((x, y));
                    }
                }
                Err(ClassError::SamplingExhausted { label: self.label.clone() })
            }
        }
    }

    /// Draws two distinct members.
    pub fn sample_distinct_pair<R: Rng>(
        &self,
        rng: &mut R,
    ) -> Result<((u64, u64), (u64, u64)), ClassError> {
        if !self.supports_same_pair() {
            return Err(ClassError::SingletonClass { label: self.label.clone() });
        }
        let first = self.sample(rng)?;
        for _ in 0..SAMPLE_ATTEMPT_CAP {
            let second = self.sample(rng)?;
            if second != first {
                return Ok((first, second));
            }
        }
        Err(ClassError::SamplingExhausted { label: self.label.clone() })
    }
}

impl std::fmt::Debug for ClassicalClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let size = match &self.members {
            ClassMembers::Explicit(v) => format!("{} members", v.len()),
            ClassMembers::Predicate { .. } => "predicate".to_string(),
        };
        write!(f, "ClassicalClass({}: {}, {})", self.id, self.label, size)
    }
}

/// How cross-class pairs are selected from the complete graph on classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingCriterion {
    /// Every unordered pair: `k(k-1)/2` edges.
    AllCoverage,
    /// A uniform random spanning tree: `k-1` edges, connected.
    TreeCoverage,
    /// A random near-perfect matching: `ceil(k/2)` edges, each class
    /// appears in at least one pair.
    EachChoice,
}

/// One derived quantum input class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuantumClassId {
    /// Basis states drawn from one classical class.
    Basis(usize),
    /// Superpositions of two distinct members of one classical class.
    SamePair(usize),
    /// Superpositions pairing a member of each of two classical classes.
    CrossPair(usize, usize),
}

impl QuantumClassId {
    pub fn describe(&self, classes: &[ClassicalClass]) -> String {
        match *self {
            QuantumClassId::Basis(i) => format!("Q{}", classes[i].label),
            QuantumClassId::SamePair(i) => format!("S({0},{0})", classes[i].label),
            QuantumClassId::CrossPair(i, j) => {
                format!("S({},{})", classes[i].label, classes[j].label)
            }
        }
    }
}

/// The derived quantum classes for one program: all basis classes, the
/// same-class pairs that exist, and the selected cross-class pairs.
#[derive(Debug, Clone)]
pub struct QuantumClassSet {
    pub classes: Vec<ClassicalClass>,
    pub basis: Vec<usize>,
    pub same_pairs: Vec<usize>,
    pub cross_pairs: Vec<(usize, usize)>,
}

impl QuantumClassSet {
    pub fn total(&self) -> usize {
        self.basis.len() + self.same_pairs.len() + self.cross_pairs.len()
    }

    /// All quantum class ids in campaign order: basis classes first, then
    /// same-class pairs, then cross-class pairs.
    pub fn ids(&self) -> Vec<QuantumClassId> {
        self.basis
            .iter()
            .map(|&i| QuantumClassId::Basis(i))
            .chain(self.same_pairs.iter().map(|&i| QuantumClassId::SamePair(i)))
            .chain(self.cross_pairs.iter().map(|&(i, j)| QuantumClassId::CrossPair(i, j)))
            .collect()
    }
}

/// Selects cross-class pairs over class indices `0..k` per the criterion.
/// Edges are normalized `(min, max)` and sorted. Randomized criteria draw
/// from `rng`, so the graph is reproducible per seed.
pub fn build_pairing<R: Rng>(
    k: usize,
    criterion: PairingCriterion,
    rng: &mut R,
) -> Vec<(usize, usize)> {
    if k < 2 {
        return Vec::new();
    }
    let mut edges = match criterion {
        PairingCriterion::AllCoverage => {
            let mut edges = Vec::with_capacity(k * (k - 1) / 2);
            for i in 0..k {
                for j in i + 1..k {
                    edges.push((i, j));
                }
            }
            edges
        }
        PairingCriterion::TreeCoverage => random_spanning_tree(k, rng),
        PairingCriterion::EachChoice => {
            let mut order: Vec<usize> = (0..k).collect();
            order.shuffle(rng);
            let mut edges: Vec<(usize, usize)> = order
                .chunks_exact(2)
                .map(|pair| (pair[0].min(pair[1]), pair[0].max(pair[1])))
                .collect();
            if k % 2 == 1 {
                let odd_one = order[k - 1];
                let partner = order[rng.gen_range(0..k - 1)];
                edges.push((odd_one.min(partner), odd_one.max(partner)));
            }
            edges
        }
    };
    edges.sort_unstable();
    edges
}

/// Uniform random labeled tree on `k >= 2` vertices, decoded from a random
/// Prufer sequence.
fn random_spanning_tree<R: Rng>(k: usize, rng: &mut R) -> Vec<(usize, usize)> {
    if k == 2 {
        return vec![(0, 1)];
    }
    let seq: Vec<usize> = (0..k - 2).map(|_| rng.gen_range(0..k)).collect();
    let mut degree = vec![1usize; k];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> =
        (0..k).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(k - 1);
    for &s in &seq {
        let leaf = *leaves.iter().next().expect("tree decode always has a leaf");
        leaves.remove(&leaf);
        edges.push((leaf.min(s), leaf.max(s)));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.insert(s);
        }
    }
    let mut last = leaves.into_iter();
    let (u, v) = (last.next().unwrap(), last.next().unwrap());
    edges.push((u.min(v), u.max(v)));
    edges
}

/// Derives the quantum class set: one basis class per classical class, one
/// same-class pair per class with two or more members, and cross-class
/// pairs per the criterion.
pub fn derive_quantum_classes<R: Rng>(
    classes: Vec<ClassicalClass>,
    criterion: PairingCriterion,
    rng: &mut R,
) -> QuantumClassSet {
    let k = classes.len();
    let basis = (0..k).collect();
    let same_pairs = (0..k).filter(|&i| classes[i].supports_same_pair()).collect();
    let cross_pairs = build_pairing(k, criterion, rng);
    QuantumClassSet { classes, basis, same_pairs, cross_pairs }
}

/// One basis input for class index `i`.
pub fn sample_basis_input<R: Rng>(
    set: &QuantumClassSet,
    i: usize,
    rng: &mut R,
) -> Result<(u64, u64), ClassError> {
    set.classes[i].sample(rng)
}

/// One two-value input for a pair class: two distinct members when both
/// endpoints are the same class, otherwise one member from each.
pub fn sample_twovalue_input<R: Rng>(
    set: &QuantumClassSet,
    i: usize,
    j: usize,
    rng: &mut R,
) -> Result<((u64, u64), (u64, u64)), ClassError> {
    if i == j {
        set.classes[i].sample_distinct_pair(rng)
    } else {
        let a = set.classes[i].sample(rng)?;
        let b = set.classes[j].sample(rng)?;
        Ok((a, b))
    }
}

/// Fill colors for the DOT rendering of a pairing graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DotColor {
    None,
    Orange,
    Red,
}

/// Renders the quantum class structure as a DOT graph: one vertex per
/// classical class, a self-loop per same-class pair, an edge per
/// cross-class pair. `color_of` supplies per-class colors, for example
/// detection outcomes.
pub fn render_dot(
    set: &QuantumClassSet,
    color_of: &dyn Fn(&QuantumClassId) -> DotColor,
) -> String {
    let mut out = String::from("graph pairing {\n");
    for &i in &set.basis {
        let label = &set.classes[i].label;
        match color_of(&QuantumClassId::Basis(i)) {
            DotColor::None => writeln!(out, "  \"{label}\";").unwrap(),
            DotColor::Orange => {
                writeln!(out, "  \"{label}\" [style=filled, fillcolor=orange];").unwrap()
            }
            DotColor::Red => writeln!(out, "  \"{label}\" [style=filled, fillcolor=red];").unwrap(),
        }
    }
    let edge = |out: &mut String, a: &str, b: &str, color: DotColor| match color {
        DotColor::None => writeln!(out, "  \"{a}\" -- \"{b}\";").unwrap(),
        DotColor::Orange => writeln!(out, "  \"{a}\" -- \"{b}\" [color=orange, penwidth=2];").unwrap(),
        DotColor::Red => writeln!(out, "  \"{a}\" -- \"{b}\" [color=red, penwidth=2];").unwrap(),
    };
    for &i in &set.same_pairs {
        let label = &set.classes[i].label;
        edge(&mut out, label, label, color_of(&QuantumClassId::SamePair(i)));
    }
    for &(i, j) in &set.cross_pairs {
        edge(
            &mut out,
            &set.classes[i].label,
            &set.classes[j].label,
            color_of(&QuantumClassId::CrossPair(i, j)),
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::RngSeed;

    fn toy_classes(sizes: &[usize]) -> Vec<ClassicalClass> {
        let mut next = 0u64;
        sizes
            .iter()
            .enumerate()
            .map(|(id, &size)| {
                let members: Vec<(u64, u64)> = (0..size as u64).map(|_| {
                    next += 1;
                    (next, 0)
                }).collect();
                ClassicalClass::explicit(id, format!("{}", id + 1), members)
            })
            .collect()
    }

    fn is_connected(k: usize, edges: &[(usize, usize)]) -> bool {
        let mut adj = vec![Vec::new(); k];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    #[test]
    fn all_coverage_is_the_complete_graph() {
        let mut rng = RngSeed(1).stream(&[0]);
        for k in 2..9 {
            let edges = build_pairing(k, PairingCriterion::AllCoverage, &mut rng);
            assert_eq!(edges.len(), k * (k - 1) / 2);
            let unique: std::collections::BTreeSet<_> = edges.iter().collect();
            assert_eq!(unique.len(), edges.len());
        }
        assert!(build_pairing(1, PairingCriterion::AllCoverage, &mut rng).is_empty());
    }

    #[test]
    fn tree_coverage_is_a_spanning_tree() {
        let mut rng = RngSeed(2).stream(&[0]);
        for k in 2..12 {
            for _ in 0..20 {
                let edges = build_pairing(k, PairingCriterion::TreeCoverage, &mut rng);
                assert_eq!(edges.len(), k - 1);
                assert!(is_connected(k, &edges), "k={k} edges={edges:?}");
                for &(a, b) in &edges {
                    assert!(a < b && b < k);
                }
            }
        }
    }

    #[test]
    fn each_choice_covers_every_class() {
        let mut rng = RngSeed(3).stream(&[0]);
        for k in 2..12 {
            for _ in 0..20 {
                let edges = build_pairing(k, PairingCriterion::EachChoice, &mut rng);
                assert_eq!(edges.len(), k.div_ceil(2));
                let mut touched = vec![false; k];
                for &(a, b) in &edges {
                    assert_ne!(a, b);
                    touched[a] = true;
                    touched[b] = true;
                }
                assert!(touched.into_iter().all(|t| t), "k={k}");
            }
        }
        assert!(build_pairing(1, PairingCriterion::EachChoice, &mut rng).is_empty());
    }

    #[test]
    fn derived_set_counts_add_up() {
        let mut rng = RngSeed(4).stream(&[0]);
        // Sizes 1, 2, 3: only two classes support same-class pairs.
        let set = derive_quantum_classes(toy_classes(&[1, 2, 3]), PairingCriterion::AllCoverage, &mut rng);
        assert_eq!(set.basis, vec![0, 1, 2]);
        assert_eq!(set.same_pairs, vec![1, 2]);
        assert_eq!(set.cross_pairs, vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(set.total(), 3 + 2 + 3);
        assert_eq!(set.ids().len(), set.total());
    }

    #[test]
    fn basis_sampling_is_uniform_within_three_sigma() {
        let class = ClassicalClass::explicit(0, "u", (0..5u64).map(|x| (x, 0)).collect());
        let mut rng = RngSeed(5).stream(&[0]);
        let draws = 10_000usize;
        let mut counts = [0usize; 5];
        for _ in 0..draws {
            let (x, _) = class.sample(&mut rng).unwrap();
            counts[x as usize] += 1;
        }
        let p = 1.0 / 5.0;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for (value, &count) in counts.iter().enumerate() {
            let dev = (count as f64 - draws as f64 * p).abs();
            assert!(dev <= 3.0 * sigma, "value {value} deviates {dev}");
        }
    }

    #[test]
    fn same_pair_sampling_returns_distinct_members() {
        let class = ClassicalClass::explicit(0, "d", vec![(1, 0), (2, 0), (3, 0)]);
        let mut rng = RngSeed(6).stream(&[0]);
        for _ in 0..200 {
            let (a, b) = class.sample_distinct_pair(&mut rng).unwrap();
            assert_ne!(a, b);
        }
    }

    #[test]
    fn singleton_same_pair_is_an_error() {
        let class = ClassicalClass::explicit(0, "s", vec![(7, 0)]);
        let mut rng = RngSeed(7).stream(&[0]);
        assert_eq!(
            class.sample_distinct_pair(&mut rng).unwrap_err(),
            ClassError::SingletonClass { label: "s".into() }
        );
    }

    #[test]
    fn predicate_class_samples_through_rejection() {
        let class = ClassicalClass {
            id: 0,
            label: "even".into(),
            members: ClassMembers::Predicate {
                contains: Arc::new(|x, _| x % 2 == 0),
                sampler: Arc::new(|rng| (rng.gen_range(0..100), 0)),
            },
            cardinality_hint: Some(50),
        };
        let mut rng = RngSeed(8).stream(&[0]);
        for _ in 0..100 {
            let (x, _) = class.sample(&mut rng).unwrap();
            assert_eq!(x % 2, 0);
        }
        assert!(class.supports_same_pair());
    }

    #[test]
    fn impossible_predicate_exhausts_the_cap() {
        let class = ClassicalClass {
            id: 0,
            label: "never".into(),
            members: ClassMembers::Predicate {
                contains: Arc::new(|_, _| false),
                sampler: Arc::new(|rng| (rng.gen_range(0..4), 0)),
            },
            cardinality_hint: None,
        };
        let mut rng = RngSeed(9).stream(&[0]);
        assert_eq!(
            class.sample(&mut rng).unwrap_err(),
            ClassError::SamplingExhausted { label: "never".into() }
        );
        assert!(!class.supports_same_pair());
    }

    #[test]
    fn cross_pair_sampling_takes_one_from_each() {
        let mut rng = RngSeed(10).stream(&[0]);
        let set = derive_quantum_classes(toy_classes(&[2, 2]), PairingCriterion::AllCoverage, &mut rng);
        for _ in 0..50 {
            let (a, b) = sample_twovalue_input(&set, 0, 1, &mut rng).unwrap();
            assert!(set.classes[0].contains(a.0, a.1));
            assert!(set.classes[1].contains(b.0, b.1));
        }
    }

    #[test]
    fn dot_render_has_vertices_loops_and_edges() {
        let mut rng = RngSeed(11).stream(&[0]);
        let set = derive_quantum_classes(toy_classes(&[1, 2]), PairingCriterion::AllCoverage, &mut rng);
        let dot = render_dot(&set, &|id| match id {
            QuantumClassId::Basis(0) => DotColor::Red,
            QuantumClassId::SamePair(_) => DotColor::Orange,
            _ => DotColor::None,
        });
        assert!(dot.starts_with("graph pairing {"));
        assert!(dot.contains("\"1\" [style=filled, fillcolor=red];"));
        assert!(dot.contains("\"2\";"));
        assert!(dot.contains("\"2\" -- \"2\" [color=orange, penwidth=2];"));
        assert!(dot.contains("\"1\" -- \"2\";"));
        assert!(dot.trim_end().ends_with('}'));
    }

    #[test]
    fn describe_names_follow_class_labels() {
        let classes = toy_classes(&[2, 2, 2]);
        assert_eq!(QuantumClassId::Basis(0).describe(&classes), "Q1");
        assert_eq!(QuantumClassId::SamePair(2).describe(&classes), "S(3,3)");
        assert_eq!(QuantumClassId::CrossPair(0, 2).describe(&classes), "S(1,3)");
    }
}
