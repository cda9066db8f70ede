//! Permutations, signed permutations (the hyperoctahedral group BC_d),
//! cycle notation, the star operation and the S4 quartet classification.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * Cycle words read left to right: `(234)` maps 2 -> 3, 3 -> 4, 4 -> 2.
//! * `compose(a, b)` applies `a` first, then `b`, so concatenating cycle
//!   words left to right matches composition order.
//! * Matrices act on columns: `to_matrix(sp) * e_j = signs[sigma(j)] *
//!   e_{sigma(j)}`. Under this convention
//!   `to_matrix(compose(a, b)) == to_matrix(b) * to_matrix(a)`.
//! * Signs are stored per *row* of the matrix, i.e. `L = S * P` with `S`
//!   diagonal on the left.
//!
//! Elements are 1-based in cycle strings and in JSON, 0-based internally.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::mat::Mat;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("invalid image list: expected a bijection of 1..={expected}, got {found:?}")]
    NotABijection { expected: usize, found: Vec<usize> },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("sign vector must contain only +1/-1, got {0} at position {1}")]
    BadSign(i8, usize),
    #[error("sign vector length {signs} does not match degree {degree}")]
    SignLength { signs: usize, degree: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CycleParseError {
    #[error("empty cycle string; use \"()\" for the identity")]
    Empty,
    #[error("unexpected character {token:?} at byte {position}")]
    UnexpectedToken { token: char, position: usize },
    #[error("unclosed cycle starting at byte {position}")]
    Unclosed { position: usize },
    #[error("element {element} out of range 1..={degree}")]
    OutOfRange { element: usize, degree: usize },
    #[error("element {element} repeated across cycles")]
    Repeated { element: usize },
    #[error("degree {degree} exceeds 9; separate cycle elements with commas")]
    NeedsSeparators { degree: usize },
}

/// A permutation of `{1..d}`, stored as 0-based images.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    /// Builds a permutation from 1-based images (`images[j-1] = sigma(j)`).
    pub fn from_images_one_based(images: &[usize]) -> Result<Self, PermError> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &img in images {
            if img == 0 || img > d || seen[img - 1] {
                return Err(PermError::NotABijection {
                    expected: d,
                    found: images.to_vec(),
                });
            }
            seen[img - 1] = true;
        }
        Ok(Permutation {
            images: images.iter().map(|&x| x - 1).collect(),
        })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// 0-based image of a 0-based point.
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images_one_based(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &img)| i == img)
    }

    /// Applies `self` first, then `then`.
    pub fn compose(&self, then: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != then.degree() {
            return Err(PermError::DegreeMismatch {
                left: self.degree(),
                right: then.degree(),
            });
        }
        Ok(Permutation {
            images: self.images.iter().map(|&x| then.images[x]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (x, &img) in self.images.iter().enumerate() {
            images[img] = x;
        }
        Permutation { images }
    }

    /// The star operation: every cycle word is read right to left instead
    /// of left to right. Equivalent to inversion; kept as a named operation
    /// because the quartet duality is phrased in terms of it.
    pub fn star(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for cycle in self.cycles() {
            let k = cycle.len();
            for (pos, &elem) in cycle.iter().enumerate() {
                // reversed word: elem maps to its predecessor in the cycle
                images[elem] = cycle[(pos + k - 1) % k];
            }
        }
        let starred = Permutation { images };
        debug_assert_eq!(starred, self.inverse());
        starred
    }

    /// Disjoint cycles (0-based), including fixed points, each cycle
    /// starting at its minimal element, cycles ordered by minimal element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut cycles = Vec::new();
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut next = self.images[start];
            while next != start {
                seen[next] = true;
                cycle.push(next);
                next = self.images[next];
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Canonical cycle string: fixed points omitted, `()` for the identity,
    /// 1-based elements, comma separators only when `d > 9`.
    pub fn to_cycle_string(&self) -> String {
        let sep = if self.degree() > 9 { "," } else { "" };
        let mut out = String::new();
        for cycle in self.cycles() {
            if cycle.len() < 2 {
                continue;
            }
            out.push('(');
            let parts: Vec<String> = cycle.iter().map(|&x| (x + 1).to_string()).collect();
            out.push_str(&parts.join(sep));
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }

    /// Parses a whitespace-free product of disjoint cycles over `{1..d}`,
    /// e.g. `"(234)"`, `"(12)(34)"`, `"()"`. Elements are single digits;
    /// for `d > 9` separate elements with commas, e.g. `"(1,10,2)"`.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation, CycleParseError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(CycleParseError::Empty);
        }
        let mut images: Vec<usize> = (0..degree).collect();
        let mut used = vec![false; degree];
        let mut chars = text.char_indices().peekable();
        while let Some((open_pos, c)) = chars.next() {
            if c != '(' {
                return Err(CycleParseError::UnexpectedToken {
                    token: c,
                    position: open_pos,
                });
            }
            let mut cycle: Vec<usize> = Vec::new();
            let mut pending = String::new();
            let mut closed = false;
            for (pos, c) in chars.by_ref() {
                match c {
                    ')' => {
                        if !pending.is_empty() {
                            cycle.push(parse_element(&pending, degree)?);
                            pending.clear();
                        }
                        closed = true;
                        break;
                    }
                    ',' => {
                        if pending.is_empty() {
                            return Err(CycleParseError::UnexpectedToken {
                                token: c,
                                position: pos,
                            });
                        }
                        cycle.push(parse_element(&pending, degree)?);
                        pending.clear();
                    }
                    '0'..='9' => {
                        pending.push(c);
                        // without separators each digit is one element
                        if degree <= 9 {
                            cycle.push(parse_element(&pending, degree)?);
                            pending.clear();
                        }
                    }
                    _ => {
                        return Err(CycleParseError::UnexpectedToken {
                            token: c,
                            position: pos,
                        });
                    }
                }
            }
            if !closed {
                return Err(CycleParseError::Unclosed { position: open_pos });
            }
            for &elem in &cycle {
                if used[elem] {
                    return Err(CycleParseError::Repeated { element: elem + 1 });
                }
                used[elem] = true;
            }
            for (pos, &elem) in cycle.iter().enumerate() {
                images[elem] = cycle[(pos + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// All permutations of degree `d` in lexicographic order of their
    /// image vectors.
    pub fn all(degree: usize) -> Vec<Permutation> {
        let mut current: Vec<usize> = (0..degree).collect();
        let mut out = vec![Permutation {
            images: current.clone(),
        }];
        while next_permutation(&mut current) {
            out.push(Permutation {
                images: current.clone(),
            });
        }
        out
    }
}

fn parse_element(token: &str, degree: usize) -> Result<usize, CycleParseError> {
    if token.len() > 1 && degree <= 9 {
        return Err(CycleParseError::NeedsSeparators { degree });
    }
    let element: usize = token.parse().map_err(|_| CycleParseError::UnexpectedToken {
        token: token.chars().next().unwrap_or('?'),
        position: 0,
    })?;
    if element == 0 || element > degree {
        return Err(CycleParseError::OutOfRange { element, degree });
    }
    Ok(element - 1)
}

/// Advances `items` to the next lexicographic permutation; `false` once
/// the sequence is fully descending.
pub(crate) fn next_permutation(items: &mut [usize]) -> bool {
    if items.len() < 2 {
        return false;
    }
    let mut i = items.len() - 1;
    while i > 0 && items[i - 1] >= items[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = items.len() - 1;
    while items[j] <= items[i - 1] {
        j -= 1;
    }
    items.swap(i - 1, j);
    items[i..].reverse();
    true
}

impl std::fmt::Display for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_cycle_string())
    }
}

/// One of the six quartets partitioning S4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuartetId(u8);

impl QuartetId {
    pub fn new(index: u8) -> Option<QuartetId> {
        (1..=6).contains(&index).then_some(QuartetId(index))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// The four cycle words of this quartet.
    pub fn member_cycles(self) -> [&'static str; 4] {
        QUARTET_CYCLES[(self.0 - 1) as usize]
    }

    /// The four permutations of this quartet.
    pub fn members(self) -> Vec<Permutation> {
        self.member_cycles()
            .iter()
            .map(|s| Permutation::parse_cycles(s, 4).expect("quartet table is well formed"))
            .collect()
    }
}

impl std::fmt::Display for QuartetId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The six quartets. Any mutually compatible set of signed-permutation
/// supercharge matrices draws all of its permutation parts from exactly
/// one of these rows.
const QUARTET_CYCLES: [[&str; 4]; 6] = [
    ["(123)", "(134)", "(142)", "(243)"],
    ["(124)", "(132)", "(143)", "(234)"],
    ["(14)", "(23)", "(1243)", "(1342)"],
    ["(13)", "(24)", "(1234)", "(1432)"],
    ["(12)", "(34)", "(1324)", "(1423)"],
    ["()", "(12)(34)", "(13)(24)", "(14)(23)"],
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuartetError {
    #[error("quartet classification is defined for degree 4, got {0}")]
    WrongDegree(usize),
}

/// The unique quartet containing `p` (degree-4 permutations only).
pub fn quartet_of(p: &Permutation) -> Result<QuartetId, QuartetError> {
    if p.degree() != 4 {
        return Err(QuartetError::WrongDegree(p.degree()));
    }
    for (row, cycles) in QUARTET_CYCLES.iter().enumerate() {
        for s in cycles {
            let member = Permutation::parse_cycles(s, 4).expect("quartet table is well formed");
            if member == *p {
                return Ok(QuartetId((row + 1) as u8));
            }
        }
    }
    unreachable!("the quartets partition S4")
}

/// Image of a quartet under the star operation: 1 <-> 2, the rest fixed.
pub fn star_quartet(q: QuartetId) -> QuartetId {
    match q.0 {
        1 => QuartetId(2),
        2 => QuartetId(1),
        k => QuartetId(k),
    }
}

/// An element of BC_d: a permutation together with a sign per coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPermutation {
    perm: Permutation,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Permutation, signs: Vec<i8>) -> Result<Self, PermError> {
        if signs.len() != perm.degree() {
            return Err(PermError::SignLength {
                signs: signs.len(),
                degree: perm.degree(),
            });
        }
        for (i, &s) in signs.iter().enumerate() {
            if s != 1 && s != -1 {
                return Err(PermError::BadSign(s, i));
            }
        }
        Ok(SignedPermutation { perm, signs })
    }

    pub fn identity(degree: usize) -> Self {
        SignedPermutation {
            perm: Permutation::identity(degree),
            signs: vec![1; degree],
        }
    }

    pub fn degree(&self) -> usize {
        self.perm.degree()
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    /// Row signs: `signs[i]` multiplies matrix row `i`.
    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// The matrix with `M[sigma(j)][j] = signs[sigma(j)]` and zeros
    /// elsewhere, so `M * e_j = signs[sigma(j)] * e_{sigma(j)}`.
    pub fn to_matrix(&self) -> Mat<i64> {
        let d = self.degree();
        let mut m = Mat::zeros(d, d);
        for j in 0..d {
            let i = self.perm.apply(j);
            m[(i, j)] = i64::from(self.signs[i]);
        }
        m
    }

    /// Group product consistent with `to_matrix`:
    /// `compose(a, b).to_matrix() == b.to_matrix() * a.to_matrix()`.
    pub fn compose(&self, then: &SignedPermutation) -> Result<SignedPermutation, PermError> {
        let perm = self.perm.compose(&then.perm)?;
        let then_inv = then.perm.inverse();
        let d = self.degree();
        let mut signs = vec![1i8; d];
        for (i, sign) in signs.iter_mut().enumerate() {
            *sign = self.signs[then_inv.apply(i)] * then.signs[i];
        }
        Ok(SignedPermutation { perm, signs })
    }

    pub fn inverse(&self) -> SignedPermutation {
        let perm = self.perm.inverse();
        let d = self.degree();
        let mut signs = vec![1i8; d];
        for (i, sign) in signs.iter_mut().enumerate() {
            *sign = self.signs[self.perm.apply(i)];
        }
        SignedPermutation { perm, signs }
    }
}

impl std::fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let signs: Vec<String> = self
            .signs
            .iter()
            .map(|&s| if s > 0 { "+".into() } else { "-".to_string() })
            .collect();
        write!(f, "{}[{}]", self.perm, signs.join(""))
    }
}

#[derive(Serialize, Deserialize)]
struct SignedPermutationJson {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl Serialize for SignedPermutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SignedPermutationJson {
            perm: self.perm.images_one_based(),
            signs: self.signs.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SignedPermutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = SignedPermutationJson::deserialize(deserializer)?;
        let perm =
            Permutation::from_images_one_based(&raw.perm).map_err(D::Error::custom)?;
        SignedPermutation::new(perm, raw.signs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> Permutation {
        Permutation::parse_cycles(text, 4).unwrap()
    }

    #[test]
    fn parse_reads_left_to_right() {
        // (234): 1 -> 1, 2 -> 3, 3 -> 4, 4 -> 2
        assert_eq!(p("(234)").images_one_based(), vec![1, 3, 4, 2]);
        assert_eq!(p("()").images_one_based(), vec![1, 2, 3, 4]);
        assert_eq!(p("(12)(34)").images_one_based(), vec![2, 1, 4, 3]);
    }

    #[test]
    fn parse_errors_name_the_token() {
        assert_eq!(
            Permutation::parse_cycles("(125)", 4),
            Err(CycleParseError::OutOfRange {
                element: 5,
                degree: 4
            })
        );
        assert_eq!(
            Permutation::parse_cycles("(12)(23)", 4),
            Err(CycleParseError::Repeated { element: 2 })
        );
        assert_eq!(
            Permutation::parse_cycles("(12", 4),
            Err(CycleParseError::Unclosed { position: 0 })
        );
        assert_eq!(Permutation::parse_cycles("  ", 4), Err(CycleParseError::Empty));
        assert!(matches!(
            Permutation::parse_cycles("(1a)", 4),
            Err(CycleParseError::UnexpectedToken { token: 'a', .. })
        ));
    }

    #[test]
    fn parse_multi_digit_with_commas() {
        let q = Permutation::parse_cycles("(1,10,2)", 10).unwrap();
        assert_eq!(q.apply(0), 9);
        assert_eq!(q.apply(9), 1);
        assert_eq!(q.apply(1), 0);
    }

    #[test]
    fn compose_applies_left_operand_first() {
        let ab = p("(12)").compose(&p("(23)")).unwrap();
        assert_eq!(ab.images_one_based(), vec![3, 1, 2]);
        assert_eq!(ab.to_cycle_string(), "(132)");
        let q = p("(1324)");
        assert_eq!(q.compose(&Permutation::identity(4)).unwrap(), q);
        assert!(q.compose(&q.inverse()).unwrap().is_identity());
    }

    #[test]
    fn compose_rejects_mixed_degrees() {
        let a = Permutation::identity(3);
        let b = Permutation::identity(4);
        assert_eq!(
            a.compose(&b),
            Err(PermError::DegreeMismatch { left: 3, right: 4 })
        );
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(p("(234)").inverse(), p("(243)"));
        assert!(Permutation::identity(4).inverse().is_identity());
        assert_eq!(p("(12)").inverse(), p("(12)"));
    }

    #[test]
    fn star_reads_right_to_left() {
        // *(234): 1 -> 1, 2 -> 4, 4 -> 3, 3 -> 2
        let s = p("(234)").star();
        assert_eq!(s, p("(243)"));
        assert_eq!(s.images_one_based(), vec![1, 4, 2, 3]);
        assert_eq!(p("(12)(34)").star(), p("(12)(34)"));
    }

    #[test]
    fn star_is_inversion_on_all_of_s4() {
        for q in Permutation::all(4) {
            assert_eq!(q.star(), q.inverse());
            assert_eq!(q.star().star(), q);
        }
    }

    #[test]
    fn quartet_classification() {
        assert_eq!(quartet_of(&p("(134)")).unwrap().index(), 1);
        assert_eq!(quartet_of(&p("(1324)")).unwrap().index(), 5);
        assert_eq!(quartet_of(&p("()")).unwrap().index(), 6);
        assert_eq!(
            quartet_of(&Permutation::identity(3)),
            Err(QuartetError::WrongDegree(3))
        );
    }

    #[test]
    fn quartets_partition_s4() {
        let mut seen = std::collections::HashSet::new();
        for k in 1..=6 {
            let q = QuartetId::new(k).unwrap();
            let members = q.members();
            assert_eq!(members.len(), 4);
            for m in members {
                assert_eq!(quartet_of(&m).unwrap(), q);
                assert!(seen.insert(m), "quartets overlap");
            }
        }
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn star_quartet_table() {
        let table = [(1, 2), (2, 1), (3, 3), (4, 4), (5, 5), (6, 6)];
        for (from, to) in table {
            assert_eq!(
                star_quartet(QuartetId::new(from).unwrap()).index(),
                to
            );
        }
    }

    #[test]
    fn star_matches_quartet_duality_elementwise() {
        for q in Permutation::all(4) {
            let lhs = quartet_of(&q.star()).unwrap();
            let rhs = star_quartet(quartet_of(&q).unwrap());
            assert_eq!(lhs, rhs, "failed for {q}");
        }
        // and as unordered sets
        for k in 1..=6u8 {
            let q = QuartetId::new(k).unwrap();
            let mut starred: Vec<Permutation> =
                q.members().iter().map(|p| p.star()).collect();
            let mut expected = star_quartet(q).members();
            starred.sort();
            expected.sort();
            assert_eq!(starred, expected);
        }
    }

    #[test]
    fn to_matrix_convention() {
        let sp = SignedPermutation::identity(3);
        assert_eq!(sp.to_matrix(), Mat::identity(3));

        let flip = SignedPermutation::new(
            Permutation::parse_cycles("(12)", 2).unwrap(),
            vec![1, -1],
        )
        .unwrap();
        assert_eq!(
            flip.to_matrix(),
            Mat::from_rows(vec![vec![0, 1], vec![-1, 0]])
        );
    }

    #[test]
    fn signed_permutation_matrices_are_orthogonal() {
        let sp = SignedPermutation::new(
            Permutation::parse_cycles("(1324)", 4).unwrap(),
            vec![1, -1, -1, 1],
        )
        .unwrap();
        let m = sp.to_matrix();
        assert_eq!(m.mul(&m.transpose()), Mat::identity(4));
    }

    #[test]
    fn compose_matches_matrix_product_on_bc2() {
        let elements: Vec<SignedPermutation> = Permutation::all(2)
            .into_iter()
            .flat_map(|q| {
                [[1, 1], [1, -1], [-1, 1], [-1, -1]]
                    .into_iter()
                    .map(move |s| SignedPermutation::new(q.clone(), s.to_vec()).unwrap())
            })
            .collect();
        assert_eq!(elements.len(), 8);
        for a in &elements {
            for b in &elements {
                let product = a.compose(b).unwrap();
                assert_eq!(
                    product.to_matrix(),
                    b.to_matrix().mul(&a.to_matrix()),
                    "a={a} b={b}"
                );
                assert_eq!(
                    a.compose(&a.inverse()).unwrap(),
                    SignedPermutation::identity(2)
                );
            }
        }
    }

    #[test]
    fn signed_permutation_json_shape() {
        let sp = SignedPermutation::new(
            Permutation::parse_cycles("(234)", 4).unwrap(),
            vec![1, -1, 1, -1],
        )
        .unwrap();
        let text = serde_json::to_string(&sp).unwrap();
        assert_eq!(text, r#"{"perm":[1,3,4,2],"signs":[1,-1,1,-1]}"#);
        let back: SignedPermutation = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sp);
        assert!(serde_json::from_str::<SignedPermutation>(
            r#"{"perm":[1,3,4,2],"signs":[1,0,1,-1]}"#
        )
        .is_err());
    }

    #[test]
    fn rejects_bad_images() {
        assert!(Permutation::from_images_one_based(&[1, 1, 3]).is_err());
        assert!(Permutation::from_images_one_based(&[0, 1]).is_err());
        assert!(Permutation::from_images_one_based(&[1, 4, 2]).is_err());
    }
}
