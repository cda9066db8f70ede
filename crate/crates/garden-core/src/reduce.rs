//! Dimensional reduction of four-dimensional supermultiplets to
//! one-dimensional representations.
//!
//! All arithmetic here is exact: gamma matrices carry complex rational
//! entries and the emitted L/R matrices are integers. The reduction
//! engine consumes a transformation table ([`MultipletSpec`]); the chiral
//! and vector multiplets are generated from a loaded set of gamma-matrix
//! conventions and share that engine.
//!
//! The boson-side laws alone determine the L matrices; R is produced as
//! `L^{-1}` (`= L^T` for signed permutations), which the diagonal algebra
//! relation forces. Fermion-side laws, when present, are replayed through
//! the spinor metric as an independent cross-check of that inverse.

use num_complex::Complex;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{decompose_sp, GardenRep};
use crate::mat::Mat;

/// Exact rational scalar.
pub type Rat = Rational64;
/// Exact complex rational scalar.
pub type CRat = Complex<Rat>;

fn crat(re: Rat, im: Rat) -> CRat {
    Complex::new(re, im)
}

fn imag_unit() -> CRat {
    crat(Rat::zero(), Rat::one())
}

/// Reads a complex rational as an exact integer, if it is one.
fn as_integer(c: &CRat) -> Option<i64> {
    if !c.im.is_zero() || !c.re.denom().eq(&1) {
        return None;
    }
    Some(*c.re.numer())
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("conventions file: {0}")]
    Parse(String),
    #[error("Clifford algebra violated: {0}")]
    CliffordViolation(String),
    #[error("conventions differ from the pinned reference matrices: {0}")]
    PaperMismatch(String),
    #[error("spinor metric invalid: {0}")]
    SpinorMetric(String),
    #[error("unbalanced multiplet: {bosons} bosons vs {fermions} fermions")]
    UnbalancedMultiplet { bosons: usize, fermions: usize },
    #[error("reduction inconsistent: {0}")]
    ReductionInconsistent(String),
    #[error("spatial derivative in law {0:?}; set spatial derivatives to zero first")]
    SpatialDerivative(String),
}

/// The matrices gamma^0..gamma^3 and gamma^5 of a four-dimensional
/// Clifford algebra, plus the spinor metric used to lower spinor indices,
/// validated on load.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaConventions {
    gammas: [Mat<CRat>; 4],
    gamma5: Mat<CRat>,
    spinor_metric: Mat<CRat>,
    signature: [i64; 4],
}

impl GammaConventions {
    /// `gamma^mu` for `mu` in `0..=3`.
    pub fn gamma(&self, mu: usize) -> &Mat<CRat> {
        &self.gammas[mu]
    }

    pub fn gamma5(&self) -> &Mat<CRat> {
        &self.gamma5
    }

    pub fn spinor_metric(&self) -> &Mat<CRat> {
        &self.spinor_metric
    }

    /// Diagonal of the inverse Minkowski metric the gammas close over.
    pub fn signature(&self) -> [i64; 4] {
        self.signature
    }

    /// Lowers the second spinor index: `X_{ab} = (X C)_{ab}`.
    pub fn lower(&self, x: &Mat<CRat>) -> Mat<CRat> {
        x.mul(&self.spinor_metric)
    }
}

type QuadMat = Vec<Vec<[i64; 4]>>;

#[derive(Deserialize)]
struct ConventionsJson {
    signature: [i64; 4],
    /// gamma^0, gamma^1, gamma^2, gamma^3, gamma^5, in that order.
    gamma: Vec<QuadMat>,
    spinor_metric: QuadMat,
}

fn quad_to_mat(raw: &QuadMat, name: &str) -> Result<Mat<CRat>, ReductionError> {
    if raw.len() != 4 || raw.iter().any(|row| row.len() != 4) {
        return Err(ReductionError::Parse(format!("{name} must be 4x4")));
    }
    let mut rows = Vec::with_capacity(4);
    for row in raw {
        let mut out = Vec::with_capacity(4);
        for &[re_num, re_den, im_num, im_den] in row {
            if re_den == 0 || im_den == 0 {
                return Err(ReductionError::Parse(format!(
                    "{name} has a zero denominator"
                )));
            }
            out.push(crat(
                Rat::new(re_num, re_den),
                Rat::new(im_num, im_den),
            ));
        }
        rows.push(out);
    }
    Ok(Mat::from_rows(rows))
}

/// The gamma^0 display that the reduction fixtures are pinned to.
fn pinned_gamma0() -> Mat<CRat> {
    int_mat(&[[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
}

/// The first two rows of the pinned gamma^5: (0,0,0,i) and (0,0,-i,0).
fn pinned_gamma5_rows() -> [Vec<CRat>; 2] {
    let i = imag_unit();
    let zero = CRat::zero();
    [
        vec![zero.clone(), zero.clone(), zero.clone(), i.clone()],
        vec![zero.clone(), zero.clone(), -i, zero],
    ]
}

fn int_mat(rows: &[[i64; 4]; 4]) -> Mat<CRat> {
    Mat::from_rows(
        rows.iter()
            .map(|row| {
                row.iter()
                    .map(|&x| crat(Rat::from_integer(x), Rat::zero()))
                    .collect()
            })
            .collect(),
    )
}

fn det4(m: &Mat<CRat>) -> CRat {
    fn det(rows: &[Vec<CRat>]) -> CRat {
        let n = rows.len();
        if n == 1 {
            return rows[0][0].clone();
        }
        let mut acc = CRat::zero();
        for (col, pivot) in rows[0].iter().enumerate() {
            if pivot.is_zero() {
                continue;
            }
            let minor: Vec<Vec<CRat>> = rows[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != col)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let term = pivot.clone() * det(&minor);
            if col % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }
    det(&m.to_rows())
}

/// Parses and validates a conventions file.
///
/// Checks performed: the four gammas close the Clifford algebra of the
/// declared Minkowski signature; gamma^5 squares to the identity,
/// anticommutes with every gamma^mu and equals `+-i gamma^0 gamma^1
/// gamma^2 gamma^3`; gamma^0 and the leading rows of gamma^5 match the
/// pinned reference display; the spinor metric is antisymmetric and
/// invertible.
pub fn load_conventions(text: &str) -> Result<GammaConventions, ReductionError> {
    let raw: ConventionsJson =
        serde_json::from_str(text).map_err(|e| ReductionError::Parse(e.to_string()))?;
    if raw.gamma.len() != 5 {
        return Err(ReductionError::Parse(format!(
            "expected 5 gamma matrices, got {}",
            raw.gamma.len()
        )));
    }
    let mut gammas = Vec::with_capacity(4);
    for (mu, quad) in raw.gamma[..4].iter().enumerate() {
        gammas.push(quad_to_mat(quad, &format!("gamma{mu}"))?);
    }
    let gamma5 = quad_to_mat(&raw.gamma[4], "gamma5")?;
    let spinor_metric = quad_to_mat(&raw.spinor_metric, "spinor_metric")?;
    let signature = raw.signature;

    if signature.iter().any(|&s| s != 1 && s != -1) {
        return Err(ReductionError::Parse(
            "signature entries must be +-1".into(),
        ));
    }

    let id = Mat::<CRat>::identity(4);
    let two = crat(Rat::from_integer(2), Rat::zero());
    for mu in 0..4 {
        for nu in mu..4 {
            let anti = gammas[mu].mul(&gammas[nu]).add(&gammas[nu].mul(&gammas[mu]));
            let target = if mu == nu {
                id.scale(&(two.clone() * crat(Rat::from_integer(signature[mu]), Rat::zero())))
            } else {
                Mat::zeros(4, 4)
            };
            if anti != target {
                return Err(ReductionError::CliffordViolation(format!(
                    "{{gamma^{mu}, gamma^{nu}}} != 2 eta^{{{mu}{nu}}}"
                )));
            }
        }
    }

    if gamma5.mul(&gamma5) != id {
        return Err(ReductionError::CliffordViolation(
            "gamma^5 squared is not the identity".into(),
        ));
    }
    for (mu, g) in gammas.iter().enumerate() {
        if !gamma5.mul(g).add(&g.mul(&gamma5)).is_zero() {
            return Err(ReductionError::CliffordViolation(format!(
                "gamma^5 does not anticommute with gamma^{mu}"
            )));
        }
    }
    let chirality = gammas[0]
        .mul(&gammas[1])
        .mul(&gammas[2])
        .mul(&gammas[3])
        .scale(&imag_unit());
    if gamma5 != chirality && gamma5 != chirality.scale(&-CRat::one()) {
        return Err(ReductionError::CliffordViolation(
            "gamma^5 is not +-i gamma^0 gamma^1 gamma^2 gamma^3".into(),
        ));
    }

    if gammas[0] != pinned_gamma0() {
        return Err(ReductionError::PaperMismatch("gamma^0".into()));
    }
    let pinned = pinned_gamma5_rows();
    for (row, want) in pinned.iter().enumerate() {
        if gamma5.row(row) != &want[..] {
            return Err(ReductionError::PaperMismatch(format!(
                "gamma^5 row {}",
                row + 1
            )));
        }
    }

    if spinor_metric.transpose() != spinor_metric.scale(&-CRat::one()) {
        return Err(ReductionError::SpinorMetric("not antisymmetric".into()));
    }
    if det4(&spinor_metric).is_zero() {
        return Err(ReductionError::SpinorMetric("not invertible".into()));
    }

    Ok(GammaConventions {
        gammas: [
            gammas[0].clone(),
            gammas[1].clone(),
            gammas[2].clone(),
            gammas[3].clone(),
        ],
        gamma5,
        spinor_metric,
        signature,
    })
}

/// The conventions bundled with the crate.
pub fn default_conventions() -> GammaConventions {
    load_conventions(include_str!("../data/gamma_conventions.json"))
        .expect("bundled conventions are valid")
}

/// One coefficient of a transformation law: `coeff * field`, optionally
/// under a time derivative (`dt`) or an unreduced spatial derivative
/// (`dx`, rejected by the engine).
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub field: String,
    pub coeff: CRat,
    pub dt: bool,
    pub dx: bool,
}

/// The action of one supercharge on one field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Law {
    /// Supercharge index, 1-based.
    pub charge: usize,
    /// Source field name.
    pub field: String,
    pub terms: Vec<Term>,
}

/// A symbolic transformation table: the input to the reduction engine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultipletSpec {
    pub n_charges: usize,
    pub bosons: Vec<String>,
    pub fermions: Vec<String>,
    pub laws: Vec<Law>,
}

impl MultipletSpec {
    pub fn from_json(text: &str) -> Result<Self, ReductionError> {
        serde_json::from_str(text).map_err(|e| ReductionError::Parse(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    field: String,
    /// `[re_num, re_den, im_num, im_den]`
    coeff: [i64; 4],
    #[serde(default)]
    dt: u8,
    #[serde(default)]
    dx: bool,
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TermJson {
            field: self.field.clone(),
            coeff: [
                *self.coeff.re.numer(),
                *self.coeff.re.denom(),
                *self.coeff.im.numer(),
                *self.coeff.im.denom(),
            ],
            dt: u8::from(self.dt),
            dx: self.dx,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = TermJson::deserialize(deserializer)?;
        let [re_num, re_den, im_num, im_den] = raw.coeff;
        if re_den == 0 || im_den == 0 {
            return Err(D::Error::custom("zero denominator in coefficient"));
        }
        Ok(Term {
            field: raw.field,
            coeff: crat(Rat::new(re_num, re_den), Rat::new(im_num, im_den)),
            dt: raw.dt != 0,
            dx: raw.dx,
        })
    }
}

/// Where a matrix entry came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProvenanceEntry {
    /// Supercharge index, 1-based.
    pub color: usize,
    /// Boson row, 0-based.
    pub row: usize,
    /// Fermion column, 0-based.
    pub col: usize,
    pub value: i64,
    /// Rendering of the originating transformation law.
    pub law: String,
}

/// Result of a reduction: the representation plus labeling and origin
/// data for every L entry (R carries no independent data; it is `L^T`).
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedMultiplet {
    pub rep: GardenRep<i64>,
    pub bosons: Vec<String>,
    pub fermions: Vec<String>,
    pub provenance: Vec<ProvenanceEntry>,
    pub notes: Vec<String>,
}

/// Runs the reduction engine on a transformation table.
///
/// Boson laws must reduce to a single `+-1 * fermion` coefficient (time
/// derivatives on the fermion mark the boson as auxiliary). Fermion laws
/// are optional; when present they are checked against `R = L^{-1}`.
pub fn reduce_custom(spec: &MultipletSpec) -> Result<ReducedMultiplet, ReductionError> {
    let d = spec.bosons.len();
    if d != spec.fermions.len() {
        return Err(ReductionError::UnbalancedMultiplet {
            bosons: d,
            fermions: spec.fermions.len(),
        });
    }
    if d == 0 || spec.n_charges == 0 {
        return Err(ReductionError::ReductionInconsistent(
            "multiplet needs at least one boson and one charge".into(),
        ));
    }
    let boson_index = |name: &str| spec.bosons.iter().position(|b| b == name);
    let fermion_index = |name: &str| spec.fermions.iter().position(|f| f == name);

    for law in &spec.laws {
        if let Some(term) = law.terms.iter().find(|t| t.dx) {
            return Err(ReductionError::SpatialDerivative(format!(
                "D_{} {} -> {}",
                law.charge, law.field, term.field
            )));
        }
        if law.charge == 0 || law.charge > spec.n_charges {
            return Err(ReductionError::ReductionInconsistent(format!(
                "law for D_{} {} is outside 1..={}",
                law.charge, law.field, spec.n_charges
            )));
        }
    }

    // collect boson laws: exactly one per (charge, boson)
    let mut boson_laws: Vec<Vec<Option<&Law>>> = vec![vec![None; d]; spec.n_charges];
    let mut fermion_laws: Vec<Vec<Option<&Law>>> = vec![vec![None; d]; spec.n_charges];
    for law in &spec.laws {
        let slot = if let Some(b) = boson_index(&law.field) {
            &mut boson_laws[law.charge - 1][b]
        } else if let Some(f) = fermion_index(&law.field) {
            &mut fermion_laws[law.charge - 1][f]
        } else {
            return Err(ReductionError::ReductionInconsistent(format!(
                "law references unknown field {:?}",
                law.field
            )));
        };
        if slot.is_some() {
            return Err(ReductionError::ReductionInconsistent(format!(
                "duplicate law for D_{} {}",
                law.charge, law.field
            )));
        }
        *slot = Some(law);
    }

    // heights: a boson whose laws carry d/dt on the fermion is auxiliary
    let mut auxiliary = vec![None::<bool>; d];
    let mut l_mats = Vec::with_capacity(spec.n_charges);
    let mut provenance = Vec::new();
    for charge in 1..=spec.n_charges {
        let mut l = Mat::<i64>::zeros(d, d);
        for b in 0..d {
            let law = boson_laws[charge - 1][b].ok_or_else(|| {
                ReductionError::ReductionInconsistent(format!(
                    "no law for D_{charge} {}",
                    spec.bosons[b]
                ))
            })?;
            if law.terms.len() != 1 {
                return Err(ReductionError::ReductionInconsistent(format!(
                    "D_{charge} {} must carry exactly one fermion term, found {}",
                    spec.bosons[b],
                    law.terms.len()
                )));
            }
            let term = &law.terms[0];
            let f = fermion_index(&term.field).ok_or_else(|| {
                ReductionError::ReductionInconsistent(format!(
                    "D_{charge} {} maps to {:?}, which is not a fermion",
                    spec.bosons[b], term.field
                ))
            })?;
            let value = as_integer(&term.coeff)
                .filter(|v| v.abs() == 1)
                .ok_or_else(|| {
                    ReductionError::ReductionInconsistent(format!(
                        "D_{charge} {} has coefficient {:?}, expected +-1",
                        spec.bosons[b], term.coeff
                    ))
                })?;
            match auxiliary[b] {
                None => auxiliary[b] = Some(term.dt),
                Some(h) if h == term.dt => {}
                Some(_) => {
                    return Err(ReductionError::ReductionInconsistent(format!(
                        "{} mixes derivative and non-derivative laws",
                        spec.bosons[b]
                    )))
                }
            }
            l[(b, f)] = value;
            provenance.push(ProvenanceEntry {
                color: charge,
                row: b,
                col: f,
                value,
                law: format!(
                    "D_{charge} {} = {}{}{}",
                    spec.bosons[b],
                    if value > 0 { "" } else { "-" },
                    if term.dt { "(d/dt) " } else { "" },
                    spec.fermions[f]
                ),
            });
        }
        // signed-permutation structure is what makes R = L^T available
        decompose_sp(&l, 0).map_err(|e| {
            ReductionError::ReductionInconsistent(format!(
                "L_{charge} is not a signed permutation: {e}"
            ))
        })?;
        l_mats.push(l);
    }

    let r_mats: Vec<Mat<i64>> = l_mats.iter().map(|l| l.transpose()).collect();

    // optional fermion-law cross-check against R = L^{-1}
    let minus_i = -imag_unit();
    for charge in 1..=spec.n_charges {
        for f in 0..d {
            let Some(law) = fermion_laws[charge - 1][f] else {
                continue;
            };
            let mut row = vec![0i64; d];
            for term in &law.terms {
                let b = boson_index(&term.field).ok_or_else(|| {
                    ReductionError::ReductionInconsistent(format!(
                        "D_{charge} {} maps to {:?}, which is not a boson",
                        spec.fermions[f], term.field
                    ))
                })?;
                let aux = auxiliary[b].unwrap_or(false);
                // physical bosons enter fermion laws under d/dt, auxiliary
                // ones bare (the auxiliary field itself is the derivative)
                if term.dt == aux {
                    return Err(ReductionError::ReductionInconsistent(format!(
                        "D_{charge} {} term {} has the wrong derivative structure",
                        spec.fermions[f], term.field
                    )));
                }
                let value = as_integer(&(term.coeff.clone() * minus_i.clone()))
                    .filter(|v| v.abs() == 1)
                    .ok_or_else(|| {
                        ReductionError::ReductionInconsistent(format!(
                            "D_{charge} {} coefficient on {} is not +-i",
                            spec.fermions[f], term.field
                        ))
                    })?;
                if row[b] != 0 {
                    return Err(ReductionError::ReductionInconsistent(format!(
                        "D_{charge} {} repeats field {}",
                        spec.fermions[f], term.field
                    )));
                }
                row[b] = value;
            }
            for b in 0..d {
                if r_mats[charge - 1][(f, b)] != row[b] {
                    return Err(ReductionError::ReductionInconsistent(format!(
                        "fermion law D_{charge} {} disagrees with L^{{-1}} at column {}",
                        spec.fermions[f], spec.bosons[b]
                    )));
                }
            }
        }
    }

    let rep = GardenRep::new(l_mats, r_mats).expect("engine emits consistent shapes");
    Ok(ReducedMultiplet {
        rep,
        bosons: spec.bosons.clone(),
        fermions: spec.fermions.clone(),
        provenance,
        notes: Vec::new(),
    })
}

/// Builds the chiral-multiplet transformation table from loaded
/// conventions: bosons (A, B, F, G), fermions psi_1..psi_4, with
///
/// ```text
/// D_a A = psi_a                 D_a F = (gamma^0 d/dt psi)_a
/// D_a B = (-i gamma^5 psi)_a    D_a G = (i gamma^5 gamma^0 d/dt psi)_a
/// ```
///
/// and the corresponding fermion laws lowered through the spinor metric.
pub fn chiral_multiplet_spec(g: &GammaConventions) -> MultipletSpec {
    let bosons: Vec<String> = ["A", "B", "F", "G"].map(String::from).to_vec();
    let fermions: Vec<String> = (1..=4).map(|i| format!("psi{i}")).collect();

    let i = imag_unit();
    let minus_i = -i.clone();
    let g5 = g.gamma5();
    let g0 = g.gamma(0);
    let coeff_b = g5.scale(&minus_i); // -i gamma^5
    let coeff_f = g0.clone();
    let coeff_g = g5.mul(g0).scale(&i); // i gamma^5 gamma^0

    let mut laws = Vec::new();
    for a in 1..=4usize {
        laws.push(unit_law(a, "A", &fermions, &unit_row(a), false));
        laws.push(matrix_law(a, "B", &fermions, &coeff_b, false));
        laws.push(matrix_law(a, "F", &fermions, &coeff_f, true));
        laws.push(matrix_law(a, "G", &fermions, &coeff_g, true));
    }

    // fermion side, both spinor indices down
    let lower_a = g.lower(g0).scale(&i); // i (gamma^0 C)
    let lower_b = g.lower(&g5.mul(g0)); // (gamma^5 gamma^0 C)
    let lower_f = g.spinor_metric().scale(&minus_i); // -i C
    let lower_g = g.lower(g5); // (gamma^5 C)
    for a in 1..=4usize {
        let mut terms = Vec::new();
        for (matrix, boson, dt) in [
            (&lower_a, "A", true),
            (&lower_b, "B", true),
            (&lower_f, "F", false),
            (&lower_g, "G", false),
        ] {
            push_terms_for_fermion_law(&mut terms, matrix, a, boson, dt);
        }
        for (b, fermion) in fermions.iter().enumerate() {
            let own: Vec<Term> = terms_for_column(&terms, b);
            laws.push(Law {
                charge: a,
                field: fermion.clone(),
                terms: own,
            });
        }
    }

    MultipletSpec {
        n_charges: 4,
        bosons,
        fermions,
        laws,
    }
}

/// Builds the vector-multiplet transformation table: bosons
/// (A_1, A_2, A_3, d) - the gauge component A_0 is dropped - and fermions
/// lambda_1..lambda_4, with
///
/// ```text
/// D_a A_i = (gamma_i lambda)_a    D_a d = (i gamma^5 gamma^0 d/dt lambda)_a
/// ```
pub fn vector_multiplet_spec(g: &GammaConventions) -> MultipletSpec {
    let bosons: Vec<String> = ["A1", "A2", "A3", "d"].map(String::from).to_vec();
    let fermions: Vec<String> = (1..=4).map(|i| format!("lambda{i}")).collect();

    let i = imag_unit();
    let sig = g.signature();
    let lowered_gamma = |k: usize| {
        g.gamma(k)
            .scale(&crat(Rat::from_integer(sig[k]), Rat::zero()))
    };
    let coeff_d = g.gamma5().mul(g.gamma(0)).scale(&i);

    let mut laws = Vec::new();
    for a in 1..=4usize {
        for k in 1..=3usize {
            laws.push(matrix_law(a, &format!("A{k}"), &fermions, &lowered_gamma(k), false));
        }
        laws.push(matrix_law(a, "d", &fermions, &coeff_d, true));
    }

    // fermion side: -i (gamma^0 gamma^i C) d/dt A_i + (gamma^5 C) d
    let minus_i = -i.clone();
    for a in 1..=4usize {
        let mut terms = Vec::new();
        for k in 1..=3usize {
            let matrix = g.lower(&g.gamma(0).mul(g.gamma(k))).scale(&minus_i);
            push_terms_for_fermion_law(&mut terms, &matrix, a, &format!("A{k}"), true);
        }
        let matrix_d = g.lower(g.gamma5());
        push_terms_for_fermion_law(&mut terms, &matrix_d, a, "d", false);
        for (b, fermion) in fermions.iter().enumerate() {
            laws.push(Law {
                charge: a,
                field: fermion.clone(),
                terms: terms_for_column(&terms, b),
            });
        }
    }

    MultipletSpec {
        n_charges: 4,
        bosons,
        fermions,
        laws,
    }
}

/// `D_a boson = coeff_matrix[a-1][b] * fermion_b`, one law per charge.
fn matrix_law(
    charge: usize,
    boson: &str,
    fermions: &[String],
    coeff: &Mat<CRat>,
    dt: bool,
) -> Law {
    let terms = (0..fermions.len())
        .filter(|&b| !coeff[(charge - 1, b)].is_zero())
        .map(|b| Term {
            field: fermions[b].clone(),
            coeff: coeff[(charge - 1, b)].clone(),
            dt,
            dx: false,
        })
        .collect();
    Law {
        charge,
        field: boson.to_string(),
        terms,
    }
}

fn unit_row(a: usize) -> Mat<CRat> {
    Mat::from_fn(4, 4, |i, j| {
        if i == a - 1 && j == a - 1 {
            CRat::one()
        } else {
            CRat::zero()
        }
    })
}

fn unit_law(charge: usize, boson: &str, fermions: &[String], row: &Mat<CRat>, dt: bool) -> Law {
    matrix_law(charge, boson, fermions, row, dt)
}

/// Accumulates `(fermion column, boson, coeff, dt)` tuples of one lowered
/// coefficient matrix.
fn push_terms_for_fermion_law(
    out: &mut Vec<(usize, Term)>,
    matrix: &Mat<CRat>,
    charge: usize,
    boson: &str,
    dt: bool,
) {
    for b in 0..4 {
        let c = matrix[(charge - 1, b)].clone();
        if !c.is_zero() {
            out.push((
                b,
                Term {
                    field: boson.to_string(),
                    coeff: c,
                    dt,
                    dx: false,
                },
            ));
        }
    }
}

fn terms_for_column(terms: &[(usize, Term)], column: usize) -> Vec<Term> {
    terms
        .iter()
        .filter(|(b, _)| *b == column)
        .map(|(_, t)| t.clone())
        .collect()
}

/// Reduces the chiral supermultiplet to its one-dimensional
/// representation.
pub fn reduce_chiral(g: &GammaConventions) -> Result<ReducedMultiplet, ReductionError> {
    reduce_custom(&chiral_multiplet_spec(g))
}

/// Reduces the vector supermultiplet to its one-dimensional
/// representation.
pub fn reduce_vector(g: &GammaConventions) -> Result<ReducedMultiplet, ReductionError> {
    let mut reduced = reduce_custom(&vector_multiplet_spec(g))?;
    reduced.notes.push(
        "A0 dropped from the reduced boson list (gauge degree of freedom)".to_string(),
    );
    Ok(reduced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_gamma_hats, clifford_check, garden_residual};

    #[test]
    fn bundled_conventions_load() {
        let g = default_conventions();
        assert_eq!(g.signature(), [-1, 1, 1, 1]);
        // pinned displays
        let i = imag_unit();
        assert_eq!(g.gamma5()[(0, 3)], i);
        assert_eq!(g.gamma(0)[(0, 1)], CRat::one());
    }

    #[test]
    fn identity_gamma0_violates_clifford() {
        let mut doc: serde_json::Value =
            serde_json::from_str(include_str!("../data/gamma_conventions.json")).unwrap();
        let identity_quad: Vec<Vec<[i64; 4]>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| [i64::from(i == j), 1, 0, 1])
                    .collect()
            })
            .collect();
        doc["gamma"][0] = serde_json::to_value(&identity_quad).unwrap();
        let err = load_conventions(&doc.to_string()).unwrap_err();
        assert!(matches!(err, ReductionError::CliffordViolation(_)));
    }

    #[test]
    fn wrong_gamma0_display_is_a_paper_mismatch() {
        let mut doc: serde_json::Value =
            serde_json::from_str(include_str!("../data/gamma_conventions.json")).unwrap();
        // global sign flip keeps the Clifford algebra but moves gamma^0
        // off the pinned display
        for mu in 0..4 {
            let quad: Vec<Vec<[i64; 4]>> =
                serde_json::from_value(doc["gamma"][mu].clone()).unwrap();
            let flipped: Vec<Vec<[i64; 4]>> = quad
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|&[a, b, c, d]| [-a, b, -c, d])
                        .collect()
                })
                .collect();
            doc["gamma"][mu] = serde_json::to_value(&flipped).unwrap();
        }
        let err = load_conventions(&doc.to_string()).unwrap_err();
        assert_eq!(err, ReductionError::PaperMismatch("gamma^0".into()));
    }

    #[test]
    fn toy_multiplet_reduces_to_unit_matrices() {
        let spec = MultipletSpec {
            n_charges: 1,
            bosons: vec!["phi".into()],
            fermions: vec!["psi".into()],
            laws: vec![
                Law {
                    charge: 1,
                    field: "phi".into(),
                    terms: vec![Term {
                        field: "psi".into(),
                        coeff: CRat::one(),
                        dt: false,
                        dx: false,
                    }],
                },
                Law {
                    charge: 1,
                    field: "psi".into(),
                    terms: vec![Term {
                        field: "phi".into(),
                        coeff: imag_unit(),
                        dt: true,
                        dx: false,
                    }],
                },
            ],
        };
        let reduced = reduce_custom(&spec).unwrap();
        assert_eq!(reduced.rep.l(0), &Mat::from_rows(vec![vec![1]]));
        assert_eq!(reduced.rep.r(0), &Mat::from_rows(vec![vec![1]]));
        assert_eq!(garden_residual(&reduced.rep), 0);
    }

    #[test]
    fn unbalanced_multiplet_is_rejected() {
        let spec = MultipletSpec {
            n_charges: 1,
            bosons: vec!["a".into(), "b".into()],
            fermions: vec!["psi".into()],
            laws: vec![],
        };
        assert_eq!(
            reduce_custom(&spec),
            Err(ReductionError::UnbalancedMultiplet {
                bosons: 2,
                fermions: 1
            })
        );
    }

    #[test]
    fn spatial_derivatives_are_rejected() {
        let spec = MultipletSpec {
            n_charges: 1,
            bosons: vec!["phi".into()],
            fermions: vec!["psi".into()],
            laws: vec![Law {
                charge: 1,
                field: "phi".into(),
                terms: vec![Term {
                    field: "psi".into(),
                    coeff: CRat::one(),
                    dt: false,
                    dx: true,
                }],
            }],
        };
        assert!(matches!(
            reduce_custom(&spec),
            Err(ReductionError::SpatialDerivative(_))
        ));
    }

    #[test]
    fn chiral_reduction_reproduces_worked_examples() {
        let g = default_conventions();
        let reduced = reduce_chiral(&g).unwrap();
        let rep = &reduced.rep;
        // D_1 B = psi_4
        assert_eq!(rep.l(0)[(1, 3)], 1);
        // D_a F table: psi2, -psi1, -psi4, psi3
        assert_eq!(rep.l(0).row(2), &[0, 1, 0, 0]);
        assert_eq!(rep.l(1).row(2), &[-1, 0, 0, 0]);
        assert_eq!(rep.l(2).row(2), &[0, 0, 0, -1]);
        assert_eq!(rep.l(3).row(2), &[0, 0, 1, 0]);
        // D_a A = psi_a
        for a in 0..4 {
            let mut want = [0i64; 4];
            want[a] = 1;
            assert_eq!(rep.l(a).row(0), &want);
        }
        assert_eq!(garden_residual(rep), 0);
    }

    #[test]
    fn reductions_are_verified_representations() {
        let g = default_conventions();
        for reduced in [reduce_chiral(&g).unwrap(), reduce_vector(&g).unwrap()] {
            assert_eq!(garden_residual(&reduced.rep), 0);
            assert!(clifford_check(&build_gamma_hats(&reduced.rep), 0));
        }
    }

    #[test]
    fn chiral_spec_and_reduce_chiral_agree() {
        let g = default_conventions();
        let via_spec = reduce_custom(&chiral_multiplet_spec(&g)).unwrap();
        let direct = reduce_chiral(&g).unwrap();
        assert_eq!(via_spec.rep, direct.rep);
    }

    #[test]
    fn provenance_names_the_laws() {
        let g = default_conventions();
        let reduced = reduce_chiral(&g).unwrap();
        let d1b = reduced
            .provenance
            .iter()
            .find(|p| p.color == 1 && p.row == 1)
            .unwrap();
        assert_eq!(d1b.law, "D_1 B = psi4");
        assert_eq!(d1b.value, 1);
        let d2f = reduced
            .provenance
            .iter()
            .find(|p| p.color == 2 && p.row == 2)
            .unwrap();
        assert_eq!(d2f.law, "D_2 F = -(d/dt) psi1");
    }
}
