//! The `~1` equivalence on inner inverses, the GD1, 1GD and Drazin
//! pre-orders, the block classification of operators above `T`, and
//! membership in the PO class.

use serde::Serialize;

use crate::decomp::CoreNilpotentDecomposition;
use crate::error::{GinvError, Result};
use crate::ginv::{self, InnerInverse};
use crate::matrix::Matrix;
use crate::numeric::{self, relative_residual};
use crate::tolerance::ToleranceConfig;

/// Power norms above this are treated as divergence.
pub const OVERFLOW_CAP: f64 = 1e150;
/// Relative rounding level used for the noise floor of sequence terms.
pub const NOISE_FACTOR: f64 = 1e4 * f64::EPSILON;
pub const DEFAULT_N_MAX: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Gd1,
    Onegd,
    Drazin,
}

impl std::str::FromStr for Relation {
    type Err = GinvError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gd1" => Ok(Relation::Gd1),
            "onegd" => Ok(Relation::Onegd),
            "drazin" => Ok(Relation::Drazin),
            other => Err(GinvError::Parse(format!("unknown relation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Identity {
    pub name: String,
    pub lhs: Matrix,
    pub rhs: Matrix,
    pub residual: f64,
}

impl Identity {
    fn new(name: &str, lhs: Matrix, rhs: Matrix) -> Identity {
        let residual = relative_residual(&lhs, &rhs);
        Identity { name: name.to_string(), lhs, rhs, residual }
    }
}

/// A characterization that should agree with the defining identities.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalentForm {
    pub name: String,
    pub holds: bool,
    pub identities: Vec<Identity>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PreorderReport {
    pub relation: Relation,
    /// Every entry of `identities` is within `tolerance`.
    pub holds: bool,
    pub identities: Vec<Identity>,
    pub tolerance: f64,
    pub equivalent_forms: Vec<EquivalentForm>,
    /// Each equivalent form has the same verdict as what it characterizes.
    pub consistent: bool,
}

impl PreorderReport {
    pub fn max_residual(&self) -> f64 {
        self.identities.iter().map(|i| i.residual).fold(0.0, f64::max)
    }
}

fn within(ids: &[Identity], tol: f64) -> bool {
    ids.iter().all(|i| i.residual <= tol)
}

fn form(name: &str, identities: Vec<Identity>, tol: f64) -> EquivalentForm {
    EquivalentForm { name: name.to_string(), holds: within(&identities, tol), identities }
}

fn require_pair(s: &Matrix, t: &Matrix) -> Result<()> {
    s.require_square()?;
    t.require_square()?;
    if s.shape() != t.shape() {
        return Err(GinvError::ShapeMismatch(format!("S is {:?} but T is {:?}", s.shape(), t.shape())));
    }
    Ok(())
}

/// `X1 ~1 X2` iff `T^d T X1 = T^d T X2`.
pub fn inner_equivalent(t: &Matrix, x1: &InnerInverse, x2: &InnerInverse, cfg: &ToleranceConfig) -> Result<bool> {
    t.require_square()?;
    x1.validate_for(t, cfg)?;
    x2.validate_for(t, cfg)?;
    let left = ginv::drazin(t, cfg)? * t;
    Ok(relative_residual(&(&left * &x1.value), &(&left * &x2.value)) <= cfg.eq_tol)
}

/// `S <=^{GD-} T`: `S X = T X` and `X S = X T` with `X = S^d S S^-`.
pub fn below_gd1(s: &Matrix, t: &Matrix, sm: &InnerInverse, cfg: &ToleranceConfig) -> Result<PreorderReport> {
    require_pair(s, t)?;
    sm.validate_for(s, cfg)?;
    let tol = cfg.eq_tol;
    let sd = ginv::drazin(s, cfg)?;
    let x = &sd * s * &sm.value;

    let identities = vec![Identity::new("S X = T X", s * &x, t * &x), Identity::new("X S = X T", &x * s, &x * t)];
    let ssd = s * &sd;
    let ssds = &ssd * s;
    let forms = vec![
        form("S S^d = T S^d", vec![Identity::new("S S^d = T S^d", ssd.clone(), t * &sd)], tol),
        form("S^d = S^d S^- T", vec![Identity::new("S^d = S^d S^- T", sd.clone(), &sd * &sm.value * t)], tol),
        form(
            "S S^d S = S X T = T S S^d",
            vec![
                Identity::new("S S^d S = S X T", ssds.clone(), s * &x * t),
                Identity::new("S X T = T S S^d", s * &x * t, t * &ssd),
            ],
            tol,
        ),
        form(
            "S S^d = X T = T S^d",
            vec![Identity::new("S S^d = X T", ssd.clone(), &x * t), Identity::new("X T = T S^d", &x * t, t * &sd)],
            tol,
        ),
    ];
    Ok(assemble(Relation::Gd1, identities, forms, tol))
}

/// `S <=^{-GD} T`: `S X = T X` and `X S = X T` with `X = S^- S S^d`.
pub fn below_onegd(s: &Matrix, t: &Matrix, sm: &InnerInverse, cfg: &ToleranceConfig) -> Result<PreorderReport> {
    require_pair(s, t)?;
    sm.validate_for(s, cfg)?;
    let tol = cfg.eq_tol;
    let sd = ginv::drazin(s, cfg)?;
    let x = &sm.value * s * &sd;

    let identities = vec![Identity::new("S X = T X", s * &x, t * &x), Identity::new("X S = X T", &x * s, &x * t)];
    let ssd = s * &sd;
    let ssds = &ssd * s;
    // Listed so that forms[0] pairs with identities[0] and forms[1] with identities[1].
    let forms = vec![
        form("S^d = T S^- S^d", vec![Identity::new("S^d = T S^- S^d", sd.clone(), t * &sm.value * &sd)], tol),
        form("S^d S = S^d T", vec![Identity::new("S^d S = S^d T", &sd * s, &sd * t)], tol),
        form(
            "S S^d S = T X S = S S^d T",
            vec![
                Identity::new("S S^d S = T X S", ssds.clone(), t * &x * s),
                Identity::new("T X S = S S^d T", t * &x * s, &ssd * t),
            ],
            tol,
        ),
        form(
            "S S^d = T X = S^d T",
            vec![Identity::new("S S^d = T X", ssd.clone(), t * &x), Identity::new("T X = S^d T", t * &x, &sd * t)],
            tol,
        ),
    ];
    Ok(assemble(Relation::Onegd, identities, forms, tol))
}

fn assemble(relation: Relation, identities: Vec<Identity>, forms: Vec<EquivalentForm>, tol: f64) -> PreorderReport {
    let holds = within(&identities, tol);
    let first = identities[0].residual <= tol;
    let second = identities[1].residual <= tol;
    let consistent = forms[0].holds == first && forms[1].holds == second && forms[2..].iter().all(|f| f.holds == holds);
    PreorderReport { relation, holds, identities, tolerance: tol, equivalent_forms: forms, consistent }
}

/// `S <=^d T`: `S^d S = S^d T` and `S S^d = T S^d`.
pub fn below_drazin(s: &Matrix, t: &Matrix, cfg: &ToleranceConfig) -> Result<PreorderReport> {
    require_pair(s, t)?;
    let tol = cfg.eq_tol;
    let sd = ginv::drazin(s, cfg)?;
    let identities =
        vec![Identity::new("S^d S = S^d T", &sd * s, &sd * t), Identity::new("S S^d = T S^d", s * &sd, t * &sd)];
    let holds = within(&identities, tol);
    Ok(PreorderReport {
        relation: Relation::Drazin,
        holds,
        identities,
        tolerance: tol,
        equivalent_forms: Vec::new(),
        consistent: true,
    })
}

fn require_x4(dec: &CoreNilpotentDecomposition, x4: &Matrix) -> Result<()> {
    let s = dec.nil_dim();
    if x4.shape() != (s, s) {
        return Err(GinvError::ShapeMismatch(format!("X4 is {:?}, the nilpotent block is {s}x{s}", x4.shape())));
    }
    Ok(())
}

/// `Q [[T1, -T1 Y X4], [0, X4]] Q⁻¹`, which lies above `T` for the GD1
/// order whenever `Y` is the `(1,2)` block of the fixed inner inverse.
pub fn construct_above_gd1(dec: &CoreNilpotentDecomposition, y: &Matrix, x4: &Matrix) -> Result<Matrix> {
    require_x4(dec, x4)?;
    let (r, s) = (dec.core_dim(), dec.nil_dim());
    if y.shape() != (r, s) {
        return Err(GinvError::ShapeMismatch(format!("Y is {:?}, expected {:?}", y.shape(), (r, s))));
    }
    let upper = -(&dec.t1 * y * x4);
    dec.from_blocks(&dec.t1, &upper, &Matrix::zeros(s, r), x4)
}

/// `Q [[T1, 0], [-X4 Z T1, X4]] Q⁻¹`, the 1GD counterpart.
pub fn construct_above_onegd(dec: &CoreNilpotentDecomposition, z: &Matrix, x4: &Matrix) -> Result<Matrix> {
    require_x4(dec, x4)?;
    let (r, s) = (dec.core_dim(), dec.nil_dim());
    if z.shape() != (s, r) {
        return Err(GinvError::ShapeMismatch(format!("Z is {:?}, expected {:?}", z.shape(), (s, r))));
    }
    let lower = -(x4 * z * &dec.t1);
    dec.from_blocks(&dec.t1, &Matrix::zeros(r, s), &lower, x4)
}

/// Difference sequences whose vanishing limit enters the PO class and the
/// limit characterizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitSequence {
    /// `||T^- T^{n+1} T^d - T^{n+1} T^d T^-||`
    Commutator,
    /// `||T^- T^{n+2} T^d - T^{n+1} T^d||`
    LeftShift,
    /// `||T^{n+2} T^d T^- - T^{n+1} T^d||`
    RightShift,
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceReport {
    pub kind: LimitSequence,
    /// Terms for `n = 0, 1, ...`; stops early on overflow.
    pub terms: Vec<f64>,
    /// Rounding level of each term: a multiple of `eps (1 + ||X||) ||T^{n+2} T^d||`.
    /// Terms below it carry no information beyond "zero at working precision".
    pub noise_floor: Vec<f64>,
    pub overflow: bool,
    /// Every term in the last half is no larger than its predecessor or
    /// already negligible.
    pub tail_monotone: bool,
    pub final_term: f64,
    pub threshold: f64,
    pub converges: bool,
}

/// Frobenius norms of the chosen sequence for `n = 0..n_max`.
pub fn limit_sequence(
    t: &Matrix,
    tm: &InnerInverse,
    kind: LimitSequence,
    n_max: usize,
    cfg: &ToleranceConfig,
) -> Result<SequenceReport> {
    t.require_square()?;
    tm.validate_for(t, cfg)?;
    let td = ginv::drazin(t, cfg)?;
    let x = &tm.value;
    // T^{n+1} T^d, advanced by one factor of T per step
    let mut power = t * &td;
    let mut terms = Vec::with_capacity(n_max);
    let mut floors = Vec::with_capacity(n_max);
    let x_scale = 1.0 + x.frobenius_norm();
    let mut overflow = false;
    for _ in 0..n_max {
        let next = t * &power;
        let diff = match kind {
            LimitSequence::Commutator => x * &power - &power * x,
            LimitSequence::LeftShift => x * &next - &power,
            LimitSequence::RightShift => &next * x - &power,
        };
        let term = diff.frobenius_norm();
        if !term.is_finite() || term > OVERFLOW_CAP || next.frobenius_norm() > OVERFLOW_CAP {
            overflow = true;
            break;
        }
        terms.push(term);
        floors.push(NOISE_FACTOR * x_scale * power.frobenius_norm().max(next.frobenius_norm()));
        power = next;
    }
    Ok(classify_sequence(kind, terms, floors, overflow, cfg.eq_tol))
}

/// Judges a finite prefix as converging to zero: no overflow, the final term
/// is negligible, and the last half of the terms is non-increasing. A term is
/// negligible when it is below `threshold` or below its noise floor; such
/// terms are exempt from the monotonicity test. `floors` may be shorter than
/// `terms`, missing entries count as zero.
pub fn classify_sequence(
    kind: LimitSequence,
    terms: Vec<f64>,
    floors: Vec<f64>,
    overflow: bool,
    threshold: f64,
) -> SequenceReport {
    let negligible = |i: usize| terms[i] < threshold.max(floors.get(i).copied().unwrap_or(0.0));
    let final_term = terms.last().copied().unwrap_or(f64::INFINITY);
    let start = terms.len() / 2;
    let tail_monotone = (start.max(1)..terms.len()).all(|i| terms[i] <= terms[i - 1] || negligible(i));
    let converges = !overflow && !terms.is_empty() && negligible(terms.len() - 1) && tail_monotone;
    let mut noise_floor = floors;
    noise_floor.resize(terms.len(), 0.0);
    SequenceReport { kind, terms, noise_floor, overflow, tail_monotone, final_term, threshold, converges }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PoVariant {
    Gd1,
    Onegd,
}

#[derive(Debug, Clone, Serialize)]
pub struct PoMembership {
    pub member: bool,
    /// Spectral norm of `S^d`.
    pub drazin_norm: f64,
    pub norm_ok: bool,
    pub sequence: SequenceReport,
}

/// Whether the pair `(S, S^-)` lies in the PO class: `||S^d||_2 <= 1` and
/// the variant's difference sequence tends to zero.
pub fn po_membership(
    s: &Matrix,
    sm: &InnerInverse,
    variant: PoVariant,
    n_max: usize,
    cfg: &ToleranceConfig,
) -> Result<PoMembership> {
    if n_max < 8 {
        return Err(GinvError::InvalidSpec(format!("n_max must be at least 8, got {n_max}")));
    }
    s.require_square()?;
    sm.validate_for(s, cfg)?;
    let drazin_norm = numeric::spectral_norm(&ginv::drazin(s, cfg)?);
    let norm_ok = drazin_norm <= 1.0 + cfg.eq_tol;
    let kind = match variant {
        PoVariant::Gd1 => LimitSequence::RightShift,
        PoVariant::Onegd => LimitSequence::LeftShift,
    };
    let sequence = limit_sequence(s, sm, kind, n_max, cfg)?;
    Ok(PoMembership { member: norm_ok && sequence.converges, drazin_norm, norm_ok, sequence })
}
