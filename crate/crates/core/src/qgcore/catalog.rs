//! Operator identities as expression trees, evaluated densely on two legs and
//! by leg contraction on three.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

use super::{comultiply_unchecked, derived_unitaries, dual, FiniteQuantumGroup};
use crate::error::{Error, Result};
use crate::report::{CheckRecord, CheckReport, Label};
use crate::rng::{derived, random_combination, random_unit_vector};
use crate::tensorlin::{
    apply_antilinear_legs, apply_leg, conj_by_antilinear, flip_sigma, kron, operator_norm,
    unitarity_residual, AntilinearOp, ComplexMatrix, TensorVector,
};

pub const IDENTITY_TOL: f64 = 1e-10;
const STRUCTURE_SUITE: &str = "structure";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Atom {
    W,
    WPrime,
    WOp,
    WHat,
    V,
    VHat,
    WPrimeOp,
    /// W' of the dual quantum group.
    WHatPrime,
    /// The dual of the opposite quantum group, ΣW^op*Σ.
    WOpHat,
    Sigma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Modular {
    J,
    JHat,
}

#[derive(Clone, Debug)]
pub enum Expr {
    Atom(Atom),
    Adjoint(Box<Expr>),
    /// Operator product; the rightmost factor acts first.
    Product(Vec<Expr>),
    /// `K X K` with `K` the tensor product of one antilinear operator per leg.
    Sandwich(Vec<Modular>, Box<Expr>),
    /// A two-leg expression placed on the given legs of a larger space.
    Leg(Box<Expr>, Vec<usize>),
}

impl Expr {
    pub fn atom(a: Atom) -> Self {
        Expr::Atom(a)
    }

    pub fn adj(self) -> Self {
        Expr::Adjoint(Box::new(self))
    }

    pub fn on(self, legs: &[usize]) -> Self {
        Expr::Leg(Box::new(self), legs.to_vec())
    }

    pub fn product(factors: Vec<Expr>) -> Self {
        Expr::Product(factors)
    }

    pub fn sandwich(ks: &[Modular], inner: Expr) -> Self {
        Expr::Sandwich(ks.to_vec(), Box::new(inner))
    }

    /// The adjoint pushed down to the atoms. For antiunitary involutions,
    /// (KXK)* = KX*K.
    fn adjoint_expr(&self) -> Expr {
        match self {
            Expr::Atom(a) => Expr::Atom(*a).adj(),
            Expr::Adjoint(e) => (**e).clone(),
            Expr::Product(fs) => Expr::Product(fs.iter().rev().map(|f| f.adjoint_expr()).collect()),
            Expr::Sandwich(ks, e) => Expr::Sandwich(ks.clone(), Box::new(e.adjoint_expr())),
            Expr::Leg(e, legs) => Expr::Leg(Box::new(e.adjoint_expr()), legs.clone()),
        }
    }

    /// Dense matrix of an expression without leg placements.
    pub fn dense(&self, env: &UnitaryTable) -> Result<ComplexMatrix> {
        match self {
            Expr::Atom(a) => Ok(env.get(*a).clone()),
            Expr::Adjoint(e) => Ok(e.dense(env)?.adjoint()),
            Expr::Product(fs) => {
                let mut it = fs.iter();
                let first = it.next().ok_or(Error::EmptyBasis)?.dense(env)?;
                it.try_fold(first, |acc, f| Ok(acc * f.dense(env)?))
            }
            Expr::Sandwich(ks, e) => conj_by_antilinear(&env.modular_tensor(ks), &e.dense(env)?),
            Expr::Leg(..) => Err(Error::DimensionMismatch {
                context: "leg placements need a vector to act on",
                expected: 2,
                found: 3,
            }),
        }
    }

    pub fn apply(&self, env: &UnitaryTable, v: &TensorVector) -> Result<TensorVector> {
        match self {
            Expr::Atom(a) => apply_leg(env.get(*a), &[0, 1], v),
            Expr::Adjoint(e) => match &**e {
                Expr::Atom(a) => apply_leg(&env.get(*a).adjoint(), &[0, 1], v),
                inner => inner.adjoint_expr().apply(env, v),
            },
            Expr::Product(fs) => fs.iter().rev().try_fold(v.clone(), |acc, f| f.apply(env, &acc)),
            Expr::Sandwich(ks, e) => {
                let ops: Vec<&AntilinearOp> = ks.iter().map(|k| env.modular(*k)).collect();
                let kv = apply_antilinear_legs(&ops, v)?;
                apply_antilinear_legs(&ops, &e.apply(env, &kv)?)
            }
            Expr::Leg(e, legs) => apply_leg(&e.dense(env)?, legs, v),
        }
    }
}

/// Every unitary an expression can mention, computed once per quantum group.
#[derive(Clone, Debug)]
pub struct UnitaryTable {
    dim: usize,
    nu: f64,
    w: ComplexMatrix,
    w_prime: ComplexMatrix,
    w_op: ComplexMatrix,
    w_hat: ComplexMatrix,
    v: ComplexMatrix,
    v_hat: ComplexMatrix,
    w_prime_op: ComplexMatrix,
    w_hat_prime: ComplexMatrix,
    w_op_hat: ComplexMatrix,
    sigma: ComplexMatrix,
    j: AntilinearOp,
    jhat: AntilinearOp,
}

impl UnitaryTable {
    pub fn new(q: &FiniteQuantumGroup) -> Result<Self> {
        let qhat = dual(q)?;
        Self::with_dual(q, &qhat)
    }

    pub fn with_dual(q: &FiniteQuantumGroup, qhat: &FiniteQuantumGroup) -> Result<Self> {
        let n = q.dim();
        let d = derived_unitaries(q)?;
        let dh = derived_unitaries(qhat)?;
        let sigma = flip_sigma(n, n);
        let w_op_hat = &sigma * d.w_op.adjoint() * &sigma;
        Ok(Self {
            dim: n,
            nu: q.nu(),
            w: q.w().clone(),
            w_prime: d.w_prime,
            w_op: d.w_op,
            w_hat: qhat.w().clone(),
            v: d.v,
            v_hat: d.v_hat,
            w_prime_op: d.w_prime_op,
            w_hat_prime: dh.w_prime,
            w_op_hat,
            sigma,
            j: q.j().clone(),
            jhat: q.jhat().clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: Atom) -> &ComplexMatrix {
        match a {
            Atom::W => &self.w,
            Atom::WPrime => &self.w_prime,
            Atom::WOp => &self.w_op,
            Atom::WHat => &self.w_hat,
            Atom::V => &self.v,
            Atom::VHat => &self.v_hat,
            Atom::WPrimeOp => &self.w_prime_op,
            Atom::WHatPrime => &self.w_hat_prime,
            Atom::WOpHat => &self.w_op_hat,
            Atom::Sigma => &self.sigma,
        }
    }

    pub fn modular(&self, k: Modular) -> &AntilinearOp {
        match k {
            Modular::J => &self.j,
            Modular::JHat => &self.jhat,
        }
    }

    fn modular_tensor(&self, ks: &[Modular]) -> AntilinearOp {
        let mut it = ks.iter();
        let first = self.modular(*it.next().expect("sandwich needs a leg")).clone();
        it.fold(first, |acc, k| acc.tensor(self.modular(*k)))
    }
}

/// ‖A − B‖ for matrices known to be equal in exact arithmetic; skips the SVD
/// when the difference vanishes identically.
pub fn matrix_residual(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let d = a - b;
    if d.iter().all(|x| *x == C64::new(0.0, 0.0)) {
        return Ok(0.0);
    }
    operator_norm(&d)
}

/// Lower estimate of ‖lhs − rhs‖ on a `legs`-fold tensor power: random unit
/// vectors refined by a few power-iteration steps on D*D.
pub fn vector_residual<R: Rng + ?Sized>(
    lhs: &Expr,
    rhs: &Expr,
    env: &UnitaryTable,
    legs: usize,
    rng: &mut R,
    draws: usize,
    power_steps: usize,
) -> Result<f64> {
    let n = env.dim();
    let len = n.pow(legs as u32);
    let diff = |v: &TensorVector| -> Result<TensorVector> { lhs.apply(env, v)?.sub(&rhs.apply(env, v)?) };
    let diff_adj = |v: &TensorVector| -> Result<TensorVector> {
        lhs.adjoint_expr().apply(env, v)?.sub(&rhs.adjoint_expr().apply(env, v)?)
    };
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let mut v = random_unit_vector(rng, len).reshape(vec![n; legs])?;
        let mut r = diff(&v)?.norm();
        for _ in 0..power_steps {
            if r == 0.0 {
                break;
            }
            let next = diff_adj(&diff(&v)?)?;
            let norm = next.norm();
            if norm == 0.0 {
                break;
            }
            v = next.scale(C64::new(1.0 / norm, 0.0));
            r = r.max(diff(&v)?.norm());
        }
        worst = worst.max(r);
    }
    Ok(worst)
}

#[derive(Clone, Debug)]
pub enum EntryKind {
    /// Two-leg identity, compared as dense operators.
    Dense { lhs: Expr, rhs: Expr },
    /// Identity on a `legs`-fold tensor power, compared on random vectors.
    Vectors { lhs: Expr, rhs: Expr, legs: usize },
    /// ĴJ = ν^{i/4} JĴ on H.
    ModularPhase,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub anchor: &'static str,
    pub kind: EntryKind,
}

impl CatalogEntry {
    fn dense(name: &'static str, lhs: Expr, rhs: Expr) -> Self {
        Self {
            name,
            anchor: "Proposition 2.2",
            kind: EntryKind::Dense { lhs, rhs },
        }
    }

    pub fn evaluate<R: Rng + ?Sized>(&self, env: &UnitaryTable, rng: &mut R, draws: usize) -> Result<f64> {
        match &self.kind {
            EntryKind::Dense { lhs, rhs } => matrix_residual(&lhs.dense(env)?, &rhs.dense(env)?),
            EntryKind::Vectors { lhs, rhs, legs } => vector_residual(lhs, rhs, env, *legs, rng, draws, 8),
            EntryKind::ModularPhase => {
                let jh_j: ComplexMatrix = &env.jhat * &env.j;
                let j_jh: ComplexMatrix = &env.j * &env.jhat;
                let phase = C64::new(0.0, 0.25 * env.nu.ln()).exp();
                matrix_residual(&jh_j, &(j_jh * phase))
            }
        }
    }
}

/// The relations between W, its relatives and the modular conjugations.
pub fn catalog() -> Vec<CatalogEntry> {
    use Atom::*;
    use Modular::*;
    let a = Expr::atom;
    let flipped_adjoint = |x: Atom| Expr::product(vec![a(Sigma), a(x).adj(), a(Sigma)]);
    vec![
        CatalogEntry::dense("W* = (Ĵ⊗J)W(Ĵ⊗J)", a(W).adj(), Expr::sandwich(&[JHat, J], a(W))),
        CatalogEntry {
            name: "ĴJ = ν^{i/4}JĴ",
            anchor: "Proposition 2.2",
            kind: EntryKind::ModularPhase,
        },
        CatalogEntry::dense("Ŵ = ΣW*Σ", a(WHat), flipped_adjoint(W)),
        CatalogEntry::dense(
            "V = (Ĵ⊗Ĵ)ΣW*Σ(Ĵ⊗Ĵ)",
            a(V),
            Expr::sandwich(&[JHat, JHat], flipped_adjoint(W)),
        ),
        CatalogEntry::dense("V̂ = (J⊗J)W(J⊗J)", a(VHat), Expr::sandwich(&[J, J], a(W))),
        CatalogEntry::dense("W^op = ΣV*Σ", a(WOp), flipped_adjoint(V)),
        CatalogEntry::dense("W^op = (Ĵ⊗Ĵ)W(Ĵ⊗Ĵ)", a(WOp), Expr::sandwich(&[JHat, JHat], a(W))),
        CatalogEntry::dense("W' = V̂", a(WPrime), a(VHat)),
        CatalogEntry::dense("W' = (J⊗J)W(J⊗J)", a(WPrime), Expr::sandwich(&[J, J], a(W))),
        CatalogEntry::dense("Ŵ' = (W^op)^", a(WHatPrime), a(WOpHat)),
        CatalogEntry {
            name: "W12 W13 W23 = W23 W12",
            anchor: "Proposition 2.2",
            kind: EntryKind::Vectors {
                lhs: Expr::product(vec![a(W).on(&[0, 1]), a(W).on(&[0, 2]), a(W).on(&[1, 2])]),
                rhs: Expr::product(vec![a(W).on(&[1, 2]), a(W).on(&[0, 1])]),
                legs: 3,
            },
        },
    ]
}

#[derive(Clone, Copy, Debug)]
pub struct StructureOptions {
    pub tol: f64,
    pub seed: u64,
    /// Random vectors for three-leg identities and random algebra elements.
    pub draws: usize,
}

impl Default for StructureOptions {
    fn default() -> Self {
        Self {
            tol: IDENTITY_TOL,
            seed: 0,
            draws: 4,
        }
    }
}

pub fn verify_structure_identities(q: &FiniteQuantumGroup) -> CheckReport {
    let opts = StructureOptions::default();
    CheckReport::new(opts.seed, structure_records(q, &opts))
}

/// One record per catalog entry plus the checks that W implements Γ.
/// Failures to evaluate become failing records rather than errors.
pub fn structure_records(q: &FiniteQuantumGroup, opts: &StructureOptions) -> Vec<CheckRecord> {
    let label = q.label();
    let failed = |name: &str, anchor: &str| {
        CheckRecord::residual(STRUCTURE_SUITE, name, anchor, &label, f64::INFINITY, opts.tol)
    };
    let qhat = match dual(q) {
        Ok(d) => d,
        Err(_) => return vec![failed("dual construction", "Proposition 2.2")],
    };
    let env = match UnitaryTable::with_dual(q, &qhat) {
        Ok(e) => e,
        Err(_) => return vec![failed("derived unitaries", "Proposition 2.2")],
    };
    let mut records: Vec<CheckRecord> = catalog()
        .iter()
        .map(|entry| {
            let mut rng = derived(opts.seed, &format!("{}/{}", label.group, entry.name));
            let r = entry.evaluate(&env, &mut rng, opts.draws).unwrap_or(f64::INFINITY);
            let draws = match entry.kind {
                EntryKind::Vectors { .. } => opts.draws,
                _ => 1,
            };
            CheckRecord::residual(STRUCTURE_SUITE, entry.name, entry.anchor, &label, r, opts.tol)
                .with_draws(draws)
        })
        .collect();
    records.extend(implementation_records(q, &qhat, &env, opts, &label));
    records
}

fn implementation_records(
    q: &FiniteQuantumGroup,
    qhat: &FiniteQuantumGroup,
    env: &UnitaryTable,
    opts: &StructureOptions,
    label: &Label,
) -> Vec<CheckRecord> {
    let n = q.dim();
    let id = DMatrix::<C64>::identity(n, n);
    let mut rng = derived(opts.seed, &format!("{}/{}/implements", label.group, label.construction));
    let mut worst = [0.0f64; 5];
    let tensor_span = q.tensor_span();
    for _ in 0..opts.draws {
        let x = random_combination(&mut rng, q.algebra_basis());
        let y = random_combination(&mut rng, q.algebra_basis());
        let gx = comultiply_unchecked(q, &x);
        let gy = comultiply_unchecked(q, &y);
        let r = (|| -> Result<[f64; 5]> {
            let scale = operator_norm(&x)?.max(f64::MIN_POSITIVE);
            let scale_y = operator_norm(&y)?.max(f64::MIN_POSITIVE);
            let v_route = &env.v * kron(&x, &id) * env.v.adjoint();
            let op_route = env.w_op.adjoint() * kron(&id, &x) * &env.w_op;
            let flipped = &env.sigma * &gx * &env.sigma;
            let mult = comultiply_unchecked(q, &(&x * &y)) - &gx * &gy;
            let star = comultiply_unchecked(q, &x.adjoint()) - gx.adjoint();
            let coassoc = coassociativity_residual(q, &gx, &mut rng)?;
            Ok([
                tensor_span.residual(&gx)?,
                matrix_residual(&gx, &v_route)? / scale,
                matrix_residual(&op_route, &flipped)? / scale,
                operator_norm(&mult)? / (scale * scale_y) + operator_norm(&star)? / scale,
                coassoc / scale,
            ])
        })()
        .unwrap_or([f64::INFINITY; 5]);
        for (w, r) in worst.iter_mut().zip(r) {
            *w = w.max(r);
        }
    }
    let unitary = unitarity_residual(q.w()).unwrap_or(f64::INFINITY);
    let w_in = w_membership_residual(q, qhat).unwrap_or(f64::INFINITY);
    let rec = |name: &str, anchor: &str, r: f64, draws: usize| {
        CheckRecord::residual(STRUCTURE_SUITE, name, anchor, label, r, opts.tol).with_draws(draws)
    };
    vec![
        rec("Γ(x) = W*(1⊗x)W lies in M⊗M", "Definition 2.1", worst[0], opts.draws),
        rec("W*(1⊗x)W = V(x⊗1)V*", "Proposition 2.2", worst[1], opts.draws),
        rec("W^op*(1⊗x)W^op = ΣΓ(x)Σ", "Proposition 2.2", worst[2], opts.draws),
        rec("Γ is a *-homomorphism", "Definition 2.1", worst[3], opts.draws),
        rec("Γ coassociative", "Definition 2.1", worst[4], opts.draws),
        rec("W unitary", "Proposition 2.2", unitary, 1),
        rec("W ∈ M⊗M̂", "Proposition 2.2", w_in, 1),
    ]
}

/// ‖(Γ⊗ι)Γ(x) − (ι⊗Γ)Γ(x)‖ on random vectors, using
/// (Γ⊗ι)(Y) = W₁₂*Y₂₃W₁₂ and (ι⊗Γ)(Y) = W₂₃*Y₁₃W₂₃.
fn coassociativity_residual<R: Rng + ?Sized>(
    q: &FiniteQuantumGroup,
    gx: &ComplexMatrix,
    rng: &mut R,
) -> Result<f64> {
    let n = q.dim();
    let w = q.w();
    let wa = w.adjoint();
    let v = random_unit_vector(rng, n * n * n).reshape(vec![n; 3])?;
    let left = apply_leg(&wa, &[0, 1], &apply_leg(gx, &[1, 2], &apply_leg(w, &[0, 1], &v)?)?)?;
    let right = apply_leg(&wa, &[1, 2], &apply_leg(gx, &[0, 2], &apply_leg(w, &[1, 2], &v)?)?)?;
    left.distance(&right)
}

/// Relative distance of W from span(M ⊗ M̂).
pub fn w_membership_residual(q: &FiniteQuantumGroup, qhat: &FiniteQuantumGroup) -> Result<f64> {
    super::TensorSpan::new(q.span().clone(), qhat.span().clone()).residual(q.w())
}
