//! L¹(𝔾) and L¹(𝔾)⊗̂L¹(𝔾): normal functionals on M and M⊗̄M.
//!
//! A functional is kept as a short sum of rank-one pairings
//! `ω(x) = Σ c ⟨x p, q⟩`, so vector states and the outputs of the module
//! operations stay cheap to transport through W. Sums that grow beyond the
//! dimension are folded into a dense pairing matrix.

mod blocks;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qgcore::FiniteQuantumGroup;
use crate::tensorlin::{apply_leg, basis_vector, ComplexMatrix, ComplexVector, TensorVector};

pub use blocks::{block_decompose, predual_norm, tensor_predual_norm, Block, BlockDecomposition};

#[derive(Clone, Debug)]
struct Term {
    coef: C64,
    ket: ComplexVector,
    bra: ComplexVector,
}

#[derive(Clone, Debug)]
struct Pairing {
    dim: usize,
    terms: Vec<Term>,
}

impl Pairing {
    fn rank_one(coef: C64, ket: ComplexVector, bra: ComplexVector) -> Self {
        Self {
            dim: ket.len(),
            terms: vec![Term { coef, ket, bra }],
        }
    }

    fn from_rho(rho: &ComplexMatrix) -> Self {
        let dim = rho.nrows();
        let terms = (0..dim)
            .map(|k| Term {
                coef: C64::new(1.0, 0.0),
                ket: rho.column(k).into_owned(),
                bra: basis_vector(dim, k),
            })
            .filter(|t| t.ket.iter().any(|z| *z != C64::new(0.0, 0.0)))
            .collect();
        Self { dim, terms }
    }

    fn evaluate(&self, x: &ComplexMatrix) -> C64 {
        self.terms
            .iter()
            .map(|t| t.coef * t.bra.dotc(&(x * &t.ket)))
            .sum()
    }

    /// ρ with ω(x) = tr(ρx).
    fn rho(&self) -> ComplexMatrix {
        let mut rho = DMatrix::zeros(self.dim, self.dim);
        for t in &self.terms {
            rho += (&t.ket * t.bra.adjoint()) * t.coef;
        }
        rho
    }

    fn compact(self) -> Self {
        if self.terms.len() > self.dim {
            Self::from_rho(&self.rho())
        } else {
            self
        }
    }

    fn combine(&self, other: &Self, s: C64) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|t| Term {
            coef: t.coef * s,
            ..t.clone()
        }));
        Self { dim: self.dim, terms }.compact()
    }

    fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coef: t.coef * s,
                    ..t.clone()
                })
                .collect(),
        }
    }
}

/// A normal functional on M ⊂ B(H), stored as a pairing on all of B(H).
#[derive(Clone, Debug)]
pub struct Functional {
    pairing: Pairing,
}

/// A normal functional on M⊗̄M ⊂ B(H⊗H).
#[derive(Clone, Debug)]
pub struct BiFunctional {
    leg_dim: usize,
    pairing: Pairing,
}

fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { context, expected, found });
    }
    Ok(())
}

/// ω_ζ(x) = ⟨xζ, ζ⟩ for a one-leg ζ.
pub fn vector_state(zeta: &TensorVector) -> Result<Functional> {
    check_len("vector state on H", 1, zeta.legs().len())?;
    Ok(Functional::vector(zeta.data(), zeta.data()))
}

impl Functional {
    /// ω(x) = ⟨x p, q⟩.
    pub fn vector(p: &ComplexVector, q: &ComplexVector) -> Self {
        Self {
            pairing: Pairing::rank_one(C64::new(1.0, 0.0), p.clone(), q.clone()),
        }
    }

    /// ω(x) = tr(ρx).
    pub fn from_rho(rho: &ComplexMatrix) -> Self {
        Self {
            pairing: Pairing::from_rho(rho),
        }
    }

    pub fn dim(&self) -> usize {
        self.pairing.dim
    }

    pub fn evaluate(&self, x: &ComplexMatrix) -> Result<C64> {
        check_len("functional argument", self.dim(), x.nrows())?;
        Ok(self.pairing.evaluate(x))
    }

    pub fn rho(&self) -> ComplexMatrix {
        self.pairing.rho()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_len("functional sum", self.dim(), other.dim())?;
        Ok(Self {
            pairing: self.pairing.combine(&other.pairing, C64::new(1.0, 0.0)),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_len("functional difference", self.dim(), other.dim())?;
        Ok(Self {
            pairing: self.pairing.combine(&other.pairing, C64::new(-1.0, 0.0)),
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            pairing: self.pairing.scale(s),
        }
    }

    /// a ⊗ b on H ⊗ H.
    pub fn tensor(&self, other: &Self) -> Result<BiFunctional> {
        check_len("tensor of functionals", self.dim(), other.dim())?;
        let mut terms = Vec::new();
        for a in &self.pairing.terms {
            for b in &other.pairing.terms {
                terms.push(Term {
                    coef: a.coef * b.coef,
                    ket: a.ket.kronecker(&b.ket),
                    bra: a.bra.kronecker(&b.bra),
                });
            }
        }
        let dim = self.dim();
        Ok(BiFunctional {
            leg_dim: dim,
            pairing: Pairing { dim: dim * dim, terms }.compact(),
        })
    }
}

impl BiFunctional {
    /// ω_v on H ⊗ H for a two-leg v.
    pub fn vector_state(v: &TensorVector) -> Result<Self> {
        check_len("vector state on H⊗H", 2, v.legs().len())?;
        if v.legs()[0] != v.legs()[1] {
            return Err(Error::DimensionMismatch {
                context: "both legs must be H",
                expected: v.legs()[0],
                found: v.legs()[1],
            });
        }
        Ok(Self {
            leg_dim: v.legs()[0],
            pairing: Pairing::rank_one(C64::new(1.0, 0.0), v.data().clone(), v.data().clone()),
        })
    }

    pub fn from_rho(leg_dim: usize, rho: &ComplexMatrix) -> Result<Self> {
        check_len("pairing matrix on H⊗H", leg_dim * leg_dim, rho.nrows())?;
        Ok(Self {
            leg_dim,
            pairing: Pairing::from_rho(rho),
        })
    }

    pub fn leg_dim(&self) -> usize {
        self.leg_dim
    }

    pub fn evaluate(&self, lambda: &ComplexMatrix) -> Result<C64> {
        check_len("bifunctional argument", self.pairing.dim, lambda.nrows())?;
        Ok(self.pairing.evaluate(lambda))
    }

    pub fn rho(&self) -> ComplexMatrix {
        self.pairing.rho()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_len("bifunctional difference", self.pairing.dim, other.pairing.dim)?;
        Ok(Self {
            leg_dim: self.leg_dim,
            pairing: self.pairing.combine(&other.pairing, C64::new(-1.0, 0.0)),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_len("bifunctional sum", self.pairing.dim, other.pairing.dim)?;
        Ok(Self {
            leg_dim: self.leg_dim,
            pairing: self.pairing.combine(&other.pairing, C64::new(1.0, 0.0)),
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            leg_dim: self.leg_dim,
            pairing: self.pairing.scale(s),
        }
    }
}

/// Push each rank-one term through `map` (acting on kets and bras alike) and
/// trace out `leg` of the resulting vectors.
fn transport(
    terms: impl Iterator<Item = (C64, TensorVector, TensorVector)>,
    map: impl Fn(&TensorVector) -> Result<TensorVector>,
    leg: usize,
    out_dim: usize,
) -> Result<Pairing> {
    let mut out = Vec::new();
    for (coef, ket, bra) in terms {
        let kets = map(&ket)?.leg_slices(leg)?;
        let bras = map(&bra)?.leg_slices(leg)?;
        for (k, b) in kets.into_iter().zip(bras) {
            out.push(Term {
                coef,
                ket: k.into_data(),
                bra: b.into_data(),
            });
        }
    }
    Ok(Pairing { dim: out_dim, terms: out }.compact())
}

fn pair_terms<'a>(
    a: &'a Pairing,
    a_legs: &'a [usize],
    b: &'a Pairing,
    b_legs: &'a [usize],
) -> impl Iterator<Item = (C64, TensorVector, TensorVector)> + 'a {
    a.terms.iter().flat_map(move |ta| {
        b.terms.iter().map(move |tb| {
            let ka = TensorVector::new(a_legs.to_vec(), ta.ket.clone()).expect("shape");
            let qa = TensorVector::new(a_legs.to_vec(), ta.bra.clone()).expect("shape");
            let kb = TensorVector::new(b_legs.to_vec(), tb.ket.clone()).expect("shape");
            let qb = TensorVector::new(b_legs.to_vec(), tb.bra.clone()).expect("shape");
            (ta.coef * tb.coef, ka.tensor(&kb), qa.tensor(&qb))
        })
    })
}

/// (a ∗ b)(x) = (a ⊗ b)(Γ(x)) = (a ⊗ b)(W*(1⊗x)W).
pub fn convolve(q: &FiniteQuantumGroup, a: &Functional, b: &Functional) -> Result<Functional> {
    let n = q.dim();
    check_len("left convolution factor", n, a.dim())?;
    check_len("right convolution factor", n, b.dim())?;
    let pairing = transport(
        pair_terms(&a.pairing, &[n], &b.pairing, &[n]),
        |v| apply_leg(q.w(), &[0, 1], v),
        0,
        n,
    )?;
    Ok(Functional { pairing })
}

/// (a·x)(Λ) = (a ⊗ x)((Γ⊗ι)Λ), via (Γ⊗ι)(Λ) = W₁₂*Λ₂₃W₁₂.
pub fn module_action_left(q: &FiniteQuantumGroup, a: &Functional, x: &BiFunctional) -> Result<BiFunctional> {
    let n = q.dim();
    check_len("module action functional", n, a.dim())?;
    check_len("module action bifunctional", n, x.leg_dim)?;
    let pairing = transport(
        pair_terms(&a.pairing, &[n], &x.pairing, &[n, n]),
        |v| apply_leg(q.w(), &[0, 1], v),
        0,
        n * n,
    )?;
    Ok(BiFunctional { leg_dim: n, pairing })
}

/// (x·a)(Λ) = (x ⊗ a)((ι⊗Γ)Λ), via (ι⊗Γ)(Λ) = W₂₃*Λ₁₃W₂₃.
pub fn module_action_right(q: &FiniteQuantumGroup, x: &BiFunctional, a: &Functional) -> Result<BiFunctional> {
    let n = q.dim();
    check_len("module action functional", n, a.dim())?;
    check_len("module action bifunctional", n, x.leg_dim)?;
    let pairing = transport(
        pair_terms(&x.pairing, &[n, n], &a.pairing, &[n]),
        |v| apply_leg(q.w(), &[1, 2], v),
        1,
        n * n,
    )?;
    Ok(BiFunctional { leg_dim: n, pairing })
}

/// Γ_*(x)(X) = x(Γ(X)).
pub fn gamma_star(q: &FiniteQuantumGroup, x: &BiFunctional) -> Result<Functional> {
    let n = q.dim();
    check_len("Γ_* argument", n, x.leg_dim)?;
    let terms = x.pairing.terms.iter().map(|t| {
        (
            t.coef,
            TensorVector::new(vec![n, n], t.ket.clone()).expect("shape"),
            TensorVector::new(vec![n, n], t.bra.clone()).expect("shape"),
        )
    });
    let pairing = transport(terms, |v| apply_leg(q.w(), &[0, 1], v), 0, n)?;
    Ok(Functional { pairing })
}
