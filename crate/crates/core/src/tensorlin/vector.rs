use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// A vector in a tensor product of finite-dimensional Hilbert spaces.
///
/// Entries are stored row-major over the legs: the last leg varies fastest,
/// matching `kron` ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorVector {
    legs: Vec<usize>,
    data: DVector<C64>,
}

impl TensorVector {
    pub fn new(legs: Vec<usize>, data: DVector<C64>) -> Result<Self> {
        let expected: usize = legs.iter().product();
        if legs.is_empty() || legs.contains(&0) {
            return Err(Error::DimensionMismatch {
                context: "tensor legs must be positive",
                expected: 1,
                found: 0,
            });
        }
        if expected != data.len() {
            return Err(Error::DimensionMismatch {
                context: "tensor vector length",
                expected,
                found: data.len(),
            });
        }
        Ok(Self { legs, data })
    }

    /// One-leg vector.
    pub fn single(data: DVector<C64>) -> Self {
        Self {
            legs: vec![data.len()],
            data,
        }
    }

    pub fn from_slice(entries: &[C64]) -> Self {
        Self::single(DVector::from_column_slice(entries))
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self::single(DVector::from_iterator(
            entries.len(),
            entries.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut data = DVector::zeros(dim);
        data[index] = C64::new(1.0, 0.0);
        Self::single(data)
    }

    pub fn zeros(legs: Vec<usize>) -> Self {
        let len = legs.iter().product();
        Self {
            legs,
            data: DVector::zeros(len),
        }
    }

    /// The unit vector (1,...,1)/√n.
    pub fn uniform(dim: usize) -> Self {
        let c = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self::single(DVector::from_element(dim, c))
    }

    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    pub fn data(&self) -> &DVector<C64> {
        &self.data
    }

    pub fn into_data(self) -> DVector<C64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            legs: self.legs.clone(),
            data: self.data.unscale(n),
        })
    }

    pub fn check_unit(&self, tol: f64) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > tol {
            return Err(Error::NotUnitVector { norm: n });
        }
        Ok(())
    }

    /// ⟨self, other⟩, linear in the first argument.
    pub fn inner(&self, other: &Self) -> C64 {
        other.data.dotc(&self.data)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut legs = self.legs.clone();
        legs.extend_from_slice(&other.legs);
        Self {
            legs,
            data: self.data.kronecker(&other.data),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            legs: self.legs.clone(),
            data: &self.data - &other.data,
        })
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            legs: self.legs.clone(),
            data: self.data.map(|x| x * c),
        }
    }

    /// ‖self − other‖₂.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok((&self.data - &other.data).norm())
    }

    pub fn conj(&self) -> Self {
        Self {
            legs: self.legs.clone(),
            data: self.data.conjugate(),
        }
    }

    /// Same entries regrouped into different legs of the same total size.
    pub fn reshape(&self, legs: Vec<usize>) -> Result<Self> {
        Self::new(legs, self.data.clone())
    }

    /// Fix the index of `leg` to each of its values in turn, returning the
    /// vectors on the remaining legs. Summing rank-one terms over these is the
    /// partial trace over `leg`.
    pub fn leg_slices(&self, leg: usize) -> Result<Vec<TensorVector>> {
        let nl = self.legs.len();
        if leg >= nl {
            return Err(Error::LegOutOfRange { leg, legs: nl });
        }
        if nl == 1 {
            return Err(Error::DimensionMismatch {
                context: "cannot slice the only leg",
                expected: 2,
                found: 1,
            });
        }
        let outer: usize = self.legs[..leg].iter().product();
        let d = self.legs[leg];
        let inner: usize = self.legs[leg + 1..].iter().product();
        let mut rest = self.legs.clone();
        rest.remove(leg);
        Ok((0..d)
            .map(|k| {
                let mut out = DVector::zeros(outer * inner);
                for a in 0..outer {
                    for b in 0..inner {
                        out[a * inner + b] = self.data[(a * d + k) * inner + b];
                    }
                }
                TensorVector {
                    legs: rest.clone(),
                    data: out,
                }
            })
            .collect())
    }

    /// Reorder legs: leg `i` of the result is leg `perm[i]` of `self`.
    pub fn permute_legs(&self, perm: &[usize]) -> Result<Self> {
        let nl = self.legs.len();
        check_permutation(perm, nl)?;
        let new_legs: Vec<usize> = perm.iter().map(|&p| self.legs[p]).collect();
        let old_strides = strides(&self.legs);
        let mut data = DVector::zeros(self.len());
        let mut idx = vec![0usize; nl];
        for (flat, slot) in data.iter_mut().enumerate() {
            let mut rem = flat;
            for i in (0..nl).rev() {
                idx[i] = rem % new_legs[i];
                rem /= new_legs[i];
            }
            let src: usize = (0..nl).map(|i| idx[i] * old_strides[perm[i]]).sum();
            *slot = self.data[src];
        }
        Ok(Self {
            legs: new_legs,
            data,
        })
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.legs != other.legs {
            return Err(Error::DimensionMismatch {
                context: "tensor vector shapes differ",
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn strides(legs: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; legs.len()];
    for i in (0..legs.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * legs[i + 1];
    }
    s
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch {
            context: "leg permutation length",
            expected: n,
            found: perm.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n {
            return Err(Error::LegOutOfRange { leg: p, legs: n });
        }
        if seen[p] {
            return Err(Error::RepeatedLeg { leg: p });
        }
        seen[p] = true;
    }
    Ok(())
}
