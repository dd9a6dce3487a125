//! 3x3 matrices over GF(q), stored row-major.

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::geometry::Triple;
use crate::gf::{FieldElement, FieldSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mat3(pub [FieldElement; 9]);

impl Mat3 {
    pub fn identity() -> Mat3 {
        Mat3::scalar(FieldElement::ONE)
    }

    pub fn scalar(s: FieldElement) -> Mat3 {
        let z = FieldElement::ZERO;
        Mat3([s, z, z, z, s, z, z, z, s])
    }

    pub fn from_codes(spec: &FieldSpec, codes: &[u32]) -> Result<Mat3> {
        if codes.len() != 9 {
            return domain(format!("a 3x3 matrix needs 9 entries, got {}", codes.len()));
        }
        let mut m = [FieldElement::ZERO; 9];
        for (slot, &c) in m.iter_mut().zip(codes) {
            *slot = spec.element(c)?;
        }
        Ok(Mat3(m))
    }

    pub fn codes(&self) -> [u32; 9] {
        self.0.map(|c| c.code())
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.0[3 * r + c]
    }

    pub fn mul(&self, spec: &FieldSpec, other: &Mat3) -> Mat3 {
        let mut out = [FieldElement::ZERO; 9];
        for r in 0..3 {
            for c in 0..3 {
                let mut s = FieldElement::ZERO;
                for k in 0..3 {
                    s = spec.add(s, spec.mul(self.get(r, k), other.get(k, c)));
                }
                out[3 * r + c] = s;
            }
        }
        Mat3(out)
    }

    #[inline]
    pub fn apply(&self, spec: &FieldSpec, v: &Triple) -> Triple {
        let mut out = [FieldElement::ZERO; 3];
        for (r, slot) in out.iter_mut().enumerate() {
            let mut s = FieldElement::ZERO;
            for k in 0..3 {
                s = spec.add(s, spec.mul(self.get(r, k), v[k]));
            }
            *slot = s;
        }
        out
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]])
    }

    pub fn scale(&self, spec: &FieldSpec, s: FieldElement) -> Mat3 {
        Mat3(self.0.map(|c| spec.mul(s, c)))
    }

    pub fn add(&self, spec: &FieldSpec, other: &Mat3) -> Mat3 {
        let mut out = self.0;
        for (o, &b) in out.iter_mut().zip(&other.0) {
            *o = spec.add(*o, b);
        }
        Mat3(out)
    }

    pub fn frobenius(&self, spec: &FieldSpec, k: u32) -> Mat3 {
        Mat3(self.0.map(|c| spec.frobenius(c, k)))
    }

    fn minor(&self, spec: &FieldSpec, r0: usize, r1: usize, c0: usize, c1: usize) -> FieldElement {
        spec.sub(
            spec.mul(self.get(r0, c0), self.get(r1, c1)),
            spec.mul(self.get(r0, c1), self.get(r1, c0)),
        )
    }

    pub fn det(&self, spec: &FieldSpec) -> FieldElement {
        let a = spec.mul(self.get(0, 0), self.minor(spec, 1, 2, 1, 2));
        let b = spec.mul(self.get(0, 1), self.minor(spec, 1, 2, 0, 2));
        let c = spec.mul(self.get(0, 2), self.minor(spec, 1, 2, 0, 1));
        spec.add(spec.sub(a, b), c)
    }

    pub fn trace(&self, spec: &FieldSpec) -> FieldElement {
        spec.add(spec.add(self.get(0, 0), self.get(1, 1)), self.get(2, 2))
    }

    /// Sum of the principal 2x2 minors.
    pub fn second_invariant(&self, spec: &FieldSpec) -> FieldElement {
        let m01 = self.minor(spec, 0, 1, 0, 1);
        let m02 = self.minor(spec, 0, 2, 0, 2);
        let m12 = self.minor(spec, 1, 2, 1, 2);
        spec.add(spec.add(m01, m02), m12)
    }

    pub fn inverse(&self, spec: &FieldSpec) -> Result<Mat3> {
        let d = self.det(spec);
        if d.is_zero() {
            return Err(Error::Domain("matrix is singular".into()));
        }
        let di = spec.inv(d)?;
        // adjugate: inv[r][c] = cofactor[c][r] / det
        let mut out = [FieldElement::ZERO; 9];
        for r in 0..3 {
            for c in 0..3 {
                let rows: Vec<usize> = (0..3).filter(|&i| i != c).collect();
                let cols: Vec<usize> = (0..3).filter(|&j| j != r).collect();
                let mut cof = self.minor(spec, rows[0], rows[1], cols[0], cols[1]);
                if (r + c) % 2 == 1 {
                    cof = spec.neg(cof);
                }
                out[3 * r + c] = spec.mul(cof, di);
            }
        }
        Ok(Mat3(out))
    }

    pub fn pow(&self, spec: &FieldSpec, mut k: u64) -> Mat3 {
        let mut result = Mat3::identity();
        let mut base = *self;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(spec, &base);
            }
            base = base.mul(spec, &base);
            k >>= 1;
        }
        result
    }

    /// The nonzero scalar `s` with `self = s * I`, if any.
    pub fn as_scalar(&self) -> Option<FieldElement> {
        let s = self.0[0];
        (!s.is_zero() && *self == Mat3::scalar(s)).then_some(s)
    }

    /// Scales so the first nonzero entry in row-major order is 1.
    pub fn projective_normal(&self, spec: &FieldSpec) -> Option<Mat3> {
        let lead = self.0.iter().copied().find(|c| !c.is_zero())?;
        if lead == FieldElement::ONE {
            return Some(*self);
        }
        Some(self.scale(spec, spec.inv(lead).ok()?))
    }
}

impl fmt::Display for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let codes: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", codes.join(" "))
    }
}
