use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::scalar::Scalar;

/// Powers of `(ζ₁, ζ̄₁, ζ₂, ζ̄₂)`.
pub type Exponent = [u32; 4];

/// Exact polynomial in `ζ₁, ζ̄₁, ζ₂, ζ̄₂`, viewed as a function on
/// `S³ = {|ζ₁|² + |ζ₂|² = 1}`.
///
/// The representation is not unique on the sphere; compare with
/// [`ZPoly::equal_on_s3`], never with `==`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZPoly<T: Scalar> {
    terms: BTreeMap<Exponent, Complex<T>>,
}

pub type QPoly = ZPoly<BigRational>;
pub type FPoly = ZPoly<f64>;

/// `(coefficient (re, im), differentiated variable, multiplying variable)`:
/// each entry contributes `c · x_m ∂_{x_d}`.
type FieldTerm = ((i8, i8), usize, usize);

const E1: [FieldTerm; 4] = [((0, -1), 0, 3), ((0, 1), 2, 1), ((0, 1), 1, 2), ((0, -1), 3, 0)];
const E2: [FieldTerm; 4] = [((1, 0), 0, 3), ((-1, 0), 2, 1), ((1, 0), 1, 2), ((-1, 0), 3, 0)];
const E3: [FieldTerm; 4] = [((0, 1), 0, 0), ((0, 1), 2, 2), ((0, -1), 1, 1), ((0, -1), 3, 3)];

fn cplx<T: Scalar>(re: i128, im: i128) -> Complex<T> {
    Complex::new(T::from_ratio(re, 1), T::from_ratio(im, 1))
}

fn binomial(n: u32, k: u32) -> u128 {
    let k = k.min(n - k) as u128;
    let n = n as u128;
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// `∫ ζ₁^α ζ̄₁^β ζ₂^γ ζ̄₂^δ dμ₁ = [α=β][γ=δ] α!γ!/(α+γ+1)!`.
pub fn monomial_moment<T: Scalar>(e: Exponent) -> T {
    if e[0] != e[1] || e[2] != e[3] {
        return T::zero();
    }
    let n = e[0] + e[2];
    T::from_ratio(1, (n as i128 + 1) * binomial(n, e[0]) as i128)
}

impl<T: Scalar> ZPoly<T> {
    pub fn zero() -> Self {
        ZPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::monomial([0; 4], c)
    }

    pub fn one() -> Self {
        Self::constant(Complex::one())
    }

    pub fn monomial(e: Exponent, c: Complex<T>) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    /// The `i`-th coordinate function, in the order `ζ₁, ζ̄₁, ζ₂, ζ̄₂`.
    pub fn var(i: usize) -> Self {
        let mut e = [0; 4];
        e[i] = 1;
        Self::monomial(e, Complex::one())
    }

    pub fn zeta1() -> Self {
        Self::var(0)
    }

    pub fn zeta1_bar() -> Self {
        Self::var(1)
    }

    pub fn zeta2() -> Self {
        Self::var(2)
    }

    pub fn zeta2_bar() -> Self {
        Self::var(3)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Complex<T>)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn add_term(&mut self, e: Exponent, c: Complex<T>) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Complex::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn scale(&self, c: &Complex<T>) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            out.add_term(*e, v.clone() * c.clone());
        }
        out
    }

    pub fn scale_real(&self, c: &T) -> Self {
        self.scale(&Complex::new(c.clone(), T::zero()))
    }

    /// Complex conjugate: `(α,β,γ,δ) ↦ (β,α,δ,γ)` with conjugated
    /// coefficients.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            out.add_term([e[1], e[0], e[3], e[2]], v.conj());
        }
        out
    }

    pub fn re(&self) -> Self {
        (self + &self.conj()).scale_real(&T::from_ratio(1, 2))
    }

    pub fn im(&self) -> Self {
        (self - &self.conj()).scale(&Complex::new(T::zero(), T::from_ratio(-1, 2)))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Applies `E₁`, `E₂` or `E₃` (`a ∈ {1, 2, 3}`).
    pub fn derive(&self, a: usize) -> Self {
        let field = match a {
            1 => &E1,
            2 => &E2,
            3 => &E3,
            _ => panic!("vector field index must be 1, 2 or 3, got {a}"),
        };
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            for &((re, im), d, m) in field {
                if e[d] == 0 {
                    continue;
                }
                let mut ne = *e;
                ne[d] -= 1;
                ne[m] += 1;
                let c = cplx::<T>(re as i128 * e[d] as i128, im as i128 * e[d] as i128);
                out.add_term(ne, v.clone() * c);
            }
        }
        out
    }

    /// `∫ p dμ₁` over `S³` with the normalized Haar measure.
    pub fn integrate(&self) -> Complex<T> {
        let mut acc = Complex::zero();
        for (e, v) in &self.terms {
            let m = monomial_moment::<T>(*e);
            if !m.is_zero() {
                acc = acc + v.clone() * Complex::new(m, T::zero());
            }
        }
        acc
    }

    /// Hermitian inner product `∫ p q̄ dμ₁`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        (self * &other.conj()).integrate()
    }

    /// `∫ |p|² dμ₁`.
    pub fn norm_sq(&self) -> T {
        self.inner(self).re
    }

    /// Sum of `|coefficient|²`, a size scale for float comparisons.
    pub fn coefficient_mass(&self) -> f64 {
        self.terms.values().map(|c| c.re.to_f64().powi(2) + c.im.to_f64().powi(2)).sum()
    }

    /// Equality as functions on `S³`: `∫ |p − q|² dμ₁ = 0` (exactly for
    /// rationals, to rounding for floats).
    pub fn equal_on_s3(&self, other: &Self) -> bool {
        let scale = self.coefficient_mass() + other.coefficient_mass();
        (self - other).norm_sq().negligible(scale)
    }

    /// Real-valued on `S³`.
    pub fn is_real(&self) -> bool {
        self.equal_on_s3(&self.conj())
    }

    pub fn eval(&self, z1: Complex<f64>, z2: Complex<f64>) -> Complex<f64> {
        let vars = [z1, z1.conj(), z2, z2.conj()];
        self.terms
            .iter()
            .map(|(e, c)| {
                let mono = e.iter().zip(&vars).fold(Complex::new(1.0, 0.0), |acc, (&k, z)| acc * z.powu(k));
                Complex::new(c.re.to_f64(), c.im.to_f64()) * mono
            })
            .sum()
    }

    /// Exact rational copy (float coefficients are dyadic rationals).
    pub fn to_rational(&self) -> QPoly {
        let mut out = QPoly::zero();
        for (e, v) in &self.terms {
            let c = Complex::new(<BigRational as Scalar>::from_f64(v.re.to_f64()), <BigRational as Scalar>::from_f64(v.im.to_f64()));
            out.add_term(*e, c);
        }
        out
    }

    pub fn to_f64(&self) -> FPoly {
        let mut out = FPoly::zero();
        for (e, v) in &self.terms {
            out.add_term(*e, Complex::new(v.re.to_f64(), v.im.to_f64()));
        }
        out
    }
}

impl<T: Scalar> Add for &ZPoly<T> {
    type Output = ZPoly<T>;
    fn add(self, rhs: &ZPoly<T>) -> ZPoly<T> {
        let mut out = self.clone();
        for (e, v) in &rhs.terms {
            out.add_term(*e, v.clone());
        }
        out
    }
}

impl<T: Scalar> Sub for &ZPoly<T> {
    type Output = ZPoly<T>;
    fn sub(self, rhs: &ZPoly<T>) -> ZPoly<T> {
        let mut out = self.clone();
        for (e, v) in &rhs.terms {
            out.add_term(*e, -v.clone());
        }
        out
    }
}

impl<T: Scalar> Mul for &ZPoly<T> {
    type Output = ZPoly<T>;
    fn mul(self, rhs: &ZPoly<T>) -> ZPoly<T> {
        let mut out = ZPoly::zero();
        for (e1, v1) in &self.terms {
            for (e2, v2) in &rhs.terms {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]];
                out.add_term(e, v1.clone() * v2.clone());
            }
        }
        out
    }
}

impl<T: Scalar> Neg for &ZPoly<T> {
    type Output = ZPoly<T>;
    fn neg(self) -> ZPoly<T> {
        self.scale_real(&-T::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr for ZPoly<T> {
            type Output = ZPoly<T>;
            fn $m(self, rhs: ZPoly<T>) -> ZPoly<T> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// `Eₐ p` for `a ∈ {1, 2, 3}`.
pub fn derive<T: Scalar>(a: usize, p: &ZPoly<T>) -> ZPoly<T> {
    p.derive(a)
}

/// `−u E₁²p − v E₂²p − w E₃²p`.
pub fn laplacian<T: Scalar>(uvw: [&T; 3], p: &ZPoly<T>) -> ZPoly<T> {
    let mut out = ZPoly::zero();
    for (a, c) in uvw.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let second = p.derive(a + 1).derive(a + 1);
        out = &out - &second.scale_real(c);
    }
    out
}

pub fn s3_integrate<T: Scalar>(p: &ZPoly<T>) -> Complex<T> {
    p.integrate()
}

pub fn equal_on_s3<T: Scalar>(p: &ZPoly<T>, q: &ZPoly<T>) -> bool {
    p.equal_on_s3(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128, d: i128) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    fn qc(re: i128, im: i128) -> Complex<BigRational> {
        cplx(re, im)
    }

    #[test]
    fn derivations_on_coordinates() {
        let z1 = QPoly::zeta1();
        assert_eq!(z1.derive(3), z1.scale(&qc(0, 1)));
        assert_eq!(z1.derive(1), QPoly::zeta2_bar().scale(&qc(0, -1)));
        assert_eq!(z1.derive(2), QPoly::zeta2_bar());
    }

    #[test]
    fn bracket_on_sample_polynomial() {
        let p = &QPoly::zeta1() * &QPoly::zeta2_bar();
        let lhs = &p.derive(2).derive(1) - &p.derive(1).derive(2);
        assert!(lhs.equal_on_s3(&p.derive(3).scale(&qc(-2, 0))));
    }

    #[test]
    fn moments() {
        assert_eq!(QPoly::one().integrate(), qc(1, 0));
        let r1 = &QPoly::zeta1() * &QPoly::zeta1_bar();
        let r2 = &QPoly::zeta2() * &QPoly::zeta2_bar();
        assert_eq!((&r1 * &r2).integrate().re, q(1, 6));
        assert_eq!(r1.pow(2).integrate().re, q(1, 3));
        assert_eq!(r1.integrate().re, q(1, 2));
        assert!(QPoly::zeta1().integrate().is_zero());
    }

    #[test]
    fn sphere_relation_is_equality_on_s3() {
        let r = &(&QPoly::zeta1() * &QPoly::zeta1_bar()) + &(&QPoly::zeta2() * &QPoly::zeta2_bar());
        assert_ne!(r, QPoly::one());
        assert!(r.equal_on_s3(&QPoly::one()));
        let z = QPoly::zeta1();
        assert!((&z * &r).equal_on_s3(&z));
        assert!(!z.equal_on_s3(&QPoly::zeta2()));
    }

    #[test]
    fn laplacian_examples() {
        let one = q(1, 1);
        let z1 = QPoly::zeta1();
        let round = laplacian([&one, &one, &one], &z1);
        assert!(round.equal_on_s3(&z1.scale_real(&q(3, 1))));
        let zero = q(0, 1);
        let sub = laplacian([&one, &one, &zero], &z1);
        assert!(sub.equal_on_s3(&z1.scale_real(&q(2, 1))));
        let (u, v, w) = (q(2, 3), q(5, 7), q(1, 9));
        let p = &z1 * &QPoly::zeta2_bar();
        let lp = laplacian([&u, &v, &w], &p);
        assert!(lp.equal_on_s3(&p.scale_real(&(q(4, 1) * (u + v)))));
    }

    #[test]
    fn real_and_imaginary_parts() {
        let z = QPoly::zeta1();
        assert!(z.re().is_real() && z.im().is_real());
        let back = &z.re() + &z.im().scale(&qc(0, 1));
        assert!(back.equal_on_s3(&z));
        assert!(!z.is_real());
    }

    #[test]
    fn evaluation_matches_moment_on_a_point() {
        let p = (&QPoly::zeta1() * &QPoly::zeta2_bar()).to_f64();
        let z1 = Complex::new(0.6, 0.0);
        let z2 = Complex::new(0.0, 0.8);
        let v = p.eval(z1, z2);
        assert!((v - Complex::new(0.0, -0.48)).norm() < 1e-15);
    }
}
