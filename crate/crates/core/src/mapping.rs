//! Self-maps of the coordinate space, built as expression trees so that
//! averaging and iteration stay inspectable.

use crate::error::{Error, Result};
use crate::numeric::{lift, Real};
use crate::space::SpaceElement;

/// Partition predicate for [`SelfMap::PiecewiseTwoSet`]. A point belongs to the
/// region `A` when the predicate holds and to its complement `B` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// `A = {x : max_i |x_i| > half_width}`.
    OutsideCube { half_width: f64 },
}

impl Region {
    pub fn contains(&self, x: &[f64]) -> bool {
        self.contains_in(x)
    }

    fn contains_in<R: Real>(&self, x: &[R]) -> bool {
        match *self {
            Region::OutsideCube { half_width } => {
                let hw = R::from_f64(half_width);
                x.iter().any(|c| c.abs() > hw)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelfMap {
    /// `x -> w - x`
    Reflection { w: SpaceElement },
    /// `x -> c x + t`
    ScalarAffine { c: f64, t: SpaceElement },
    /// `x -> u` on the region, `x -> -u/3` off it.
    PiecewiseTwoSet { region: Region, u: SpaceElement },
    /// `x -> (1 - lambda) x + lambda T x`
    Averaged { inner: Box<SelfMap>, lambda: f64 },
    /// `x -> T^n x`
    Iterated { inner: Box<SelfMap>, n: usize },
}

/// Closed form `x -> slope * x + offset` of an affine map tree.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineForm {
    pub slope: f64,
    pub offset: SpaceElement,
}

impl SelfMap {
    pub fn reflection(w: SpaceElement) -> Self {
        SelfMap::Reflection { w }
    }

    pub fn scalar_affine(c: f64, t: SpaceElement) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidArgument(format!("affine slope must be finite, got {c}")));
        }
        Ok(SelfMap::ScalarAffine { c, t })
    }

    pub fn constant(value: SpaceElement) -> Self {
        SelfMap::ScalarAffine { c: 0.0, t: value }
    }

    pub fn identity(dimension: usize) -> Self {
        SelfMap::ScalarAffine {
            c: 1.0,
            t: SpaceElement::zeros(dimension),
        }
    }

    /// Requires `u` and `-u/3` to lie outside the region, so that the second
    /// iterate is the constant `-u/3`.
    pub fn piecewise(region: Region, u: SpaceElement) -> Result<Self> {
        let third = u.scale(-1.0 / 3.0);
        if region.contains(u.coords()) || region.contains(third.coords()) {
            return Err(Error::InvalidArgument(format!(
                "piecewise map needs u = {u} and -u/3 outside the region {region:?}"
            )));
        }
        Ok(SelfMap::PiecewiseTwoSet { region, u })
    }

    /// The default two-set instance: `A = {max_i |x_i| > 2}`, `u = (1, ..., 1)`.
    pub fn default_piecewise(dimension: usize) -> Self {
        SelfMap::PiecewiseTwoSet {
            region: Region::OutsideCube { half_width: 2.0 },
            u: SpaceElement::from_raw(vec![1.0; dimension]),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            SelfMap::Reflection { w } => w.dim(),
            SelfMap::ScalarAffine { t, .. } => t.dim(),
            SelfMap::PiecewiseTwoSet { u, .. } => u.dim(),
            SelfMap::Averaged { inner, .. } | SelfMap::Iterated { inner, .. } => inner.dimension(),
        }
    }

    pub fn apply(&self, x: &SpaceElement) -> Result<SpaceElement> {
        if x.dim() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: x.dim(),
            });
        }
        Ok(SpaceElement::from_raw(self.apply_in(x.coords())))
    }

    /// Evaluates the map on raw coordinates in any supported precision.
    pub(crate) fn apply_in<R: Real>(&self, x: &[R]) -> Vec<R> {
        match self {
            SelfMap::Reflection { w } => w
                .coords()
                .iter()
                .zip(x)
                .map(|(&wi, &xi)| R::from_f64(wi) - xi)
                .collect(),
            SelfMap::ScalarAffine { c, t } => {
                let c = R::from_f64(*c);
                t.coords()
                    .iter()
                    .zip(x)
                    .map(|(&ti, &xi)| c * xi + R::from_f64(ti))
                    .collect()
            }
            SelfMap::PiecewiseTwoSet { region, u } => {
                if region.contains_in(x) {
                    lift(u.coords())
                } else {
                    let third = R::from_f64(3.0);
                    u.coords().iter().map(|&ui| -R::from_f64(ui) / third).collect()
                }
            }
            SelfMap::Averaged { inner, lambda } => {
                let tx = inner.apply_in(x);
                let keep = R::from_f64(1.0 - lambda);
                let step = R::from_f64(*lambda);
                x.iter().zip(tx).map(|(&xi, ti)| keep * xi + step * ti).collect()
            }
            SelfMap::Iterated { inner, n } => {
                let mut y = x.to_vec();
                for _ in 0..*n {
                    y = inner.apply_in(&y);
                }
                y
            }
        }
    }

    /// Slope/offset form when the whole tree is affine with a scalar linear
    /// part. Piecewise subtrees make the tree non-affine.
    pub fn affine_form(&self) -> Option<AffineForm> {
        match self {
            SelfMap::Reflection { w } => Some(AffineForm {
                slope: -1.0,
                offset: w.clone(),
            }),
            SelfMap::ScalarAffine { c, t } => Some(AffineForm {
                slope: *c,
                offset: t.clone(),
            }),
            SelfMap::PiecewiseTwoSet { .. } => None,
            SelfMap::Averaged { inner, lambda } => {
                let f = inner.affine_form()?;
                Some(AffineForm {
                    slope: (1.0 - lambda) + lambda * f.slope,
                    offset: f.offset.scale(*lambda),
                })
            }
            SelfMap::Iterated { inner, n } => {
                let f = inner.affine_form()?;
                let mut slope = 1.0;
                let mut offset = SpaceElement::zeros(f.offset.dim());
                for _ in 0..*n {
                    offset = offset.scale(f.slope).add(&f.offset);
                    slope *= f.slope;
                }
                Some(AffineForm { slope, offset })
            }
        }
    }
}

/// `T_lambda(x) = (1 - lambda) x + lambda T x` for `lambda in (0, 1]`.
pub fn averaged(map: SelfMap, lambda: f64) -> Result<SelfMap> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "averaging weight must lie in (0, 1], got {lambda}"
        )));
    }
    Ok(SelfMap::Averaged {
        inner: Box::new(map),
        lambda,
    })
}

/// `T^n` for `n >= 1`.
pub fn iterated(map: SelfMap, n: usize) -> Result<SelfMap> {
    if n < 1 {
        return Err(Error::InvalidArgument("iterate count must be >= 1".into()));
    }
    Ok(SelfMap::Iterated {
        inner: Box::new(map),
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(c: &[f64]) -> SpaceElement {
        SpaceElement::new(c.to_vec()).unwrap()
    }

    fn coord() -> impl Strategy<Value = f64> {
        -10.0..10.0f64
    }

    fn point() -> impl Strategy<Value = SpaceElement> {
        (coord(), coord()).prop_map(|(a, b)| e(&[a, b]))
    }

    #[test]
    fn reflection_examples() {
        let t = SelfMap::reflection(e(&[2.0, 0.0]));
        assert_eq!(t.apply(&e(&[2.0, 0.0])).unwrap(), e(&[0.0, 0.0]));
        assert_eq!(t.apply(&e(&[1.0, 0.0])).unwrap(), e(&[1.0, 0.0]));
        assert!(t.apply(&e(&[1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn averaged_reflection_is_constant_at_half_weight() {
        let t = averaged(SelfMap::reflection(e(&[2.0, 0.0])), 0.5).unwrap();
        assert_eq!(t.apply(&e(&[5.0, 9.0])).unwrap(), e(&[1.0, 0.0]));
    }

    #[test]
    fn averaged_rejects_bad_weights() {
        for lambda in [0.0, -0.5, 1.5, f64::NAN] {
            assert!(averaged(SelfMap::identity(2), lambda).is_err());
        }
    }

    #[test]
    fn averaged_reflection_two_thirds() {
        let w = e(&[2.0, -1.0]);
        let t = averaged(SelfMap::reflection(w.clone()), 2.0 / 3.0).unwrap();
        for x in [e(&[0.0, 0.0]), e(&[3.0, 4.0]), e(&[-7.5, 1.25])] {
            let got = t.apply(&x).unwrap();
            let want = x.scale(-1.0 / 3.0).add(&w.scale(2.0 / 3.0));
            for (g, w) in got.coords().iter().zip(want.coords()) {
                assert!((g - w).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn averaged_scalar_affine_closed_form() {
        let t = SelfMap::scalar_affine(-3.0, e(&[1.0, 2.0])).unwrap();
        let lambda = 0.25;
        let avg = averaged(t, lambda).unwrap();
        let f = avg.affine_form().unwrap();
        assert_eq!(f.slope, (1.0 - lambda) + lambda * -3.0);
        assert_eq!(f.offset, e(&[0.25, 0.5]));
        for x in [e(&[0.5, -2.0]), e(&[9.0, 3.0])] {
            let direct = avg.apply(&x).unwrap();
            let closed = x.scale(f.slope).add(&f.offset);
            for (a, b) in direct.coords().iter().zip(closed.coords()) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn iterated_rejects_zero() {
        assert!(iterated(SelfMap::identity(2), 0).is_err());
    }

    #[test]
    fn piecewise_second_iterate_is_constant() {
        let t = SelfMap::default_piecewise(2);
        let t2 = iterated(t.clone(), 2).unwrap();
        let target = e(&[-1.0 / 3.0, -1.0 / 3.0]);
        for x in [e(&[5.0, 5.0]), e(&[0.0, 0.0]), e(&[-3.0, 0.5]), e(&[1.9, -1.9])] {
            assert_eq!(t2.apply(&x).unwrap(), target);
        }
        // the first iterate is not constant
        assert_eq!(t.apply(&e(&[5.0, 5.0])).unwrap(), e(&[1.0, 1.0]));
        assert_eq!(t.apply(&e(&[0.0, 0.0])).unwrap(), target);
        assert!(t.affine_form().is_none());
    }

    #[test]
    fn piecewise_validates_u() {
        let region = Region::OutsideCube { half_width: 2.0 };
        assert!(SelfMap::piecewise(region, e(&[3.0, 0.0])).is_err());
        assert!(SelfMap::piecewise(region, e(&[1.5, 1.5])).is_ok());
    }

    #[test]
    fn iterated_affine_form() {
        let t = SelfMap::scalar_affine(0.5, e(&[1.0, 0.0])).unwrap();
        let f = iterated(t, 3).unwrap().affine_form().unwrap();
        assert_eq!(f.slope, 0.125);
        assert_eq!(f.offset, e(&[1.75, 0.0]));
    }

    proptest! {
        #[test]
        fn averaged_with_unit_weight_is_the_map(x in point(), w in point(), c in -4.0..4.0f64) {
            for t in [SelfMap::reflection(w.clone()), SelfMap::scalar_affine(c, w.clone()).unwrap()] {
                let avg = averaged(t.clone(), 1.0).unwrap();
                prop_assert_eq!(avg.apply(&x).unwrap(), t.apply(&x).unwrap());
            }
        }

        #[test]
        fn averaged_is_pointwise_convex_combination(x in point(), w in point(), lambda in 0.001..1.0f64) {
            let t = SelfMap::reflection(w);
            let tx = t.apply(&x).unwrap();
            let got = averaged(t, lambda).unwrap().apply(&x).unwrap();
            for i in 0..2 {
                prop_assert_eq!(got.coords()[i], (1.0 - lambda) * x.coords()[i] + lambda * tx.coords()[i]);
            }
        }

        #[test]
        fn reflection_squared_is_identity(x in point(), w in point()) {
            let t2 = iterated(SelfMap::reflection(w), 2).unwrap();
            let y = t2.apply(&x).unwrap();
            for i in 0..2 {
                prop_assert!((y.coords()[i] - x.coords()[i]).abs() <= 1e-14 * (1.0 + x.coords()[i].abs()) * 20.0);
            }
        }

        #[test]
        fn nested_iteration_multiplies_counts(x in point(), a in 1usize..4, b in 1usize..4, c in -1.2..1.2f64) {
            let t = SelfMap::scalar_affine(c, e(&[0.5, -0.25])).unwrap();
            let nested = iterated(iterated(t.clone(), a).unwrap(), b).unwrap();
            let flat = iterated(t, a * b).unwrap();
            prop_assert_eq!(nested.apply(&x).unwrap(), flat.apply(&x).unwrap());
        }

        #[test]
        fn fixed_points_transfer_to_averaged_map(w in point(), lambda in 0.01..1.0f64, c in -3.0..0.9f64) {
            // reflection: w/2; affine: t / (1 - c)
            let refl = SelfMap::reflection(w.clone());
            let half = w.scale(0.5);
            let fixed = averaged(refl, lambda).unwrap().apply(&half).unwrap();
            for i in 0..2 {
                prop_assert!((fixed.coords()[i] - half.coords()[i]).abs() <= 1e-13 * (1.0 + half.coords()[i].abs()));
            }
            let aff = SelfMap::scalar_affine(c, w.clone()).unwrap();
            let p = w.scale(1.0 / (1.0 - c));
            let tp = aff.apply(&p).unwrap();
            let avg = averaged(aff, lambda).unwrap().apply(&p).unwrap();
            for i in 0..2 {
                let scale = 1e-12 * (1.0 + p.coords()[i].abs());
                prop_assert!((tp.coords()[i] - p.coords()[i]).abs() <= scale);
                prop_assert!((avg.coords()[i] - p.coords()[i]).abs() <= scale);
            }
            // and a non-fixed point stays non-fixed under averaging
            let q = p.add(&e(&[1.0, 0.0]));
            let avg_q = averaged(SelfMap::scalar_affine(c, w).unwrap(), lambda).unwrap().apply(&q).unwrap();
            prop_assert!((avg_q.coords()[0] - q.coords()[0]).abs() > 1e-6);
        }
    }
}
