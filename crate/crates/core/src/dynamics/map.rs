use std::marker::PhantomData;

use ndarray::{Array1, Array2};
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::encoder::{Encoder, StateMatrix};
use crate::rng::Rng;
use crate::Result;

/// A state space with the vector operations perturbation analysis needs.
/// Distances are Frobenius norms for matrices and absolute values for scalars.
pub trait Phase: Clone {
    fn dim(&self) -> usize;
    fn norm(&self) -> f64;
    fn sub(&self, other: &Self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn scaled(&self, factor: f64) -> Self;
    /// A state of the same shape with independent standard-normal entries.
    fn standard_normal_like(&self, rng: &mut Rng) -> Self;
    fn is_finite(&self) -> bool;
}

impl Phase for f64 {
    fn dim(&self) -> usize {
        1
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scaled(&self, factor: f64) -> Self {
        self * factor
    }
    fn standard_normal_like(&self, rng: &mut Rng) -> Self {
        rng.sample(StandardNormal)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Phase for Array1<f64> {
    fn dim(&self) -> usize {
        self.len()
    }
    fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scaled(&self, factor: f64) -> Self {
        self * factor
    }
    fn standard_normal_like(&self, rng: &mut Rng) -> Self {
        // `from_shape_simple_fn` fills in logical order, so the stream is layout-independent
        Array1::from_shape_simple_fn(self.len(), || rng.sample(StandardNormal))
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl Phase for StateMatrix {
    fn dim(&self) -> usize {
        self.len()
    }
    fn norm(&self) -> f64 {
        self.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
    fn sub(&self, other: &Self) -> Self {
        StateMatrix::from_raw(self.as_array() - other.as_array())
    }
    fn add(&self, other: &Self) -> Self {
        StateMatrix::from_raw(self.as_array() + other.as_array())
    }
    fn scaled(&self, factor: f64) -> Self {
        StateMatrix::from_raw(self.as_array() * factor)
    }
    fn standard_normal_like(&self, rng: &mut Rng) -> Self {
        StateMatrix::from_raw(Array2::from_shape_simple_fn(self.raw_dim(), || {
            rng.sample(StandardNormal)
        }))
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

/// A deterministic discrete-time map `x -> f(x)`.
pub trait MapUnderStudy {
    type State: Phase;

    fn apply(&self, x: &Self::State) -> Result<Self::State>;
}

impl MapUnderStudy for Encoder {
    type State = StateMatrix;

    fn apply(&self, x: &StateMatrix) -> Result<StateMatrix> {
        self.step(x)
    }
}

impl<M: MapUnderStudy> MapUnderStudy for &M {
    type State = M::State;

    fn apply(&self, x: &Self::State) -> Result<Self::State> {
        (**self).apply(x)
    }
}

/// Adapter turning a closure into a [`MapUnderStudy`].
///
/// ```
/// use tdlab::dynamics::{FnMap, MapUnderStudy};
/// let logistic = FnMap::new(|x: &f64| 4.0 * x * (1.0 - x));
/// assert_eq!(logistic.apply(&0.5).unwrap(), 1.0);
/// ```
pub struct FnMap<S, F> {
    f: F,
    _state: PhantomData<fn(&S) -> S>,
}

impl<S, F> FnMap<S, F>
where
    F: Fn(&S) -> S,
{
    pub fn new(f: F) -> Self {
        Self {
            f,
            _state: PhantomData,
        }
    }
}

impl<S: Phase, F: Fn(&S) -> S> MapUnderStudy for FnMap<S, F> {
    type State = S;

    fn apply(&self, x: &S) -> Result<S> {
        Ok((self.f)(x))
    }
}
