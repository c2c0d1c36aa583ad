//! Cost functions seen by the sampler.

/// A cost `V(x)` together with its partial derivatives.
///
/// Implementations must be pure: trajectories running on different threads
/// share one cost model.
pub trait CostModel: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// `dV/dx_n` at `x`.
    fn partial(&self, x: &[f64], n: usize) -> f64;

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|n| self.partial(x, n)).collect()
    }
}

impl<C: CostModel + ?Sized> CostModel for &C {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn partial(&self, x: &[f64], n: usize) -> f64 {
        (**self).partial(x, n)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (**self).gradient(x)
    }
}

/// Cost assembled from two closures.
pub struct FnCost<V, P> {
    dim: usize,
    value: V,
    partial: P,
}

impl<V, P> FnCost<V, P>
where
    V: Fn(&[f64]) -> f64 + Sync,
    P: Fn(&[f64], usize) -> f64 + Sync,
{
    pub fn new(dim: usize, value: V, partial: P) -> Self {
        Self {
            dim,
            value,
            partial,
        }
    }
}

impl<V, P> CostModel for FnCost<V, P>
where
    V: Fn(&[f64]) -> f64 + Sync,
    P: Fn(&[f64], usize) -> f64 + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn partial(&self, x: &[f64], n: usize) -> f64 {
        (self.partial)(x, n)
    }
}

/// Sum of single-variable terms `V(x) = sum_n v(x_n)`.
pub struct SeparableCost<V, P> {
    dim: usize,
    term: V,
    derivative: P,
}

impl<V, P> SeparableCost<V, P>
where
    V: Fn(usize, f64) -> f64 + Sync,
    P: Fn(usize, f64) -> f64 + Sync,
{
    /// `term(n, x_n)` and its derivative `derivative(n, x_n)`.
    pub fn new(dim: usize, term: V, derivative: P) -> Self {
        Self {
            dim,
            term,
            derivative,
        }
    }
}

impl<V, P> CostModel for SeparableCost<V, P>
where
    V: Fn(usize, f64) -> f64 + Sync,
    P: Fn(usize, f64) -> f64 + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        x.iter().enumerate().map(|(n, &v)| (self.term)(n, v)).sum()
    }
    fn partial(&self, x: &[f64], n: usize) -> f64 {
        (self.derivative)(n, x[n])
    }
}

/// Central finite difference of `cost.value` along coordinate `n`.
pub fn central_difference<C: CostModel + ?Sized>(cost: &C, x: &[f64], n: usize, step: f64) -> f64 {
    let mut probe = x.to_vec();
    probe[n] = x[n] + step;
    let up = cost.value(&probe);
    probe[n] = x[n] - step;
    let down = cost.value(&probe);
    (up - down) / (2.0 * step)
}
