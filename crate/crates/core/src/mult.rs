//! Pointwise operators applied to transformed data between the forward and
//! backward passes.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pfft::Spectral;

/// A map from `A` transformed sequences to `B`, applied entry by entry.
///
/// `apply` receives `max(A, B)` operands of `width` entries each, packed one
/// after another in `data`. On return the first `B` operands hold the outputs.
pub trait MultOperator<T: Spectral>: Send + Sync {
    fn inputs(&self) -> usize;
    fn outputs(&self) -> usize;
    fn apply(&self, data: &mut [T], width: usize);
}

/// Elementwise product of `A >= 2` inputs into one output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Product {
    arity: usize,
}

impl Product {
    pub fn new(arity: usize) -> Result<Self> {
        if arity < 2 {
            return Err(Error::Arity(format!("product needs at least two inputs, got {arity}")));
        }
        Ok(Product { arity })
    }
}

/// The built-in `A`-fold product operator.
pub fn builtin_mult_product(arity: usize) -> Result<Product> {
    Product::new(arity)
}

macro_rules! product_impl {
    ($t:ty) => {
        impl MultOperator<$t> for Product {
            fn inputs(&self) -> usize {
                self.arity
            }

            fn outputs(&self) -> usize {
                1
            }

            fn apply(&self, data: &mut [$t], width: usize) {
                let (head, tail) = data.split_at_mut(width);
                if self.arity == 2 {
                    for (x, y) in head.iter_mut().zip(&tail[..width]) {
                        *x *= *y;
                    }
                    return;
                }
                for a in 1..self.arity {
                    let other = &tail[(a - 1) * width..a * width];
                    for (x, y) in head.iter_mut().zip(other) {
                        *x *= *y;
                    }
                }
            }
        }
    };
}

product_impl!(Complex64);
product_impl!(f64);

/// An arbitrary pointwise map, given as a function from `A` values to `B` values.
pub struct Pointwise<F> {
    inputs: usize,
    outputs: usize,
    map: F,
}

impl<F> Pointwise<F> {
    pub fn new(inputs: usize, outputs: usize, map: F) -> Result<Self> {
        if inputs == 0 || outputs == 0 {
            return Err(Error::Arity(format!("pointwise map {inputs} -> {outputs}")));
        }
        Ok(Pointwise { inputs, outputs, map })
    }
}

impl<T, F> MultOperator<T> for Pointwise<F>
where
    T: Spectral,
    F: Fn(&[T], &mut [T]) + Send + Sync,
{
    fn inputs(&self) -> usize {
        self.inputs
    }

    fn outputs(&self) -> usize {
        self.outputs
    }

    fn apply(&self, data: &mut [T], width: usize) {
        let mut args = vec![T::default(); self.inputs];
        let mut vals = vec![T::default(); self.outputs];
        for k in 0..width {
            for (a, x) in args.iter_mut().enumerate() {
                *x = data[a * width + k];
            }
            (self.map)(&args, &mut vals);
            for (b, y) in vals.iter().enumerate() {
                data[b * width + k] = *y;
            }
        }
    }
}
