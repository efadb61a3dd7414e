//! Multidimensional dealiased convolution by recursive decomposition.
//!
//! For each residue group of the outermost axis, the padded transform along
//! that axis is applied to every column of every input. Each resulting
//! hyperplane is then convolved as a `(d-1)`-dimensional problem, reusing one
//! set of buffers per level, and the backward transform accumulates the
//! contribution into the outputs. The innermost axis is a [`Conv1d`], which
//! applies the operator and the single global normalization.

use num_complex::Complex64;

use crate::conv1d::{residue_groups, Conv1d};
use crate::dft::DftProvider;
use crate::error::{Error, Result};
use crate::mult::MultOperator;
use crate::pfft::{check_origin_real, ComplexKernel, HermitianPfft, KernelBuild, PaddedTransform};
use crate::plan::{derive_params, PlanParams, Symmetry};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative tolerance of the hyperplane symmetry check for Hermitian inputs.
pub const HYPERPLANE_TOLERANCE: f64 = 1e-12;

/// Element offsets of a strided row-major array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub extents: Vec<usize>,
    pub strides: Vec<usize>,
}

impl Layout {
    pub fn contiguous(extents: &[usize]) -> Self {
        let mut strides = vec![1; extents.len()];
        for k in (0..extents.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * extents[k + 1];
        }
        Layout { extents: extents.to_vec(), strides }
    }

    /// Contiguous except that axis `axis` has its stride widened to `stride`.
    pub fn with_stride(extents: &[usize], axis: usize, stride: usize) -> Result<Self> {
        let mut layout = Layout::contiguous(extents);
        if axis >= extents.len() {
            return Err(Error::InvalidParameter(format!("axis {axis} out of range")));
        }
        layout.strides[axis] = stride;
        for k in (0..axis).rev() {
            layout.strides[k] = layout.strides[k + 1] * extents[k + 1];
        }
        layout.validate()?;
        Ok(layout)
    }

    pub fn is_contiguous(&self) -> bool {
        *self == Layout::contiguous(&self.extents)
    }

    /// Minimum buffer length.
    pub fn span(&self) -> usize {
        if self.extents.iter().any(|&e| e == 0) {
            return 0;
        }
        1 + self.extents.iter().zip(&self.strides).map(|(e, s)| (e - 1) * s).sum::<usize>()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.extents.len();
        if self.strides.len() != d || d == 0 {
            return Err(Error::InvalidParameter("layout rank mismatch".into()));
        }
        if self.strides[d - 1] == 0 {
            return Err(Error::InvalidParameter("innermost stride must be positive".into()));
        }
        for k in 0..d - 1 {
            if self.strides[k] < self.strides[k + 1] * self.extents[k + 1] {
                return Err(Error::InvalidParameter(format!(
                    "stride {} of axis {k} is smaller than the extent it spans",
                    self.strides[k]
                )));
            }
        }
        Ok(())
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        index.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    fn column_offsets(&self) -> Vec<usize> {
        let inner = &self.extents[1..];
        let count: usize = inner.iter().product();
        let mut idx = vec![0; inner.len()];
        (0..count)
            .map(|mut c| {
                for a in (0..inner.len()).rev() {
                    idx[a] = c % inner[a];
                    c /= inner[a];
                }
                idx.iter().zip(&self.strides[1..]).map(|(i, s)| i * s).sum()
            })
            .collect()
    }
}

// A 2-D view: axis index `i`, column `c` -> `i * stride + offset(c)`.
#[derive(Clone, Copy)]
struct View<'a> {
    stride: usize,
    offsets: Option<&'a [usize]>,
}

impl View<'_> {
    #[inline(always)]
    fn at(&self, i: usize, c: usize) -> usize {
        i * self.stride + self.offsets.map_or(c, |o| o[c])
    }
}

struct Level {
    kernel: ComplexKernel,
    len: usize,
    cols: usize,
    groups: Vec<Vec<usize>>,
    paired: bool,
    u: Vec<Complex64>,
    v: Vec<Complex64>,
    col: Vec<Complex64>,
    block: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Clone for Level {
    fn clone(&self) -> Self {
        Level {
            kernel: self.kernel.clone(),
            len: self.len,
            cols: self.cols,
            groups: self.groups.clone(),
            paired: self.paired,
            u: self.u.clone(),
            v: self.v.clone(),
            col: self.col.clone(),
            block: self.block.clone(),
            scratch: self.scratch.clone(),
        }
    }
}

impl Level {
    fn words(&self) -> usize {
        self.u.len() + self.v.len() + self.col.len() + self.block.len() + self.scratch.len()
    }
}

/// A planned `d`-dimensional convolution (`d >= 2`). Outer axes use complex or
/// centered kernels; the innermost axis uses `K`.
pub struct ConvNd<K: PaddedTransform> {
    symmetry: Symmetry,
    axes: Vec<PlanParams>,
    stored: Vec<usize>,
    levels: Vec<Level>,
    inner: Conv1d<K>,
    inputs: usize,
    outputs: usize,
}

pub type ComplexConvNd = ConvNd<ComplexKernel>;
pub type HermitianConvNd = ConvNd<HermitianPfft>;

impl<K: PaddedTransform + Clone> Clone for ConvNd<K> {
    fn clone(&self) -> Self {
        ConvNd {
            symmetry: self.symmetry,
            axes: self.axes.clone(),
            stored: self.stored.clone(),
            levels: self.levels.clone(),
            inner: self.inner.clone(),
            inputs: self.inputs,
            outputs: self.outputs,
        }
    }
}

/// Symmetry each axis must have in a convolution of the given kind.
pub fn axis_symmetry(kind: Symmetry, axis: usize, dims: usize) -> Symmetry {
    match kind {
        Symmetry::Hermitian if axis + 1 < dims => Symmetry::Centered,
        other => other,
    }
}

/// Default per-axis parameters: one `(L, M, m)` triple per axis.
pub fn axis_params(kind: Symmetry, axes: &[(usize, usize, usize)]) -> Result<Vec<PlanParams>> {
    axes.iter()
        .enumerate()
        .map(|(k, &(len, min_padded, m))| derive_params(len, min_padded, m, axis_symmetry(kind, k, axes.len())))
        .collect()
}

impl<K: KernelBuild> ConvNd<K> {
    pub fn plan(axes: Vec<PlanParams>, inputs: usize, outputs: usize, provider: &mut DftProvider) -> Result<Self> {
        let d = axes.len();
        if d < 2 {
            return Err(Error::Unsupported(format!("{d}-dimensional plan; use Conv1d for one axis")));
        }
        if inputs == 0 || outputs == 0 {
            return Err(Error::Arity(format!("convolution of {inputs} inputs into {outputs} outputs")));
        }
        let symmetry = axes[d - 1].symmetry;
        for (k, p) in axes.iter().enumerate() {
            if p.symmetry != axis_symmetry(symmetry, k, d) {
                return Err(Error::InvalidParameter(format!(
                    "axis {k} is {} in a {symmetry} convolution",
                    p.symmetry
                )));
            }
            p.validate()?;
        }
        let stored: Vec<usize> = axes.iter().map(PlanParams::stored_len).collect();
        let operands = inputs.max(outputs);
        let mut levels = Vec::with_capacity(d - 1);
        let mut planned = Vec::with_capacity(d);
        for k in 0..d - 1 {
            let cols: usize = stored[k + 1..].iter().product();
            let params = axes[k].with_copies(cols, cols)?;
            let kernel = ComplexKernel::new(params, provider)?;
            let dd = params.residues_per_pass;
            let paired = dd == 2 && kernel.supports_pairs();
            let groups = residue_groups(params.n, dd, paired);
            let blk = kernel.block_len();
            levels.push(Level {
                len: stored[k],
                cols,
                groups,
                paired,
                u: vec![ZERO; operands * dd * blk * cols],
                v: vec![ZERO; outputs * cols],
                col: vec![ZERO; stored[k]],
                block: vec![ZERO; dd * blk],
                scratch: vec![ZERO; kernel.scratch_len()],
                kernel,
            });
            planned.push(params);
        }
        let inner_params = axes[d - 1];
        planned.push(inner_params);
        let inner = Conv1d::new(K::build(inner_params, provider)?, inputs, outputs)?;
        Ok(ConvNd { symmetry, axes: planned, stored, levels, inner, inputs, outputs })
    }
}

impl<K: PaddedTransform> ConvNd<K> {
    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn axes(&self) -> &[PlanParams] {
        &self.axes
    }

    /// Stored extents of every input and output.
    pub fn stored_extents(&self) -> &[usize] {
        &self.stored
    }

    pub fn stored_len(&self) -> usize {
        self.stored.iter().product()
    }

    /// Complex words of work storage held by the plan.
    pub fn work_words(&self) -> usize {
        self.levels.iter().map(Level::words).sum::<usize>() + self.inner.work_words()
    }

    /// Product of the padded lengths of every axis.
    pub fn normalization(&self) -> f64 {
        self.axes.iter().map(|p| p.padded_len() as f64).product()
    }

    fn check(&self, mult: &dyn MultOperator<K::Spectral>, count_in: usize, count_out: usize) -> Result<()> {
        if mult.inputs() != self.inputs || mult.outputs() != self.outputs {
            return Err(Error::Arity(format!(
                "plan is {} -> {}, operator is {} -> {}",
                self.inputs,
                self.outputs,
                mult.inputs(),
                mult.outputs()
            )));
        }
        if count_in != self.inputs || count_out != self.outputs {
            return Err(Error::Arity(format!(
                "plan is {} -> {}, called with {count_in} -> {count_out}",
                self.inputs, self.outputs
            )));
        }
        Ok(())
    }

    fn check_layout(&self, layout: &Layout, buffers: &[usize]) -> Result<()> {
        layout.validate()?;
        if layout.extents != self.stored {
            return Err(Error::InvalidParameter(format!(
                "layout extents {:?} differ from stored extents {:?}",
                layout.extents, self.stored
            )));
        }
        let span = layout.span();
        for &len in buffers {
            if len < span {
                return Err(Error::LengthMismatch { expected: span, actual: len });
            }
        }
        Ok(())
    }

    /// Convolves strided read-only inputs into strided outputs. Entries of the
    /// outputs outside the layout are left untouched.
    pub fn convolve_into(
        &mut self,
        inputs: &[&[Complex64]],
        input_layout: &Layout,
        outputs: &mut [&mut [Complex64]],
        output_layout: &Layout,
        mult: &dyn MultOperator<K::Spectral>,
    ) -> Result<()> {
        self.check(mult, inputs.len(), outputs.len())?;
        self.check_layout(input_layout, &inputs.iter().map(|f| f.len()).collect::<Vec<_>>())?;
        self.check_layout(output_layout, &outputs.iter().map(|f| f.len()).collect::<Vec<_>>())?;
        if self.symmetry == Symmetry::Hermitian {
            for f in inputs {
                check_hyperplane_symmetry(f, input_layout, &self.axes)?;
            }
        }
        let in_offsets = (!input_layout.is_contiguous()).then(|| input_layout.column_offsets());
        let out_offsets = (!output_layout.is_contiguous()).then(|| output_layout.column_offsets());
        let in_view = View { stride: input_layout.strides[0], offsets: in_offsets.as_deref() };
        let out_view = View { stride: output_layout.strides[0], offsets: out_offsets.as_deref() };
        let scale = 1.0 / self.normalization();
        run_level(&mut self.levels, &mut self.inner, mult, scale, inputs, in_view, outputs, out_view);
        Ok(())
    }

    /// Contiguous inputs; returns `B` contiguous outputs.
    pub fn convolve_new(
        &mut self,
        inputs: &[&[Complex64]],
        mult: &dyn MultOperator<K::Spectral>,
    ) -> Result<Vec<Vec<Complex64>>> {
        let layout = Layout::contiguous(&self.stored);
        let mut out = vec![vec![ZERO; self.stored_len()]; self.outputs];
        let mut refs: Vec<&mut [Complex64]> = out.iter_mut().map(Vec::as_mut_slice).collect();
        self.convolve_into(inputs, &layout, &mut refs, &layout, mult)?;
        Ok(out)
    }

    /// Overwrites the first `B` contiguous buffers of `data` with the outputs.
    pub fn convolve(&mut self, data: &mut [Vec<Complex64>], mult: &dyn MultOperator<K::Spectral>) -> Result<()> {
        if data.len() < self.inputs.max(self.outputs) {
            return Err(Error::Arity(format!(
                "in-place convolution needs {} buffers, got {}",
                self.inputs.max(self.outputs),
                data.len()
            )));
        }
        let out = {
            let inputs: Vec<&[Complex64]> = data[..self.inputs].iter().map(Vec::as_slice).collect();
            self.convolve_new(&inputs, mult)?
        };
        for (b, h) in out.into_iter().enumerate() {
            data[b] = h;
        }
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn run_level<K: PaddedTransform>(
    levels: &mut [Level],
    inner: &mut Conv1d<K>,
    mult: &dyn MultOperator<K::Spectral>,
    scale: f64,
    inputs: &[&[Complex64]],
    in_view: View<'_>,
    outputs: &mut [&mut [Complex64]],
    out_view: View<'_>,
) {
    let Some((level, rest)) = levels.split_first_mut() else {
        unreachable!("run_level needs at least one outer axis");
    };
    let Level { kernel, len, cols, groups, paired, u, v, col, block, scratch } = level;
    let (len, cols, paired) = (*len, *cols, *paired);
    let blk = kernel.block_len();
    for h in outputs.iter_mut() {
        for i in 0..len {
            for c in 0..cols {
                h[out_view.at(i, c)] = ZERO;
            }
        }
    }
    for group in groups.iter() {
        let g = group.len();
        let width = g * blk;
        let plane = width * cols;
        for (a, f) in inputs.iter().enumerate() {
            let dst = &mut u[a * plane..(a + 1) * plane];
            for c in 0..cols {
                for (i, x) in col.iter_mut().enumerate() {
                    *x = f[in_view.at(i, c)];
                }
                if paired && g == 2 {
                    let (first, second) = block[..width].split_at_mut(blk);
                    kernel.forward_pair(col, group[0], first, second, scratch);
                } else {
                    for (i, &r) in group.iter().enumerate() {
                        kernel.forward(col, r, &mut block[i * blk..(i + 1) * blk], scratch);
                    }
                }
                for (j, x) in block[..width].iter().enumerate() {
                    dst[j * cols + c] = *x;
                }
            }
        }
        for t in 0..width {
            {
                let sub_in: Vec<&[Complex64]> =
                    (0..inputs.len()).map(|a| &u[a * plane + t * cols..a * plane + (t + 1) * cols]).collect();
                let mut sub_out: Vec<&mut [Complex64]> = v.chunks_mut(cols).collect();
                if rest.is_empty() {
                    inner.run(&sub_in, &mut sub_out, mult, scale);
                } else {
                    let view = View { stride: rest[0].cols, offsets: None };
                    run_level(rest, inner, mult, scale, &sub_in, view, &mut sub_out, view);
                }
            }
            for b in 0..outputs.len() {
                u[b * plane + t * cols..b * plane + (t + 1) * cols].copy_from_slice(&v[b * cols..(b + 1) * cols]);
            }
        }
        for (b, h) in outputs.iter_mut().enumerate() {
            let src = &u[b * plane..(b + 1) * plane];
            for c in 0..cols {
                col.fill(ZERO);
                for (i, &r) in group.iter().enumerate() {
                    let blk_buf = &mut block[..blk];
                    for (j, x) in blk_buf.iter_mut().enumerate() {
                        *x = src[(i * blk + j) * cols + c];
                    }
                    kernel.backward(blk_buf, r, col, scratch);
                }
                for (i, x) in col.iter().enumerate() {
                    h[out_view.at(i, c)] += *x;
                }
            }
        }
    }
}

// Centered logical coordinate of stored index `i` on an axis of logical length `len`.
fn centered_coordinate(i: usize, len: usize) -> i64 {
    i as i64 - (len / 2) as i64
}

// Stored index of the mirror of stored index `i`, if it lies in the window.
fn mirror(i: usize, len: usize) -> Option<usize> {
    let j = -centered_coordinate(i, len) + (len / 2) as i64;
    (0..len as i64).contains(&j).then_some(j as usize)
}

fn outer_points(axes: &[PlanParams]) -> Vec<(Vec<usize>, Option<Vec<usize>>)> {
    let outer: Vec<usize> = axes[..axes.len() - 1].iter().map(|p| p.len).collect();
    let count: usize = outer.iter().product();
    (0..count)
        .map(|mut c| {
            let mut idx = vec![0; outer.len()];
            for a in (0..outer.len()).rev() {
                idx[a] = c % outer[a];
                c /= outer[a];
            }
            let mirrored: Option<Vec<usize>> = idx.iter().zip(&outer).map(|(&i, &l)| mirror(i, l)).collect();
            (idx, mirrored)
        })
        .collect()
}

/// Checks `f(-x, 0) = conj(f(x, 0))` on the hyperplane where the innermost
/// index is zero; points whose mirror lies outside the window must vanish.
pub fn check_hyperplane_symmetry(values: &[Complex64], layout: &Layout, axes: &[PlanParams]) -> Result<()> {
    let d = axes.len();
    if d == 1 {
        return check_origin_real(&values[..1.min(values.len())]);
    }
    let norm = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = HYPERPLANE_TOLERANCE * norm;
    for (idx, mirrored) in outer_points(axes) {
        let mut full = idx.clone();
        full.push(0);
        let x = values[layout.offset(&full)];
        let partner = match mirrored {
            Some(mut m) => {
                m.push(0);
                values[layout.offset(&m)].conj()
            }
            None => ZERO,
        };
        if (x - partner).norm() > tol {
            return Err(Error::NotHermitian(format!(
                "hyperplane entry {idx:?} = {x} does not mirror {partner} (tolerance {tol:e})"
            )));
        }
    }
    Ok(())
}

/// Projects a contiguous half-array onto the admissible set: hyperplane pairs
/// are replaced by their conjugate mean and unpaired points are zeroed.
pub fn hermitian_symmetrize_boundary(values: &[Complex64], axes: &[PlanParams]) -> Result<Vec<Complex64>> {
    let stored: Vec<usize> = axes.iter().map(PlanParams::stored_len).collect();
    let layout = Layout::contiguous(&stored);
    if values.len() != layout.span() {
        return Err(Error::LengthMismatch { expected: layout.span(), actual: values.len() });
    }
    let mut out = values.to_vec();
    if axes.len() == 1 {
        out[0].im = 0.0;
        return Ok(out);
    }
    for (idx, mirrored) in outer_points(axes) {
        let mut full = idx;
        full.push(0);
        let at = layout.offset(&full);
        out[at] = match mirrored {
            Some(mut m) => {
                m.push(0);
                (values[at] + values[layout.offset(&m)].conj()) * 0.5
            }
            None => ZERO,
        };
    }
    Ok(out)
}

/// Plans a complex or centered convolution from `(L, M, m)` per axis.
pub fn plan_complex_nd(
    kind: Symmetry,
    axes: &[(usize, usize, usize)],
    inputs: usize,
    outputs: usize,
) -> Result<ComplexConvNd> {
    if kind == Symmetry::Hermitian {
        return Err(Error::InvalidParameter("use plan_hermitian_nd for Hermitian data".into()));
    }
    ConvNd::plan(axis_params(kind, axes)?, inputs, outputs, &mut DftProvider::default())
}

/// Plans a Hermitian convolution (centered outer axes) from `(L, M, m)` per axis.
pub fn plan_hermitian_nd(axes: &[(usize, usize, usize)], inputs: usize, outputs: usize) -> Result<HermitianConvNd> {
    ConvNd::plan(axis_params(Symmetry::Hermitian, axes)?, inputs, outputs, &mut DftProvider::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layouts() {
        let l = Layout::contiguous(&[3, 4, 5]);
        assert_eq!(l.strides, vec![20, 5, 1]);
        assert_eq!(l.span(), 60);
        let s = Layout::with_stride(&[3, 4], 0, 6).unwrap();
        assert_eq!(s.strides, vec![6, 1]);
        assert_eq!(s.span(), 16);
        assert!(!s.is_contiguous());
        assert_eq!(s.column_offsets(), vec![0, 1, 2, 3]);
        assert!(Layout { extents: vec![3, 4], strides: vec![3, 1] }.validate().is_err());
    }

    #[test]
    fn mirror_indices() {
        // len 4: stored 0..4 <-> logical -2..2; -2 has no partner.
        assert_eq!(mirror(0, 4), None);
        assert_eq!(mirror(1, 4), Some(3));
        assert_eq!(mirror(2, 4), Some(2));
        assert_eq!(mirror(0, 5), Some(4));
    }
}
