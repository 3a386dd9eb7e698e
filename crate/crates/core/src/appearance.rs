//! Appearance model: frames, patch extraction, candidate affine subspaces,
//! the winner history and the bag of subspaces.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::error::{invalid_arg, invalid_input, Error, Result};
use crate::geometry::{thin_svd_basis, AffineSubspace};
use crate::matrix::Matrix;

/// Grayscale image with row-major pixels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl Frame {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(invalid_arg!("frame must be non-empty, got {width}x{height}"));
        }
        if pixels.len() != width * height {
            return Err(invalid_arg!(
                "expected {} pixels for {width}x{height}, got {}",
                width * height,
                pixels.len()
            ));
        }
        if let Some(bad) = pixels.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(invalid_input!("pixel value {bad} outside [0, 1]"));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Frame filled with a single value.
    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, alloc::vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    /// Bilinear resize of the whole frame.
    pub fn resized(&self, width: usize, height: usize) -> Result<Frame> {
        if width == 0 || height == 0 {
            return Err(invalid_arg!("target size must be non-empty"));
        }
        let full = PixelRect {
            x: 0,
            y: 0,
            width: self.width,
            height: self.height,
        };
        let pixels = resample_bilinear(self, full, width, height);
        Ok(Frame {
            width,
            height,
            pixels,
        })
    }
}

/// Candidate location: top-left corner and scale relative to the initial box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    pub x: f64,
    pub y: f64,
    pub s: f64,
}

impl ParticleState {
    pub const fn new(x: f64, y: f64, s: f64) -> Self {
        Self { x, y, s }
    }
}

/// Axis-aligned box in pixels, top-left origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    pub const fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }
}

/// Integer crop rectangle lying fully inside a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelRect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl From<PixelRect> for BBox {
    fn from(r: PixelRect) -> Self {
        BBox::new(r.x as f64, r.y as f64, r.width as f64, r.height as f64)
    }
}

/// Size of the initial box and of the resized patch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchGeometry {
    pub base_w: f64,
    pub base_h: f64,
    /// Patch rows after resizing.
    pub h1: usize,
    /// Patch columns after resizing.
    pub h2: usize,
}

impl PatchGeometry {
    pub fn dim(&self) -> usize {
        self.h1 * self.h2
    }
}

/// Crop rectangle for `state`: size `s·base`, rounded, shifted inside the
/// frame and shrunk only when it is larger than the frame.
pub fn crop_rect(
    frame_w: usize,
    frame_h: usize,
    state: &ParticleState,
    base_w: f64,
    base_h: f64,
) -> Result<PixelRect> {
    let w = clamp_len(state.s * base_w, frame_w);
    let h = clamp_len(state.s * base_h, frame_h);
    if w < 2 || h < 2 {
        return Err(Error::DegeneratePatch {
            width: w,
            height: h,
        });
    }
    Ok(PixelRect {
        x: clamp_origin(state.x, frame_w - w),
        y: clamp_origin(state.y, frame_h - h),
        width: w,
        height: h,
    })
}

fn clamp_len(len: f64, limit: usize) -> usize {
    let r = libm::round(len);
    if !(r > 0.0) {
        0
    } else {
        (r as usize).min(limit)
    }
}

fn clamp_origin(v: f64, max: usize) -> usize {
    let r = libm::round(v);
    if !(r > 0.0) {
        0
    } else {
        (r as usize).min(max)
    }
}

/// Crops the rectangle selected by `state`, resizes it to `h1×h2` with
/// bilinear interpolation and returns it row-major.
pub fn extract_patch(frame: &Frame, state: &ParticleState, geom: &PatchGeometry) -> Result<Vec<f64>> {
    if geom.h1 == 0 || geom.h2 == 0 {
        return Err(invalid_arg!("patch size must be non-empty"));
    }
    let rect = crop_rect(frame.width, frame.height, state, geom.base_w, geom.base_h)?;
    Ok(resample_bilinear(frame, rect, geom.h2, geom.h1))
}

/// Half-pixel-centre bilinear resampling of `rect` to `out_w×out_h`.
/// Equal sizes reproduce the input exactly.
pub(crate) fn resample_bilinear(frame: &Frame, rect: PixelRect, out_w: usize, out_h: usize) -> Vec<f64> {
    let xs = axis_taps(rect.width, out_w);
    let ys = axis_taps(rect.height, out_h);
    let mut out = Vec::with_capacity(out_w * out_h);
    for &(y0, y1, fy) in &ys {
        let row0 = (rect.y + y0) * frame.width + rect.x;
        let row1 = (rect.y + y1) * frame.width + rect.x;
        for &(x0, x1, fx) in &xs {
            let p = &frame.pixels;
            let top = lerp(p[row0 + x0], p[row0 + x1], fx);
            let bottom = lerp(p[row1 + x0], p[row1 + x1], fx);
            out.push(lerp(top, bottom, fy).clamp(0.0, 1.0));
        }
    }
    out
}

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t
}

fn axis_taps(src: usize, dst: usize) -> Vec<(usize, usize, f64)> {
    let scale = src as f64 / dst as f64;
    let last = (src - 1) as f64;
    (0..dst)
        .map(|i| {
            let pos = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, last);
            let i0 = libm::floor(pos) as usize;
            let i1 = (i0 + 1).min(src - 1);
            (i0, i1, pos - i0 as f64)
        })
        .collect()
}

/// Vectorised patches of the last `P` winners, newest first.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryBuffer {
    capacity: usize,
    dim: usize,
    patches: VecDeque<Vec<f64>>,
}

impl HistoryBuffer {
    pub fn new(capacity: usize, dim: usize) -> Self {
        Self {
            capacity,
            dim,
            patches: VecDeque::with_capacity(capacity + 1),
        }
    }

    /// History filled with `capacity` copies of `patch`.
    pub fn padded(capacity: usize, patch: &[f64]) -> Self {
        let mut h = Self::new(capacity, patch.len());
        h.patches.extend((0..capacity).map(|_| patch.to_vec()));
        h
    }

    /// Inserts `patch` as the newest entry, dropping the oldest beyond capacity.
    pub fn push(&mut self, patch: Vec<f64>) -> Result<()> {
        if patch.len() != self.dim {
            return Err(invalid_arg!(
                "patch length {} does not match history dimension {}",
                patch.len(),
                self.dim
            ));
        }
        self.patches.push_front(patch);
        self.patches.truncate(self.capacity);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Patches, newest first.
    pub fn iter(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.patches.iter()
    }
}

/// FIFO collection of at most `K` affine subspaces, oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct Bag {
    capacity: usize,
    entries: VecDeque<AffineSubspace>,
}

impl Bag {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        }
    }

    /// Appends `subspace`; once full, the oldest entry is dropped first.
    pub fn insert(&mut self, subspace: AffineSubspace) {
        if self.entries.len() >= self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(subspace);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn iter(&self) -> impl Iterator<Item = &AffineSubspace> {
        self.entries.iter()
    }

    pub fn get(&self, k: usize) -> Option<&AffineSubspace> {
        self.entries.get(k)
    }
}

/// Builds `{μ, U}` from `V = [candidate, h₁, …, h_P]`.
///
/// `μ` is the column mean of `V`. `U` holds the `n` dominant left singular
/// vectors of `V`, or of `V - μ1ᵀ` when `center` is set.
pub fn build_candidate_subspace(
    candidate: &[f64],
    history: &HistoryBuffer,
    n: usize,
    center: bool,
) -> Result<AffineSubspace> {
    let d = candidate.len();
    if d != history.dim() {
        return Err(invalid_arg!(
            "candidate length {d} does not match history dimension {}",
            history.dim()
        ));
    }
    let m = history.len() + 1;
    if n == 0 || n > m {
        return Err(invalid_arg!("subspace dimension {n} must lie in [1, {m}]"));
    }

    let mut data = Vec::with_capacity(d * m);
    data.extend_from_slice(candidate);
    for h in history.iter() {
        data.extend_from_slice(h);
    }
    let mut v = Matrix::from_col_major(d, m, data)?;

    let mut mu = alloc::vec![0.0; d];
    for j in 0..m {
        for (acc, x) in mu.iter_mut().zip(v.col(j)) {
            *acc += x;
        }
    }
    mu.iter_mut().for_each(|x| *x /= m as f64);

    if center {
        for j in 0..m {
            for (x, c) in v.col_mut(j).iter_mut().zip(&mu) {
                *x -= c;
            }
        }
    }

    let svd = thin_svd_basis(&v, n)?;
    AffineSubspace::new(mu, svd.basis, svd.rank_deficient)
}
