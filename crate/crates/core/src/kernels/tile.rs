//! Column tiles staged into worker-local buffers, and the inner loops
//! that sweep them.

/// Rows handled by one task; a staged tile is reused across all of them.
pub(crate) const ROW_BLOCK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Inner {
    Scalar,
    Unrolled(usize),
}

/// Worker-local copy of one column tile, plus optional per-column terms.
pub(crate) struct Stage {
    pub x: Vec<f32>,
    pub y: Vec<f32>,
    pub z: Vec<f32>,
    pub norm: Vec<f32>,
    pub thr: Vec<f32>,
}

impl Stage {
    pub fn with_capacity(tile: usize) -> Self {
        Stage {
            x: Vec::with_capacity(tile),
            y: Vec::with_capacity(tile),
            z: Vec::with_capacity(tile),
            norm: Vec::new(),
            thr: Vec::new(),
        }
    }

    pub fn load(&mut self, xs: &[f32], ys: &[f32], zs: &[f32]) {
        self.x.clear();
        self.x.extend_from_slice(xs);
        self.y.clear();
        self.y.extend_from_slice(ys);
        self.z.clear();
        self.z.extend_from_slice(zs);
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }
}

/// `out[k] = f(x[k], y[k], z[k], aux[k])` for every staged column.
#[inline(always)]
pub(crate) fn map_cols<O, F>(
    inner: Inner,
    xs: &[f32],
    ys: &[f32],
    zs: &[f32],
    aux: &[f32],
    out: &mut [O],
    f: F,
) where
    F: Fn(f32, f32, f32, f32) -> O,
{
    let len = out.len();
    let (xs, ys, zs, aux) = (&xs[..len], &ys[..len], &zs[..len], &aux[..len]);
    match inner {
        Inner::Scalar => scalar(xs, ys, zs, aux, out, &f),
        Inner::Unrolled(8) => fixed::<8, O, F>(xs, ys, zs, aux, out, &f),
        Inner::Unrolled(16) => fixed::<16, O, F>(xs, ys, zs, aux, out, &f),
        Inner::Unrolled(32) => fixed::<32, O, F>(xs, ys, zs, aux, out, &f),
        Inner::Unrolled(64) => fixed::<64, O, F>(xs, ys, zs, aux, out, &f),
        Inner::Unrolled(w) => runtime_blocks(w, xs, ys, zs, aux, out, &f),
    }
}

#[inline(always)]
fn scalar<O, F>(xs: &[f32], ys: &[f32], zs: &[f32], aux: &[f32], out: &mut [O], f: &F)
where
    F: Fn(f32, f32, f32, f32) -> O,
{
    for ((((o, &x), &y), &z), &a) in out.iter_mut().zip(xs).zip(ys).zip(zs).zip(aux) {
        *o = f(x, y, z, a);
    }
}

#[inline(always)]
fn fixed<const W: usize, O, F>(
    xs: &[f32],
    ys: &[f32],
    zs: &[f32],
    aux: &[f32],
    out: &mut [O],
    f: &F,
) where
    F: Fn(f32, f32, f32, f32) -> O,
{
    let full = out.len() - out.len() % W;
    let (head, tail) = out.split_at_mut(full);
    for ((((o, x), y), z), a) in head
        .chunks_exact_mut(W)
        .zip(xs.chunks_exact(W))
        .zip(ys.chunks_exact(W))
        .zip(zs.chunks_exact(W))
        .zip(aux.chunks_exact(W))
    {
        let o: &mut [O; W] = o.try_into().unwrap();
        let x: &[f32; W] = x.try_into().unwrap();
        let y: &[f32; W] = y.try_into().unwrap();
        let z: &[f32; W] = z.try_into().unwrap();
        let a: &[f32; W] = a.try_into().unwrap();
        for k in 0..W {
            o[k] = f(x[k], y[k], z[k], a[k]);
        }
    }
    scalar(&xs[full..], &ys[full..], &zs[full..], &aux[full..], tail, f);
}

#[inline(always)]
fn runtime_blocks<O, F>(
    w: usize,
    xs: &[f32],
    ys: &[f32],
    zs: &[f32],
    aux: &[f32],
    out: &mut [O],
    f: &F,
) where
    F: Fn(f32, f32, f32, f32) -> O,
{
    let full = out.len() - out.len() % w;
    let (head, tail) = out.split_at_mut(full);
    for (b, o) in head.chunks_exact_mut(w).enumerate() {
        let base = b * w;
        for (k, slot) in o.iter_mut().enumerate() {
            let c = base + k;
            *slot = f(xs[c], ys[c], zs[c], aux[c]);
        }
    }
    scalar(&xs[full..], &ys[full..], &zs[full..], &aux[full..], tail, f);
}

// Byte i (0 or 1) of `bytes` lands on bit i of the result.
#[inline(always)]
fn gather_bits(bytes: [u8; 8]) -> u64 {
    u64::from_le_bytes(bytes).wrapping_mul(0x0102_0408_1020_4080) >> 56
}

/// ORs `hits` (each 0 or 1) into a bit row starting at column `j0`.
#[inline]
pub(crate) fn pack_hits(row: &mut [u64], j0: usize, hits: &[u8]) {
    if j0.is_multiple_of(8) {
        let mut chunks = hits.chunks_exact(8);
        let mut j = j0;
        for c in &mut chunks {
            let byte = gather_bits(c.try_into().unwrap());
            row[j / 64] |= byte << (j % 64);
            j += 8;
        }
        for &h in chunks.remainder() {
            row[j / 64] |= (h as u64) << (j % 64);
            j += 1;
        }
    } else {
        for (k, &h) in hits.iter().enumerate() {
            let j = j0 + k;
            row[j / 64] |= (h as u64) << (j % 64);
        }
    }
}

/// Sets bit `j0 + k` of `row` wherever `vals[k] <= eps_sq`. `hits` is
/// scratch of at least `vals.len()` bytes.
#[inline]
pub(crate) fn pack_within(row: &mut [u64], j0: usize, vals: &[f32], eps_sq: f32, hits: &mut [u8]) {
    let hits = &mut hits[..vals.len()];
    for (h, &d) in hits.iter_mut().zip(vals) {
        *h = (d <= eps_sq) as u8;
    }
    pack_hits(row, j0, hits);
}

pub(crate) fn popcounts(words: &[u64], words_per_row: usize) -> Vec<u32> {
    words
        .chunks(words_per_row)
        .map(|r| r.iter().map(|w| w.count_ones()).sum())
        .collect()
}
