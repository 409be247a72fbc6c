//! Pivot-blocked relaxation sweeps.
//!
//! The textbook sweep streams the whole distance matrix once per pivot `k`,
//! which makes it memory bound. Here a block of `b` consecutive pivots is
//! applied to each row while the row is hot:
//!
//! 1. Pivot row `k0 + t` is materialised in the state it has just before
//!    step `k0 + t`, by replaying steps `k0 .. k0 + t` on a copy.
//! 2. For every row `i` the multipliers `d[i][k0 + t]` seen at each step are
//!    replayed the same way on the `b` pivot columns.
//! 3. Each element `(i, j)` then runs the steps `k0 .. k0 + b` in order.
//!
//! Every element sees exactly the same sequence of additions and strict
//! comparisons as in the k-i-j loop, so distances and the intermediate
//! matrix come out bitwise identical. This requires a zero diagonal and no
//! negative cycles, which non-negative weights guarantee.

pub(crate) const BLOCK: usize = 32;

/// Pivot rows for one block, in row-major and in SIMD-packed layout.
struct Pivots {
    n: usize,
    b: usize,
    rows: Vec<f64>,
    /// `[col / 8][t][col % 8]`, only for full 8-column chunks.
    packed: Vec<f64>,
}

impl Pivots {
    fn new(n: usize, block: usize) -> Self {
        Pivots {
            n,
            b: 0,
            rows: vec![0.0; n * block],
            packed: vec![0.0; (n / 8) * 8 * block],
        }
    }

    fn row(&self, t: usize) -> &[f64] {
        &self.rows[t * self.n..(t + 1) * self.n]
    }

    fn load(&mut self, dist: &[f64], k0: usize, b: usize, pack: bool) {
        let n = self.n;
        self.b = b;
        for t in 0..b {
            let (done, rest) = self.rows.split_at_mut(t * n);
            let row = &mut rest[..n];
            row.copy_from_slice(&dist[(k0 + t) * n..(k0 + t + 1) * n]);
            for s in 0..t {
                let via = row[k0 + s];
                for (dst, &src) in row.iter_mut().zip(&done[s * n..(s + 1) * n]) {
                    let cand = via + src;
                    if cand < *dst {
                        *dst = cand;
                    }
                }
            }
        }
        if pack {
            for chunk in 0..n / 8 {
                for t in 0..b {
                    let dst = &mut self.packed[(chunk * b + t) * 8..(chunk * b + t + 1) * 8];
                    dst.copy_from_slice(&self.rows[t * n + chunk * 8..t * n + chunk * 8 + 8]);
                }
            }
        }
    }
}

/// `d[i][k0 + t]` as it stands just before step `k0 + t`, for every row.
fn multipliers(dist: &[f64], pivots: &Pivots, k0: usize, out: &mut [f64]) {
    let (n, b) = (pivots.n, pivots.b);
    let mut seg = [0.0f64; BLOCK];
    for (i, mult) in out.chunks_exact_mut(b).enumerate().take(n) {
        seg[..b].copy_from_slice(&dist[i * n + k0..i * n + k0 + b]);
        for t in 0..b {
            mult[t] = seg[t];
            let pivot = pivots.row(t);
            for u in t + 1..b {
                let cand = seg[t] + pivot[k0 + u];
                if cand < seg[u] {
                    seg[u] = cand;
                }
            }
        }
    }
}

/// Runs the steps of one block on columns `cols` of row `i`, one element at a time.
#[cfg_attr(not(target_arch = "x86_64"), allow(dead_code))]
fn relax_scalar(
    dist: &mut [f64],
    via: &mut [u32],
    pivots: &Pivots,
    mult: &[f64],
    k0: usize,
    i: usize,
    cols: std::ops::Range<usize>,
) {
    let n = pivots.n;
    for j in cols {
        let mut best = dist[i * n + j];
        let mut mid = via[i * n + j];
        for (t, &m) in mult.iter().enumerate() {
            let cand = m + pivots.rows[t * n + j];
            if cand < best {
                best = cand;
                mid = (k0 + t + 1) as u32;
            }
        }
        dist[i * n + j] = best;
        via[i * n + j] = mid;
    }
}

fn sweep_portable(dist: &mut [f64], via: &mut [u32], pivots: &Pivots, mults: &[f64], k0: usize) {
    let (n, b) = (pivots.n, pivots.b);
    for ((row, row_via), mult) in dist
        .chunks_exact_mut(n)
        .zip(via.chunks_exact_mut(n))
        .zip(mults.chunks_exact(b))
    {
        for (t, &m) in mult.iter().enumerate() {
            let k = (k0 + t + 1) as u32;
            for ((d, p), &pv) in row.iter_mut().zip(row_via.iter_mut()).zip(pivots.row(t)) {
                let cand = m + pv;
                let better = cand < *d;
                *d = if better { cand } else { *d };
                *p = if better { k } else { *p };
            }
        }
    }
}

#[cfg(target_arch = "x86_64")]
mod avx512 {
    use super::{relax_scalar, Pivots};
    use std::arch::x86_64::*;

    pub(super) fn available() -> bool {
        is_x86_feature_detected!("avx512f") && is_x86_feature_detected!("avx512vl")
    }

    /// Updates an `R x 16` tile starting at `(i0, j)` with every step of the block.
    ///
    /// # Safety
    /// Requires AVX-512F/VL, `i0 + R <= n`, `j + 16 <= n` and `j % 8 == 0`.
    #[target_feature(enable = "avx512f,avx512vl")]
    unsafe fn tile<const R: usize>(
        dist: *mut f64,
        via: *mut u32,
        pivots: &Pivots,
        mults: &[f64],
        k0: usize,
        i0: usize,
        j: usize,
    ) {
        let (n, b) = (pivots.n, pivots.b);
        let lo = pivots.packed.as_ptr().add((j / 8) * b * 8);
        let hi = lo.add(b * 8);
        let mut d = [[_mm512_setzero_pd(); 2]; R];
        let mut p = [[_mm256_setzero_si256(); 2]; R];
        for r in 0..R {
            let base = (i0 + r) * n + j;
            for u in 0..2 {
                d[r][u] = _mm512_loadu_pd(dist.add(base + 8 * u));
                p[r][u] = _mm256_loadu_si256(via.add(base + 8 * u) as *const __m256i);
            }
        }
        // running pointers keep index arithmetic out of the step loop
        let mut m_ptr = [mults.as_ptr(); R];
        for (r, ptr) in m_ptr.iter_mut().enumerate() {
            *ptr = ptr.add((i0 + r) * b);
        }
        let (mut lo_t, mut hi_t) = (lo, hi);
        let mut k = _mm256_set1_epi32(k0 as i32);
        let one = _mm256_set1_epi32(1);
        for _ in 0..b {
            k = _mm256_add_epi32(k, one);
            let piv = [_mm512_loadu_pd(lo_t), _mm512_loadu_pd(hi_t)];
            lo_t = lo_t.add(8);
            hi_t = hi_t.add(8);
            for r in 0..R {
                let m = _mm512_set1_pd(*m_ptr[r]);
                m_ptr[r] = m_ptr[r].add(1);
                for u in 0..2 {
                    let cand = _mm512_add_pd(m, piv[u]);
                    let better = _mm512_cmp_pd_mask(cand, d[r][u], _CMP_LT_OQ);
                    d[r][u] = _mm512_mask_blend_pd(better, d[r][u], cand);
                    p[r][u] = _mm256_mask_blend_epi32(better, p[r][u], k);
                }
            }
        }
        for r in 0..R {
            let base = (i0 + r) * n + j;
            for u in 0..2 {
                _mm512_storeu_pd(dist.add(base + 8 * u), d[r][u]);
                _mm256_storeu_si256(via.add(base + 8 * u) as *mut __m256i, p[r][u]);
            }
        }
    }

    /// # Safety
    /// Requires AVX-512F/VL; `dist` and `via` must be `n * n` long.
    #[target_feature(enable = "avx512f,avx512vl")]
    pub(super) unsafe fn sweep(
        dist: &mut [f64],
        via: &mut [u32],
        pivots: &Pivots,
        mults: &[f64],
        k0: usize,
    ) {
        let (n, b) = (pivots.n, pivots.b);
        assert!(dist.len() == n * n && via.len() == n * n && mults.len() >= n * b);
        let wide = n - n % 16;
        let dp = dist.as_mut_ptr();
        let pp = via.as_mut_ptr();
        let mut i = 0;
        while i + 4 <= n {
            for j in (0..wide).step_by(16) {
                tile::<4>(dp, pp, pivots, mults, k0, i, j);
            }
            i += 4;
        }
        while i < n {
            for j in (0..wide).step_by(16) {
                tile::<1>(dp, pp, pivots, mults, k0, i, j);
            }
            i += 1;
        }
        if wide < n {
            for i in 0..n {
                relax_scalar(
                    dist,
                    via,
                    pivots,
                    &mults[i * b..(i + 1) * b],
                    k0,
                    i,
                    wide..n,
                );
            }
        }
    }
}

/// Whether the vectorised sweep can run on this CPU.
pub(crate) fn simd_available() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        avx512::available()
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

pub(crate) fn run_blocked(n: usize, dist: &mut [f64], via: &mut [u32], simd: bool) {
    let simd = simd && simd_available();
    let block = BLOCK.min(n);
    let mut pivots = Pivots::new(n, block);
    let mut mults = vec![0.0; n * block];
    let mut k0 = 0;
    while k0 < n {
        let b = block.min(n - k0);
        pivots.load(dist, k0, b, simd);
        multipliers(dist, &pivots, k0, &mut mults[..n * b]);
        let mults = &mults[..n * b];
        #[cfg(target_arch = "x86_64")]
        if simd {
            // SAFETY: simd_available() confirmed the features; buffers are n * n.
            unsafe { avx512::sweep(dist, via, &pivots, mults, k0) };
            k0 += b;
            continue;
        }
        sweep_portable(dist, via, &pivots, mults, k0);
        k0 += b;
    }
}
