//! Exact squared Euclidean distance transform, one dimension at a time.
//!
//! The 1-D pass computes, for every output index `q`, the lower envelope of
//! the parabolas `f[p] + (q - p)^2`. Running it once per axis turns a seed
//! mask into an exact squared-distance field in any dimension.

pub const INF: f64 = f64::INFINITY;

/// One lower-envelope pass over `f`, writing the transformed row into `out`.
///
/// Only finite entries of `f` contribute parabolas, so rows containing
/// `INF` (no seed yet) are handled without special cases. `v` and `z` are
/// scratch buffers of length `f.len()` and `f.len() + 1`.
pub fn transform_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    debug_assert!(out.len() == n && v.len() >= n && z.len() >= n + 1);
    if n == 0 {
        return;
    }
    let mut k: isize = -1;
    for q in 0..n {
        if f[q] == INF {
            continue;
        }
        let mut s;
        loop {
            if k < 0 {
                s = -INF;
                break;
            }
            let p = v[k as usize];
            s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2 * q - 2 * p) as f64;
            if s <= z[k as usize] {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k as usize] = q;
        z[k as usize] = s;
        z[k as usize + 1] = INF;
    }
    if k < 0 {
        out[..n].fill(INF);
        return;
    }
    let mut j = 0usize;
    for q in 0..n {
        while z[j + 1] < q as f64 {
            j += 1;
        }
        let p = v[j];
        let d = q as f64 - p as f64;
        out[q] = f[p] + d * d;
    }
}

/// Exact squared distances (in cell units) from every cell of a 2-D grid to
/// the nearest seed cell. `seed[i]` true marks a source. Row-major layout,
/// `idx = y * width + x`. Cells with no reachable seed get `INF`.
pub fn squared_edt_2d(seed: &[bool], width: usize, height: usize) -> Vec<f64> {
    assert_eq!(seed.len(), width * height);
    let mut field: Vec<f64> = seed.iter().map(|&s| if s { 0.0 } else { INF }).collect();
    let n = width.max(height);
    let mut row = vec![0.0; n];
    let mut out = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];

    for y in 0..height {
        let base = y * width;
        row[..width].copy_from_slice(&field[base..base + width]);
        transform_1d(&row[..width], &mut out[..width], &mut v, &mut z);
        field[base..base + width].copy_from_slice(&out[..width]);
    }
    for x in 0..width {
        for y in 0..height {
            row[y] = field[y * width + x];
        }
        transform_1d(&row[..height], &mut out[..height], &mut v, &mut z);
        for y in 0..height {
            field[y * width + x] = out[y];
        }
    }
    field
}

/// Exact squared distances for a 3-D voxel grid, `idx = (z * dy + y) * dx + x`.
pub fn squared_edt_3d(seed: &[bool], dims: [usize; 3]) -> Vec<f64> {
    let [dx, dy, dz] = dims;
    assert_eq!(seed.len(), dx * dy * dz);
    let mut field: Vec<f64> = seed.iter().map(|&s| if s { 0.0 } else { INF }).collect();
    let n = dx.max(dy).max(dz);
    let mut line = vec![0.0; n];
    let mut out = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut zb = vec![0.0; n + 1];

    for z in 0..dz {
        for y in 0..dy {
            let base = (z * dy + y) * dx;
            line[..dx].copy_from_slice(&field[base..base + dx]);
            transform_1d(&line[..dx], &mut out[..dx], &mut v, &mut zb);
            field[base..base + dx].copy_from_slice(&out[..dx]);
        }
    }
    for z in 0..dz {
        for x in 0..dx {
            for y in 0..dy {
                line[y] = field[(z * dy + y) * dx + x];
            }
            transform_1d(&line[..dy], &mut out[..dy], &mut v, &mut zb);
            for y in 0..dy {
                field[(z * dy + y) * dx + x] = out[y];
            }
        }
    }
    for y in 0..dy {
        for x in 0..dx {
            for z in 0..dz {
                line[z] = field[(z * dy + y) * dx + x];
            }
            transform_1d(&line[..dz], &mut out[..dz], &mut v, &mut zb);
            for z in 0..dz {
                field[(z * dy + y) * dx + x] = out[z];
            }
        }
    }
    field
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_2d(seed: &[bool], w: usize, h: usize) -> Vec<f64> {
        let mut out = vec![INF; w * h];
        for y in 0..h {
            for x in 0..w {
                let mut best = INF;
                for sy in 0..h {
                    for sx in 0..w {
                        if seed[sy * w + sx] {
                            let d = (x as f64 - sx as f64).powi(2) + (y as f64 - sy as f64).powi(2);
                            best = best.min(d);
                        }
                    }
                }
                out[y * w + x] = best;
            }
        }
        out
    }

    #[test]
    fn matches_brute_force_on_scattered_seeds() {
        let (w, h) = (9, 7);
        let mut seed = vec![false; w * h];
        for &(x, y) in &[(0usize, 0usize), (8, 6), (4, 3), (2, 5)] {
            seed[y * w + x] = true;
        }
        let fast = squared_edt_2d(&seed, w, h);
        let slow = brute_force_2d(&seed, w, h);
        assert_eq!(fast, slow);
    }

    #[test]
    fn empty_seed_gives_infinite_field() {
        let field = squared_edt_2d(&[false; 12], 4, 3);
        assert!(field.iter().all(|&d| d == INF));
    }

    #[test]
    fn all_seeds_give_zero_field() {
        let field = squared_edt_2d(&[true; 12], 4, 3);
        assert!(field.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn three_d_single_seed_center() {
        let dims = [3, 3, 3];
        let mut seed = vec![false; 27];
        seed[(1 * 3 + 1) * 3 + 1] = true;
        let field = squared_edt_3d(&seed, dims);
        assert_eq!(field[(1 * 3 + 1) * 3 + 1], 0.0);
        assert_eq!(field[0], 3.0);
        assert_eq!(field[(1 * 3 + 1) * 3 + 0], 1.0);
        assert_eq!(field[(0 * 3 + 0) * 3 + 1], 2.0);
    }

    #[test]
    fn pseudo_random_grids_match_brute_force() {
        // Cheap xorshift so the test stays dependency-free.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..25 {
            let w = 1 + (next() % 12) as usize;
            let h = 1 + (next() % 12) as usize;
            let seed: Vec<bool> = (0..w * h).map(|_| next() % 4 == 0).collect();
            assert_eq!(squared_edt_2d(&seed, w, h), brute_force_2d(&seed, w, h));
        }
    }
}
