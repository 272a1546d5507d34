//! 3x3 same-padded cross-correlation on `[channel][row][col]` buffers.

use super::K;

/// Valid output range along one axis for kernel offset `d` in `-1..=1`.
#[inline]
fn span(n: usize, d: isize) -> (usize, usize) {
    ((-d).max(0) as usize, (n as isize - d.max(0)) as usize)
}

/// `out[o] = b[o] + sum_c w[o][c] * in[c]`.
pub fn forward(w: &[f64], b: &[f64], cin: usize, cout: usize, h: usize, wd: usize, input: &[f64], out: &mut [f64]) {
    let plane = h * wd;
    for o in 0..cout {
        let out_o = &mut out[o * plane..(o + 1) * plane];
        out_o.iter_mut().for_each(|x| *x = b[o]);
        for c in 0..cin {
            let in_c = &input[c * plane..(c + 1) * plane];
            for ky in 0..K {
                let dy = ky as isize - 1;
                let (y0, y1) = span(h, dy);
                for kx in 0..K {
                    let dx = kx as isize - 1;
                    let (x0, x1) = span(wd, dx);
                    let wv = w[((o * cin + c) * K + ky) * K + kx];
                    if wv == 0.0 {
                        continue;
                    }
                    for y in y0..y1 {
                        let sy = (y as isize + dy) as usize;
                        let src = &in_c[sy * wd + (x0 as isize + dx) as usize..sy * wd + (x1 as isize + dx) as usize];
                        let dst = &mut out_o[y * wd + x0..y * wd + x1];
                        for (d, s) in dst.iter_mut().zip(src) {
                            *d += wv * s;
                        }
                    }
                }
            }
        }
    }
}

/// Accumulate weight and bias gradients, and the input gradient when
/// `grad_in` is given (it is overwritten).
#[allow(clippy::too_many_arguments)]
pub fn backward(
    w: &[f64],
    cin: usize,
    cout: usize,
    h: usize,
    wd: usize,
    input: &[f64],
    grad_out: &[f64],
    grad_w: &mut [f64],
    grad_b: &mut [f64],
    mut grad_in: Option<&mut [f64]>,
) {
    let plane = h * wd;
    if let Some(g) = grad_in.as_deref_mut() {
        g[..cin * plane].iter_mut().for_each(|x| *x = 0.0);
    }
    for o in 0..cout {
        let g_o = &grad_out[o * plane..(o + 1) * plane];
        grad_b[o] += g_o.iter().sum::<f64>();
        for c in 0..cin {
            let in_c = &input[c * plane..(c + 1) * plane];
            for ky in 0..K {
                let dy = ky as isize - 1;
                let (y0, y1) = span(h, dy);
                for kx in 0..K {
                    let dx = kx as isize - 1;
                    let (x0, x1) = span(wd, dx);
                    let idx = ((o * cin + c) * K + ky) * K + kx;
                    let wv = w[idx];
                    let mut acc = 0.0;
                    for y in y0..y1 {
                        let sy = (y as isize + dy) as usize;
                        let s0 = sy * wd + (x0 as isize + dx) as usize;
                        let s1 = sy * wd + (x1 as isize + dx) as usize;
                        let g = &g_o[y * wd + x0..y * wd + x1];
                        acc += g.iter().zip(&in_c[s0..s1]).map(|(a, b)| a * b).sum::<f64>();
                        if let Some(gi) = grad_in.as_deref_mut() {
                            let dst = &mut gi[c * plane + s0..c * plane + s1];
                            for (d, gv) in dst.iter_mut().zip(g) {
                                *d += wv * gv;
                            }
                        }
                    }
                    grad_w[idx] += acc;
                }
            }
        }
    }
}
