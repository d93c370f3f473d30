//! Row-major matrix kernels used by the layers. All accumulate into the
//! output buffer.

/// out[n×p] += a[n×m] · b[m×p]
pub(crate) fn matmul_acc(a: &[f64], b: &[f64], out: &mut [f64], n: usize, m: usize, p: usize) {
    debug_assert_eq!(a.len(), n * m);
    debug_assert_eq!(b.len(), m * p);
    debug_assert_eq!(out.len(), n * p);
    for i in 0..n {
        for l in 0..m {
            let a_il = a[i * m + l];
            if a_il == 0.0 {
                continue;
            }
            let b_row = &b[l * p..(l + 1) * p];
            let out_row = &mut out[i * p..(i + 1) * p];
            for (o, &b_lj) in out_row.iter_mut().zip(b_row) {
                *o += a_il * b_lj;
            }
        }
    }
}

/// out[m×p] += a[n×m]ᵀ · b[n×p]
pub(crate) fn matmul_at_b_acc(a: &[f64], b: &[f64], out: &mut [f64], n: usize, m: usize, p: usize) {
    debug_assert_eq!(a.len(), n * m);
    debug_assert_eq!(b.len(), n * p);
    debug_assert_eq!(out.len(), m * p);
    for i in 0..n {
        for l in 0..m {
            let a_il = a[i * m + l];
            if a_il == 0.0 {
                continue;
            }
            let b_row = &b[i * p..(i + 1) * p];
            let out_row = &mut out[l * p..(l + 1) * p];
            for (o, &b_ij) in out_row.iter_mut().zip(b_row) {
                *o += a_il * b_ij;
            }
        }
    }
}

/// out[n×m] += a[n×p] · b[m×p]ᵀ
pub(crate) fn matmul_a_bt_acc(a: &[f64], b: &[f64], out: &mut [f64], n: usize, m: usize, p: usize) {
    debug_assert_eq!(a.len(), n * p);
    debug_assert_eq!(b.len(), m * p);
    debug_assert_eq!(out.len(), n * m);
    for i in 0..n {
        let a_row = &a[i * p..(i + 1) * p];
        for l in 0..m {
            let b_row = &b[l * p..(l + 1) * p];
            let mut sum = 0.0;
            for (&x, &y) in a_row.iter().zip(b_row) {
                sum += x * y;
            }
            out[i * m + l] += sum;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_small_case() {
        // [1 2; 3 4] · [5 6; 7 8] = [19 22; 43 50]
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [5.0, 6.0, 7.0, 8.0];
        let mut out = [0.0; 4];
        matmul_acc(&a, &b, &mut out, 2, 2, 2);
        assert_eq!(out, [19.0, 22.0, 43.0, 50.0]);
    }

    #[test]
    fn transposed_variants_agree_with_explicit_transposes() {
        let a = [1.0, -2.0, 0.5, 3.0, 0.0, 4.0]; // 3×2
        let b = [2.0, 1.0, -1.0, 0.5, 3.0, -2.0]; // 3×2
                                                  // aᵀ·b: 2×2
        let mut out = [0.0; 4];
        matmul_at_b_acc(&a, &b, &mut out, 3, 2, 2);
        let mut expected = [0.0; 4];
        for i in 0..3 {
            for l in 0..2 {
                for j in 0..2 {
                    expected[l * 2 + j] += a[i * 2 + l] * b[i * 2 + j];
                }
            }
        }
        assert_eq!(out, expected);

        // a·bᵀ with a 3×2, b 3×2 → 3×3
        let mut out2 = [0.0; 9];
        matmul_a_bt_acc(&a, &b, &mut out2, 3, 3, 2);
        let mut expected2 = [0.0; 9];
        for i in 0..3 {
            for l in 0..3 {
                for j in 0..2 {
                    expected2[i * 3 + l] += a[i * 2 + j] * b[l * 2 + j];
                }
            }
        }
        assert_eq!(out2, expected2);
    }
}
