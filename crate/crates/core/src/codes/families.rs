//! Small code families used as fixtures and as stand-ins for testable codes.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use super::{LinearCode, TensorLayout};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitWord};

/// The `[n, n-1]` single parity check code.
pub fn parity_code(n: usize) -> Result<LinearCode> {
    if n < 2 {
        return Err(Error::invalid(format!("parity code needs n >= 2, got {n}")));
    }
    LinearCode::from_parity_check(BitMatrix::from_rows(n, vec![BitWord::ones(n)])?)
}

/// The `[2^r - 1, 2^r - 1 - r]` Hamming code; column `j` of `H` is `j` in binary.
pub fn hamming_code(r: usize) -> Result<LinearCode> {
    if !(2..=15).contains(&r) {
        return Err(Error::invalid(format!("hamming code needs 2 <= r <= 15, got {r}")));
    }
    let n = (1usize << r) - 1;
    let rows = (0..r)
        .map(|bit| {
            let support: Vec<usize> = (1..=n).filter(|j| (j >> bit) & 1 == 1).collect();
            BitWord::from_support(n, &support)
        })
        .collect();
    LinearCode::from_parity_check(BitMatrix::from_rows(n, rows)?)
}

/// `rows` parity checks, each on `row_weight` distinct positions drawn
/// uniformly with a ChaCha8 stream seeded by `seed`.
pub fn random_ldpc(n: usize, rows: usize, row_weight: usize, seed: u64) -> Result<LinearCode> {
    if n < 2 {
        return Err(Error::invalid(format!("ldpc code needs n >= 2, got {n}")));
    }
    if row_weight == 0 || row_weight > n {
        return Err(Error::invalid(format!("row weight must lie in 1..={n}, got {row_weight}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = (0..rows)
        .map(|_| {
            let support: Vec<usize> = sample(&mut rng, n, row_weight).into_iter().map(|j| j + 1).collect();
            BitWord::from_support(n, &support)
        })
        .collect();
    LinearCode::from_parity_check(BitMatrix::from_rows(n, checks)?)
}

/// `a ⊗ b` on an `a.n() x b.n()` grid, flattened row-major: cell `(r, s)`
/// becomes position `(r-1)·b.n() + s`. Rows lie in `b`, columns in `a`.
pub fn tensor_product(a: &LinearCode, b: &LinearCode) -> Result<LinearCode> {
    let (na, nb) = (a.n(), b.n());
    let n = na * nb;
    let mut h = BitMatrix::empty(n);
    for r in 1..=na {
        for check in b.parity_check().row_iter() {
            let support: Vec<usize> = check.support().iter().map(|&s| (r - 1) * nb + s).collect();
            h.push_row(BitWord::from_support(n, &support))?;
        }
    }
    for s in 1..=nb {
        for check in a.parity_check().row_iter() {
            let support: Vec<usize> = check.support().iter().map(|&r| (r - 1) * nb + s).collect();
            h.push_row(BitWord::from_support(n, &support))?;
        }
    }
    let code = LinearCode::from_parity_check(h)?;
    debug_assert_eq!(code.k(), a.k() * b.k());
    Ok(code.with_tensor_layout(TensorLayout {
        rows: na,
        cols: nb,
        row_code: Arc::new(b.clone()),
        col_code: Arc::new(a.clone()),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_dimensions() {
        let c = parity_code(3).unwrap();
        assert_eq!((c.n(), c.k()), (3, 2));
        assert_eq!(c.codewords(1 << 10).unwrap().len(), 4);
        assert!(parity_code(1).is_err());
    }

    #[test]
    fn hamming_dimensions() {
        let c = hamming_code(3).unwrap();
        assert_eq!((c.n(), c.k()), (7, 4));
        let c = hamming_code(4).unwrap();
        assert_eq!((c.n(), c.k()), (15, 11));
        assert!(hamming_code(1).is_err());
    }

    #[test]
    fn ldpc_is_deterministic_per_seed() {
        let a = random_ldpc(20, 8, 4, 7).unwrap();
        let b = random_ldpc(20, 8, 4, 7).unwrap();
        assert_eq!(a.parity_check(), b.parity_check());
        assert_eq!(a.parity_check().rows(), 8);
        assert!(a.parity_check().row_iter().all(|r| r.weight() == 4));
        let c = random_ldpc(20, 8, 4, 8).unwrap();
        assert_ne!(a.parity_check(), c.parity_check());
        assert!(random_ldpc(5, 2, 6, 0).is_err());
        assert!(random_ldpc(5, 2, 0, 0).is_err());
    }

    #[test]
    fn tensor_dimension_is_a_product() {
        let a = parity_code(3).unwrap();
        let b = hamming_code(3).unwrap();
        let t = tensor_product(&a, &b).unwrap();
        assert_eq!((t.n(), t.k()), (21, 8));
        let layout = t.tensor_layout().unwrap();
        assert_eq!((layout.rows, layout.cols), (3, 7));
        assert_eq!(layout.row_positions(2), (8..=14).collect::<Vec<_>>());
        assert_eq!(layout.col_positions(2), vec![2, 9, 16]);
    }
}
