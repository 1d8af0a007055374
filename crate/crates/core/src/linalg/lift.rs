use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::sparse::SparseMat;
use super::LinalgError;

/// Chain-level Bockstein step: lift `x` to `[0, p)`, apply `d`, divide by `p^r`, reduce mod `p`.
///
/// Fails when some entry of `d·lift(x)` is not divisible by `p^r`.
pub fn lift_and_divide(x: &[u64], d: &SparseMat, p: u64, r: u32) -> Result<Vec<u64>, LinalgError> {
    if x.len() != d.cols() {
        return Err(LinalgError::DimensionMismatch {
            expected: d.cols(),
            got: x.len(),
        });
    }
    let lift: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v % p)).collect();
    let y = d.mul_vec(&lift)?;
    let pr = BigInt::from(p).pow(r);
    let bp = BigInt::from(p);
    y.into_iter()
        .enumerate()
        .map(|(row, v)| {
            if !(&v % &pr).is_zero() {
                return Err(LinalgError::NotDivisible { row, p, r });
            }
            let q = (v / &pr) % &bp;
            let q = if q < BigInt::zero() { q + &bp } else { q };
            Ok(q.to_u64().expect("residue fits"))
        })
        .collect()
}
