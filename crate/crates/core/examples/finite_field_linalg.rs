//! Rank, kernel and solving over F_p.

use coherence_lab::fp_linalg::FpMatrix;

fn main() {
    let m = FpMatrix::from_rows(5, &[vec![1, 2, 3, 4], vec![2, 4, 1, 3], vec![3, 1, 4, 2]]).unwrap();
    println!("rank {}", m.rank());
    for v in m.kernel_basis() {
        println!("kernel vector {v:?}");
    }
    let b = m.mul_vec(&[1, 1, 0, 0]).unwrap();
    println!("solve for {b:?}: {:?}", m.solve(&b).unwrap());
}
