//! Merging two nonnegative vectors: a common generator when they lie on one
//! ray, otherwise an explicit lattice element with mixed signs.

use coherence_lab::int_lattice::{hnf, merge_pair, IntVector, PairMerge};

fn show(x: &[i64], y: &[i64]) {
    let (x, y) = (IntVector::from_i64(x), IntVector::from_i64(y));
    match merge_pair(&x, &y).unwrap() {
        PairMerge::Generator(c) => {
            println!("{x} and {y}: generated by {} = {}*x + {}*y", c.vector, c.x_coeff, c.y_coeff)
        }
        PairMerge::ConeViolation(c) => {
            println!("{x} and {y}: {} = {}*x + {}*y leaves the sign cone", c.vector, c.x_coeff, c.y_coeff)
        }
    }
}

fn main() {
    show(&[4, 6, 0], &[6, 9, 0]);
    show(&[2, 0], &[0, 3]);
    show(&[3, 1], &[5, 2]);

    let gens = [IntVector::from_i64(&[2, 4, 6]), IntVector::from_i64(&[3, 6, 9]), IntVector::from_i64(&[1, 0, 1])];
    println!("Hermite basis of the span:");
    for row in hnf(&gens).unwrap() {
        println!("  {row}");
    }
}
