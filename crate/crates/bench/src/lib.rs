//! Fixed inputs for the benchmarks.

use alexcover::covers::EquivariantComplex;
use alexcover::fox::{equivariant_complex_from_presentation, orbifold_presentation, OrbifoldData};
use alexcover::{LaurentMatrixZ, LaurentPolyZ};

pub fn orbifold_complex(g: usize, r: usize, mu: &[u64]) -> EquivariantComplex {
    let d = OrbifoldData::new(g, r, mu.to_vec()).unwrap();
    let pres = orbifold_presentation(&d).unwrap();
    equivariant_complex_from_presentation(&pres, &d.default_epimorphism()).unwrap()
}

/// A dense `n x n` Laurent matrix with small deterministic entries.
pub fn laurent_matrix(n: usize) -> LaurentMatrixZ {
    LaurentMatrixZ::from_fn(n, n, |i, j| {
        let a = ((i * 7 + j * 3) % 5) as i64 - 2;
        let b = ((i + 2 * j) % 3) as i64 - 1;
        LaurentPolyZ::from_i64s(-((i + j) as i64 % 2), &[a, b, 1])
    })
}
