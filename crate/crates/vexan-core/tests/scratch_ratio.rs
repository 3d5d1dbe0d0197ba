// Temporary: per-case breakdown of the thm31_ratio growth.
use vexan_core::commutators::{commutator_j, lipschitz_norm, LipschitzNormKind};
use vexan_core::discretize::{BoxDomain, CubeFamily, GridFunction, UniformGrid};
use vexan_core::exponent::{delta_shift_const, harmonic_combine, ExponentField};
use vexan_core::harness::families::FunctionPool;
use vexan_core::norms::luxemburg_norm;
use vexan_core::operators::make_mollified_cz_kernel;

#[test]
#[ignore]
fn per_case() {
    let delta = 0.5;
    let p1 = ExponentField::constant(2.0, 1);
    let p2 = ExponentField::Bump {
        base: 2.0,
        height: 0.4,
        center: [0.0, 0.0],
        radius: 1.0,
        dim: 1,
    };
    let p = harmonic_combine(&[p1.clone(), p2.clone()]).unwrap();
    let q = delta_shift_const(&p, delta).unwrap();
    let mut pool = FunctionPool::new(1, 2.0, 11);
    let draws: Vec<_> = (0..4)
        .map(|_| (pool.draw_symbol(), pool.draw_test_fn(), pool.draw_test_fn()))
        .collect();
    for n in [24usize, 48, 96, 192] {
        let grid = UniformGrid::new(BoxDomain::new(1, 2.0).unwrap(), n).unwrap();
        let fam = CubeFamily::all(n);
        let k = make_mollified_cz_kernel(2, 1, 2.0 * grid.spacing()).unwrap();
        for (c, (db, d1, d2)) in draws.iter().enumerate() {
            let b = db.realize(&grid);
            let f1 = d1.realize(&grid);
            let f2 = d2.realize(&grid);
            let b_norm = lipschitz_norm(&b, &LipschitzNormKind::OscDelta { delta }, &fam).unwrap();
            let n1 = luxemburg_norm(&f1, &p1, 1e-10, None).unwrap().value;
            let n2 = luxemburg_norm(&f2, &p2, 1e-10, None).unwrap().value;
            let tb = commutator_j(&k, &b, 1, &[&f1, &f2]).unwrap();
            let nt = luxemburg_norm(&tb, &q, 1e-10, None).unwrap().value;
            println!(
                "N={n:4} case {c} ({}): ||Tb||={nt:.5} ||b||={b_norm:.5} n1={n1:.4} n2={n2:.4} ratio={:.5}",
                db.label(),
                nt / (b_norm * n1 * n2)
            );
        }
    }
}
