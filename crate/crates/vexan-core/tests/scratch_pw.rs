// Temporary: localize the pointwise_sharp ratio spike.
use vexan_core::commutators::{commutator_j, lipschitz_norm, LipschitzNormKind};
use vexan_core::discretize::{BoxDomain, CubeFamily, UniformGrid};
use vexan_core::exponent::ExponentField;
use vexan_core::harness::families::FunctionPool;
use vexan_core::maximal::{
    m_epsilon, multilinear_maximal, sharp_maximal_var_with, sharp_var_context, MaximalVariant,
};
use vexan_core::operators::{apply_multilinear, make_mollified_cz_kernel};

#[test]
#[ignore]
fn localize() {
    let p = ExponentField::LogPerturbed {
        base: 1.5,
        coeff: 0.4,
        dim: 1,
    };
    let (gamma, eta, beta) = (0.2, 0.4, 1.25);
    let mut pool = FunctionPool::new(1, 2.0, 11);
    let draws: Vec<_> = (0..2)
        .map(|_| {
            (
                pool.draw_symbol(),
                pool.draw_symbol(),
                pool.draw_smooth_fn(),
                pool.draw_smooth_fn(),
            )
        })
        .collect();
    let rho = 2.0 * 4.0 / 48.0; // anchored at N=48
    for n in [48usize, 96, 192] {
        let grid = UniformGrid::new(BoxDomain::new(1, 2.0).unwrap(), n).unwrap();
        let fam = CubeFamily::all(n);
        let ctx = sharp_var_context(&grid, &p, beta, &fam).unwrap();
        let k = make_mollified_cz_kernel(2, 1, rho).unwrap();
        for (fi, (db1, db2, df1, df2)) in draws.iter().enumerate() {
            let b = [db1.realize(&grid), db2.realize(&grid)];
            let f1 = df1.realize(&grid);
            let f2 = df2.realize(&grid);
            let fs = [&f1, &f2];
            let mll = multilinear_maximal(&fs, &MaximalVariant::MultiLlogL, &fam).unwrap();
            let t_all = apply_multilinear(&k, &fs).unwrap();
            let m_eta = m_epsilon(&t_all, eta, &fam).unwrap();
            for (j, bj) in b.iter().enumerate() {
                let b_norm =
                    lipschitz_norm(bj, &LipschitzNormKind::OscDeltaVar { beta, r: &p }, &fam)
                        .unwrap();
                if b_norm < 1e-12 {
                    println!("N={n} fam {fi} slot {} SKIP (b_norm={b_norm:.2e})", j + 1);
                    continue;
                }
                let tb = commutator_j(&k, bj, j + 1, &fs).unwrap();
                let sharp = sharp_maximal_var_with(&ctx, &tb, gamma).unwrap();
                let mut worst = 0.0;
                let mut at = 0;
                for i in 0..grid.node_count() {
                    let denom = b_norm * (m_eta.values()[i] + mll.values()[i]);
                    if denom > 0.0 {
                        let r = sharp.values()[i] / denom;
                        if r > worst {
                            worst = r;
                            at = i;
                        }
                    }
                }
                println!(
                    "N={n:4} fam {fi} slot {} ({}): max_ratio={worst:.6e} at node {at} (x={:.3}) b_norm={b_norm:.4} sharp={:.3e} denom_parts Meta={:.3e} MLL={:.3e} Tb_max={:.3e}",
                    j + 1,
                    db1.label(),
                    grid.node(at)[0],
                    sharp.values()[at],
                    m_eta.values()[at],
                    mll.values()[at],
                    tb.max_abs(),
                );
            }
        }
    }
}
