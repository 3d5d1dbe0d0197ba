//! Maximal-type operators: Hardy-Littlewood, powered variants, sharp
//! oscillation operators, Orlicz-average variants, and the multilinear
//! maximal functions.
//!
//! All suprema run over a finite [`CubeFamily`]; callers should use the same
//! family on both sides of an inequality so comparisons are like-for-like.
//! Every operator visits each cube once and distributes its value to the
//! covered cells with a max-reduction, which is order-insensitive.

use alloc::vec;
use alloc::vec::Vec;

use crate::discretize::{enumerate_cubes, Cube, CubeFamily, GridFunction, PrefixSums, UniformGrid};
use crate::exponent::{conjugate, exponent_bounds, ExponentField};
use crate::math;
use crate::norms::{char_norm, orlicz_of_values, YoungFunction, DEFAULT_NORM_TOL};
use crate::{Error, Result};

/// Tags for the operators of this module, used by experiment descriptors.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MaximalVariant {
    /// Hardy-Littlewood maximal operator.
    Hl,
    /// `M_eps f = [M(|f|^eps)]^{1/eps}`, `eps > 0`.
    MEps { eps: f64 },
    /// `M_{alpha, L log L} f = sup |Q|^{alpha/n} ||f||_{L log L, Q}`.
    MAlphaLlogL { alpha: f64 },
    /// Product of plain cube averages over the slots.
    MultiM,
    /// Product of `L^r` cube averages, `r > 1`.
    MultiMr { r: f64 },
    /// `L log L` average in slot `i` (1-based), plain averages elsewhere.
    MultiLlogLSlot { i: usize },
    /// Product of `L log L` averages over all slots.
    MultiLlogL,
}

/// Evaluate `cube_value` on every family cube and take, at each grid point,
/// the max over the cubes containing it. Cube values must be nonnegative.
fn sup_over_cubes(
    grid: &UniformGrid,
    fam: &CubeFamily,
    mut cube_value: impl FnMut(&Cube) -> f64,
) -> GridFunction {
    let mut out = vec![0.0f64; grid.node_count()];
    for q in enumerate_cubes(grid, fam) {
        let v = cube_value(&q);
        q.for_each_cell(grid, |i| {
            if v > out[i] {
                out[i] = v;
            }
        });
    }
    GridFunction::from_values(*grid, out).expect("sized to grid")
}

/// Hardy-Littlewood maximal function over the cube family.
pub fn hl_maximal(f: &GridFunction, fam: &CubeFamily) -> GridFunction {
    let grid = f.grid();
    let ps = PrefixSums::from_mapped(f, math::abs);
    sup_over_cubes(&grid, fam, |q| ps.cube_mean(q))
}

/// `M_eps f = [M(|f|^eps)]^{1/eps}`.
pub fn m_epsilon(f: &GridFunction, eps: f64, fam: &CubeFamily) -> Result<GridFunction> {
    if !(eps > 0.0) {
        return Err(Error::param("m_epsilon needs eps > 0"));
    }
    let powered = f.map(|v| math::powf(math::abs(v), eps));
    Ok(hl_maximal(&powered, fam).map(|v| math::powf(v, 1.0 / eps)))
}

/// `M_{alpha, L log L} f = sup_{Q \ni x} |Q|^{alpha/n} ||f||_{L log L, Q}`.
pub fn m_alpha_llogl(f: &GridFunction, alpha: f64, fam: &CubeFamily) -> Result<GridFunction> {
    let grid = f.grid();
    let n = grid.dim() as f64;
    if !(0.0..n).contains(&alpha) {
        return Err(Error::param("m_alpha_llogl needs 0 <= alpha < n"));
    }
    let mut buf: Vec<f64> = Vec::new();
    let mut status = Ok(());
    let out = sup_over_cubes(&grid, fam, |q| {
        buf.clear();
        q.for_each_cell(&grid, |i| buf.push(f.values()[i]));
        match orlicz_of_values(&buf, YoungFunction::LlogL, DEFAULT_NORM_TOL) {
            Ok(v) => math::powf(q.measure(&grid), alpha / n) * v,
            Err(e) => {
                status = Err(e);
                0.0
            }
        }
    });
    status.map(|_| out)
}

/// The delta-sharp maximal operator
/// `sup_{Q \ni x} |Q|^{-1 - delta/n} \int_Q |f - f_Q|`.
pub fn sharp_maximal(f: &GridFunction, delta: f64, fam: &CubeFamily) -> Result<GridFunction> {
    let grid = f.grid();
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::param("sharp_maximal needs 0 <= delta < 1"));
    }
    let n = grid.dim() as f64;
    let ps = PrefixSums::new(f);
    Ok(sup_over_cubes(&grid, fam, |q| {
        let mean = ps.cube_mean(q);
        let mut dev = 0.0;
        q.for_each_cell(&grid, |i| dev += math::abs(f.values()[i] - mean));
        let osc = dev / q.cell_count(&grid) as f64;
        osc * math::powf(q.measure(&grid), -delta / n)
    }))
}

/// Precomputed per-cube prefactors `|Q|^{1/beta - 1} ||chi_Q||_{p'}` for the
/// variable sharp maximal operator. Building this once and reusing it across
/// input functions avoids re-bisecting the characteristic-function norms,
/// which dominate the cost.
pub struct SharpVarContext {
    grid: UniformGrid,
    fam: CubeFamily,
    prefactors: Vec<f64>,
}

/// Build the per-cube prefactor table for [`sharp_maximal_var_with`].
pub fn sharp_var_context(
    grid: &UniformGrid,
    p: &ExponentField,
    beta: f64,
    fam: &CubeFamily,
) -> Result<SharpVarContext> {
    let bounds = exponent_bounds(p, grid);
    if !(beta > 1.0 && beta <= bounds.p_minus) {
        return Err(Error::param("sharp_maximal_var needs 1 < beta <= p_-"));
    }
    let p_conj = conjugate(p)?;
    let cubes = enumerate_cubes(grid, fam);
    let mut prefactors = Vec::with_capacity(cubes.len());
    for q in &cubes {
        let chi = char_norm(&p_conj, q, grid, DEFAULT_NORM_TOL)?;
        prefactors.push(math::powf(q.measure(grid), 1.0 / beta - 1.0) * chi);
    }
    Ok(SharpVarContext {
        grid: *grid,
        fam: *fam,
        prefactors,
    })
}

/// The variable sharp maximal operator with a prebuilt context.
pub fn sharp_maximal_var_with(
    ctx: &SharpVarContext,
    f: &GridFunction,
    gamma: f64,
) -> Result<GridFunction> {
    if f.grid() != ctx.grid {
        return Err(Error::DimensionMismatch("context built for a different grid".into()));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::param("sharp_maximal_var needs 0 < gamma <= 1"));
    }
    let grid = ctx.grid;
    let powered = f.map(|v| math::powf(math::abs(v), gamma));
    let ps = PrefixSums::new(&powered);
    let mut idx = 0;
    let out = sup_over_cubes(&grid, &ctx.fam, |q| {
        let prefactor = ctx.prefactors[idx];
        idx += 1;
        let mean = ps.cube_mean(q);
        let mut dev = 0.0;
        q.for_each_cell(&grid, |i| dev += math::abs(powered.values()[i] - mean));
        let osc = dev / q.cell_count(&grid) as f64;
        math::powf(osc, 1.0 / gamma) / prefactor
    });
    Ok(out)
}

/// The variable sharp maximal operator with gamma-oscillation:
/// `sup_{Q \ni x} [|Q|^{1/beta - 1} ||chi_Q||_{p'}]^{-1}
///   (|Q|^{-1} \int_Q | |f|^gamma - (|f|^gamma)_Q |)^{1/gamma}`.
///
/// `gamma = 1` recovers the plain variable sharp operator.
pub fn sharp_maximal_var(
    f: &GridFunction,
    p: &ExponentField,
    beta: f64,
    gamma: f64,
    fam: &CubeFamily,
) -> Result<GridFunction> {
    let ctx = sharp_var_context(&f.grid(), p, beta, fam)?;
    sharp_maximal_var_with(&ctx, f, gamma)
}

/// The multilinear maximal functions of the given variant.
///
/// All slots share one grid; the supremum per point runs over the common
/// cube family.
pub fn multilinear_maximal(
    fs: &[&GridFunction],
    variant: &MaximalVariant,
    fam: &CubeFamily,
) -> Result<GridFunction> {
    if fs.is_empty() {
        return Err(Error::param("multilinear_maximal needs at least one slot"));
    }
    let grid = fs[0].grid();
    if fs.iter().any(|f| f.grid() != grid) {
        return Err(Error::DimensionMismatch("slots on different grids".into()));
    }
    match variant {
        MaximalVariant::Hl | MaximalVariant::MEps { .. } | MaximalVariant::MAlphaLlogL { .. } => {
            return Err(Error::param("variant is not multilinear"));
        }
        MaximalVariant::MultiMr { r } if !(*r > 1.0) => {
            return Err(Error::param("multi_M_r needs r > 1"));
        }
        MaximalVariant::MultiLlogLSlot { i } if *i < 1 || *i > fs.len() => {
            return Err(Error::param("L log L slot out of range"));
        }
        _ => {}
    }

    let abs_sums: Vec<PrefixSums> = fs
        .iter()
        .map(|f| PrefixSums::from_mapped(f, math::abs))
        .collect();
    let pow_sums: Option<Vec<PrefixSums>> = match variant {
        MaximalVariant::MultiMr { r } => Some(
            fs.iter()
                .map(|f| PrefixSums::from_mapped(f, |v| math::powf(math::abs(v), *r)))
                .collect(),
        ),
        _ => None,
    };

    let mut buf: Vec<f64> = Vec::new();
    let mut status = Ok(());
    let out = sup_over_cubes(&grid, fam, |q| {
        let mut prod = 1.0;
        for j in 0..fs.len() {
            let factor = match variant {
                MaximalVariant::MultiM => abs_sums[j].cube_mean(q),
                MaximalVariant::MultiMr { r } => {
                    math::powf(pow_sums.as_ref().unwrap()[j].cube_mean(q), 1.0 / r)
                }
                MaximalVariant::MultiLlogLSlot { i } if j + 1 != *i => abs_sums[j].cube_mean(q),
                MaximalVariant::MultiLlogLSlot { .. } | MaximalVariant::MultiLlogL => {
                    buf.clear();
                    q.for_each_cell(&grid, |i| buf.push(fs[j].values()[i]));
                    match orlicz_of_values(&buf, YoungFunction::LlogL, DEFAULT_NORM_TOL) {
                        Ok(v) => v,
                        Err(e) => {
                            status = Err(e);
                            0.0
                        }
                    }
                }
                _ => unreachable!(),
            };
            prod *= factor;
        }
        prod
    });
    status.map(|_| out)
}
