//! Splits a product into two paraproducts and a remainder and checks the
//! commutator `[Δ̇_j, a]b` against its expected `2^{-j}` gain.

use llb::lab::{FieldEnsembleSpec, Spectrum};
use llb::littlewood_paley::{block_commutator, paraproduct, remainder, DyadicPartition};
use llb::spectral::{product, Bilinear, Grid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::periodic(32)?;
    let p = DyadicPartition::build(grid)?;
    let spec = FieldEnsembleSpec::new(2, Spectrum::PowerLaw { alpha: 2.0 }, 1.0, 5).band_limited(8.0);
    let u = spec.sample_from_seed(&p, 1);
    let v = spec.sample_from_seed(&p, 2);

    let tuv = paraproduct(&u, &v, &p)?;
    let tvu = paraproduct(&v, &u, &p)?;
    let r = remainder(&u, &v, &p)?;
    let whole = product(&u, &v, Bilinear::Componentwise)?;
    let parts = &(&tuv + &tvu) + &r;
    println!("|T_u v| = {:.4e}  |T_v u| = {:.4e}  |R(u,v)| = {:.4e}", tuv.l2_norm(), tvu.l2_norm(), r.l2_norm());
    println!("decomposition error {:.2e}", (&parts - &whole).l2_norm() / whole.l2_norm());

    for j in 0..=p.j_max() - 1 {
        let c = block_commutator(&u, &v, j, &p)?;
        println!("j = {j}: |[Delta_j, u]v| = {:.4e}, times 2^j = {:.4e}", c.l2_norm(), c.l2_norm() * 2f64.powi(j));
    }
    Ok(())
}
