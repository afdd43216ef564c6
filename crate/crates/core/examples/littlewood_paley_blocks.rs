use llb::lab::{FieldEnsembleSpec, Spectrum};
use llb::littlewood_paley::{
    besov_norm, block_l2_norms, chi, dyadic_block, phi, sobolev_norm, BesovParams, DyadicPartition,
};
use llb::spectral::{Grid, SpectralField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for r in [0.5, 0.75, 1.0, 4.0 / 3.0, 2.0, 8.0 / 3.0] {
        println!("chi({r:.3}) = {:.6}  phi({r:.3}) = {:.6}", chi(r), phi(r));
    }

    let grid = Grid::periodic(32)?;
    let p = DyadicPartition::build(grid)?;
    println!("blocks j = {}..={}, partition residual {:.1e}", p.j_min(), p.j_max(), p.homogeneous_residual());

    let u = FieldEnsembleSpec::new(1, Spectrum::PowerLaw { alpha: 2.0 }, 1.0, 17).sample_from_seed(&p, 17);
    for (j, n) in p.indices().zip(block_l2_norms(&u, &p)) {
        println!("  |Delta_{j:>2} u|_L2 = {n:.6e}");
    }

    let mut sum = SpectralField::zeros(grid);
    for j in p.indices() {
        sum = &sum + &dyadic_block(&u, j, &p)?;
    }
    println!("reconstruction error {:.2e}", (&sum - &u.without_mean()).l2_norm() / u.l2_norm());

    let b = besov_norm(&u, BesovParams::homogeneous(1.5, 2.0, 1.0), &p)?;
    let b2 = besov_norm(&u, BesovParams::homogeneous(1.5, 2.0, 2.0), &p)?;
    let h = sobolev_norm(&u, 1.5, true)?;
    println!("B^(3/2)_(2,1) = {:.6e}, B^(3/2)_(2,2) = {:.6e}, H^(3/2) = {:.6e}", b.value, b2.value, h.value);
    println!("{}", serde_json::to_string(&b)?);
    Ok(())
}
