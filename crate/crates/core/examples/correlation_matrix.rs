//! Jakes correlation over the port grid and its PSD square root.

use fris_covert::config::SystemConfig;
use fris_covert::surface::{correlation_matrix, inter_element_distance, psd_sqrt, reduce, PortSelection};

fn main() -> fris_covert::Result<()> {
    let geom = SystemConfig::default().geometry;
    println!(
        "{}x{} ports over {}λ x {}λ, λ = {} m, spacing {:.4} m",
        geom.m_x(),
        geom.m_z(),
        geom.w_x(),
        geom.w_z(),
        geom.wavelength(),
        geom.spacing_x()
    );

    let j = correlation_matrix(&geom)?;
    for k in [1, 2, 3, geom.m_x(), geom.m_x() + 1] {
        let d = inter_element_distance(&geom, 0, k)?;
        println!("J[0,{k:>2}] = {:+.6}  (d = {d:.4} m)", j.get(0, k));
    }
    println!("smallest eigenvalue: {:.3e}", j.min_eigenvalue());

    let root = psd_sqrt(j.matrix())?;
    let err = (&root * &root - j.matrix()).amax();
    println!("max |sqrt(J)^2 - J| = {err:.3e}");

    let preset = PortSelection::fixed_preset(&geom, 16)?;
    let jt = reduce(&j, &preset)?;
    println!("fixed 16-port preset {:?}", preset.indices());
    println!("tr(J~^2) = {:.4}", jt.matrix().norm_squared());
    Ok(())
}
