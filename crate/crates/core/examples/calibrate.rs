//! Re-derives the orientation table at s = 2 - sqrt(3) and prints it with its hash.

use num_complex::Complex64;
use w9_core::calibration::{search_orientations, sha256_hex, CALIBRATION_SHA256, CALIBRATION_TOML};
use w9_core::periods::{HyperellipticCurve, Layout};
use w9_core::quadrature::QuadConfig;
use w9_core::reference;

fn main() -> w9_core::Result<()> {
    let quad = QuadConfig::default();
    let s = reference::s_three_square();
    let f3 = |x: f64| (x + 3f64.sqrt()) / (1.0 - 3f64.sqrt() * x);
    let (a, b, c) = (s * s, f3(f3(s)).powi(2), f3(s).powi(2));

    let genus2 = HyperellipticCurve::from_real(&[-1.0, 0.0, a, b, c])?;
    let r2 = search_orientations(
        &genus2,
        Layout::RealMCurveGenus2,
        1,
        reference::z1().matrix(),
        &quad,
        1e-6,
    )?;
    println!(
        "real_mcurve_genus2 {:?} residual {:.3e} matches {}",
        r2.signs, r2.residual, r2.matches
    );

    let mut pts: Vec<Complex64> = [a, b, c]
        .iter()
        .flat_map(|&x| {
            [
                Complex64::new(x.sqrt(), 0.0),
                Complex64::new(-x.sqrt(), 0.0),
            ]
        })
        .collect();
    pts.push(Complex64::new(0.0, 1.0));
    pts.push(Complex64::new(0.0, -1.0));
    let cover = HyperellipticCurve::new(pts)?;
    let r3 = search_orientations(
        &cover,
        Layout::CoverGenus3,
        2,
        reference::zhat1().matrix(),
        &quad,
        1e-6,
    )?;
    println!(
        "cover_genus3 {:?} residual {:.3e} matches {}",
        r3.signs, r3.residual, r3.matches
    );

    let elliptic = HyperellipticCurve::from_real(&[-1.0, 0.0, 1.0])?;
    let tau = w9_core::siegel::ComplexMatrix::from_rows(&[vec![Complex64::new(0.0, 1.0)]])?;
    let r1 = search_orientations(&elliptic, Layout::Elliptic, 1, &tau, &quad, 1e-6)?;
    println!(
        "elliptic {:?} residual {:.3e} matches {}",
        r1.signs, r1.residual, r1.matches
    );

    let shipped = sha256_hex(CALIBRATION_TOML);
    println!("shipped table hash {shipped} (recorded {CALIBRATION_SHA256})");
    Ok(())
}
