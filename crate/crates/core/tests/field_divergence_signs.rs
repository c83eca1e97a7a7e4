//! Sign structure of the on-cylinder field divergence along the bound-state
//! curves: E ∝ (−1)ⁿ·i/(4πδ₀·C·Δh), so the field is antisymmetric in Δh,
//! carries a family-dependent phase (imaginary on the Ψ⁺ curves, real on
//! Ψ⁻), and alternates sign between consecutive same-family bound states.
//! Checked near the zone edge where both parities exist.

use bicgrate_core::bound_states::find_continuum_c1;
use bicgrate_core::channels::BlochPoint;
use bicgrate_core::lattice_sums::ArrayConfig;
use bicgrate_core::scattering::{amplification_sweep, solve, Direction};
use num_complex::Complex64;

fn field_at(cfg: &ArrayConfig, kx: f64, n: u32, dh: f64) -> (Complex64, f64) {
    let recs = find_continuum_c1(cfg, kx, n).unwrap();
    let rec = recs
        .iter()
        .find(|r| r.indices == Some((n, None)))
        .unwrap_or_else(|| panic!("record n={n} missing"));
    let sweep = amplification_sweep(cfg, kx, n, &[dh]).unwrap();
    let at = cfg.with_half_gap(rec.h + dh);
    let pt = BlochPoint::new(sweep[0].k_r, kx);
    let sol = solve(&at, &pt, Direction::FromBelow).unwrap();
    (sol.e_right, sweep[0].predicted_e_abs)
}

#[test]
fn divergent_field_signs_follow_the_family_structure() {
    let cfg = ArrayConfig::new(0.1, 1.5, 0.0, 1.0).unwrap();
    let kx = 3.135; // close enough to the zone edge for the even family
    let dh = 1e-3;

    // antisymmetry in Δh and the family phase
    for (n, imaginary) in [(1u32, true), (2, false)] {
        let (e_plus, pred) = field_at(&cfg, kx, n, dh);
        let (e_minus, _) = field_at(&cfg, kx, n, -dh);
        assert!(
            (e_plus + e_minus).norm() < 5e-3 * e_plus.norm(),
            "n={n}: field not antisymmetric in Δh: {e_plus} vs {e_minus}"
        );
        let (big, small) = if imaginary {
            (e_plus.im.abs(), e_plus.re.abs())
        } else {
            (e_plus.re.abs(), e_plus.im.abs())
        };
        assert!(
            small < 1e-2 * big,
            "n={n}: wrong phase quadrant: {e_plus}"
        );
        assert!(
            (e_plus.norm() - pred).abs() < 5e-3 * pred,
            "n={n}: |E| = {} vs principal-part prediction {pred}",
            e_plus.norm()
        );
    }

    // consecutive members of the Ψ⁺ family alternate sign
    let (e1, _) = field_at(&cfg, kx, 1, dh);
    let (e3, _) = field_at(&cfg, kx, 3, dh);
    assert!(
        e1.im * e3.im < 0.0,
        "no sign alternation between n=1 and n=3: {e1} vs {e3}"
    );
}
