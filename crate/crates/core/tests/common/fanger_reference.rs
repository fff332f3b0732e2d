//! Second, independently written Fanger evaluator used as a test oracle.
//!
//! Solves the clothing-surface heat balance by bisection in °C instead of the
//! damped fixed-point iteration in Kelvin/100 used by the library.

pub fn pmv_reference(ta: f64, rh: f64, tr: f64, vel: f64, met: f64, clo: f64) -> f64 {
    let m = 58.15 * met;
    let icl = 0.155 * clo;
    // saturation pressure in kPa (ISO 7730 form), partial pressure in Pa
    let psat_kpa = (16.6536 - 4030.183 / (ta + 235.0)).exp();
    let pa = rh / 100.0 * psat_kpa * 1000.0;
    let fcl = if icl > 0.078 { 1.05 + 0.645 * icl } else { 1.0 + 1.29 * icl };
    let hc_forced = 12.1 * vel.sqrt();
    let hc_of = |tcl: f64| hc_forced.max(2.38 * (tcl - ta).abs().powf(0.25));

    let radiative = |tcl: f64| 3.96e-8 * fcl * ((tcl + 273.0).powi(4) - (tr + 273.0).powi(4));
    // tcl = 35.7 - 0.028 M - Icl * (radiative + convective)
    let residual = |tcl: f64| tcl - (35.7 - 0.028 * m - icl * (radiative(tcl) + fcl * hc_of(tcl) * (tcl - ta)));

    let (mut lo, mut hi) = (-40.0f64, 80.0f64);
    assert!(residual(lo) < 0.0 && residual(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let tcl = 0.5 * (lo + hi);
    let hc = hc_of(tcl);

    let skin_diffusion = 3.05e-3 * (5733.0 - 6.99 * m - pa);
    let sweating = if m > 58.15 { 0.42 * (m - 58.15) } else { 0.0 };
    let latent_resp = 1.7e-5 * m * (5867.0 - pa);
    let dry_resp = 0.0014 * m * (34.0 - ta);
    let load = m - skin_diffusion - sweating - latent_resp - dry_resp - radiative(tcl) - fcl * hc * (tcl - ta);
    let pmv = (0.303 * (-0.036 * m).exp() + 0.028) * load;
    pmv.clamp(-3.5, 3.5)
}

/// ISO 7730 published validation cases:
/// (ta, tr, vel, rh, met, clo, pmv).
pub const ISO_CASES: &[(f64, f64, f64, f64, f64, f64, f64)] = &[
    (22.0, 22.0, 0.1, 60.0, 1.2, 0.5, -0.75),
    (27.0, 27.0, 0.1, 60.0, 1.2, 0.5, 0.77),
    (27.0, 27.0, 0.3, 60.0, 1.2, 0.5, 0.44),
    (23.5, 25.5, 0.1, 60.0, 1.2, 0.5, -0.01),
    (23.5, 25.5, 0.3, 60.0, 1.2, 0.5, -0.55),
    (19.0, 19.0, 0.1, 40.0, 1.2, 1.0, -0.60),
    (23.5, 23.5, 0.3, 40.0, 1.2, 1.0, 0.12),
    (22.0, 22.0, 0.1, 60.0, 1.6, 0.5, 0.05),
    (27.0, 27.0, 0.1, 60.0, 1.6, 0.5, 1.17),
    (27.0, 27.0, 0.3, 60.0, 1.6, 0.5, 0.95),
];
